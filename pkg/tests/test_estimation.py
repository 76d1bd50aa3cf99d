from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paretogof.errors import (
    DatasetIOError,
    DegenerateSampleError,
    EmptySampleError,
    SampleValidationError,
)
from paretogof.estimation import (
    LIV_THRESHOLD,
    Sample,
    bundled_path,
    load_dataset,
    mle_alpha,
    power_transform,
    preprocess_threshold,
    read_values,
)

samples = st.lists(st.floats(1.0, 1e6, allow_nan=False), min_size=2, max_size=40).filter(
    lambda v: any(x > 1.0 for x in v)
)


def test_mle_hand_values():
    e = math.e
    assert mle_alpha([e, e, e]).alpha_hat == pytest.approx(1.0, rel=1e-15)
    assert mle_alpha([e * e, e * e]).alpha_hat == pytest.approx(0.5, rel=1e-15)


def test_mle_all_ones_is_degenerate():
    with pytest.raises(DegenerateSampleError):
        mle_alpha([1.0, 1.0, 1.0])


def test_liv_dataset(liv):
    assert liv.n == 22
    assert mle_alpha(liv).alpha_hat == pytest.approx(1.428, abs=1e-3)


def test_airplane_dataset(airplane):
    assert airplane.n == 30
    assert airplane.values.min() == 1.0
    assert mle_alpha(airplane).alpha_hat == pytest.approx(0.30, abs=5e-3)
    same = preprocess_threshold(airplane.values, 1.0)
    assert np.array_equal(same.values, airplane.values)


def test_liv_raw_has_22_values_above_threshold():
    raw = read_values(bundled_path("liv_golf_2022"))
    assert raw.size == 75
    assert np.count_nonzero(raw >= LIV_THRESHOLD) == 22


def test_threshold_selection_and_scaling():
    s = preprocess_threshold([7, 3, 14], 7)
    assert list(s.values) == [1.0, 2.0]


def test_threshold_that_removes_everything():
    with pytest.raises(EmptySampleError):
        preprocess_threshold([1, 2, 3], 10)


@pytest.mark.parametrize("bad", [[], [0.5, 2.0], [1.0, np.inf], [np.nan, 2.0]])
def test_sample_validation(bad):
    with pytest.raises((EmptySampleError, SampleValidationError)):
        Sample(bad)


def test_sample_is_read_only():
    s = Sample([3.0, 1.0, 2.0])
    assert list(s.sorted) == [1.0, 2.0, 3.0]
    with pytest.raises(ValueError):
        s.values[0] = 5.0


@given(samples, st.floats(0.1, 1e4))
def test_threshold_scale_equivariance(values, c):
    raw = np.asarray(values) * 3.0
    a = preprocess_threshold(raw, 3.0)
    b = preprocess_threshold(raw * c, 3.0 * c)
    assert np.allclose(a.values, b.values, rtol=1e-14, atol=0)


@given(samples, st.floats(0.2, 5.0))
def test_mle_power_transform(values, c):
    x = np.asarray(values)
    a = mle_alpha(x).alpha_hat
    b = mle_alpha(x ** (1.0 / c)).alpha_hat
    assert b == pytest.approx(c * a, rel=1e-9)


@given(samples, st.randoms())
@settings(max_examples=50)
def test_mle_permutation_invariant(values, r):
    shuffled = list(values)
    r.shuffle(shuffled)
    assert mle_alpha(shuffled).alpha_hat == pytest.approx(mle_alpha(values).alpha_hat, rel=1e-12)


def test_power_transform_gives_unit_shape(liv):
    y = power_transform(liv)
    assert mle_alpha(y).alpha_hat == pytest.approx(1.0, rel=1e-12)


def test_read_values_reports_bad_line(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("# header\n1.5\n2,000\nabc\n")
    with pytest.raises(DatasetIOError) as info:
        read_values(p)
    assert info.value.line == 4


def test_read_values_handles_comments_and_separators(tmp_path):
    p = tmp_path / "ok.txt"
    p.write_text("# comment\n\n1,500,000  # inline\n2\n")
    assert list(read_values(p)) == [1_500_000.0, 2.0]


def test_missing_file():
    with pytest.raises(DatasetIOError):
        load_dataset("/nonexistent/file.txt")


def test_load_does_not_modify_file(tmp_path):
    p = tmp_path / "d.txt"
    p.write_text("3\n4\n5\n")
    before = p.read_bytes()
    load_dataset(p, 3.0)
    assert p.read_bytes() == before
