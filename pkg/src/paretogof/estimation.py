"""Samples on [1, inf), the shape MLE, and dataset preprocessing."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (
    DatasetIOError,
    DegenerateSampleError,
    EmptySampleError,
    SampleValidationError,
)

BUNDLED_DATASETS = {
    "liv_golf_2022": "liv_golf_2022.txt",
    "airplane": "airplane.txt",
}

# Threshold used for the LIV golf earnings illustration.
LIV_THRESHOLD = 3_500_000.0


@dataclass(frozen=True, eq=False)
class Sample:
    """Validated observations on the standard Pareto support [1, inf).

    Parameters
    ----------
    values : array_like
        Observations in their original order.

    Attributes
    ----------
    values : ndarray
        Read-only float64 copy of the observations.
    sorted : ndarray
        Read-only ascending view used by order-statistic formulas.
    """

    values: np.ndarray
    sorted: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        x = np.array(self.values, dtype=float).ravel()
        if x.size == 0:
            raise EmptySampleError("sample is empty")
        if not np.all(np.isfinite(x)):
            raise SampleValidationError("sample contains non-finite values")
        if np.any(x < 1.0):
            raise SampleValidationError(
                f"sample values must be >= 1 (minimum is {x.min():.6g}); rescale by the threshold first"
            )
        x.setflags(write=False)
        s = np.sort(x)
        s.setflags(write=False)
        object.__setattr__(self, "values", x)
        object.__setattr__(self, "sorted", s)

    @property
    def n(self):
        return self.values.size

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def as_sample(data):
    """Coerce array-likes to :class:`Sample`; samples pass through unchanged."""
    return data if isinstance(data, Sample) else Sample(data)


@dataclass(frozen=True)
class MleResult:
    alpha_hat: float
    n: int
    sum_log: float


def mle_alpha(sample):
    """Maximum-likelihood estimate of the Pareto shape with unit scale.

    ``alpha_hat = n / sum(log x_i)``.

    Raises
    ------
    DegenerateSampleError
        If every observation equals 1, so that the log-sum vanishes.
    """
    x = as_sample(sample).values
    sum_log = float(np.sum(np.log(x)))
    if not sum_log > 0.0:
        raise DegenerateSampleError("all observations equal 1; the shape MLE is undefined")
    return MleResult(alpha_hat=x.size / sum_log, n=int(x.size), sum_log=sum_log)


def alpha_hat(x):
    """Shape MLE of a raw float array, without validation (hot-path helper)."""
    sum_log = float(np.sum(np.log(x)))
    if not sum_log > 0.0:
        raise DegenerateSampleError("all observations equal 1; the shape MLE is undefined")
    return x.size / sum_log


def preprocess_threshold(raw, threshold):
    """Keep values ``>= threshold`` and divide them by it.

    The result lives on [1, inf) and is returned as a :class:`Sample`.
    """
    threshold = float(threshold)
    if not (threshold > 0.0 and math.isfinite(threshold)):
        raise SampleValidationError(f"threshold must be a positive finite number, got {threshold}")
    raw = np.asarray(raw, dtype=float).ravel()
    kept = raw[raw >= threshold]
    if kept.size == 0:
        raise EmptySampleError(f"no values reach the threshold {threshold:g}")
    return Sample(kept / threshold)


def power_transform(sample, alpha=None):
    """Map ``x -> x**alpha`` (alpha defaults to the MLE); unit-Pareto under the fitted null."""
    s = as_sample(sample)
    a = mle_alpha(s).alpha_hat if alpha is None else float(alpha)
    return Sample(s.values ** a)


def read_values(path):
    """Read a one-value-per-line text file; ``#`` starts a comment.

    Thousands separators (``33,509,017``) are accepted.  Unparsable lines raise
    :class:`DatasetIOError` carrying the 1-based line number.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DatasetIOError(f"cannot read dataset {path}: {exc.strerror or exc}", path=str(path)) from exc
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        try:
            values.append(float(content.replace(",", "").replace("_", "")))
        except ValueError:
            raise DatasetIOError(
                f"{path}:{lineno}: cannot parse {content!r} as a number", path=str(path), line=lineno
            ) from None
    return np.array(values, dtype=float)


def bundled_path(name):
    """Filesystem path of a dataset shipped with the package."""
    fname = BUNDLED_DATASETS.get(name, name)
    return Path(str(resources.files("paretogof") / "data" / fname))


def load_dataset(path, threshold=None):
    """Read a dataset file and return it as a :class:`Sample`.

    Without a threshold the values must already satisfy the sample invariants.
    """
    raw = read_values(path)
    if raw.size == 0:
        raise EmptySampleError(f"dataset {path} contains no values")
    if threshold is None:
        return Sample(raw)
    return preprocess_threshold(raw, threshold)
