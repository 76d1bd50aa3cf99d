"""Test identifiers shared by the bootstrap engine and the command line.

A token names one statistic: ``ds1``, ``ds2``, ``ds3``, ``ds1z`` (the
bootstrap-free standardized DS1), ``ds2:coarse`` (sup over the 0.01 s-grid)
or any competitor token such as ``ks`` or ``s1:3:2``.  Each resolves to a
:class:`TestDef` that evaluates a whole batch of samples at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .competitors import ABSOLUTE, TWO_SIDED, UPPER, CompetitorKind
from .errors import DegenerateSampleError, ParameterDomainError, UnknownTestError
from .estimation import as_sample
from .stein import COARSE_SUP, DEFAULT_SUP, SupSearchConfig

SIDEDNESS = (UPPER, TWO_SIDED, ABSOLUTE)


def _row_alphas(X):
    sl = np.log(X).sum(axis=1)
    if np.any(sl <= 0.0):
        raise DegenerateSampleError("a sample has zero log-sum (all values equal to 1)")
    return X.shape[1] / sl


@dataclass(frozen=True)
class TestDef:
    """A resolved test.

    Attributes
    ----------
    token : str
        Canonical token, accepted back by :func:`parse_test`.
    label : str
        Column label for reports.
    sidedness : {"upper", "two-sided", "absolute"}
        How the bootstrap engine turns the null distribution into a decision.
    batch : callable
        ``batch(X) -> ndarray`` with one raw sample per row of ``X``.
    asymptotic : bool
        True for the standardized DS1 test, which is referred to N(0, 1)
        instead of a bootstrap distribution.
    """

    __test__ = False  # not a pytest class

    token: str
    label: str
    sidedness: str
    batch: Callable[[np.ndarray], np.ndarray]
    asymptotic: bool = False
    competitor: Optional[CompetitorKind] = None

    def evaluate(self, sample):
        return float(self.evaluate_batch(as_sample(sample).values[None, :])[0])

    def evaluate_batch(self, X):
        X = np.ascontiguousarray(X, dtype=float)
        if X.ndim != 2:
            raise ParameterDomainError("evaluate_batch expects a 2-D array of samples")
        _row_alphas(X)
        return np.asarray(self.batch(X), dtype=float)


def _competitor_batch(kind):
    f = kind.kernel()

    def batch(X):
        xs = np.sort(X, axis=1)
        alphas = _row_alphas(X)
        return np.array([f(row, a) for row, a in zip(xs, alphas)])

    return batch


def _ds2_batch(cfg):
    def batch(X):
        return kernels.ds2_batch(
            X, int(cfg.grid_points), int(cfg.refine_iterations), float(cfg.endpoint_epsilon), cfg.scale == "log_t"
        )

    return batch


def _ds1z_batch(X):
    n = X.shape[1]
    a = _row_alphas(X)
    scale = (1.0 + a) ** 2 * np.sqrt(n * (2.0 + a) ** 3 / (a * (2.0 + (2.0 * a + a * a) * (5.0 + 8.0 * a + 4.0 * a * a))))
    return scale * kernels.ds1_batch(X)


def parse_test(token, sup=None):
    """Resolve a test token.

    Parameters
    ----------
    token : str
    sup : SupSearchConfig, optional
        Sup search used by plain ``ds2`` (default :data:`~paretogof.stein.DEFAULT_SUP`).
    """
    t = token.strip().lower()
    if t == "ds1":
        return TestDef("ds1", "DS1", TWO_SIDED, kernels.ds1_batch)
    if t == "ds1z":
        return TestDef("ds1z", "DS1z", TWO_SIDED, _ds1z_batch, asymptotic=True)
    if t == "ds3":
        return TestDef("ds3", "DS3", UPPER, kernels.ds3_batch)
    if t == "ds2":
        cfg = sup or DEFAULT_SUP
        if not isinstance(cfg, SupSearchConfig):
            raise TypeError("sup must be a SupSearchConfig")
        return TestDef("ds2", "DS2", UPPER, _ds2_batch(cfg))
    if t == "ds2:coarse":
        return TestDef("ds2:coarse", "DS2(grid)", UPPER, _ds2_batch(COARSE_SUP))
    try:
        kind = CompetitorKind.parse(t)
    except UnknownTestError:
        raise UnknownTestError(f"unknown test token {token!r}") from None
    return TestDef(kind.token, kind.label, kind.sidedness, _competitor_batch(kind), competitor=kind)


def parse_tests(tokens, sup=None):
    """Parse a comma-separated string or an iterable of tokens."""
    if isinstance(tokens, str):
        tokens = [t for t in tokens.split(",") if t.strip()]
    out = [parse_test(t, sup) for t in tokens]
    if not out:
        raise ParameterDomainError("no tests given")
    return out


DS_TOKENS = ("ds1", "ds2", "ds3")
TABLE_TOKENS = (
    "tn", "ks", "cm", "ad", "g:2", "m:2", "i:2",
    "s1:3:2", "s2:3:2", "t1:3:2", "t2:3:2", "ds1", "ds2", "ds3",
)


def normal_two_sided_p(z):
    return math.erfc(abs(z) / math.sqrt(2.0))
