"""Competitor goodness-of-fit statistics for the composite Pareto null.

Every statistic plugs in the shape MLE and is computed from the order
statistics, so all of them are invariant under permutation of the sample.
Public functions take a :class:`~paretogof.estimation.Sample`; the
underscore-prefixed kernels take a sorted float array plus the fitted shape
and skip validation (the bootstrap engine calls those directly).
"""
from __future__ import annotations

import functools
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DegenerateSampleError, ParameterDomainError, UnknownTestError
from .estimation import as_sample, mle_alpha

PROB_CLAMP = 1e-10

# Instrumentation: how often a probability had to be clamped or a log term dropped.
CLAMP_EVENTS = Counter()


def reset_clamp_events():
    CLAMP_EVENTS.clear()


def _fitted_cdf(xs, a):
    return -np.expm1(-a * np.log(xs))


def _clamped(F, where):
    lo, hi = PROB_CLAMP, 1.0 - PROB_CLAMP
    hits = int(np.count_nonzero((F < lo) | (F > hi)))
    if hits:
        CLAMP_EVENTS[where] += hits
    return np.clip(F, lo, hi)


def _prep(sample):
    s = as_sample(sample)
    return s.sorted, mle_alpha(s).alpha_hat


# ----------------------------------------------------------------------------
# EDF statistics
# ----------------------------------------------------------------------------

def _ks(xs, a):
    n = xs.size
    F = _fitted_cdf(xs, a)
    j = np.arange(1, n + 1)
    return float(max(np.max(j / n - F), np.max(F - (j - 1) / n)))


def _cm(xs, a):
    n = xs.size
    F = _fitted_cdf(xs, a)
    j = np.arange(1, n + 1)
    return float(1.0 / (12.0 * n) + np.sum((F - (2 * j - 1) / (2.0 * n)) ** 2))


def _ad(xs, a):
    # Summands whose logarithm is undefined (F = 0 at x = 1, or F = 1) are dropped.
    n = xs.size
    F = _fitted_cdf(xs, a)
    j = np.arange(1, n + 1)
    with np.errstate(divide="ignore"):
        terms = (2 * j - 1) * (np.log(F) + np.log1p(-F[::-1]))
    finite = np.isfinite(terms)
    if not finite.all():
        CLAMP_EVENTS["ad"] += int(np.count_nonzero(~finite))
    return float(-n - np.sum(terms[finite]) / n)


def edf_tests(sample, tag):
    """Kolmogorov-Smirnov, Cramer-von Mises or Anderson-Darling distance to P(alpha_hat).

    Parameters
    ----------
    sample : Sample or array_like
    tag : {"KS", "CM", "AD"}
    """
    xs, a = _prep(sample)
    fn = {"KS": _ks, "CM": _cm, "AD": _ad}.get(tag.upper())
    if fn is None:
        raise ParameterDomainError(f"unknown EDF test {tag!r}")
    return fn(xs, a)


# ----------------------------------------------------------------------------
# Zhang's likelihood-ratio statistics
# ----------------------------------------------------------------------------

def _za(xs, a):
    n = xs.size
    F = _clamped(_fitted_cdf(xs, a), "zhang")
    j = np.arange(1, n + 1)
    return float(-np.sum(np.log(F) / (n - j + 0.5) + np.log1p(-F) / (j - 0.5)))


def _zb(xs, a):
    n = xs.size
    F = _clamped(_fitted_cdf(xs, a), "zhang")
    j = np.arange(1, n + 1)
    return float(np.sum(np.log((1.0 / F - 1.0) / ((n - 0.5) / (j - 0.75) - 1.0)) ** 2))


def _zc(xs, a):
    n = xs.size
    F = _clamped(_fitted_cdf(xs, a), "zhang")
    j = np.arange(1, n + 1)
    first = np.sum(n * (j - 0.5) / (n - j + 0.5) ** 2 * np.log((j - 0.5) / (F * n)))
    second = np.sum(n / (n - j + 0.5) * np.log((n - j + 0.5) / (n * (1.0 - F))))
    return float(2.0 * first + 2.0 * second)


def zhang_tests(sample, tag):
    """Zhang's ZA, ZB or ZC statistic with the fitted Pareto CDF."""
    xs, a = _prep(sample)
    fn = {"ZA": _za, "ZB": _zb, "ZC": _zc}.get(tag.upper())
    if fn is None:
        raise ParameterDomainError(f"unknown Zhang test {tag!r}")
    return fn(xs, a)


# ----------------------------------------------------------------------------
# Entropy-type statistics
# ----------------------------------------------------------------------------

def _kl(xs, a, m):
    n = xs.size
    m = int(m)
    if not 1 <= m < n:
        raise ParameterDomainError(f"KL window m must satisfy 1 <= m < n, got m={m}, n={n}")
    if xs[-1] == xs[0]:
        raise DegenerateSampleError("all observations are equal; spacings vanish")
    idx = np.arange(n)
    spacing = xs[np.minimum(idx + m, n - 1)] - xs[np.maximum(idx - m, 0)]
    with np.errstate(divide="ignore"):
        ent = -np.mean(np.log(n / (2.0 * m) * spacing))
    # tied values give zero spacings and an infinite statistic
    return float(ent - math.log(a) + (a + 1.0) * np.mean(np.log(xs)))


def _dk(xs, a):
    n = xs.size
    sd = float(np.std(xs, ddof=1)) if n > 1 else 0.0
    if not sd > 0:
        raise DegenerateSampleError("zero sample standard deviation; kernel bandwidth undefined")
    h = 1.06 * n ** (-0.2) * sd
    z = (xs[:, None] - xs[None, :]) / h
    fhat = np.exp(-0.5 * z * z).sum(axis=1) / (n * h * math.sqrt(2.0 * math.pi))
    return float(np.mean((a + 1.0) * np.log(xs) + np.log(fhat) - math.log(a)))


def entropy_tests(sample, tag, m=1):
    """Vasicek-spacing entropy statistic ``KL_{n,m}`` or kernel-density ``DK_n``.

    Parameters
    ----------
    tag : {"KL", "DK"}
    m : int
        Spacing window for KL (ignored for DK).
    """
    xs, a = _prep(sample)
    tag = tag.upper()
    if tag == "KL":
        return _kl(xs, a, m)
    if tag == "DK":
        return _dk(xs, a)
    raise ParameterDomainError(f"unknown entropy test {tag!r}")


# ----------------------------------------------------------------------------
# Transform-based statistics
# ----------------------------------------------------------------------------

def mellin_kernels(t, a):
    """The weight functions I_a^(0), I_a^(1), I_a^(2) evaluated at ``t``."""
    lt = np.log(t)
    d = a + lt
    i0 = 1.0 / d
    i1 = (1.0 - a - lt) / d**2
    i2 = (2.0 - 2.0 * a + a * a + 2.0 * (a - 1.0) * lt + lt * lt) / d**3
    return i0, i1, i2


def _g(xs, a, tune):
    n = xs.size
    P = np.outer(xs, xs)
    i0, i1, i2 = mellin_kernels(P, tune)
    s0, s1, _ = mellin_kernels(xs, tune)
    pair = ((a + 1.0) ** 2 * i0.sum() + i2.sum() + 2.0 * (a + 1.0) * i1.sum()) / n
    single = a * (n * a / tune - 2.0 * (a + 1.0) * s0.sum() - 2.0 * s1.sum())
    return float(pair + single)


def _m(xs, a, tune):
    n = xs.size
    U = _fitted_cdf(xs, a)
    D = U[:, None] - U[None, :]
    first = np.sum(2.0 * tune / (D * D + tune * tune)) / n
    const = 2.0 * n * (2.0 * math.atan(1.0 / tune) - tune * math.log1p(1.0 / tune**2))
    last = 4.0 * np.sum(np.arctan(U / tune) + np.arctan((1.0 - U) / tune))
    return float(first + const - last)


def transform_tests(sample, tag, a=2.0):
    """Mellin-transform statistic ``G_{n,a}`` or characteristic-function statistic ``M_{n,a}``."""
    if not a > 0:
        raise ParameterDomainError("tuning parameter a must be positive")
    xs, alpha = _prep(sample)
    tag = tag.upper()
    if tag == "G":
        return _g(xs, alpha, float(a))
    if tag == "M":
        return _m(xs, alpha, float(a))
    raise ParameterDomainError(f"unknown transform test {tag!r}")


# ----------------------------------------------------------------------------
# U-statistic type integrals against dF_n
# ----------------------------------------------------------------------------

def _counts(sorted_vals, points, side="right"):
    return np.searchsorted(sorted_vals, points, side=side).astype(np.int64)


def _ratio(num, den):
    # exact integers, one correctly rounded division
    return int(num) / int(den)


def _tn(xs, a=None):
    n = xs.size
    if n < 2:
        raise ParameterDomainError("T_n needs at least two observations")
    iu = np.triu_indices(n, 1)
    ratios = np.sort(xs[iu[1]] / xs[iu[0]])  # xs ascending, so this is max/min
    N = ratios.size
    cM = int(_counts(ratios, xs).sum())
    cF = int(_counts(xs, xs).sum())
    # mean_i [ #{ratio <= X_i}/N - #{X <= X_i}/n ]
    return _ratio(cM * n - cF * N, N * n * n)


def _delta_numerators(xs, x, m):
    n = xs.size
    roots = np.sort(xs ** (1.0 / m))
    c_root = [int(c) for c in _counts(roots, x)]
    c_above = [n - int(c) for c in _counts(xs, x)]
    nm = n**m
    # n**m * Delta = #{X**(1/m) <= x} n**(m-1) - (n**m - #{X > x}**m)
    return [r * n ** (m - 1) - (nm - c**m) for r, c in zip(c_root, c_above)], nm


def delta_nm(xs, x, m):
    """``Delta_{n,m}(x)``: ECDF of X**(1/m) minus the ECDF of the minimum of m draws.

    Both terms are ratios of counts, evaluated exactly and rounded once.
    """
    xs = np.sort(np.asarray(xs, dtype=float))
    x = np.asarray(x, dtype=float)
    nums, den = _delta_numerators(xs, np.atleast_1d(x), int(m))
    out = np.array([_ratio(v, den) for v in nums])
    return out if x.ndim else float(out[0])


def _inm(xs, m):
    m = int(m)
    if m < 1:
        raise ParameterDomainError("I_{n,m} needs m >= 1")
    nums, den = _delta_numerators(xs, xs, m)
    return _ratio(sum(nums), den * xs.size)


@functools.lru_cache(maxsize=32)
def _subset_top_pairs(n, k):
    # sorted-index positions of the largest and second-largest element of every k-subset
    combos = np.array(list(itertools.combinations(range(n), k)), dtype=np.intp)
    return combos[:, -1], combos[:, -2]


def _volkova(xs, k):
    n = xs.size
    k = int(k)
    if k < 2:
        raise ParameterDomainError("Volkova's statistic needs k >= 2")
    if k > n:
        raise ParameterDomainError(f"Volkova's k={k} exceeds the sample size n={n}")
    top, second = _subset_top_pairs(n, k)
    ratios = np.sort(xs[top] / xs[second])
    N = ratios.size
    cH = int(_counts(ratios, xs, side="left").sum())  # strict inequality
    cF = int(_counts(xs, xs).sum())
    return _ratio(cH * n - cF * N, N * n * n)


def ustat_tests(sample, tag, m=2, k=2):
    """Ratio- and minimum-based integral statistics.

    Parameters
    ----------
    tag : {"Tn", "I", "Volkova"}
        ``Tn`` uses the max-ratio of pairs; ``I`` is the signed ``I_{n,m}``
        (tests use its absolute value); ``Volkova`` is ``I_n^(k)`` by direct
        enumeration over k-subsets.
    """
    xs, _ = _prep(sample)
    tag = tag.lower()
    if tag == "tn":
        return _tn(xs)
    if tag in ("i", "inm"):
        return _inm(xs, m)
    if tag in ("volkova", "vol"):
        return _volkova(xs, k)
    raise ParameterDomainError(f"unknown U-statistic test {tag!r}")


# ----------------------------------------------------------------------------
# Ndwandwe et al. characteristic-function classes
# ----------------------------------------------------------------------------

def v_weights(n, m):
    """``v_{j,m} = ((n-j+1)**m - (n-j)**m) / n**m`` for j = 1..n."""
    j = np.arange(1, n + 1, dtype=float)
    return ((n - j + 1.0) ** m - (n - j) ** m) / float(n) ** m


def u_weights(n, m):
    """``u_{j,m} = C(n-j, m-1)`` for j = 1..n-m+1."""
    return np.array([comb(n - j, m - 1) for j in range(1, n - m + 2)], dtype=float)


def _cauchy(d, a):
    return 2.0 * a / (a * a + d * d)


def _gauss(d, a):
    return np.exp(-(d * d) / (4.0 * a))


def _ndwandwe(xs, tag, m, a):
    n = xs.size
    m = int(m)
    if m < 1 or m > n:
        raise ParameterDomainError(f"m must satisfy 1 <= m <= n, got m={m}, n={n}")
    if not a > 0:
        raise ParameterDomainError("tuning parameter a must be positive")
    r = xs ** (1.0 / m)
    rr = r[:, None] - r[None, :]
    xr = xs[:, None] - r[None, :]
    xx = xs[:, None] - xs[None, :]
    tag = tag.upper()
    kern = _cauchy if tag in ("S1", "T1") else _gauss
    scale = 1.0 if tag in ("S1", "T1") else math.sqrt(math.pi / a)
    if tag in ("S1", "S2"):
        v = v_weights(n, m)
        total = (
            np.sum(kern(rr, a))
            - 2.0 * n * np.sum(v[:, None] * kern(xr, a))
            + n * n * np.sum(np.outer(v, v) * kern(xx, a))
        ) / n
    elif tag in ("T1", "T2"):
        u = u_weights(n, m) / comb(n, m)
        q = u.size
        total = (
            np.sum(kern(rr, a)) / n
            - 2.0 * np.sum(u[:, None] * kern(xr[:q], a))
            + n * np.sum(np.outer(u, u) * kern(xx[:q, :q], a))
        )
    else:
        raise ParameterDomainError(f"unknown Ndwandwe test {tag!r}")
    # reported on the per-observation scale (printed double sum divided by n)
    return float(scale * total / n)


def ndwandwe_tests(sample, tag, m=3, a=2.0):
    """``S^(1)``, ``S^(2)``, ``T^(1)``, ``T^(2)`` statistics comparing X**(1/m) with minima of m draws.

    Values are the printed double sums divided by n, which keeps them O(1/n)
    under the null; the scaling does not affect any bootstrap decision.
    """
    xs, _ = _prep(sample)
    return _ndwandwe(xs, tag, m, float(a))


# ----------------------------------------------------------------------------
# Test identifiers
# ----------------------------------------------------------------------------

UPPER = "upper"
TWO_SIDED = "two-sided"
ABSOLUTE = "absolute"

# tag -> (token prefix, parameter names, defaults, sidedness)
_KINDS = {
    "Tn": ("tn", (), (), TWO_SIDED),
    "KS": ("ks", (), (), UPPER),
    "CM": ("cm", (), (), UPPER),
    "AD": ("ad", (), (), UPPER),
    "ZA": ("za", (), (), UPPER),
    "ZB": ("zb", (), (), UPPER),
    "ZC": ("zc", (), (), UPPER),
    "KLnm": ("kl", ("m",), (1,), UPPER),
    "DKn": ("dk", (), (), UPPER),
    "Gna": ("g", ("a",), (2.0,), UPPER),
    "Mna": ("m", ("a",), (2.0,), UPPER),
    "Inm": ("i", ("m",), (2,), ABSOLUTE),
    "VolkovaIk": ("vol", ("k",), (2,), TWO_SIDED),
    "S1": ("s1", ("m", "a"), (3, 2.0), UPPER),
    "S2": ("s2", ("m", "a"), (3, 2.0), UPPER),
    "T1": ("t1", ("m", "a"), (3, 2.0), UPPER),
    "T2": ("t2", ("m", "a"), (3, 2.0), UPPER),
}
_BY_PREFIX = {v[0]: k for k, v in _KINDS.items()}
_INTEGER_PARAMS = {"m", "k"}


def _fmt_param(v):
    return str(int(v)) if float(v).is_integer() else repr(float(v))


@dataclass(frozen=True)
class CompetitorKind:
    """A competitor statistic together with its tuning parameters.

    ``sidedness`` tells the bootstrap engine how to reject: ``"upper"`` for
    large values, ``"two-sided"`` for either tail, ``"absolute"`` for large
    absolute values.
    """

    tag: str
    params: tuple = ()

    def __post_init__(self):
        if self.tag not in _KINDS:
            raise ParameterDomainError(f"unknown competitor tag {self.tag!r}")
        _, names, defaults, _ = _KINDS[self.tag]
        params = tuple(self.params) if self.params else defaults
        if len(params) != len(names):
            raise ParameterDomainError(f"{self.tag} takes parameters {names}, got {params}")
        clean = []
        for name, v in zip(names, params):
            v = float(v)
            if not (v > 0 and math.isfinite(v)):
                raise ParameterDomainError(f"{self.tag}: {name} must be positive, got {v}")
            if name in _INTEGER_PARAMS:
                if not v.is_integer():
                    raise ParameterDomainError(f"{self.tag}: {name} must be an integer, got {v}")
                v = int(v)
            clean.append(v)
        object.__setattr__(self, "params", tuple(clean))

    @classmethod
    def parse(cls, token):
        """Parse ``ks``, ``kl:10``, ``s1:3:2`` and the like (case-insensitive)."""
        head, *rest = token.strip().lower().split(":")
        tag = _BY_PREFIX.get(head)
        if tag is None:
            raise UnknownTestError(token)
        try:
            params = tuple(float(p) for p in rest)
        except ValueError:
            raise ParameterDomainError(f"non-numeric parameter in {token!r}") from None
        return cls(tag, params)

    @property
    def sidedness(self):
        return _KINDS[self.tag][3]

    @property
    def token(self):
        prefix = _KINDS[self.tag][0]
        return ":".join([prefix] + [_fmt_param(p) for p in self.params])

    @property
    def label(self):
        if not self.params:
            return self.tag
        return f"{self.tag}({','.join(_fmt_param(p) for p in self.params)})"

    def kernel(self):
        """``f(sorted_x, alpha_hat) -> float`` without input validation."""
        tag, p = self.tag, self.params
        simple = {"KS": _ks, "CM": _cm, "AD": _ad, "ZA": _za, "ZB": _zb, "ZC": _zc, "DKn": _dk}
        if tag in simple:
            return simple[tag]
        if tag == "Tn":
            return lambda xs, a: _tn(xs)
        if tag == "KLnm":
            return lambda xs, a: _kl(xs, a, p[0])
        if tag == "Gna":
            return lambda xs, a: _g(xs, a, p[0])
        if tag == "Mna":
            return lambda xs, a: _m(xs, a, p[0])
        if tag == "Inm":
            return lambda xs, a: _inm(xs, p[0])
        if tag == "VolkovaIk":
            return lambda xs, a: _volkova(xs, p[0])
        return lambda xs, a: _ndwandwe(xs, tag, p[0], p[1])

    def __call__(self, sample):
        xs, a = _prep(sample)
        return self.kernel()(xs, a)
