"""Parametric bootstrap tests and Monte Carlo rejection rates.

Randomness layout (all streams derive from one master seed):

* ``bootstrap_test`` with seed ``s`` draws chunk ``c`` of its bootstrap
  samples from stream ``(s, c)``.
* In a study cell, replication ``r`` of alternative ``A`` at size ``n`` uses
  ``(seed, key(A), n, r, attempt, 0)`` for the data and
  ``(seed, key(A), n, r, attempt, 1, c)`` for bootstrap chunk ``c``, where
  ``key`` is a CRC-32 of the alternative's label.

The test token is not part of any stream, so every test in a cell sees the
same data and bootstrap samples, and a cell's result does not depend on which
other cells or tests are run alongside it or on the number of workers.
"""
from __future__ import annotations

import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .competitors import ABSOLUTE, TWO_SIDED, UPPER
from .distributions import AlternativeSpec, ParetoModel, parse_distribution
from .errors import NumericalError, ParameterDomainError, ParetoGofError, ReplicationError
from .estimation import as_sample, mle_alpha
from .registry import TestDef, normal_two_sided_p, parse_test
from .rng import RngStream

CHUNK = 125
DEFAULT_B = 1000
DEFAULT_M = 1000
DESK_B = 500
DESK_M = 500


def _resolve(test):
    return test if isinstance(test, TestDef) else parse_test(test)


def _stream(seed):
    return seed if isinstance(seed, RngStream) else RngStream(seed)


@dataclass(frozen=True)
class TestOutcome:
    """Result of one bootstrap test.

    ``critical_value_95`` is the upper (1 - level) bootstrap quantile, or the
    ``(level/2, 1 - level/2)`` pair for two-sided tests; for ``absolute`` tests
    it applies to the absolute statistic.  Asymptotic tests report normal
    quantiles and ``B = 0``.
    """

    __test__ = False  # not a pytest class

    test: str
    statistic: float
    p_value: float
    critical_value_95: Union[float, tuple]
    B: int
    master_seed: int
    alpha_hat: float = float("nan")
    n: int = 0
    level: float = 0.05
    reject: bool = False


def null_statistics(test, n, alpha, B, seed):
    """Statistic of ``test`` on ``B`` samples of size ``n`` from P(alpha).

    The bootstrap is drawn in chunks of :data:`CHUNK` rows; chunk ``c`` uses
    substream ``seed.child(c)``.
    """
    test = _resolve(test)
    stream = _stream(seed)
    B = int(B)
    if B < 1:
        raise ParameterDomainError("B must be >= 1")
    model = ParetoModel(alpha)
    out = np.empty(B)
    for c, start in enumerate(range(0, B, CHUNK)):
        rows = min(CHUNK, B - start)
        U = stream.child(c).generator().random((rows, n))
        out[start:start + rows] = test.evaluate_batch(model.quantile(U))
    if np.isnan(out).any():
        raise NumericalError(f"{test.token} returned NaN on a bootstrap sample")
    return out


def _quantile(v, q, method="higher"):
    # order-statistic quantile: no interpolation, so infinite values stay well defined
    return float(np.quantile(v, q, method=method))


def decide(test, stat, boot, level=0.05):
    """p-value, critical value(s) and rejection flag from a bootstrap distribution."""
    B = boot.size
    if test.sidedness == UPPER:
        p = (1 + np.count_nonzero(boot >= stat)) / (B + 1)
        crit = _quantile(boot, 1.0 - level)
        rej = stat > crit
    elif test.sidedness == ABSOLUTE:
        a = np.abs(boot)
        p = (1 + np.count_nonzero(a >= abs(stat))) / (B + 1)
        crit = _quantile(a, 1.0 - level)
        rej = abs(stat) > crit
    elif test.sidedness == TWO_SIDED:
        hi = (1 + np.count_nonzero(boot >= stat)) / (B + 1)
        lo = (1 + np.count_nonzero(boot <= stat)) / (B + 1)
        p = min(1.0, 2.0 * min(hi, lo))
        crit = (_quantile(boot, level / 2.0, "lower"), _quantile(boot, 1.0 - level / 2.0))
        rej = stat < crit[0] or stat > crit[1]
    else:
        raise ParameterDomainError(f"unknown sidedness {test.sidedness!r}")
    return float(p), crit, bool(rej)


def _asymptotic(test, stat, level):
    z = _normal_quantile(1.0 - level / 2.0)
    return normal_two_sided_p(stat), (-z, z), abs(stat) > z


def _normal_quantile(p):
    from scipy.special import ndtri

    return float(ndtri(p))


def bootstrap_test(sample, test, B=DEFAULT_B, seed=0, level=0.05):
    """Parametric bootstrap test of the Pareto null.

    The shape is estimated from ``sample``; ``B`` samples of the same size
    are drawn from P(alpha_hat) and the statistic (with its own re-estimated
    shape) is computed on each.  Upper-tailed tests use
    ``p = (1 + #{T* >= T}) / (B + 1)``; two-sided tests double the smaller
    tail; absolute tests compare ``|T*|`` with ``|T|``.

    Parameters
    ----------
    sample : Sample or array_like
    test : str or TestDef
    B : int
    seed : int or RngStream
    level : float
    """
    s = as_sample(sample)
    t = _resolve(test)
    if not 0.0 < level < 1.0:
        raise ParameterDomainError("level must lie in (0, 1)")
    a = mle_alpha(s).alpha_hat
    stat = t.evaluate(s)
    stream = _stream(seed)
    if t.asymptotic:
        p, crit, rej = _asymptotic(t, stat, level)
        return TestOutcome(t.token, stat, p, crit, 0, stream.master_seed, a, s.n, level, bool(rej))
    boot = null_statistics(t, s.n, a, B, stream)
    p, crit, rej = decide(t, stat, boot, level)
    return TestOutcome(t.token, stat, p, crit, int(B), stream.master_seed, a, s.n, level, rej)


# ----------------------------------------------------------------------------
# Monte Carlo study cells
# ----------------------------------------------------------------------------

def _resolve_model(model):
    if isinstance(model, (AlternativeSpec, ParetoModel)):
        return model
    return parse_distribution(model)


@dataclass(frozen=True)
class StudyCell:
    """One (alternative, n, test) entry of a size/power table."""

    alternative: object
    n: int
    test: str
    M: int = DEFAULT_M
    B: int = DEFAULT_B
    level: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "alternative", _resolve_model(self.alternative))
        if int(self.n) < 2:
            raise ParameterDomainError("n must be >= 2")
        if int(self.M) < 1 or int(self.B) < 1:
            raise ParameterDomainError("M and B must be >= 1")
        if not 0.0 < self.level < 1.0:
            raise ParameterDomainError("level must lie in (0, 1)")


@dataclass(frozen=True)
class RateResult:
    """Rejection proportion with its binomial standard error."""

    rate: float
    se: float
    rejections: int
    M: int
    retries: int = 0
    error: str = ""


def alternative_key(model):
    return zlib.crc32(model.label.encode("utf-8"))


@dataclass
class _Job:
    model: object
    n: int
    tokens: tuple
    B: int
    level: float
    master_seed: int
    sup: object = None
    tests: list = field(default=None, repr=False)

    def resolved(self):
        if self.tests is None:
            self.tests = [parse_test(t, self.sup) for t in self.tokens]
        return self.tests


def _replicate(job, r, attempt, pending):
    """Run replication ``r`` at ``attempt`` for the tests in ``pending``.

    Returns ``{index: reject flag or exception}``.
    """
    tests = job.resolved()
    base = RngStream(job.master_seed, (alternative_key(job.model), job.n, r, attempt))
    out = {}
    try:
        x = np.asarray(job.model.sample(job.n, base.child(0)), dtype=float)
        s = as_sample(x)
        a = mle_alpha(s).alpha_hat
        boot_X = None
        for i in pending:
            t = tests[i]
            try:
                stat = t.evaluate(s)
                if math.isnan(stat):
                    raise NumericalError(f"{t.token} is NaN")
                if t.asymptotic:
                    out[i] = bool(_asymptotic(t, stat, job.level)[2])
                    continue
                if boot_X is None:
                    boot_X = _bootstrap_matrix(job.n, a, job.B, base.child(1))
                boot = np.concatenate([t.evaluate_batch(chunk) for chunk in boot_X])
                if np.isnan(boot).any():
                    raise NumericalError(f"{t.token} returned NaN on a bootstrap sample")
                out[i] = decide(t, stat, boot, job.level)[2]
            except (ParetoGofError, ArithmeticError, ValueError) as exc:
                out[i] = exc
    except (ParetoGofError, ArithmeticError, ValueError) as exc:
        for i in pending:
            out[i] = exc
    return out


def _bootstrap_matrix(n, alpha, B, stream):
    model = ParetoModel(alpha)
    chunks = []
    for c, start in enumerate(range(0, B, CHUNK)):
        rows = min(CHUNK, B - start)
        chunks.append(model.quantile(stream.child(c).generator().random((rows, n))))
    return chunks


def _run_block(job, rs):
    """Replications ``rs``; returns per replication a list of (reject | error-text, retried)."""
    k = len(job.tokens)
    block = []
    for r in rs:
        res = _replicate(job, r, 0, range(k))
        failed = [i for i in range(k) if isinstance(res[i], Exception)]
        retried = set(failed)
        if failed:
            res.update(_replicate(job, r, 1, failed))
        row = []
        for i in range(k):
            v = res[i]
            if isinstance(v, Exception):
                row.append((f"replication {r}: {type(v).__name__}: {v}", True))
            else:
                row.append((bool(v), i in retried))
        block.append(row)
    return block


def run_cells(model, n, tests, M, B, level, master_seed, workers=1, sup=None):
    """Rejection rates of several tests sharing one (alternative, n) cell.

    Returns a list of :class:`RateResult` in the order of ``tests``.  A test
    whose replication fails twice gets ``rate = nan`` and an error message;
    the other tests are unaffected.
    """
    model = _resolve_model(model)
    tokens = tuple(_resolve(t).token if not isinstance(t, str) else t for t in tests)
    job = _Job(model, int(n), tokens, int(B), float(level), int(master_seed), sup)
    job.resolved()  # fail fast on bad tokens
    M = int(M)
    workers = max(1, int(workers))
    if workers == 1 or M == 1:
        rows = _run_block(job, range(M))
    else:
        size = max(1, math.ceil(M / (workers * 4)))
        blocks = [range(i, min(i + size, M)) for i in range(0, M, size)]
        lean = _Job(model, job.n, tokens, job.B, job.level, job.master_seed, sup)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map preserves block order, so the reduction is indexed
            rows = [row for block in pool.map(_run_block, [lean] * len(blocks), blocks) for row in block]
    results = []
    for i in range(len(tokens)):
        col = [row[i] for row in rows]
        errors = [v for v, _ in col if isinstance(v, str)]
        retries = sum(1 for v, again in col if again)
        if errors:
            results.append(RateResult(float("nan"), float("nan"), 0, M, retries, errors[0]))
            continue
        k = sum(1 for v, _ in col if v)
        rate = k / M
        results.append(RateResult(rate, math.sqrt(rate * (1.0 - rate) / M), k, M, retries))
    return results


def rejection_rate(cell, master_seed, workers=1, sup=None):
    """Monte Carlo rejection proportion for one :class:`StudyCell`.

    Raises
    ------
    ReplicationError
        If some replication fails on both attempts.
    """
    res = run_cells(cell.alternative, cell.n, [cell.test], cell.M, cell.B, cell.level, master_seed, workers, sup)[0]
    if res.error:
        raise ReplicationError(f"cell ({cell.alternative.label}, n={cell.n}, {cell.test}) aborted: {res.error}")
    return res
