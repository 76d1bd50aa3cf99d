"""Dataset reports and size/power studies built on the bootstrap engine."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from .bootstrap import DEFAULT_B, DEFAULT_M, bootstrap_test, run_cells
from .distributions import parse_distribution
from .errors import DatasetIOError, ParameterDomainError
from .estimation import as_sample, load_dataset, mle_alpha
from .registry import parse_test, parse_tests
from .rng import RngStream

log = logging.getLogger(__name__)

CONFIG_KEYS = ("alternatives", "sample_sizes", "tests", "M", "B", "level", "master_seed", "output_path")
CSV_COLUMNS = ("alternative", "n", "test", "rate", "se", "M", "B", "seed", "errors")


# ----------------------------------------------------------------------------
# Dataset analysis
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ReportRow:
    test: str
    label: str
    statistic: float
    p_value: float  # nan when no bootstrap was run


@dataclass(frozen=True)
class DatasetReport:
    source: str
    n: int
    alpha_hat: float
    rows: tuple

    def to_text(self, fmt="markdown"):
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["test", "statistic", "p_value", "n", "alpha_hat"])
            for r in self.rows:
                w.writerow([r.test, f"{r.statistic:.3f}", _fmt_p(r.p_value), self.n, f"{self.alpha_hat:.3f}"])
            return buf.getvalue()
        if fmt != "markdown":
            raise ParameterDomainError(f"unknown format {fmt!r}")
        lines = [
            f"{self.source}: n = {self.n}, alpha_hat = {self.alpha_hat:.3f}",
            "",
            "| test | statistic | p-value |",
            "|---|---:|---:|",
        ]
        lines += [f"| {r.label} | {r.statistic:.3f} | {_fmt_p(r.p_value)} |" for r in self.rows]
        return "\n".join(lines) + "\n"


def _fmt_p(p):
    return "" if math.isnan(p) else f"{p:.3f}"


def analyze_dataset(path, threshold=None, tests=("ds1", "ds2", "ds3"), B=DEFAULT_B, seed=0, sup=None):
    """Statistic and bootstrap p-value for each test on a dataset file.

    ``B = 0`` skips the bootstrap.  Test ``i`` uses seed stream ``(seed, i)``
    so adding a test never changes the p-values of the others.
    """
    sample = load_dataset(path, threshold)
    return analyze_sample(sample, tests, B, seed, sup, source=Path(path).name)


def analyze_sample(sample, tests=("ds1", "ds2", "ds3"), B=DEFAULT_B, seed=0, sup=None, source="sample"):
    s = as_sample(sample)
    a = mle_alpha(s).alpha_hat
    rows = []
    for i, t in enumerate(parse_tests(tests, sup)):
        if B > 0 or t.asymptotic:
            out = bootstrap_test(s, t, max(int(B), 1), RngStream(seed, (i,)))
            rows.append(ReportRow(t.token, t.label, out.statistic, out.p_value))
        else:
            rows.append(ReportRow(t.token, t.label, t.evaluate(s), float("nan")))
    return DatasetReport(source, s.n, a, tuple(rows))


# ----------------------------------------------------------------------------
# Studies
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class StudyConfig:
    alternatives: tuple
    sample_sizes: tuple
    tests: tuple
    M: int = DEFAULT_M
    B: int = DEFAULT_B
    level: float = 0.05
    master_seed: int = 0
    output_path: str = None

    def __post_init__(self):
        for name in ("alternatives", "sample_sizes", "tests"):
            v = getattr(self, name)
            if isinstance(v, str) or not v:
                raise ParameterDomainError(f"{name} must be a non-empty list")
            object.__setattr__(self, name, tuple(v))
        for a in self.alternatives:
            parse_distribution(a)
        for t in self.tests:
            parse_test(t)
        if any(int(n) != n or n < 2 for n in self.sample_sizes):
            raise ParameterDomainError("sample_sizes must be integers >= 2")
        if int(self.M) < 1 or int(self.B) < 1:
            raise ParameterDomainError("M and B must be >= 1")
        if not 0.0 < float(self.level) < 1.0:
            raise ParameterDomainError("level must lie in (0, 1)")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ParameterDomainError("master_seed must be an unsigned 64-bit integer")

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(CONFIG_KEYS)
        if unknown:
            raise ParameterDomainError(f"unknown config keys: {sorted(unknown)}")
        missing = {"alternatives", "sample_sizes", "tests"} - set(d)
        if missing:
            raise ParameterDomainError(f"missing config keys: {sorted(missing)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise DatasetIOError(f"cannot read config {path}: {exc.strerror}", path=str(path)) from None
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DatasetIOError(f"{path}: invalid JSON: {exc.msg}", path=str(path), line=exc.lineno) from None
        if not isinstance(d, dict):
            raise ParameterDomainError("config must be a JSON object")
        return cls.from_dict(d)


@dataclass(frozen=True)
class PowerCell:
    alternative: str
    n: int
    test: str
    rate: float
    se: float
    M: int
    B: int
    seed: int
    errors: str = ""

    @property
    def percent(self):
        """Rejection percentage rounded half up to an integer (None for failed cells)."""
        if math.isnan(self.rate):
            return None
        return int(math.floor(round(100.0 * self.rate, 9) + 0.5))


@dataclass
class PowerTable:
    tests: tuple = ()
    cells: list = field(default_factory=list)

    def rows(self):
        seen = []
        for c in self.cells:
            if (c.alternative, c.n) not in seen:
                seen.append((c.alternative, c.n))
        return seen

    def get(self, alternative, n, test):
        for c in self.cells:
            if (c.alternative, c.n, c.test) == (alternative, n, test):
                return c
        raise KeyError((alternative, n, test))


def run_study(config, workers=1, sup=None, progress=None):
    """Evaluate every (alternative, n, test) cell and write the CSV if configured."""
    table = PowerTable(tuple(config.tests))
    for alt in config.alternatives:
        model = parse_distribution(alt)
        for n in config.sample_sizes:
            log.info("cell %s n=%d", model.label, n)
            results = run_cells(
                model, int(n), list(config.tests), int(config.M), int(config.B),
                float(config.level), int(config.master_seed), workers, sup,
            )
            for t, r in zip(config.tests, results):
                table.cells.append(
                    PowerCell(model.label, int(n), t, r.rate, r.se, int(config.M), int(config.B),
                              int(config.master_seed), r.error)
                )
            if progress:
                progress(model.label, n)
    if config.output_path:
        try:
            Path(config.output_path).write_text(emit_table(table, "csv"), encoding="utf-8")
        except OSError as exc:
            raise DatasetIOError(f"cannot write {config.output_path}: {exc.strerror}",
                                 path=str(config.output_path)) from None
    return table


def emit_table(table, fmt="csv"):
    """Render a :class:`PowerTable` as CSV (raw rates) or markdown (integer percentages)."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for c in table.cells:
            w.writerow([c.alternative, c.n, c.test, repr(float(c.rate)), repr(float(c.se)),
                        c.M, c.B, c.seed, c.errors])
        return buf.getvalue()
    if fmt != "markdown":
        raise ParameterDomainError(f"unknown format {fmt!r}")
    tests = list(table.tests) or list(dict.fromkeys(c.test for c in table.cells))
    lines = ["| alternative | n | " + " | ".join(tests) + " |" if tests else "| alternative | n |"]
    lines.append("|---|---:|" + "---:|" * len(tests))
    for alt, n in table.rows():
        vals = []
        for t in tests:
            try:
                p = table.get(alt, n, t).percent
            except KeyError:
                p = None
            vals.append("err" if p is None else str(p))
        lines.append(f"| {alt} | {n} | " + " | ".join(vals) + " |")
    return "\n".join(lines) + "\n"


def parse_table_csv(text):
    """Inverse of ``emit_table(..., "csv")``."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ParameterDomainError(f"CSV header must be {','.join(CSV_COLUMNS)}")
    cells = [
        PowerCell(r["alternative"], int(r["n"]), r["test"], float(r["rate"]), float(r["se"]),
                  int(r["M"]), int(r["B"]), int(r["seed"]), r["errors"])
        for r in reader
    ]
    return PowerTable(tuple(dict.fromkeys(c.test for c in cells)), cells)
