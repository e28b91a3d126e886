"""Seeded success-probability estimation, t-sweeps and threshold-exponent fits."""
from __future__ import annotations

import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from .hypergraph import ParameterError, TargetSpec, build_target
from .process import RNG_ALGORITHM, run
from .strategies import STRATEGIES, make_strategy

CONFIG_VERSION = 1
MAX_BUDGET = 10 ** 8
RNG_IDS = (RNG_ALGORITHM,)
CSV_HEADER = "n,t,trials,successes,p_hat,ci_lo,ci_hi"

_CONFIG_FIELDS = {"version", "target", "r", "strategy", "strategy_params", "n_grid", "t_rule", "trials",
                  "seed", "rng"}
_T_RULE_FIELDS = {"values", "per_n", "constants", "exponent"}


class ConfigError(ValueError):
    """Invalid experiment configuration; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    target: TargetSpec
    r: int
    strategy: str
    n_grid: list
    t_rule: dict
    trials: int
    seed: int
    strategy_params: dict = field(default_factory=dict)
    rng: str = RNG_ALGORITHM

    def __post_init__(self):
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials", "must be an integer >= 1")
        if self.strategy not in STRATEGIES:
            raise ConfigError("strategy", f"unknown strategy {self.strategy!r}")
        if self.rng not in RNG_IDS:
            raise ConfigError("rng", f"unsupported rng {self.rng!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed", "must be a non-negative integer")
        s = self.target.params.get("s")
        if not isinstance(self.r, int) or not (1 <= self.r < s):
            raise ConfigError("r", f"need 1 <= r < s = {s}")
        if not self.n_grid or any(not isinstance(n, int) or n < s for n in self.n_grid):
            raise ConfigError("n_grid", f"need a non-empty list of integers >= s = {s}")
        unknown = set(self.t_rule) - _T_RULE_FIELDS
        if unknown:
            raise ConfigError("t_rule", f"unknown fields {sorted(unknown)}")
        kinds = [k for k in ("values", "per_n", "constants") if k in self.t_rule]
        if len(kinds) != 1:
            raise ConfigError("t_rule", "give exactly one of values, per_n, constants")
        if "constants" in self.t_rule and "exponent" not in self.t_rule:
            raise ConfigError("t_rule.exponent", "required with constants")
        if "per_n" in self.t_rule:
            missing = [n for n in self.n_grid if str(n) not in self.t_rule["per_n"]]
            if missing:
                raise ConfigError("t_rule.per_n", f"no t list for n in {missing}")

    def t_values(self, n: int) -> list[int]:
        rule = self.t_rule
        if "values" in rule:
            ts = rule["values"]
        elif "per_n" in rule:
            ts = rule["per_n"][str(n)]
        else:
            ts = [max(1, round(c * n ** rule["exponent"])) for c in rule["constants"]]
        if any(not isinstance(t, int) or t < 0 for t in ts):
            raise ConfigError("t_rule", "budgets must be non-negative integers")
        return sorted(set(ts))

    def to_dict(self) -> dict:
        return {"version": CONFIG_VERSION, "target": self.target.to_dict(), "r": self.r,
                "strategy": self.strategy, "strategy_params": self.strategy_params,
                "n_grid": list(self.n_grid), "t_rule": self.t_rule, "trials": self.trials,
                "seed": self.seed, "rng": self.rng}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config", "must be a JSON object")
        unknown = set(d) - _CONFIG_FIELDS
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown field")
        if d.get("version") != CONFIG_VERSION:
            raise ConfigError("version", f"must be {CONFIG_VERSION}")
        for name in ("target", "r", "strategy", "n_grid", "t_rule", "trials", "seed"):
            if name not in d:
                raise ConfigError(name, "missing")
        try:
            target = TargetSpec.from_dict(d["target"])
        except (ParameterError, TypeError, KeyError) as exc:
            raise ConfigError("target", str(exc)) from exc
        if not isinstance(d["t_rule"], dict):
            raise ConfigError("t_rule", "must be an object")
        params = d.get("strategy_params", {})
        if not isinstance(params, dict):
            raise ConfigError("strategy_params", "must be an object")
        return cls(target, d["r"], d["strategy"], list(d["n_grid"]), d["t_rule"], d["trials"], d["seed"],
                   params, d.get("rng", RNG_ALGORITHM))


@dataclass
class PointEstimate:
    n: int
    t: int
    trials: int
    successes: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    censored: bool = False

    def csv_row(self) -> str:
        return f"{self.n},{self.t},{self.trials},{self.successes},{self.p_hat!r},{self.ci_lo!r},{self.ci_hi!r}"


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("trials must be positive")
    z = NormalDist().inv_cdf(0.5 + level / 2)
    p = successes / trials
    den = 1 + z * z / trials
    mid = (p + z * z / (2 * trials)) / den
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    # the bounds are exactly 0 and 1 at the extremes; rounding would leave ~1e-17 residue
    lo = 0.0 if successes == 0 else max(0.0, mid - half)
    hi = 1.0 if successes == trials else min(1.0, mid + half)
    return lo, hi


def _one_trial(cfg_dict: dict, n: int, t: int, trial: int) -> bool:
    cfg = ExperimentConfig.from_dict(cfg_dict)
    target = build_target(cfg.target)
    strat = make_strategy(cfg.strategy, cfg.target, cfg.r, **cfg.strategy_params)
    try:
        out = run(n, cfg.r, target.s, strat, target, t, seed=cfg.seed, trial=trial)
    except Exception as exc:
        raise type(exc)(f"trial {trial} (n={n}, t={t}): {exc}") from exc
    return out.success_step is not None


def _trial_worker(args):
    return _one_trial(*args)


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get("SEMIRANDOM_THREADS", "1") or 1)
    return max(1, threads)


def _map_trials(jobs, threads):
    if threads <= 1 or len(jobs) <= 1:
        return [_trial_worker(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_trial_worker, jobs, chunksize=max(1, len(jobs) // (4 * threads))))


def estimate_success(config: ExperimentConfig, n: int, t: int, threads: int | None = None) -> PointEstimate:
    """Run ``config.trials`` independent trials at (n, t); trial i uses seed (config.seed, i)."""
    if t > MAX_BUDGET:
        return PointEstimate(n, t, 0, 0, float("nan"), 0.0, 1.0, censored=True)
    cfg = config.to_dict()
    jobs = [(cfg, n, t, i) for i in range(config.trials)]
    hits = sum(_map_trials(jobs, resolve_threads(threads)))
    lo, hi = wilson_interval(hits, config.trials)
    return PointEstimate(n, t, config.trials, hits, hits / config.trials, lo, hi)


def isotonic(values, weights):
    """Weighted non-decreasing least-squares fit (pool adjacent violators)."""
    blocks = []  # [mean, weight, count]
    for v, w in zip(values, weights):
        blocks.append([float(v), float(w), 1])
        while len(blocks) > 1 and blocks[-2][0] > blocks[-1][0]:
            m2, w2, c2 = blocks.pop()
            m1, w1, c1 = blocks.pop()
            blocks.append([(m1 * w1 + m2 * w2) / (w1 + w2), w1 + w2, c1 + c2])
    out = []
    for m, _, c in blocks:
        out.extend([m] * c)
    return out


def _logit(p):
    return math.log(p / (1 - p))


def crossing_point(points: list[PointEstimate]) -> float | None:
    """Interpolated t where the monotone success curve crosses 1/2 (log t against logit p)."""
    pts = [p for p in points if not p.censored]
    if not pts:
        return None
    ts = [p.t for p in pts]
    mono = isotonic([p.p_hat for p in pts], [p.trials for p in pts])
    for i in range(len(pts) - 1):
        a, b = mono[i], mono[i + 1]
        if a < 0.5 <= b:
            lo_c = 0.5 / pts[i].trials
            hi_c = 0.5 / pts[i + 1].trials
            la = _logit(min(max(a, lo_c), 1 - lo_c))
            lb = _logit(min(max(b, hi_c), 1 - hi_c))
            xa, xb = math.log(max(ts[i], 1)), math.log(max(ts[i + 1], 1))
            if lb == la:
                return math.exp(xb)
            return math.exp(xa + (0 - la) * (xb - xa) / (lb - la))
    return None


@dataclass
class LineFit:
    slope: float
    intercept: float
    stderr: float
    residuals: list


def fit_line(xs, ys) -> LineFit:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points to fit")
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - (slope * x + intercept)
    if x.size > 2:
        sxx = float(((x - x.mean()) ** 2).sum())
        stderr = math.sqrt(float((res ** 2).sum()) / (x.size - 2) / sxx)
    else:
        stderr = float("nan")
    return LineFit(float(slope), float(intercept), stderr, [float(v) for v in res])


@dataclass
class SweepResult:
    points: list
    crossings: dict  # n -> t* or None (censored)
    fit: LineFit | None

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for p in self.points:
            buf.write(p.csv_row() + "\n")
        return buf.getvalue()

    def fit_dict(self) -> dict:
        pts = [{"n": n, "t_star": t, "censored": t is None} for n, t in sorted(self.crossings.items())]
        if self.fit is None:
            return {"slope": None, "intercept": None, "stderr": None, "points": pts}
        stderr = None if math.isnan(self.fit.stderr) else self.fit.stderr
        return {"slope": self.fit.slope, "intercept": self.fit.intercept, "stderr": stderr,
                "residuals": self.fit.residuals, "points": pts}

    def to_json(self) -> str:
        rows = [{"n": p.n, "t": p.t, "trials": p.trials, "successes": p.successes, "p_hat": p.p_hat,
                 "ci_lo": p.ci_lo, "ci_hi": p.ci_hi} for p in self.points]
        return json.dumps({"points": rows, "fit": self.fit_dict()}, sort_keys=True, indent=1) + "\n"


def sweep_and_fit(config: ExperimentConfig, threads: int | None = None, progress=None) -> SweepResult:
    """Estimate the success curve at every (n, t) and fit log t* against log n."""
    points, crossings = [], {}
    for n in config.n_grid:
        row = []
        for t in config.t_values(n):
            est = estimate_success(config, n, t, threads)
            row.append(est)
            if progress is not None:
                progress(est)
        points.extend(row)
        crossings[n] = crossing_point(row)
    good = [(n, t) for n, t in crossings.items() if t is not None]
    fit = fit_line([math.log(n) for n, _ in good], [math.log(t) for _, t in good]) if len(good) >= 2 else None
    return SweepResult(points, crossings, fit)


def monotonicity_violations(points: list[PointEstimate], alpha: float = 1e-3) -> list[tuple]:
    """Adjacent grid points (same n) where success drops significantly (one-sided two-proportion test)."""
    bad = []
    by_n: dict = {}
    for p in points:
        if not p.censored:
            by_n.setdefault(p.n, []).append(p)
    for n, row in by_n.items():
        row.sort(key=lambda p: p.t)
        for a, b in zip(row, row[1:]):
            pooled = (a.successes + b.successes) / (a.trials + b.trials)
            if pooled in (0.0, 1.0):
                continue
            se = math.sqrt(pooled * (1 - pooled) * (1 / a.trials + 1 / b.trials))
            z = (a.p_hat - b.p_hat) / se
            if 1 - NormalDist().cdf(z) < alpha:
                bad.append((n, a.t, b.t))
    return bad


def parse_csv(text: str) -> list[PointEstimate]:
    lines = text.strip().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    out = []
    for line in lines[1:]:
        n, t, tr, s, p, lo, hi = line.split(",")
        out.append(PointEstimate(int(n), int(t), int(tr), int(s), float(p), float(lo), float(hi)))
    return out
