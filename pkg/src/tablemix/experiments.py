"""Seeded Monte-Carlo experiment harness with CSV emission.

Every experiment farms independent trials, one child stream per trial
index, so results are reproducible bit-for-bit given (experiment, seed,
parameters) regardless of the concurrency width.  Each run emits one CSV
row per trial (wall-time last, excluded from determinism comparisons) and
a plain-text summary echoing the full parameter set, the measured rates,
the matching closed-form bound where one exists, and a PASS/FAIL verdict
against the experiment's acceptance threshold.
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .family import FamilyParams, _classify, draw_family, ell_from_delta
from .gcuckoo import EPPSTEIN, KHOSLA, LabeledCuckooTable
from .hashfam import draw_poly, eval_poly_many
from .graphs import build, components, core_is_empty, excess
from .loadbal import (
    CORE_EMPTY_THRESHOLDS,
    goleft_bound,
    run_collision,
    run_goleft,
    tau_threshold,
)
from .mphf import acyclic_prob_bounds
from .prng import Prng, RandomOracle
from .uniformsim import build_sim, evaluate_many as sim_evaluate_many

EXPERIMENTS = (
    "cuckoo",
    "stash",
    "mphf-acyclic",
    "uniform-probe",
    "gcuckoo-khosla",
    "gcuckoo-eppstein",
    "collision",
    "goleft",
    "core-threshold",
    "components",
    "deficiency",
)

_NO_ORACLE = {"uniform-probe", "deficiency"}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n: int = 10_000
    d: int = 2
    c: int = 4
    kappa: int = 2
    epsilon: float = 1.0
    delta: float = 0.5
    s: int = 0
    tau: int | None = None
    alpha: float = 1.0
    ratio: float = 0.80
    m_mult: float = 6.0
    t_size: int = 8
    ell: int | None = None
    w: int = 2
    trials: int = 100
    seed: int = 1
    max_rounds: int = 64
    out: str | None = None
    oracle_random: bool = False
    threads: int = 1


_DEFAULTS: dict[str, dict] = {
    "cuckoo": dict(n=10_000, d=2, c=4, epsilon=1.0, s=0, trials=500),
    "stash": dict(n=1_000, d=2, c=4, epsilon=0.15, trials=2_000),
    "mphf-acyclic": dict(n=100_000, d=2, c=3, epsilon=1.0, trials=500),
    "uniform-probe": dict(n=4, c=2, w=2, trials=100_000),
    "gcuckoo-khosla": dict(n=10_000, d=3, c=4, epsilon=0.1, trials=100),
    "gcuckoo-eppstein": dict(n=10_000, d=3, c=4, epsilon=0.1, trials=100),
    "collision": dict(n=16_383, d=3, c=4, trials=100),
    "goleft": dict(n=65_536, d=2, c=4, trials=100),
    "core-threshold": dict(n=100_000, d=3, c=3, ratio=0.80, trials=100),
    "components": dict(n=10_000, d=2, c=3, m_mult=6.0, trials=100),
    "deficiency": dict(n=16, d=2, c=1, t_size=8, ell=256, trials=100_000),
}


def config_for(experiment: str, **overrides) -> ExperimentConfig:
    """Experiment defaults merged with explicit overrides."""
    if experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {experiment!r}")
    base = dict(_DEFAULTS[experiment])
    base.update(overrides)
    return ExperimentConfig(experiment=experiment, **base)


def _derived_ell(cfg: ExperimentConfig) -> int:
    return cfg.ell if cfg.ell is not None else ell_from_delta(cfg.n, cfg.delta)


def _source(cfg: ExperimentConfig, prng: Prng, d: int, m: int):
    if cfg.oracle_random:
        return RandomOracle(prng, d, m)
    params = FamilyParams(c=cfg.c, d=d, kappa=cfg.kappa, ell=_derived_ell(cfg), m=m)
    return draw_family(prng, params)


def _keys(n: int) -> np.ndarray:
    return np.arange(1, n + 1, dtype=np.uint64)


# --- per-trial bodies -------------------------------------------------------


def _trial_cuckoo(cfg: ExperimentConfig, prng: Prng) -> tuple:
    m = math.ceil((1 + cfg.epsilon) * cfg.n)
    g = build(_source(cfg, prng, 2, m), _keys(cfg.n))
    ex = excess(g)
    return (int(ex <= cfg.s), ex)


def _trial_stash(cfg: ExperimentConfig, prng: Prng) -> tuple:
    m = math.ceil((1 + cfg.epsilon) * cfg.n)
    g = build(_source(cfg, prng, 2, m), _keys(cfg.n))
    return (excess(g),)


def _trial_mphf(cfg: ExperimentConfig, prng: Prng) -> tuple:
    m = math.ceil((1 + cfg.epsilon) * cfg.n)
    g = build(_source(cfg, prng, 2, m), _keys(cfg.n))
    return (int(core_is_empty(g)),)


_PROBE_KEYS = (1, 2)


def _trial_probe(cfg: ExperimentConfig, prng: Prng) -> tuple:
    sim = build_sim(prng, cfg.n, cfg.epsilon, cfg.delta, cfg.c, cfg.w)
    vals = sim_evaluate_many(sim, np.asarray(_PROBE_KEYS, dtype=np.uint64))
    return (int(vals[0]), int(vals[1]))


def _trial_gcuckoo(cfg: ExperimentConfig, prng: Prng, mode: str) -> tuple:
    m = math.ceil((1 + cfg.epsilon) * (cfg.d - 1) * cfg.n)
    fam = _source(cfg, prng, cfg.d, m)
    tbl = LabeledCuckooTable(fam, mode, n_expected=cfg.n)
    ok = True
    for x in _keys(cfg.n).tolist():
        if not tbl.insert(int(x)):
            ok = False
            break
    return (int(ok), tbl.max_label(), len(tbl))


def _trial_collision(cfg: ExperimentConfig, prng: Prng) -> tuple:
    q = cfg.n // cfg.d
    tau = cfg.tau if cfg.tau is not None else tau_threshold(cfg.n, cfg.d, cfg.alpha).tau
    src = _source(cfg, prng, cfg.d, q)
    run = run_collision(src, cfg.n, cfg.d, tau, cfg.max_rounds)
    return (run.rounds_used, int(run.exhausted))


def _trial_goleft(cfg: ExperimentConfig, prng: Prng) -> tuple:
    q = cfg.n // cfg.d
    run = run_goleft(_source(cfg, prng, cfg.d, q), cfg.n, cfg.d)
    return (run.max_load,)


def _trial_core(cfg: ExperimentConfig, prng: Prng) -> tuple:
    m = max(1, round(cfg.n / (cfg.ratio * cfg.d)))
    g = build(_source(cfg, prng, cfg.d, m), _keys(cfg.n))
    return (int(core_is_empty(g)),)


def _trial_components(cfg: ExperimentConfig, prng: Prng) -> tuple:
    m = math.ceil(cfg.m_mult * cfg.n)
    g = build(_source(cfg, prng, 2, m), _keys(cfg.n))
    summaries, _ = components(g)
    if not summaries:
        return (0, 0)
    return (
        max(s.vertex_count for s in summaries),
        max(s.edge_count - s.vertex_count for s in summaries),
    )


def _trial_deficiency(cfg: ExperimentConfig, prng: Prng) -> tuple:
    ell = _derived_ell(cfg)
    keys = _keys(cfg.t_size)
    distinct = []
    for _ in range(cfg.c):
        gj = draw_poly(prng, cfg.kappa, ell)
        distinct.append(int(np.unique(eval_poly_many(gj, keys)).size))
    report = _classify(cfg.t_size, distinct, cfg.kappa // 2)
    return (report.d_t, int(report.classification != "good"))


_TRIALS = {
    "cuckoo": (_trial_cuckoo, ("suitable", "excess")),
    "stash": (_trial_stash, ("excess",)),
    "mphf-acyclic": (_trial_mphf, ("acyclic",)),
    "uniform-probe": (_trial_probe, ("value_key1", "value_key2")),
    "gcuckoo-khosla": (lambda c, p: _trial_gcuckoo(c, p, KHOSLA), ("all_ok", "max_label", "stored")),
    "gcuckoo-eppstein": (lambda c, p: _trial_gcuckoo(c, p, EPPSTEIN), ("all_ok", "max_label", "stored")),
    "collision": (_trial_collision, ("rounds_used", "exhausted")),
    "goleft": (_trial_goleft, ("max_load",)),
    "core-threshold": (_trial_core, ("core_empty",)),
    "components": (_trial_components, ("max_vertices", "max_edge_surplus")),
    "deficiency": (_trial_deficiency, ("deficiency", "not_good")),
}


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {cfg.experiment!r}")
    if cfg.trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 < cfg.delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if cfg.experiment in ("collision", "goleft") and cfg.n % cfg.d != 0:
        raise ValueError(f"{cfg.experiment} needs d to divide n")
    if cfg.experiment in _NO_ORACLE and cfg.oracle_random:
        raise ValueError(f"{cfg.experiment} measures the family itself; "
                         "--oracle-random does not apply")
    if cfg.experiment.startswith("gcuckoo") and cfg.d < 3:
        raise ValueError("generalized cuckoo experiments need d >= 3")
    if cfg.threads < 1:
        raise ValueError("threads must be >= 1")


def _run_one(args) -> tuple[int, tuple, float]:
    cfg, index = args
    fn = _TRIALS[cfg.experiment][0]
    start = time.perf_counter()
    row = fn(cfg, Prng(cfg.seed).child(index))
    return index, row, time.perf_counter() - start


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    columns: tuple[str, ...]
    rows: list[tuple]
    summary_lines: list[str] = field(default_factory=list)
    passed: bool | None = None
    csv_path: str | None = None


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _write_csv(result: ExperimentResult, wall: list[float]) -> None:
    cfg = result.config
    if cfg.out is None:
        return
    with open(cfg.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("experiment", "trial", "ell") + result.columns + ("wall_time",))
        ell = _derived_ell(cfg)
        for i, row in enumerate(result.rows):
            writer.writerow(
                [cfg.experiment, i, ell] + [_fmt(v) for v in row] + [_fmt(wall[i])]
            )
    result.csv_path = cfg.out


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run all trials, write the CSV if an output path is set, and attach
    the summary with the pass/fail verdict."""
    _validate(cfg)
    fn, columns = _TRIALS[cfg.experiment]
    result = ExperimentResult(cfg, columns, [])
    wall = [0.0] * cfg.trials
    rows: list[tuple | None] = [None] * cfg.trials
    jobs = [(cfg, i) for i in range(cfg.trials)]
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            chunk = max(1, cfg.trials // (cfg.threads * 8))
            for index, row, secs in pool.map(_run_one, jobs, chunksize=chunk):
                rows[index] = row
                wall[index] = secs
    else:
        for job in jobs:
            index, row, secs = _run_one(job)
            rows[index] = row
            wall[index] = secs
    result.rows = rows  # type: ignore[assignment]
    _write_csv(result, wall)
    _summarize(result)
    return result


# --- summaries --------------------------------------------------------------


def _col(result: ExperimentResult, name: str) -> np.ndarray:
    j = result.columns.index(name)
    return np.array([row[j] for row in result.rows], dtype=np.float64)


def _echo(result: ExperimentResult) -> list[str]:
    cfg = result.config
    skip = {"out", "threads"}
    pairs = [
        f"{k}={v}" for k, v in vars(cfg).items() if k not in skip and v is not None
    ]
    return [
        "experiment parameters: " + " ".join(pairs),
        f"derived ell={_derived_ell(cfg)} trials={cfg.trials} seed={cfg.seed}",
    ]


def _summarize(result: ExperimentResult) -> None:
    cfg = result.config
    lines = _echo(result)
    passed: bool | None = None
    name = cfg.experiment

    if name == "cuckoo":
        fail_rate = 1.0 - _col(result, "suitable").mean()
        lines.append(f"failure_rate={fail_rate:.6g} (target O(1/n); threshold 0.02)")
        passed = fail_rate <= 0.02
    elif name == "stash":
        ex = _col(result, "excess")
        rates = [(ex >= s + 1).mean() for s in range(3)]
        lines.append(
            "excess tail rates: "
            + " ".join(f"P(ex>={s + 1})={rates[s]:.6g}" for s in range(3))
        )
        ratio = rates[1] / rates[0] if rates[0] > 0 else math.inf
        lines.append(f"tail ratio P(ex>=2)/P(ex>=1)={ratio:.6g} (threshold 0.1)")
        passed = rates[0] > rates[1] > rates[2] and ratio <= 0.1
    elif name == "mphf-acyclic":
        rate = _col(result, "acyclic").mean()
        exact, lower = acyclic_prob_bounds(cfg.epsilon)
        lines.append(
            f"empirical acyclic rate={rate:.6g} exact_rate={exact:.4f} "
            f"lower_bound={lower:.4f}"
        )
        passed = (lower - 0.03) <= rate <= (exact + 0.03)
    elif name == "uniform-probe":
        v0 = _col(result, "value_key1").astype(np.int64)
        v1 = _col(result, "value_key2").astype(np.int64)
        r = 1 << cfg.w
        marg = np.bincount(v0, minlength=r)
        joint = np.bincount(v0 * r + v1, minlength=r * r)
        p_marg = float(stats.chisquare(marg).pvalue)
        p_joint = float(stats.chisquare(joint).pvalue)
        lines.append(f"chi-square p-values: marginal={p_marg:.6g} pairwise={p_joint:.6g}")
        passed = p_marg > 0.001 and p_joint > 0.001
    elif name in ("gcuckoo-khosla", "gcuckoo-eppstein"):
        ok = _col(result, "all_ok")
        label = _col(result, "max_label")
        if name.endswith("khosla"):
            bound = 4 * math.log2(cfg.n)
        else:
            bound = math.log2(math.log2(cfg.n)) + 10
        ok_rate = ok.mean()
        in_bound = (label <= bound).mean()
        lines.append(
            f"all-inserted rate={ok_rate:.6g} max_label<= {bound:.4g} rate={in_bound:.6g}"
        )
        passed = ok_rate >= 0.99 and in_bound >= 0.99
    elif name == "collision":
        params = tau_threshold(cfg.n, cfg.d, cfg.alpha)
        tau = cfg.tau if cfg.tau is not None else params.tau
        rounds = _col(result, "rounds_used")
        exhausted = _col(result, "exhausted")
        done = ((exhausted == 0) & (rounds <= params.t)).mean()
        lines.append(
            f"tau={tau} t={params.t} beta={params.beta:.6g} k={params.k:.6g}"
        )
        lines.append(f"terminated within t rounds: rate={done:.6g} (threshold 0.99)")
        passed = done >= 0.99
    elif name == "goleft":
        load = _col(result, "max_load")
        bound = goleft_bound(cfg.n, cfg.d) + 8
        rate = (load <= bound).mean()
        lines.append(
            f"max_load: mean={load.mean():.6g} worst={int(load.max())} "
            f"bound={bound:.6g} in-bound rate={rate:.6g} (threshold 0.95)"
        )
        passed = rate >= 0.95 if cfg.d >= 2 else None
    elif name == "core-threshold":
        empty = _col(result, "core_empty").mean()
        thr = CORE_EMPTY_THRESHOLDS.get(cfg.d)
        lines.append(f"empty-core rate={empty:.6g} threshold_ratio={thr}")
        if thr is None:
            passed = None
        elif cfg.ratio <= thr:
            passed = empty >= 0.95
        else:
            passed = (1.0 - empty) >= 0.95
    elif name == "components":
        mv = _col(result, "max_vertices")
        surplus = _col(result, "max_edge_surplus")
        bound = 40 * math.log2(cfg.n)
        lines.append(
            f"max component vertices: mean={mv.mean():.6g} worst={int(mv.max())} "
            f"bound={bound:.6g}; worst edge surplus={int(surplus.max())}"
        )
        passed = bool((mv <= bound).all()) if cfg.m_mult >= 6 else None
    elif name == "deficiency":
        rate = _col(result, "not_good").mean()
        ell = _derived_ell(cfg)
        k = cfg.kappa // 2
        bound = min(1.0, (cfg.t_size**2 / ell) ** (cfg.c * k))
        sigma = math.sqrt(max(bound * (1 - bound), 1e-12) / cfg.trials)
        lines.append(
            f"bad-or-critical rate={rate:.6g} bound={bound:.6g} +3sigma={bound + 3 * sigma:.6g}"
        )
        passed = rate <= bound + 3 * sigma

    passed = None if passed is None else bool(passed)
    if passed is None:
        lines.append("result: NO-CLAIM (no acceptance threshold for these parameters)")
    else:
        lines.append(f"result: {'PASS' if passed else 'FAIL'}")
    result.summary_lines = lines
    result.passed = passed
