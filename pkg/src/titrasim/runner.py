"""Scenario configuration, cohort execution and run artifacts.

A scenario is one (strategy, model family) pairing plus every constant the
loop needs; all fields carry defaults so stored configs stay minimal.  Each
subject owns independent random streams spawned from the master seed, which
makes run outputs byte-identical for any worker count or cohort split.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict, replace
import json
import math
import os

import numpy as np

from .baselines import ExtremumSeekingTitrator, Rule202Titrator, StepwiseTitrator
from .cohort import (DailySubjectBatch, ModelConstants, SubjectBatch, p_egp_sweep,
                     sample_subject)
from .engine import EngineConfig, TitrationEngine
from .metrics import (METRIC_FIELDS, RangeAccumulator, cohort_aggregate,
                      fbg_range_shares)
from .sensors import ScoreReporter, SmbgNoise, sample_score_traits

STRATEGIES = ("adaos", "rule202", "step", "esc")
MODELS = ("m1", "m2", "m3")

DAY_COLUMNS = ("subject_id", "day", "dose_u", "fbg_true", "fbg_meas", "y_s", "x_s",
               "k_p_hat", "k_s_hat", "cost_total")
LOG_FIELDS = DAY_COLUMNS[2:]
SHARE_FIELDS = ("fbg_in_4_6_pct", "fbg_lt_4_pct", "fbg_lt_3_pct")
MANIFEST_COLUMNS = ("subject_id", "family", "x_g0", "sigma_g", "p1", "p4", "p6", "p7",
                    "k_i", "x_i0", "x_e0", "c1", "c2", "c4", "p_egp",
                    "rho", "d", "h", "eta", "p_f")


@dataclass
class ScenarioConfig:
    """One runnable trial arm; every tunable of the loop is a defaulted field."""

    scenario: str = "adaos"
    strategy: str = "adaos"
    model: str = "m2"
    n_subjects: int = 200
    n_days: int = 365
    seed: int = 7
    workers: int = 1
    # controller / optimizer
    reference: float = 5.5
    score_max: float = 10.0
    score_scale: str = "continuous"   # "discrete" reports integer scores
    kp0: float = 0.3
    ks0: float = 1.0
    freeze_ks: bool = False
    use_score: bool = True
    use_missing: bool = False         # skipped-report behaviour on or off
    lam: float = 0.9
    eps_phi: float = 1e-3
    dither_amp: float = 0.01
    alpha: float = 1e-3
    beta1: float = 0.99
    beta2: float = 0.999
    eps_opt: float = 1e-8
    initial_dose: float = 0.0
    check_consistency: bool = False
    # weekly baselines
    cadence_days: int = 7
    # extremum-seeking baseline
    esc_gain: float = 0.05
    esc_dither_u: float = 0.5
    esc_dose_max: float = 300.0
    # m1 sweep (defines that cohort, so n_subjects is ignored there)
    p_egp_start: float = 110.0
    p_egp_stop: float = 410.0
    p_egp_step: float = 5.0
    # physiology
    dt_min: int = 5
    physio: dict = field(default_factory=dict)


PRESETS: dict[str, dict] = {
    "adaos": {},
    "adaos_h5": {"score_max": 5.0, "score_scale": "discrete"},
    "adaos_f": {"freeze_ks": True, "use_score": False, "kp0": 0.8},
    "adaos_pf": {"use_missing": True},
    "adaos_c": {"freeze_ks": True, "use_score": False, "kp0": 1.4,
                "reference": 5.0, "model": "m1"},
    "rule202": {"strategy": "rule202"},
    "step": {"strategy": "step"},
    "esc": {"strategy": "esc", "reference": 5.0, "initial_dose": 5.0},
}


def load_scenario(spec: str, overrides: dict | None = None) -> ScenarioConfig:
    """Resolve a preset name or a JSON config path, then apply overrides."""
    if spec in PRESETS:
        values = dict(PRESETS[spec])
        values.setdefault("scenario", spec)
    elif os.path.exists(spec):
        with open(spec) as fh:
            values = json.load(fh)
        if not isinstance(values, dict):
            raise ValueError(f"scenario file {spec} must hold a JSON object")
        values.setdefault("scenario", os.path.splitext(os.path.basename(spec))[0])
    else:
        raise ValueError(f"unknown scenario {spec!r}; presets: {', '.join(sorted(PRESETS))}")
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    known = set(ScenarioConfig.__dataclass_fields__)
    bad = set(values) - known
    if bad:
        raise ValueError(f"unknown scenario fields: {sorted(bad)}")
    cfg = ScenarioConfig(**values)
    if cfg.strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}")
    if cfg.model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}")
    if cfg.score_scale not in ("continuous", "discrete"):
        raise ValueError("score_scale must be 'continuous' or 'discrete'")
    if cfg.n_days < 1 or cfg.n_subjects < 1 or cfg.workers < 1:
        raise ValueError("n_days, n_subjects and workers must be positive")
    return cfg


def make_strategy(cfg: ScenarioConfig):
    """Fresh titrator instance for one subject."""
    if cfg.strategy == "adaos":
        ec = EngineConfig(reference=cfg.reference, score_max=cfg.score_max,
                          kp0=cfg.kp0, ks0=cfg.ks0, freeze_ks=cfg.freeze_ks,
                          use_score=cfg.use_score, lam=cfg.lam, eps_phi=cfg.eps_phi,
                          dither_amp=cfg.dither_amp, alpha=cfg.alpha, beta1=cfg.beta1,
                          beta2=cfg.beta2, eps_opt=cfg.eps_opt,
                          check_consistency=cfg.check_consistency)
        return TitrationEngine(ec, initial_dose=cfg.initial_dose)
    if cfg.strategy == "rule202":
        return Rule202Titrator(initial_dose=cfg.initial_dose, reference=cfg.reference,
                               cadence_days=cfg.cadence_days)
    if cfg.strategy == "step":
        return StepwiseTitrator(initial_dose=cfg.initial_dose, reference=cfg.reference,
                                cadence_days=cfg.cadence_days)
    if cfg.strategy == "esc":
        return ExtremumSeekingTitrator(initial_dose=cfg.initial_dose,
                                       reference=cfg.reference, gain=cfg.esc_gain,
                                       dither_u=cfg.esc_dither_u,
                                       dose_max=cfg.esc_dose_max, lam=cfg.lam)
    raise ValueError(f"unknown strategy {cfg.strategy!r}")


class DropRatioTracker:
    """Streaming per-subject glucose drop ratio at the daily sampling instant.

    Matches sensors.decrease_ratio on the concatenated trace (fasting sample
    over the trailing mean of h_days * samples_per_day + 1 samples, shorter
    while history is still filling) but carries only per-day sums, never the
    full sample grid.
    """

    def __init__(self, n: int, h_days, samples_per_day: int, head_cols: int,
                 n_days: int):
        self.n = n
        self.h = np.asarray(h_days, dtype=np.int64)
        if self.h.shape != (n,) or np.any(self.h < 1):
            raise ValueError("need one positive window length per subject")
        self.spd = int(samples_per_day)
        self.head_cols = int(head_cols)
        self.S = np.zeros((n_days, n))      # full-day sums
        self.head = np.zeros((n_days, n))   # sums of columns before the sample
        self.C = np.zeros((n_days + 1, n))  # C[t] = sum of S over days < t
        self.t = 0

    def ratio(self, head_today: np.ndarray, xc_today: np.ndarray) -> np.ndarray:
        """Drop ratio for the current day, before commit()."""
        t = self.t
        idx = np.arange(self.n)
        total = self.C[t] + head_today + xc_today
        count = np.full(self.n, float(t * self.spd + self.head_cols + 1))
        full = self.h <= t
        if np.any(full):
            b = np.where(full, t - self.h, 0)
            # window start sits at the sampling column of day t - h, so day b
            # contributes its tail from that column onward
            tail = (self.S[b, idx] - self.head[b, idx]) + (self.C[t] - self.C[b + 1, idx])
            w_total = tail + head_today + xc_today
            total = np.where(full, w_total, total)
            count = np.where(full, (self.h * self.spd + 1).astype(float), count)
        with np.errstate(invalid="ignore", divide="ignore"):
            r = xc_today * count / total
        return np.clip(r, 0.0, 1.0)

    def commit(self, day_sum: np.ndarray, head_today: np.ndarray,
               xc_today: np.ndarray):
        """Store the finished day; xc_today is accepted for symmetry only."""
        self.S[self.t] = day_sum
        self.head[self.t] = head_today
        self.C[self.t + 1] = self.C[self.t] + day_sum
        self.t += 1


@dataclass
class RunResult:
    """Everything a finished scenario produced, pre-serialization."""

    config: ScenarioConfig
    metrics: list                 # per subject, None where the run failed
    shares: list                  # fasting-range share dicts, None on failure
    aggregate: dict               # metric -> {mean, iqr} over surviving subjects
    fbg_mean: dict
    fbg_worst: dict
    failures: list
    max_cond: float | None
    logs: dict                    # field -> (n_days, n_subjects) array
    manifest: list


def _simulate_chunk(cfg: ScenarioConfig, constants: ModelConstants, offset: int,
                    seed_seqs, p_egp_values) -> dict:
    """Run one contiguous slice of the cohort; self-contained per subject."""
    n = len(seed_seqs)
    n_days = cfg.n_days
    params_rng, physio_rng, smbg_rng, score_rng = [], [], [], []
    for ss in seed_seqs:
        kids = ss.spawn(4)
        params_rng.append(np.random.default_rng(kids[0]))
        physio_rng.append(np.random.default_rng(kids[1]))
        smbg_rng.append(np.random.default_rng(kids[2]))
        score_rng.append(np.random.default_rng(kids[3]))

    subjects, traits = [], []
    for i in range(n):
        if cfg.model == "m1":
            subjects.append(sample_subject("m1", params_rng[i], constants,
                                           p_egp=float(p_egp_values[i])))
        else:
            subjects.append(sample_subject(cfg.model, params_rng[i], constants))
        traits.append(sample_score_traits(params_rng[i]))

    if cfg.model == "m1":
        batch = DailySubjectBatch(subjects, physio_rng, constants)
    else:
        batch = SubjectBatch(subjects, physio_rng, constants, dt_min=cfg.dt_min)

    smbg = SmbgNoise()
    discrete = cfg.score_scale == "discrete"
    reporters = []
    for i in range(n):
        tr = traits[i] if cfg.use_missing else replace(traits[i], p_f=0.0)
        reporters.append(ScoreReporter(tr, cfg.score_max, score_rng[i],
                                       discrete=discrete))
    strategies = [make_strategy(cfg) for _ in range(n)]
    tracker = DropRatioTracker(n, [tr.h for tr in traits], batch.samples_per_day,
                               batch.sample_col, n_days)
    acc = RangeAccumulator(n)
    logs = {name: np.full((n_days, n), np.nan) for name in LOG_FIELDS}
    failed = [None] * n

    for day in range(n_days):
        def decide(fbg, morning, _day=day):
            head = morning[:, :-1].sum(axis=1)
            xc = morning[:, -1]
            x_r = tracker.ratio(head, xc)
            if cfg.model == "m1":
                y_meas = fbg
            else:
                z = np.array([r.standard_normal() for r in smbg_rng])
                y_meas = np.maximum(fbg + smbg.sigma(fbg) * z, 0.0)
            doses = np.zeros(n)
            for i in range(n):
                if failed[i] is not None:
                    continue
                try:
                    x_s, y_s = reporters[i].report(float(x_r[i]), float(fbg[i]))
                    dec = strategies[i].step_day(float(y_meas[i]), y_s)
                except (ValueError, FloatingPointError) as exc:
                    failed[i] = {"subject_id": offset + i, "day": _day + 1,
                                 "error": str(exc)}
                    continue
                doses[i] = dec.dose
                logs["dose_u"][_day, i] = dec.dose
                logs["fbg_true"][_day, i] = fbg[i]
                logs["fbg_meas"][_day, i] = y_meas[i]
                logs["y_s"][_day, i] = y_s
                logs["x_s"][_day, i] = x_s
                logs["k_p_hat"][_day, i] = dec.k_p_hat
                logs["k_s_hat"][_day, i] = dec.k_s_hat
                logs["cost_total"][_day, i] = dec.cost.total
            return doses

        trace, fbg, doses = batch.run_day(decide)
        finite = np.isfinite(trace).all(axis=1)
        for i in np.nonzero(~finite)[0]:
            if failed[i] is None:
                failed[i] = {"subject_id": offset + int(i), "day": day + 1,
                             "error": "non-finite physiology state"}
        acc.add_day(trace)
        c = batch.sample_col
        tracker.commit(trace.sum(axis=1), trace[:, :c].sum(axis=1), trace[:, c])

    metrics, shares = [], []
    for i in range(n):
        if failed[i] is not None:
            metrics.append(None)
            shares.append(None)
            continue
        metrics.append(acc.finalize(i, logs["x_s"][:, i], logs["dose_u"][:, i],
                                    cfg.score_max))
        shares.append(fbg_range_shares(logs["fbg_true"][:, i]))
    conds = [float(getattr(getattr(s, "estimator", None), "max_cond", math.nan))
             for s in strategies]
    manifest = []
    for i in range(n):
        row = {"subject_id": offset + i}
        row.update(asdict(subjects[i]))
        tr = traits[i]
        row.update({"rho": tr.rho, "d": tr.d, "h": tr.h, "eta": tr.eta, "p_f": tr.p_f})
        manifest.append(row)
    return {"metrics": metrics, "shares": shares, "failed": failed,
            "max_cond": conds, "logs": logs, "manifest": manifest}


def run_scenario(cfg: ScenarioConfig) -> RunResult:
    """Simulate the whole cohort and aggregate outcomes."""
    constants = replace(ModelConstants(), **cfg.physio) if cfg.physio else ModelConstants()
    if cfg.model == "m1":
        p_egp = p_egp_sweep(cfg.p_egp_start, cfg.p_egp_stop, cfg.p_egp_step)
        n_subjects = int(p_egp.size)
    else:
        p_egp = None
        n_subjects = cfg.n_subjects
    seeds = np.random.SeedSequence(cfg.seed).spawn(n_subjects)
    workers = max(1, min(cfg.workers, n_subjects))
    bounds = np.linspace(0, n_subjects, workers + 1).astype(int)
    jobs = []
    for w in range(workers):
        lo, hi = int(bounds[w]), int(bounds[w + 1])
        if lo < hi:
            pe = None if p_egp is None else p_egp[lo:hi]
            jobs.append((lo, seeds[lo:hi], pe))
    if len(jobs) == 1:
        chunks = [_simulate_chunk(cfg, constants, *jobs[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
            futures = [pool.submit(_simulate_chunk, cfg, constants, *job)
                       for job in jobs]
            chunks = [f.result() for f in futures]

    logs = {k: np.concatenate([ch["logs"][k] for ch in chunks], axis=1)
            for k in LOG_FIELDS}
    metrics, shares, failures, conds, manifest = [], [], [], [], []
    for ch in chunks:
        metrics.extend(ch["metrics"])
        shares.extend(ch["shares"])
        failures.extend(f for f in ch["failed"] if f is not None)
        conds.extend(ch["max_cond"])
        manifest.extend(ch["manifest"])

    ok_metrics = [m for m in metrics if m is not None]
    aggregate = cohort_aggregate(ok_metrics) if ok_metrics else {}
    fbg_mean, fbg_worst = {}, {}
    ok_shares = [s for s in shares if s is not None]
    if ok_shares:
        for key in SHARE_FIELDS:
            vals = np.array([s[key] for s in ok_shares])
            fbg_mean[key] = float(vals.mean())
            worst = vals.min() if key == "fbg_in_4_6_pct" else vals.max()
            fbg_worst[key] = float(worst)
    finite = [c for c in conds if math.isfinite(c)]
    return RunResult(config=cfg, metrics=metrics, shares=shares, aggregate=aggregate,
                     fbg_mean=fbg_mean, fbg_worst=fbg_worst, failures=failures,
                     max_cond=max(finite) if finite else None, logs=logs,
                     manifest=manifest)


def _fmt(v) -> str:
    """Full-precision, platform-stable float cell."""
    return repr(float(v))


def emit_run(result: RunResult, out_dir: str, emit_cohort: bool = False) -> dict:
    """Write days.csv, subjects.csv and summary.json (plus cohort.csv on request)."""
    os.makedirs(out_dir, exist_ok=True)
    cfg = result.config
    n_days, n = result.logs["dose_u"].shape
    paths = {}

    days_path = os.path.join(out_dir, "days.csv")
    with open(days_path, "w", newline="") as fh:
        fh.write(",".join(DAY_COLUMNS) + "\n")
        for i in range(n):
            cols = [result.logs[name][:, i] for name in LOG_FIELDS]
            for d in range(n_days):
                cells = ",".join(_fmt(col[d]) for col in cols)
                fh.write(f"{i},{d + 1},{cells}\n")
    paths["days"] = days_path

    subj_path = os.path.join(out_dir, "subjects.csv")
    header = ["subject_id", "family"] + METRIC_FIELDS + list(SHARE_FIELDS) + ["failed_day"]
    failed_day = {f["subject_id"]: f["day"] for f in result.failures}
    with open(subj_path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(n):
            m = result.metrics[i]
            if m is None:
                body = ["nan"] * (len(METRIC_FIELDS) + len(SHARE_FIELDS))
            else:
                body = [_fmt(getattr(m, name)) for name in METRIC_FIELDS]
                body += [_fmt(result.shares[i][k]) for k in SHARE_FIELDS]
            row = [str(i), result.manifest[i]["family"]] + body
            row.append(str(failed_day.get(i, "")))
            fh.write(",".join(row) + "\n")
    paths["subjects"] = subj_path

    summary = {
        "scenario": cfg.scenario,
        "strategy": cfg.strategy,
        "model": cfg.model,
        "n_subjects": n,
        "n_days": n_days,
        "seed": cfg.seed,
        "reference": cfg.reference,
        "score_max": cfg.score_max,
        "n_failed": len(result.failures),
        "failures": result.failures,
        "metrics": result.aggregate,
        "fbg_shares_mean": result.fbg_mean,
        "fbg_shares_worst": result.fbg_worst,
        "max_cond_p": result.max_cond,
    }
    sum_path = os.path.join(out_dir, "summary.json")
    with open(sum_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths["summary"] = sum_path

    if emit_cohort:
        cohort_path = os.path.join(out_dir, "cohort.csv")
        with open(cohort_path, "w", newline="") as fh:
            fh.write(",".join(MANIFEST_COLUMNS) + "\n")
            for row in result.manifest:
                cells = []
                for key in MANIFEST_COLUMNS:
                    v = row[key]
                    if key in ("subject_id", "h"):
                        cells.append(str(int(v)))
                    elif key == "family":
                        cells.append(str(v))
                    else:
                        cells.append(_fmt(v))
                fh.write(",".join(cells) + "\n")
        paths["cohort"] = cohort_path
    return paths


def write_comparison(results: dict, out_dir: str) -> str:
    """Side-by-side cohort means and IQRs, one row per scenario."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "comparison.csv")
    with open(path, "w", newline="") as fh:
        head = ["scenario"] + [f"{name}_{stat}" for name in METRIC_FIELDS
                               for stat in ("mean", "iqr")]
        fh.write(",".join(head) + "\n")
        for label, res in results.items():
            cells = [label]
            for name in METRIC_FIELDS:
                stat = res.aggregate.get(name, {})
                cells.append(_fmt(stat.get("mean", math.nan)))
                cells.append(_fmt(stat.get("iqr", math.nan)))
            fh.write(",".join(cells) + "\n")
    return path
