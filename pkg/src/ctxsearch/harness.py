"""Experiment runner: plays (policy x instance x loss) games, audits
per-round invariants, and emits machine-readable logs and summaries.

Outputs carry ``schema_version`` 1.  JSONL files start with a header
object followed by one object per round; CSV files use the fixed column
order t, sale, guess, truth_dot, loss, width, cum_loss and then the
flattened policy-diagnostic columns.  Identical config and seed give
byte-identical JSONL output.

In ``rounds+diagnostics`` mode the runner evaluates the per-round
invariant audits (potential monotonicity, split-ratio bounds, bucket
bounds, consistency of the hidden vector) and records every violation;
violations make the CLI exit nonzero unless explicitly allowed.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .adversaries import InstanceSpec, generate
from .geometry import Halfspace, Polytope, clip, extent
from .intrinsic import (
    CheckResult,
    check_cone_bound,
    check_cylinder_identity,
    check_isoperimetric,
    check_steiner,
    check_valuation_additivity,
)
from .policies import (
    PRICING_POLICIES,
    SYMMETRIC_POLICIES,
    POLICY_NAMES,
    EstimatorFailure,
    SectionEstimator,
    TwoPotentialPolicy2D,
    build_policy,
    constant_ladder,
    pricing_ladder,
)
from .rng import PortableRng
from .search import LossSpec, RoundRecord, evaluate_loss, play_round

SCHEMA_VERSION = 1
DEFAULT_TIME_LIMIT_S = 600.0
LOG_LEVELS = ("summary", "rounds", "rounds+diagnostics")
CONSISTENCY_TOL = 1e-7


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    instance: InstanceSpec
    policy_name: str
    loss: LossSpec
    policy_T: int | None = None
    policy_beta: float | None = None
    policy_seed: int = 0
    log_level: str = "summary"
    output_path: str | None = None
    output_format: str = "jsonl"
    time_limit_s: float = DEFAULT_TIME_LIMIT_S
    allow_violations: bool = False

    def __post_init__(self):
        if self.policy_name not in POLICY_NAMES:
            raise ConfigError(f"unknown policy {self.policy_name!r}")
        if self.log_level not in LOG_LEVELS:
            raise ConfigError(f"unknown log level {self.log_level!r}")
        if self.output_format not in ("csv", "jsonl"):
            raise ConfigError(f"unknown output format {self.output_format!r}")
        if self.policy_name in PRICING_POLICIES:
            if self.loss.kind not in ("pricing", "one-sided"):
                raise ConfigError(
                    f"{self.policy_name} requires pricing or one-sided loss")
        if self.policy_name in SYMMETRIC_POLICIES:
            if self.loss.kind not in ("symmetric", "power"):
                raise ConfigError(
                    f"{self.policy_name} requires symmetric or power loss")
        if self.policy_name in ("midpoint1d", "kl1d") and self.instance.d != 1:
            raise ConfigError(f"{self.policy_name} needs a 1-D instance")
        if self.policy_name in ("sym2d", "price2d") and self.instance.d != 2:
            raise ConfigError(f"{self.policy_name} needs a 2-D instance")

    def as_dict(self) -> dict:
        return {
            "instance": {"kind": self.instance.kind, "d": self.instance.d,
                         "T": self.instance.T, "seed": self.instance.seed},
            "policy": {"name": self.policy_name, "T": self.policy_T,
                       "beta": self.policy_beta, "seed": self.policy_seed},
            "loss": {"kind": self.loss.kind, "beta": self.loss.beta},
            "log_level": self.log_level,
        }


@dataclass
class Violation:
    t: int
    check: str
    margin: float
    detail: dict = field(default_factory=dict)


@dataclass
class RegretSummary:
    total_regret: float
    rounds: int
    max_round_loss: float
    per_bucket_regret: dict
    wall_time_s: float
    seed: int
    invariant_violations: int
    worst_violation_margin: float
    aborted: str | None = None   # None, "time-limit", or "estimator-failure"

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "total_regret": self.total_regret,
            "rounds": self.rounds,
            "max_round_loss": self.max_round_loss,
            "per_bucket_regret": self.per_bucket_regret,
            "wall_time_s": self.wall_time_s,
            "seed": self.seed,
            "invariant_violations": self.invariant_violations,
            "worst_violation_margin": self.worst_violation_margin,
            "aborted": self.aborted,
        }


# ---------------------------------------------------------------------
# per-round invariant audits
# ---------------------------------------------------------------------


class InvariantAuditor:
    """Accumulates per-round invariant checks for one game."""

    def __init__(self, config: ExperimentConfig, v: np.ndarray):
        self.config = config
        self.v = v
        self.violations: list[Violation] = []
        self._prev_diag: dict | None = None
        self._prev_potential_2d: float | None = None
        self._audit_rng = PortableRng(config.instance.seed ^ 0x5EED)

    def flag(self, t: int, check: str, margin: float, **detail):
        self.violations.append(Violation(t, check, float(margin), detail))

    def after_round(self, t: int, state_before: Polytope, state_after: Polytope,
                    record: RoundRecord, u: np.ndarray):
        cfg = self.config
        # the hidden vector must stay feasible under every policy and seed
        if not state_after.contains(self.v, CONSISTENCY_TOL):
            viol = float(np.max(state_after.A @ self.v - state_after.b))
            self.flag(t, "consistency", viol)
        if cfg.loss.kind == "symmetric" and record.loss > record.width + 1e-9:
            self.flag(t, "loss-width", record.loss - record.width)
        diag = record.policy_diagnostics
        name = cfg.policy_name
        if name == "sym2d":
            self._audit_sym2d(t, diag, record)
        elif name == "symsearch":
            self._audit_symsearch(t, diag, record, state_before)
        elif name == "pricesearch":
            self._audit_pricesearch(t, diag, record)
        elif name == "widthhalf":
            self._audit_width_split(t, state_before, u, record)
        elif name == "volhalf":
            self._audit_volume_split(t, state_before, u, record)
        self._prev_diag = diag

    # -- planar two-potential rule ------------------------------------

    def _audit_sym2d(self, t: int, diag: dict, record: RoundRecord):
        pot = diag.get("potential")
        if pot is None:
            return
        if self._prev_potential_2d is not None:
            drop = self._prev_potential_2d - pot
            if drop < -1e-9:
                self.flag(t, "2d-potential-monotone", drop)
        self._prev_potential_2d = pot

    def _audit_symsearch(self, t: int, diag: dict, record: RoundRecord,
                         state_before: Polytope):
        if diag.get("mode") != "ladder":
            return
        d = state_before.dim
        j = diag.get("chosen_j")
        w = diag.get("w", 0.0)
        c = constant_ladder(d)
        vj, hwj = diag.get("vj_state", 0.0), diag.get("vj_state_hw", 0.0)
        # chosen index must hold a cone's worth of volume
        lower = c[j - 1] * w ** j / j
        if vj + hwj < lower - 1e-12:
            self.flag(t, "cone-volume-lower", vj + hwj - lower, j=j, w=w)
        # the kept side must have shed a quarter of V_j
        v_next = diag.get("vj_high" if record.sale else "vj_low", 0.0)
        hw_next = diag.get("vj_high_hw" if record.sale else "vj_low_hw", 0.0)
        bound = 0.75 * (vj + hwj) + hw_next + 1e-12
        if v_next > bound:
            self.flag(t, "three-quarter-split", v_next - bound, j=j)
        # potential must not increase beyond joint noise
        if self._prev_diag and self._prev_diag.get("mode") == "ladder":
            prev_pot = self._prev_diag.get("potential", 0.0)
            prev_hw = self._prev_diag.get("potential_hw", 0.0)
            pot = diag.get("potential", 0.0)
            hw = diag.get("potential_hw", 0.0)
            if pot > prev_pot + prev_hw + hw + 1e-9:
                self.flag(t, "potential-monotone",
                          pot - (prev_pot + prev_hw + hw))

    def _audit_pricesearch(self, t: int, diag: dict, record: RoundRecord):
        phi = diag.get("phi", [])
        phi_hw = diag.get("phi_hw", [0.0] * len(phi))
        for i in range(len(phi) - 1):
            if phi[i + 1] > phi[i] + phi_hw[i] + phi_hw[i + 1] + 1e-9:
                self.flag(t, "phi-ladder-monotone",
                          phi[i + 1] - phi[i], i=i + 1)
        if diag.get("case") != "search":
            return
        w = diag.get("w", 0.0)
        ell_kj = diag.get("ell_kJ", math.inf)
        if w > 2.0 * ell_kj + 1e-9:
            self.flag(t, "width-bucket-bound", w - 2.0 * ell_kj)
        cfg = self.config
        T = cfg.policy_T or cfg.instance.T
        d = cfg.instance.d
        alpha = diag.get("ladder_alpha", 1.0 + 1.0 / d)
        cap = math.log(math.log(2.0 * d * d * T)) / math.log(alpha) + 1.0
        ks = diag.get("k", [])
        J = diag.get("chosen_J")
        if J is not None and ks and ks[J - 1] > cap:
            self.flag(t, "bucket-cap", ks[J - 1] - cap, cap=cap)
        if not record.sale:
            # after overpricing, the kept side's potential falls a bucket
            v_low = diag.get("vJ_low")
            hw_low = diag.get("vJ_low_hw", 0.0)
            if v_low is not None and J is not None:
                lhs = (math.factorial(J) * max(v_low - hw_low, 0.0)) ** (1.0 / J)
                ell_next = diag.get("ell_kJ1", math.inf)
                if lhs > ell_next + 1e-9:
                    self.flag(t, "overprice-bucket-advance", lhs - ell_next)

    def _audit_width_split(self, t: int, state: Polytope, u: np.ndarray,
                           record: RoundRecord):
        d = state.dim
        if d > 6 or not state.has_vertex_cache():
            return
        se = SectionEstimator(state, u, self._audit_rng.spawn(t),
                              budget_bisect=512, budget_report=512)
        p = record.guess
        for j in range(1, d + 1):
            v_lo, hw_lo = se.side_estimate(j, p, -1, "bisect")
            v_hi, hw_hi = se.side_estimate(j, p, +1, "bisect")
            ratio = 2.0 ** (-j)
            if v_lo + hw_lo < ratio * (v_hi - hw_hi) - 1e-12:
                self.flag(t, "midpoint-split-ratio",
                          v_lo + hw_lo - ratio * (v_hi - hw_hi), j=j, side="low")
            if v_hi + hw_hi < ratio * (v_lo - hw_lo) - 1e-12:
                self.flag(t, "midpoint-split-ratio",
                          v_hi + hw_hi - ratio * (v_lo - hw_lo), j=j, side="high")

    def _audit_volume_split(self, t: int, state: Polytope, u: np.ndarray,
                            record: RoundRecord):
        d = state.dim
        p = record.guess
        ext = extent(state, u)
        if not (ext.lo < p < ext.hi):
            return
        lower = clip(state, Halfspace(u, p))
        upper = clip(state, Halfspace(-u, -p))
        if lower.is_empty or upper.is_empty:
            return
        w_lo = extent(lower, u).width
        w_hi = extent(upper, u).width
        resid = abs(record.policy_diagnostics.get("split_residual", 0.0))
        # exact-split guarantee degrades with the allowed split imbalance
        ratio = (2.0 * (1.0 - 2.0 * max(resid, 0.02))) ** (1.0 / d) - 1.0
        if w_lo < ratio * w_hi - 1e-9:
            self.flag(t, "volume-split-width-ratio", w_lo - ratio * w_hi)
        if w_hi < ratio * w_lo - 1e-9:
            self.flag(t, "volume-split-width-ratio", w_hi - ratio * w_lo)


# ---------------------------------------------------------------------
# run / sweep
# ---------------------------------------------------------------------


def run(config: ExperimentConfig) -> tuple[RegretSummary, list[RoundRecord]]:
    """Play the configured game; returns the summary and round records.

    Records are collected for log levels above "summary" or when an
    output path is set; diagnostics mode also runs the invariant audits.
    """
    t_start = time.monotonic()
    v, contexts = generate(config.instance)
    T = config.instance.T
    policy_T = config.policy_T if config.policy_T is not None else T
    policy = build_policy(config.policy_name, T=policy_T,
                          beta=config.policy_beta, seed=config.policy_seed)
    state = Polytope.unit_box(config.instance.d)
    spec = config.loss
    keep_rounds = config.log_level != "summary" or config.output_path
    diagnostics = config.log_level == "rounds+diagnostics"
    auditor = InvariantAuditor(config, v) if diagnostics else None

    records: list[RoundRecord] = []
    total = 0.0
    max_loss = 0.0
    per_bucket: dict[str, float] = {}
    aborted = None
    rounds_done = 0
    for t in range(1, T + 1):
        if time.monotonic() - t_start > config.time_limit_s:
            aborted = "time-limit"
            break
        u = contexts[t - 1]
        try:
            new_state, record = play_round(state, v, u, t, policy, spec)
        except EstimatorFailure:
            aborted = "estimator-failure"
            break
        if auditor is not None:
            auditor.after_round(t, state, new_state, record, u)
        state = new_state
        total += record.loss
        max_loss = max(max_loss, record.loss)
        key = _bucket_key(config.policy_name, record.policy_diagnostics)
        if key is not None:
            per_bucket[key] = per_bucket.get(key, 0.0) + record.loss
        if keep_rounds:
            records.append(record)
        rounds_done = t

    violations = auditor.violations if auditor else []
    summary = RegretSummary(
        total_regret=total,
        rounds=rounds_done,
        max_round_loss=max_loss,
        per_bucket_regret=dict(sorted(per_bucket.items())),
        wall_time_s=time.monotonic() - t_start,
        seed=config.instance.seed,
        invariant_violations=len(violations),
        worst_violation_margin=min((vi.margin for vi in violations), default=0.0),
        aborted=aborted,
    )
    if config.output_path:
        write_round_log(config, summary, records, violations)
    return summary, records


def _bucket_key(policy_name: str, diag: dict) -> str | None:
    if policy_name in ("symsearch",):
        j = diag.get("chosen_j")
        return f"j={j}" if j is not None else None
    if policy_name in ("pricesearch",):
        J = diag.get("chosen_J")
        if J is None:
            return "floor"
        ks = diag.get("k") or []
        kj = ks[J - 1] if 0 < J <= len(ks) else None
        return f"J={J},k={kj}"
    if policy_name == "price2d":
        return diag.get("case")
    if policy_name == "kl1d":
        ks = diag.get("k") or []
        return f"k={ks[0]}" if ks else "floor"
    return None


# ---------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def record_to_dict(r: RoundRecord) -> dict:
    return {
        "t": r.t,
        "context": [float(x) for x in r.context],
        "guess": r.guess,
        "truth_dot": r.truth_dot,
        "sale": r.sale,
        "loss": r.loss,
        "width": r.width,
        "policy_diagnostics": r.policy_diagnostics,
    }


def write_round_log(config: ExperimentConfig, summary: RegretSummary,
                    records: list[RoundRecord],
                    violations: list[Violation]) -> None:
    path = config.output_path
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    if config.output_format == "jsonl":
        with open(path, "w") as fh:
            summary_dict = summary.as_dict()
            summary_dict.pop("wall_time_s")   # keep logs byte-reproducible
            header = {"schema_version": SCHEMA_VERSION,
                      "config": config.as_dict(),
                      "summary": summary_dict,
                      "violations": [vars(vi) for vi in violations]}
            fh.write(json.dumps(header, default=_json_default, sort_keys=True))
            fh.write("\n")
            for r in records:
                fh.write(json.dumps(record_to_dict(r), default=_json_default,
                                    sort_keys=True))
                fh.write("\n")
    else:
        diag_keys = sorted({k for r in records for k in r.policy_diagnostics})
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "sale", "guess", "truth_dot", "loss",
                             "width", "cum_loss"] + diag_keys)
            cum = 0.0
            for r in records:
                cum += r.loss
                row = [r.t, int(r.sale), repr(r.guess), repr(r.truth_dot),
                       repr(r.loss), repr(r.width), repr(cum)]
                for k in diag_keys:
                    val = r.policy_diagnostics.get(k)
                    if isinstance(val, (list, tuple, dict)):
                        row.append(json.dumps(val, default=_json_default))
                    elif val is None:
                        row.append("")
                    else:
                        row.append(repr(val) if isinstance(val, float) else val)
                writer.writerow(row)


def sweep(configs: list[ExperimentConfig]) -> tuple[str, int]:
    """Run all configs; returns (CSV text, count of failed runs).

    Row order follows the input order.  CSLAB_THREADS caps process
    parallelism; failures appear as rows with a nonempty status.
    """
    threads = int(os.environ.get("CSLAB_THREADS", "1") or "1")
    results: list[tuple[ExperimentConfig, RegretSummary | None, str]] = []
    if threads > 1 and len(configs) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futs = [pool.submit(_run_for_sweep, c) for c in configs]
            for cfg, fut in zip(configs, futs):
                summary, err = fut.result()
                results.append((cfg, summary, err))
    else:
        for cfg in configs:
            summary, err = _run_for_sweep(cfg)
            results.append((cfg, summary, err))

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["schema_version", "instance_kind", "d", "T", "seed",
                     "policy", "loss", "status", "total_regret", "rounds",
                     "max_round_loss", "invariant_violations", "wall_time_s"])
    failed = 0
    for cfg, summary, err in results:
        status = err or (summary.aborted or "ok")
        if err or (summary and summary.aborted):
            failed += 1
        writer.writerow([
            SCHEMA_VERSION, cfg.instance.kind, cfg.instance.d, cfg.instance.T,
            cfg.instance.seed, cfg.policy_name, cfg.loss.kind, status,
            repr(summary.total_regret) if summary else "",
            summary.rounds if summary else "",
            repr(summary.max_round_loss) if summary else "",
            summary.invariant_violations if summary else "",
            repr(round(summary.wall_time_s, 3)) if summary else "",
        ])
    return buf.getvalue(), failed


def _run_for_sweep(cfg: ExperimentConfig):
    try:
        summary, _ = run(cfg)
        return summary, ""
    except Exception as exc:  # noqa: BLE001 - sweep reports, caller exits
        return None, f"error: {type(exc).__name__}: {exc}"


# ---------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------

VERIFY_SUITES = ("steiner", "isoperimetric", "cone", "cylinder", "valuation",
                 "splits", "all")


def random_clipped_cube(d: int, n_cuts: int, rng: PortableRng,
                        min_vertices: int = None) -> Polytope:
    """Unit cube with random non-degenerate cuts through its interior."""
    min_vertices = min_vertices if min_vertices is not None else d + 1
    P = Polytope.unit_box(d)
    for _ in range(n_cuts):
        u = rng.unit_vector(d)
        ext = extent(P, u)
        frac = 0.3 + 0.4 * float(rng.uniform(1)[0])
        p = ext.lo + frac * ext.width
        cut = clip(P, Halfspace(u, p))
        if not cut.is_empty and len(cut.vertices_array()) >= min_vertices:
            P = cut
    return P


def verify(suite: str, seed: int = 0, n_cases: int = 100,
           budget: int = 1500) -> dict:
    """Run a named property suite on seeded random polytopes."""
    if suite == "all":
        out = {}
        worst = math.inf
        failures = 0
        for s in VERIFY_SUITES[:-1]:
            rep = verify(s, seed=seed, n_cases=n_cases, budget=budget)
            out[s] = rep
            failures += rep["failures"]
            worst = min(worst, rep["worst_margin"])
        return {"suite": "all", "cases": sum(r["cases"] for r in out.values()),
                "failures": failures, "worst_margin": worst, "suites": out}
    if suite not in VERIFY_SUITES:
        raise ConfigError(f"unknown verify suite {suite!r}")
    rng = PortableRng(seed)
    checks: list[CheckResult] = []
    for case in range(n_cases):
        case_rng = rng.spawn(case)
        checks.extend(_verify_case(suite, case, case_rng, budget))
    failures = sum(0 if c.passed else 1 for c in checks)
    worst = min((c.margin for c in checks), default=math.inf)
    return {"suite": suite, "cases": len(checks), "failures": failures,
            "worst_margin": worst,
            "failed_details": [vars(c) for c in checks if not c.passed][:20]}


def _verify_case(suite: str, case: int, rng: PortableRng,
                 budget: int) -> list[CheckResult]:
    d = 2 if case % 2 == 0 else 3
    n_cuts = 1 + case % 3
    P = random_clipped_cube(d, n_cuts, rng.spawn(1))
    out: list[CheckResult] = []
    if suite == "steiner":
        eps = (0.1, 0.5, 1.0)[case % 3]
        out.append(check_steiner(P, eps, rng.spawn(2), budget=budget,
                                 n_samples=30_000))
    elif suite == "isoperimetric":
        for i in range(1, d):
            out.append(check_isoperimetric(P, i, budget=budget, rng=rng.spawn(3)))
    elif suite == "cone":
        base = random_clipped_cube(2, n_cuts, rng.spawn(4)).vertices_array()
        h = 0.5 + float(rng.uniform(1)[0])
        for j in range(0, 3):
            out.append(check_cone_bound(base, h, j, budget=budget,
                                        rng=rng.spawn(5 + j)))
    elif suite == "cylinder":
        base = random_clipped_cube(2, n_cuts, rng.spawn(6)).vertices_array()
        h = 0.5 + float(rng.uniform(1)[0])
        for j in range(0, 3):
            out.append(check_cylinder_identity(base, h, j, budget=budget,
                                               rng=rng.spawn(7 + j)))
    elif suite == "valuation":
        u = rng.spawn(8).unit_vector(P.dim)
        ext = extent(P, u)
        p = ext.lo + (0.3 + 0.4 * float(rng.spawn(9).uniform(1)[0])) * ext.width
        for j in range(1, P.dim + 1):
            out.append(check_valuation_additivity(P, u, p, j, budget=budget,
                                                  rng=rng.spawn(10 + j)))
    elif suite == "splits":
        out.extend(_check_splits(P, rng.spawn(11), budget))
    return out


def _check_splits(P: Polytope, rng: PortableRng, budget: int) -> list[CheckResult]:
    """Midpoint and equal-volume split bounds on one random direction."""
    d = P.dim
    u = rng.unit_vector(d)
    se = SectionEstimator(P, u, rng.spawn(1), budget_bisect=max(budget, 512),
                          budget_report=max(budget, 512))
    out = []
    p_mid = 0.5 * (se.lo + se.hi)
    for j in range(1, d + 1):
        v_lo, hw_lo = se.side_estimate(j, p_mid, -1, "bisect")
        v_hi, hw_hi = se.side_estimate(j, p_mid, +1, "bisect")
        ratio = 2.0 ** (-j)
        m1 = (v_lo + hw_lo) - ratio * (v_hi - hw_hi)
        m2 = (v_hi + hw_hi) - ratio * (v_lo - hw_lo)
        out.append(CheckResult("midpoint-split", bool(m1 >= -1e-12), float(m1),
                               {"j": j, "side": "low"}))
        out.append(CheckResult("midpoint-split", bool(m2 >= -1e-12), float(m2),
                               {"j": j, "side": "high"}))
    p_vol, resid = se.split_equal(d)
    if se.lo < p_vol < se.hi:
        from .geometry import Halfspace as HS
        lower = clip(P, HS(u, p_vol))
        upper = clip(P, HS(-u, -p_vol))
        if not lower.is_empty and not upper.is_empty:
            w_lo = extent(lower, u).width
            w_hi = extent(upper, u).width
            alpha = (2.0 * (1.0 - 2.0 * max(abs(resid), 0.02))) ** (1.0 / d) - 1.0
            m1 = w_lo - alpha * w_hi
            m2 = w_hi - alpha * w_lo
            out.append(CheckResult("volume-split-width", bool(m1 >= -1e-9),
                                   float(m1), {"alpha": alpha}))
            out.append(CheckResult("volume-split-width", bool(m2 >= -1e-9),
                                   float(m2), {"alpha": alpha}))
    return out


# ---------------------------------------------------------------------
# flat key-value config files
# ---------------------------------------------------------------------

_CONFIG_KEYS = {
    "instance.kind": str, "instance.d": int, "instance.T": int,
    "instance.seed": int, "instance.v": str,
    "policy.name": str, "policy.T": int, "policy.beta": float,
    "policy.seed": int,
    "loss.kind": str, "loss.beta": float,
    "log.level": str,
    "output.path": str, "output.format": str,
    "run.time_limit_s": float, "run.allow_violations": bool,
}


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse the flat ``key = value`` experiment-config grammar.

    Lines are ``key = value``; blank lines and ``#`` comments are
    ignored.  ``instance.v`` is a comma-separated coordinate list.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = body.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        raw[key] = value.strip()

    def get(key, default=None):
        if key not in raw or raw[key] == "":
            return default
        typ = _CONFIG_KEYS[key]
        if typ is bool:
            return raw[key].lower() in ("1", "true", "yes", "on")
        return typ(raw[key])

    for req in ("instance.kind", "instance.d", "instance.T", "policy.name",
                "loss.kind"):
        if get(req) is None:
            raise ConfigError(f"missing required key {req}")

    v = None
    if get("instance.v") is not None:
        v = tuple(float(x) for x in get("instance.v").split(","))
    instance = InstanceSpec(kind=get("instance.kind"), d=get("instance.d"),
                            T=get("instance.T"), seed=get("instance.seed", 0),
                            v=v)
    loss = LossSpec(kind=get("loss.kind"), beta=get("loss.beta"))
    return ExperimentConfig(
        instance=instance,
        policy_name=get("policy.name"),
        loss=loss,
        policy_T=get("policy.T"),
        policy_beta=get("policy.beta"),
        policy_seed=get("policy.seed", 0),
        log_level=get("log.level", "summary"),
        output_path=get("output.path"),
        output_format=get("output.format", "jsonl"),
        time_limit_s=get("run.time_limit_s", DEFAULT_TIME_LIMIT_S),
        allow_violations=get("run.allow_violations", False),
    )
