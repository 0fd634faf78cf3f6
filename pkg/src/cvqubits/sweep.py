"""Grid evaluation engine behind the command line.

A sweep walks the (s, r, initial, lambda_t) grid in a fixed nesting order,
computes the entanglement measure with the requested engine(s), and emits
one CSV row per point.  Number formatting and grid generation are
deterministic, so rerunning a configuration reproduces the file byte for
byte no matter how the work was scheduled.
"""

from __future__ import annotations

import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .analytic import AtomXState, negativity_closed_form, xstate_ee, xstate_gg
from .entanglement import negativity_general
from .fieldprep import CouplingParam, SqueezeParam, TruncationPolicy, inject, squeezed_state
from .jcdynamics import AtomState, reduce_atoms_direct

__all__ = [
    "ConfigError",
    "VerificationError",
    "SweepConfig",
    "SweepRow",
    "CSV_HEADER",
    "DISAGREE_TOL",
    "run_sweep",
    "write_csv",
    "verify",
    "preset_config",
    "default_verify_config",
]

ENGINES = ("analytic", "oracle", "both")
INITIALS = ("gg", "ee")
CSV_HEADER = "s,r,lambda_t,initial,measure,n_max,tail_weight,engine,disagreement"
DISAGREE_TOL = 1e-8

# fault-injection hook for tests: callable(point, AtomXState) -> AtomXState,
# applied to every analytic evaluation during verify()
VERIFY_PERTURB = None


class ConfigError(ValueError):
    """Bad parameter ranges or malformed configuration (exit code 1)."""


class VerificationError(RuntimeError):
    """The two engines disagreed beyond tolerance (exit code 3)."""


@dataclass
class SweepConfig:
    s_values: list[float] = field(default_factory=list)
    r_values: list[float] = field(default_factory=lambda: [0.0])
    lt_start: float = 0.0
    lt_stop: float = 0.0
    lt_steps: int = 1
    initials: tuple[str, ...] = ("gg",)
    engine: str = "analytic"
    tail_tol: float = 1e-10
    n_max: int | None = None
    out: str | None = None
    threads: int | None = None

    def validate(self) -> "SweepConfig":
        if not self.s_values:
            raise ConfigError("no squeezing values given (use --s)")
        for s in self.s_values:
            if not (math.isfinite(s) and s >= 0.0):
                raise ConfigError(f"squeezing value must be finite and >= 0, got {s}")
        if not self.r_values:
            raise ConfigError("no reflection values given (use --r)")
        for r in self.r_values:
            if not 0.0 <= r <= 1.0:
                raise ConfigError(f"reflection coefficient must lie in [0, 1], got {r}")
        if self.lt_steps < 1:
            raise ConfigError(f"lt-steps must be >= 1, got {self.lt_steps}")
        if self.lt_stop < self.lt_start:
            raise ConfigError(f"lt-stop {self.lt_stop} is below lt-start {self.lt_start}")
        if self.lt_start < 0.0:
            raise ConfigError(f"lt-start must be >= 0, got {self.lt_start}")
        if not self.initials:
            raise ConfigError("no initial atom states given (use --initial)")
        for ini in self.initials:
            if ini not in INITIALS:
                raise ConfigError(f"initial state must be one of {INITIALS}, got {ini!r}")
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if not self.tail_tol > 0.0:
            raise ConfigError(f"tail-tol must be > 0, got {self.tail_tol}")
        if self.n_max is not None and self.n_max < 1:
            raise ConfigError(f"n-max must be >= 1, got {self.n_max}")
        if self.threads is not None and self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        return self

    def policy(self) -> TruncationPolicy:
        if self.n_max is not None:
            return TruncationPolicy(tail_tol=self.tail_tol, n_max=self.n_max)
        return TruncationPolicy(tail_tol=self.tail_tol)

    def lt_values(self) -> np.ndarray:
        return np.linspace(self.lt_start, self.lt_stop, self.lt_steps)


@dataclass(frozen=True)
class SweepRow:
    s: float
    r: float
    lambda_t: float
    initial: str
    measure: float
    n_max: int
    tail_weight: float
    engine: str
    disagreement: float | None = None

    def csv_line(self) -> str:
        return ",".join(
            (
                _fmt(self.s),
                _fmt(self.r),
                _fmt(self.lambda_t),
                self.initial,
                _fmt(self.measure),
                str(self.n_max),
                _fmt(self.tail_weight),
                self.engine,
                "" if self.disagreement is None else _fmt(self.disagreement),
            )
        )


def _fmt(v: float) -> str:
    return format(float(v), ".12g")


def _x_parts(x: AtomXState) -> tuple[float, float, float, float, float]:
    return (x.a, x.b, x.c, x.d, x.e_coh)


def _matrix_parts(m: np.ndarray) -> tuple[float, float, float, float, float]:
    return (m[0, 0].real, m[1, 1].real, m[2, 2].real, m[3, 3].real, m[0, 3].real)


def _analytic_point(s, r, lt, initial, n_max) -> tuple[AtomXState, float]:
    builder = xstate_gg if initial == "gg" else xstate_ee
    x = builder(s, r, lt, n_max)
    return x, negativity_closed_form(x)


def _grid(config: SweepConfig):
    """Emission order: s, then r, then initial, then time."""
    lts = config.lt_values()
    for s in config.s_values:
        for r in config.r_values:
            for initial in config.initials:
                for lt in lts:
                    yield (s, r, initial, float(lt))


def _build_fields(config: SweepConfig):
    """One injected field per (s, r), shared read-only by all grid points."""
    fields = {}
    policy = config.policy()
    for s in config.s_values:
        psi = squeezed_state(SqueezeParam(s), policy)
        for r in config.r_values:
            fields[(s, r)] = inject(psi, CouplingParam(r), s=SqueezeParam(s), policy=policy)
    return fields


def run_sweep(config: SweepConfig) -> list[SweepRow]:
    """Evaluate the grid; rows come back in emission order.

    With engine "both" each row carries the worst element-wise distance
    between the two engines; the caller decides whether that is fatal
    (the CLI exits nonzero past DISAGREE_TOL).
    """
    config.validate()
    policy = config.policy()
    need_oracle = config.engine in ("oracle", "both")
    fields = _build_fields(config) if need_oracle else {}
    resolve = {s: policy.resolve(SqueezeParam(s)) for s in config.s_values}

    def evaluate(point) -> SweepRow:
        s, r, initial, lt = point
        n_max, tail = resolve[s]
        measure_a = x = None
        if config.engine in ("analytic", "both"):
            x, measure_a = _analytic_point(s, r, lt, initial, n_max)
        disagreement = None
        measure = measure_a
        if need_oracle:
            rho4 = reduce_atoms_direct(AtomState(initial), fields[(s, r)], lt)
            report = negativity_general(rho4)
            if config.engine == "oracle":
                measure = report.measure
            else:
                deltas = [
                    abs(p - q) for p, q in zip(_x_parts(x), _matrix_parts(rho4.matrix))
                ]
                deltas.append(abs(measure_a - report.measure))
                disagreement = max(deltas)
        return SweepRow(s, r, initial=initial, lambda_t=lt, measure=measure,
                        n_max=n_max, tail_weight=tail, engine=config.engine,
                        disagreement=disagreement)

    points = list(_grid(config))
    workers = config.threads if config.threads is not None else (os.cpu_count() or 1)
    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(evaluate, points))
    else:
        rows = [evaluate(p) for p in points]
    return rows


def write_csv(rows: list[SweepRow], stream) -> None:
    stream.write(CSV_HEADER + "\n")
    for row in rows:
        stream.write(row.csv_line() + "\n")


def worst_disagreement(rows: list[SweepRow]) -> float:
    return max((r.disagreement for r in rows if r.disagreement is not None), default=0.0)


def default_verify_config() -> SweepConfig:
    """The standing cross-engine grid: every formula against the dense path."""
    return SweepConfig(
        s_values=[0.3, 0.65, 1.0],
        r_values=[0.0, 0.25, 0.7, 0.99],
        lt_start=0.0,
        lt_stop=15.0,
        lt_steps=16,
        initials=("gg", "ee"),
        engine="both",
    )


def verify(config: SweepConfig, stream=None) -> bool:
    """Hold the closed forms against the dense oracle, point by point.

    Prints one line per grid point with the worst element-wise deviation,
    plus state-invariant checks on the oracle's reduced state; returns
    False (and names the offending point) on any violation.
    """
    stream = stream if stream is not None else sys.stdout
    config = replace(config, engine="both").validate()
    policy = config.policy()
    fields = _build_fields(config)
    resolve = {s: policy.resolve(SqueezeParam(s)) for s in config.s_values}

    failures = 0
    worst = 0.0
    count = 0
    for s, r, initial, lt in _grid(config):
        n_max, tail = resolve[s]
        x, measure_a = _analytic_point(s, r, lt, initial, n_max)
        if VERIFY_PERTURB is not None:
            x = VERIFY_PERTURB((s, r, initial, lt), x)
            measure_a = negativity_closed_form(x)
        rho4 = reduce_atoms_direct(AtomState(initial), fields[(s, r)], lt)
        report = negativity_general(rho4)

        deltas = [abs(p - q) for p, q in zip(_x_parts(x), _matrix_parts(rho4.matrix))]
        deltas.append(abs(measure_a - report.measure))
        disagreement = max(deltas)
        worst = max(worst, disagreement)

        problems = []
        if disagreement >= DISAGREE_TOL:
            problems.append(f"engines disagree by {disagreement:.3e}")
        m = rho4.matrix
        off_x = max(
            abs(m[0, 1]), abs(m[0, 2]), abs(m[1, 2]), abs(m[1, 3]), abs(m[2, 3]), abs(m[0, 3].imag)
        )
        if off_x >= 1e-9:
            problems.append(f"reduced state leaks outside the X pattern by {off_x:.3e}")
        try:
            rho4.validate(herm_tol=1e-10, trace_tol=1e-10)
        except ValueError as err:
            problems.append(str(err))

        count += 1
        tag = "ok" if not problems else "FAIL " + "; ".join(problems)
        stream.write(
            f"s={_fmt(s)} r={_fmt(r)} initial={initial} lambda_t={_fmt(lt)} "
            f"n_max={n_max} disagreement={disagreement:.3e} {tag}\n"
        )
        failures += bool(problems)

    verdict = "PASS" if failures == 0 else f"FAIL ({failures} of {count} points)"
    stream.write(f"verification {verdict}: {count} points, worst disagreement {worst:.3e}\n")
    return failures == 0


def preset_config(name: str) -> SweepConfig:
    """Named parameter grids for the two standard plots."""
    if name == "fig2":
        # entanglement against squeezing at fixed time; the interesting
        # structure (rise, peak near s = 0.65, slow decay) fits in [0, 2]
        return SweepConfig(
            s_values=[round(0.05 * i, 10) for i in range(41)],
            r_values=[0.0, 0.25, 0.7],
            lt_start=11.0,
            lt_stop=11.0,
            lt_steps=1,
            initials=("gg",),
            engine="analytic",
            out="fig2.csv",
        )
    if name == "fig3":
        # entanglement against time at the peak squeezing, four couplings,
        # both initial preparations
        return SweepConfig(
            s_values=[0.65],
            r_values=[0.0, 0.25, 0.7, 0.99],
            lt_start=0.0,
            lt_stop=15.0,
            lt_steps=151,
            initials=("ee", "gg"),
            engine="analytic",
            out="fig3.csv",
        )
    raise ConfigError(f"unknown preset {name!r} (expected fig2 or fig3)")
