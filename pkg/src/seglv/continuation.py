"""Competition-strength continuation toward the segregation limit.

The singular limit kappa -> infinity is approached on a geometric ramp
kappa_m = kappa_start * factor^m with each solve warm-started from the
previous one.  Every step records the state and its diagnostics, so decay
of the overlap integrals, the Cauchy property of the H1 differences, and
the non-invasion entries can be read off the trace.  A failed solve leaves
a partial trace with the failure recorded instead of raising.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import DiagnosticsReport, compute_diagnostics
from .errors import NonlinearSolveError
from .operators import StateField
from .system import ModelKind, solve_system


@dataclass(frozen=True)
class ContinuationSchedule:
    """Geometric kappa ramp plus the per-step solver tolerance."""

    kappa_start: float
    factor: float
    steps: int
    newton_tol: float = 1e-10

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("schedule needs at least one step")
        if not self.factor > 1:
            raise ValueError("ramp factor must exceed 1")
        if self.kappa_start < 0:
            raise ValueError("kappa_start must be nonnegative")
        if self.kappa_start == 0 and self.steps > 1:
            raise ValueError("kappa_start = 0 is only meaningful for a single step")
        if not self.newton_tol > 0:
            raise ValueError("newton_tol must be positive")

    def kappas(self):
        return [self.kappa_start * self.factor ** m for m in range(self.steps)]


@dataclass
class ContinuationStep:
    kappa: float
    state: StateField
    diagnostics: DiagnosticsReport
    newton_iterations: int


@dataclass
class ContinuationTrace:
    steps: list[ContinuationStep] = field(default_factory=list)
    failure: str | None = None

    def kappas(self):
        return [s.kappa for s in self.steps]

    def final_state(self):
        if not self.steps:
            raise ValueError("empty trace has no final state")
        return self.steps[-1].state


def continuation_run(domain, species, model: ModelKind,
                     schedule: ContinuationSchedule, initial=None, *,
                     diag_tol=None, max_newton=200,
                     max_backtracks=30) -> ContinuationTrace:
    """March kappa up the schedule with warm starts, recording diagnostics.

    The initial guess defaults to the model's baseline (for the plain
    Lotka-Volterra model pass the baseline tuple extended by zero
    explicitly).  On solver failure the partial trace is returned with
    `failure` set; completed steps stay valid.
    """
    if initial is None:
        initial = model.baseline
    if initial is None:
        raise ValueError("an initial state is required when the model has no baseline")
    if initial.domain is not domain:
        raise ValueError("initial state lives on a different domain")
    if diag_tol is None:
        diag_tol = 10.0 * schedule.newton_tol
    if model.kind == "lotka_volterra":
        # box lower bound for the plain model is u_i >= 0
        box_baseline = StateField.zeros(domain, len(species))
    else:
        box_baseline = model.baseline
    trace = ContinuationTrace()
    state = initial
    for kappa in schedule.kappas():
        try:
            state, iters = solve_system(
                state, species, model, kappa, schedule.newton_tol,
                max_newton=max_newton, max_backtracks=max_backtracks)
        except NonlinearSolveError as exc:
            trace.failure = f"kappa={kappa:.6g}: {exc}"
            break
        report = compute_diagnostics(state, species, diag_tol,
                                     baseline=box_baseline, phi=model.caps)
        trace.steps.append(ContinuationStep(kappa, state, report, iters))
    return trace
