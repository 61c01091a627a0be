"""Digital simulated bifurcation solver.

Evolves positions ``x`` and momenta ``y`` of a classical oscillator
network whose pitchfork bifurcation steers ``sign(x)`` toward low Ising
energy.  One step is a symplectic-Euler update

    y += dt * ( -(a0 - a) * x - c0 * (J @ sign(x) + h / 2) )
    x += dt * a0 * y

followed by the wall rule: any |x_i| > 1 is clamped to sign(x_i) and its
momentum zeroed.  The pump ``a`` ramps linearly from 0 to 1 over the
evolution.  The coupling strength is c0 = 1 / (2 sqrt(N) lambda) with
lambda the rms off-diagonal coupling, unless overridden.

sign(0) is +1 everywhere (force term and readout), a fixed tie-break.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from sbmimo.ising import IsingModel, energy


class DegenerateModelError(ValueError):
    """Coupling matrix is all-zero (or n < 2): c0 is undefined."""


class SolverDivergenceError(RuntimeError):
    """State became non-finite during evolution."""


@dataclass(frozen=True)
class SBParams:
    """Solver configuration.

    c0_override, when set, replaces the model-derived coupling strength.
    Restarts re-run the evolution from fresh random initial states; the
    lowest-energy readout wins.
    """

    n_steps: int = 100
    dt: float = 0.5
    a0: float = 1.0
    c0_override: float | None = None
    n_restarts: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.a0 > 0:
            raise ValueError(f"a0 must be > 0, got {self.a0}")
        if self.c0_override is not None and not self.c0_override > 0:
            raise ValueError(f"c0_override must be > 0, got {self.c0_override}")
        if self.n_restarts < 1:
            raise ValueError(f"n_restarts must be >= 1, got {self.n_restarts}")


@dataclass
class SBState:
    """Evolving position/momentum vectors and the current step index."""

    x: np.ndarray
    y: np.ndarray
    step: int = 0


@dataclass(frozen=True)
class SolveResult:
    spins: np.ndarray
    energy: float
    restart: int
    diverged_restarts: int = 0
    extras: dict = field(default_factory=dict)


def sign_pm1(x: np.ndarray) -> np.ndarray:
    """Sign with sign(0) = +1, as float64."""
    return np.where(np.asarray(x) >= 0.0, 1.0, -1.0)


def compute_lambda(model: IsingModel) -> float:
    """RMS off-diagonal coupling sqrt(sum_{i!=k} J_ik^2 / (N (N-1)))."""
    n = model.n
    if n < 2:
        raise ValueError(f"coupling scale needs n >= 2, got n = {n}")
    return math.sqrt(float(np.sum(model.j**2)) / (n * (n - 1)))


def compute_c0(model: IsingModel) -> float:
    """Coupling strength 1 / (2 sqrt(N) lambda).

    Raises DegenerateModelError when the coupling matrix is all-zero; the
    caller should fall back to the field-only solution (see solve()).
    """
    lam = compute_lambda(model)
    if lam == 0.0:
        raise DegenerateModelError(
            "all couplings are zero; minimize by fields alone"
        )
    return 1.0 / (2.0 * math.sqrt(model.n) * lam)


def schedule_a(step: int, n_steps: int) -> float:
    """Linear pump ramp: 0 at the first step, 1 at the last."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if not 0 <= step <= n_steps - 1:
        raise ValueError(f"step {step} out of range [0, {n_steps - 1}]")
    if n_steps == 1:
        return 1.0
    return step / (n_steps - 1)


def sb_step(
    model: IsingModel, state: SBState, params: SBParams, c0: float
) -> SBState:
    """One symplectic-Euler update with the wall rule applied.

    Momentum updates from the current positions, positions from the new
    momenta; then every |x_i| > 1 is clamped to sign(x_i) with y_i = 0.
    """
    a = schedule_a(state.step, params.n_steps)
    # Overflow is handled explicitly by the finiteness check below.
    with np.errstate(over="ignore", invalid="ignore"):
        force = -(params.a0 - a) * state.x - c0 * (
            model.j @ sign_pm1(state.x) + 0.5 * model.h
        )
        y = state.y + params.dt * force
        x = state.x + params.dt * params.a0 * y
    # Check before the wall rule: clamping |x| > 1 to +-1 would otherwise
    # mask an overflow and turn divergence into silent garbage.
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise SolverDivergenceError(
            f"non-finite state at step {state.step} (dt = {params.dt})"
        )
    over = np.abs(x) > 1.0
    if over.any():
        x = np.where(over, sign_pm1(x), x)
        y = np.where(over, 0.0, y)
    return SBState(x=x, y=y, step=state.step + 1)


def _field_only_spins(model: IsingModel) -> np.ndarray:
    # Exact minimizer of h . s for zero coupling; h_i == 0 breaks to +1.
    return np.where(model.h > 0.0, -1, 1).astype(np.int8)


def init_state(n: int, seed: int, restart: int) -> SBState:
    """Initial state for one restart: x then y i.i.d. uniform [-0.1, 0.1]."""
    rng = np.random.default_rng([seed, restart])
    x = rng.uniform(-0.1, 0.1, n)
    y = rng.uniform(-0.1, 0.1, n)
    return SBState(x=x, y=y, step=0)


def solve(model: IsingModel, params: SBParams, trace_hook=None) -> SolveResult:
    """Run the evolution over all restarts and return the best readout.

    Each restart draws its own initial state from (seed, restart index),
    evolves for n_steps, and reads out sign(x).  The readout with the
    lowest Ising energy wins; ties keep the earlier restart.  A restart
    that diverges is dropped; solving fails only if every restart does.

    A model with all-zero couplings (including n = 1) is solved exactly
    by fields alone.

    trace_hook, when given, is called after every step as
    ``trace_hook(restart, step, a, x, y, readout_energy)``.
    """
    if model.n < 2 or not model.j.any():
        spins = _field_only_spins(model)
        return SolveResult(
            spins=spins, energy=energy(model, spins), restart=0
        )
    c0 = params.c0_override
    if c0 is None:
        c0 = compute_c0(model)
    best: SolveResult | None = None
    diverged = 0
    for restart in range(params.n_restarts):
        state = init_state(model.n, params.seed, restart)
        try:
            for k in range(params.n_steps):
                state = sb_step(model, state, params, c0)
                if trace_hook is not None:
                    readout = sign_pm1(state.x).astype(np.int8)
                    trace_hook(
                        restart,
                        k,
                        schedule_a(k, params.n_steps),
                        state.x,
                        state.y,
                        energy(model, readout),
                    )
        except SolverDivergenceError:
            diverged += 1
            continue
        spins = sign_pm1(state.x).astype(np.int8)
        e = energy(model, spins)
        if best is None or e < best.energy:
            best = SolveResult(spins=spins, energy=e, restart=restart)
    if best is None:
        raise SolverDivergenceError(
            f"all {params.n_restarts} restarts diverged (dt = {params.dt})"
        )
    return SolveResult(
        spins=best.spins,
        energy=best.energy,
        restart=best.restart,
        diverged_restarts=diverged,
    )
