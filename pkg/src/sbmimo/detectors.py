"""Detectors: linear MMSE, exhaustive ML oracle, and the bifurcation
solver composed with the reduction (plain and MMSE-anchored regularized).

Every detector reports the Ising energy of its decision under the
unregularized instance model, which equals the squared ML residual; the
regularized path selects between the solver readout and the MMSE anchor
by that energy, so its result never scores worse than MMSE's.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sbmimo.channel import (
    ChannelInstance,
    Constellation,
    quantize_symbols,
    realify,
)
from sbmimo.ising import energy
from sbmimo.reduction import (
    ReductionContext,
    instance_model,
    regularize,
    spins_to_bits,
    spins_to_symbols,
    symbols_to_spins,
)
from sbmimo.sb import SBParams, solve

ORACLE_SPIN_LIMIT = 24
_ENUM_CHUNK = 1 << 16


class DetectionFailureError(RuntimeError):
    """Linear detection could not produce an estimate."""


@dataclass(frozen=True)
class DetectionResult:
    detector: str
    bits: np.ndarray
    symbols: np.ndarray
    ising_energy: float
    extras: dict


def _result(detector, spins, model, ctx, **extras) -> DetectionResult:
    symbols = spins_to_symbols(spins, ctx)
    return DetectionResult(
        detector=detector,
        bits=spins_to_bits(spins, ctx),
        symbols=symbols,
        ising_energy=energy(model, spins),
        extras=extras,
    )


def mmse_detect(inst: ChannelInstance, c: Constellation) -> DetectionResult:
    """Regularized linear estimate, hard-quantized onto the lattice.

    Soft estimate (H^H H + (sigma^2 / Es) I)^-1 H^H y; the regularizer
    scaling reflects the unnormalized constellation energy Es.
    """
    if not inst.noise_var > 0:
        raise ValueError(f"noise_var must be > 0, got {inst.noise_var}")
    hh = inst.h.conj().T
    gram = hh @ inst.h + (inst.noise_var / c.symbol_energy) * np.eye(inst.nt)
    try:
        soft = np.linalg.solve(gram, hh @ inst.y)
    except np.linalg.LinAlgError as err:
        raise DetectionFailureError(f"regularized Gram solve failed: {err}")
    symbols = quantize_symbols(soft, c)
    model, ctx = instance_model(inst, c)
    spins = symbols_to_spins(symbols, ctx)
    return _result("mmse", spins, model, ctx)


def _spin_chunks(n: int):
    # Lexicographic enumeration of {-1,+1}^n (-1 first), fixed-size blocks.
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    total = 1 << n
    for start in range(0, total, _ENUM_CHUNK):
        ks = np.arange(start, min(start + _ENUM_CHUNK, total), dtype=np.int64)
        bits = (ks[:, None] >> shifts[None, :]) & 1
        yield (2.0 * bits - 1.0)


def ml_oracle(inst: ChannelInstance, c: Constellation) -> DetectionResult:
    """Global minimizer of the squared residual by full enumeration.

    Scans every spin assignment in lexicographic order and keeps the
    first strict minimum, so ties resolve to the lexicographically
    smallest vector.  Refuses above ORACLE_SPIN_LIMIT spins.
    """
    model, ctx = instance_model(inst, c)
    if ctx.spin_count > ORACLE_SPIN_LIMIT:
        raise ValueError(
            f"{ctx.spin_count} spins exceed the oracle limit of "
            f"{ORACLE_SPIN_LIMIT}"
        )
    sys = realify(inst.h, inst.y, c)
    a = sys.h_r @ ctx.t
    best_res = np.inf
    best_spins = None
    for spins in _spin_chunks(ctx.spin_count):
        resid = sys.y_r[None, :] - spins @ a.T
        values = np.einsum("ij,ij->i", resid, resid)
        k = int(np.argmin(values))
        if values[k] < best_res:
            best_res = float(values[k])
            best_spins = spins[k].astype(np.int8)
    return _result(
        "ml-oracle", best_spins, model, ctx, candidates=1 << ctx.spin_count
    )


def sb_detect(
    inst: ChannelInstance,
    c: Constellation,
    params: SBParams,
    r: float | None = None,
    trace_hook=None,
) -> DetectionResult:
    """Detect by solving the instance Ising model with the SB solver.

    With r = None the plain model is solved and its readout returned.
    Otherwise the model is anchored at the MMSE decision with penalty
    weight r, solved, and the readout and the anchor are compared under
    the unregularized model; the lower energy wins (ties keep the solver
    readout).
    """
    model, ctx = instance_model(inst, c)
    if r is None:
        res = solve(model, params, trace_hook=trace_hook)
        return _result(
            "sb",
            res.spins,
            model,
            ctx,
            restart=res.restart,
            steps=params.n_steps,
            diverged_restarts=res.diverged_restarts,
        )
    mmse = mmse_detect(inst, c)
    s_p = symbols_to_spins(mmse.symbols, ctx)
    res = solve(regularize(model, s_p, r), params, trace_hook=trace_hook)
    sb_energy = energy(model, res.spins)
    anchor_energy = energy(model, s_p)
    selected = res.spins if sb_energy <= anchor_energy else s_p
    return _result(
        "sb-reg",
        selected,
        model,
        ctx,
        restart=res.restart,
        steps=params.n_steps,
        diverged_restarts=res.diverged_restarts,
        r=r,
        sb_energy=sb_energy,
        mmse_energy=anchor_energy,
        selected="sb" if sb_energy <= anchor_energy else "mmse",
    )
