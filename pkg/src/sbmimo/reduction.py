"""Ising formulation of the detection objective.

Substituting the spin expansion x_r = T s into the squared residual
||y_r - H_r x_r||^2 and splitting the Gram matrix G = (H_r T)^T (H_r T)
into off-diagonal couplings and a constant (s_i^2 = 1 turns the diagonal
into trace(G)) gives an Ising model whose energy equals the residual
exactly for every spin assignment:

    J = G - diag(G),  h = -2 (H_r T)^T y_r,  offset = trace(G) + ||y_r||^2.

The spin vector is laid out in nt-sized blocks ordered (axis, weight):
[real | imag] for QPSK, [real MSB | real LSB | imag MSB | imag LSB] for
16-QAM, a single real block for BPSK.  T's column blocks follow the same
order, so x_r = T s lands every entry on the constellation lattice.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from sbmimo.channel import (
    ChannelInstance,
    Constellation,
    RealizedSystem,
    axis_values_to_spins,
    realify,
    realify_symbols,
    spins_to_bit_values,
)
from sbmimo.ising import IsingModel


@dataclass(frozen=True)
class ReductionContext:
    """Spin layout and amplitude transform for one (constellation, nt)."""

    constellation: Constellation
    nt: int
    t: np.ndarray
    spin_count: int

    @classmethod
    def for_constellation(cls, c: Constellation, nt: int) -> "ReductionContext":
        if nt < 1:
            raise ValueError(f"need nt >= 1, got {nt}")
        axes = 2 if c.complex_axes else 1
        bpa = c.bits_per_axis
        n_spins = axes * bpa * nt
        eye = np.eye(nt)
        t = np.zeros((axes * nt, n_spins))
        for axis in range(axes):
            for w, weight in enumerate(2 ** np.arange(bpa - 1, -1, -1)):
                block = axis * bpa + w
                rows = slice(axis * nt, (axis + 1) * nt)
                cols = slice(block * nt, (block + 1) * nt)
                t[rows, cols] = weight * eye
        return cls(constellation=c, nt=nt, t=t, spin_count=n_spins)


def build_ising(sys: RealizedSystem, ctx: ReductionContext) -> IsingModel:
    """Ising model whose energy equals ||y_r - H_r T s||^2 for every s."""
    if sys.h_r.shape[1] != ctx.t.shape[0]:
        raise ValueError(
            f"system has {sys.h_r.shape[1]} real unknowns but the transform "
            f"expects {ctx.t.shape[0]}"
        )
    a = sys.h_r @ ctx.t
    g = a.T @ a
    g = 0.5 * (g + g.T)
    j = g - np.diag(np.diagonal(g))
    h = -2.0 * (a.T @ sys.y_r)
    offset = float(np.trace(g) + sys.y_r @ sys.y_r)
    return IsingModel(n=ctx.spin_count, j=j, h=h, offset=offset)


def instance_model(
    inst: ChannelInstance, c: Constellation
) -> tuple[IsingModel, ReductionContext]:
    """Reduce one channel instance to its detection Ising model."""
    ctx = ReductionContext.for_constellation(c, inst.nt)
    return build_ising(realify(inst.h, inst.y, c), ctx), ctx


def spins_to_bits(s: np.ndarray, ctx: ReductionContext) -> np.ndarray:
    """Recover the transmitted bit vector from a spin assignment."""
    s = np.asarray(s)
    if s.shape != (ctx.spin_count,):
        raise ValueError(
            f"spin vector has shape {s.shape}, expected ({ctx.spin_count},)"
        )
    blocks = s.reshape(-1, ctx.nt)
    return spins_to_bit_values(blocks.T).ravel()


def spins_to_symbols(s: np.ndarray, ctx: ReductionContext) -> np.ndarray:
    """Complex symbol vector x with realify_symbols(x) == T s."""
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (ctx.spin_count,):
        raise ValueError(
            f"spin vector has shape {s.shape}, expected ({ctx.spin_count},)"
        )
    x_r = ctx.t @ s
    if not ctx.constellation.complex_axes:
        return x_r.astype(np.complex128)
    return x_r[: ctx.nt] + 1j * x_r[ctx.nt :]


def symbols_to_spins(symbols: np.ndarray, ctx: ReductionContext) -> np.ndarray:
    """Invert x_r = T s per axis; symbols must be exact lattice points."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    if symbols.shape != (ctx.nt,):
        raise ValueError(
            f"symbol vector has shape {symbols.shape}, expected ({ctx.nt},)"
        )
    c = ctx.constellation
    x_r = realify_symbols(symbols, c)
    axes = 2 if c.complex_axes else 1
    bpa = c.bits_per_axis
    out = np.empty(ctx.spin_count, dtype=np.int8)
    for axis in range(axes):
        vals = x_r[axis * ctx.nt : (axis + 1) * ctx.nt]
        axis_spins = axis_values_to_spins(vals, bpa)
        for w in range(bpa):
            block = axis * bpa + w
            out[block * ctx.nt : (block + 1) * ctx.nt] = axis_spins[:, w]
    return out


def regularize(model: IsingModel, s_p: np.ndarray, r: float) -> IsingModel:
    """Add the anchor penalty r * ||s - s_p||^2 in closed form.

    Over spins, ||s - s_p||^2 = 2n - 2 s . s_p, so only the fields and the
    offset move: h -> h - 2 r s_p, offset -> offset + 2 r n.  Couplings
    are untouched and the identity
    energy(new, s) == energy(old, s) + r * ||s - s_p||^2 holds exactly.
    """
    if r < 0:
        raise ValueError(f"penalty weight must be >= 0, got {r}")
    s_p = np.asarray(s_p, dtype=np.float64)
    if s_p.shape != (model.n,):
        raise ValueError(
            f"anchor has shape {s_p.shape}, expected ({model.n},)"
        )
    return replace(
        model,
        h=model.h - 2.0 * r * s_p,
        offset=model.offset + 2.0 * r * model.n,
    )
