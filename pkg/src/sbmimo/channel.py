"""MIMO link simulation: constellations, Rayleigh channels, AWGN, and the
real-valued decomposition of the complex system.

Constellations are kept on the unnormalized odd-integer lattice (BPSK
{-1,+1}, QPSK {+-1 +-1j}, 16-QAM {a+bj : a,b in {-3,-1,1,3}}) so that the
downstream Ising reduction stays integer-structured; the SNR accounting
absorbs the resulting symbol energies (1, 2 and 10).

SNR is defined at the receiver as E[||Hx||^2] / E[||n||^2] with unit
variance channel entries, which gives a per-antenna complex noise
variance of nt * Es / 10^(snr_db / 10).

Bit labeling is the natural binary labeling induced by the spin
transform (bit b -> spin 1 - 2b, axis value = 2*s_msb + s_lsb for
16-QAM), not Gray coding: spin errors and bit errors then correspond
one-to-one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Constellation:
    """Symbol alphabet described per real axis.

    levels are the amplitude values one axis can take; complex_axes is
    False for BPSK (real-only symbols).  bps is bits per symbol.
    """

    name: str
    bps: int
    levels: tuple[int, ...]
    complex_axes: bool = True

    @property
    def bits_per_axis(self) -> int:
        return self.bps // 2 if self.complex_axes else self.bps

    @property
    def symbol_energy(self) -> float:
        """Average symbol energy E_s over the alphabet."""
        axis_ms = float(np.mean(np.square(self.levels)))
        return (2.0 if self.complex_axes else 1.0) * axis_ms

    def points(self) -> np.ndarray:
        """All 2^bps symbols, indexed by the bit pattern read MSB-first."""
        idx = np.arange(2**self.bps)
        shifts = np.arange(self.bps - 1, -1, -1)
        bits = ((idx[:, None] >> shifts[None, :]) & 1).astype(np.int8)
        return modulate(bits.ravel(), self)


BPSK = Constellation("bpsk", 1, (-1, 1), complex_axes=False)
QPSK = Constellation("qpsk", 2, (-1, 1))
QAM16 = Constellation("qam16", 4, (-3, -1, 1, 3))

_BY_NAME = {c.name: c for c in (BPSK, QPSK, QAM16)}


def get_constellation(name: str) -> Constellation:
    try:
        return _BY_NAME[name.lower()]
    except KeyError:
        raise ValueError(
            f"unknown modulation {name!r}; choose from {sorted(_BY_NAME)}"
        ) from None


@dataclass(frozen=True)
class ChannelInstance:
    """One transmission: channel, transmitted bits/symbols, noisy receive."""

    nt: int
    nr: int
    h: np.ndarray
    tx_bits: np.ndarray
    tx_symbols: np.ndarray
    noise_var: float
    y: np.ndarray


@dataclass(frozen=True)
class RealizedSystem:
    """Real-valued stand-in for the complex system: ||y - Hx||^2 ==
    ||y_r - h_r @ x_r||^2 for the matching real symbol vector x_r."""

    h_r: np.ndarray
    y_r: np.ndarray


def _axis_weights(bits_per_axis: int) -> np.ndarray:
    # MSB-first binary weights, e.g. (2, 1) for two bits per axis.
    return 2.0 ** np.arange(bits_per_axis - 1, -1, -1)


def bits_to_spins(bits: np.ndarray) -> np.ndarray:
    """Bit b in {0, 1} -> spin 1 - 2b in {+1, -1}."""
    bits = np.asarray(bits)
    return (1 - 2 * bits).astype(np.int8)


def spins_to_bit_values(s: np.ndarray) -> np.ndarray:
    """Spin s in {+1, -1} -> bit (1 - s) / 2 in {0, 1}."""
    s = np.asarray(s)
    return ((1 - s) // 2).astype(np.int8)


def axis_values_to_spins(values: np.ndarray, bits_per_axis: int) -> np.ndarray:
    """Invert the binary amplitude expansion, one spin column per weight.

    values must lie on the odd-integer lattice the expansion generates
    ({-1, 1} for one bit, {-3, -1, 1, 3} for two); raises otherwise.
    """
    values = np.asarray(values, dtype=np.float64)
    spins = np.empty((values.size, bits_per_axis), dtype=np.int8)
    remaining = values.copy()
    for col, w in enumerate(_axis_weights(bits_per_axis)):
        s = np.where(remaining > 0, 1, -1)
        spins[:, col] = s
        remaining = remaining - w * s
    if np.any(remaining != 0.0):
        bad = values[remaining != 0.0][0]
        raise ValueError(
            f"{bad} is not a {bits_per_axis}-bit amplitude level"
        )
    return spins


def modulate(bits: np.ndarray, c: Constellation) -> np.ndarray:
    """Map a bit vector to symbols, bps bits per symbol.

    Within one symbol the first bits_per_axis bits set the real axis
    (MSB first) and the remaining ones the imaginary axis.
    """
    bits = np.asarray(bits)
    if bits.size % c.bps != 0:
        raise ValueError(
            f"bit count {bits.size} is not a multiple of bps = {c.bps}"
        )
    spins = bits_to_spins(bits).reshape(-1, c.bps).astype(np.float64)
    w = _axis_weights(c.bits_per_axis)
    re = spins[:, : c.bits_per_axis] @ w
    if not c.complex_axes:
        return re.astype(np.complex128)
    im = spins[:, c.bits_per_axis :] @ w
    return re + 1j * im


def quantize_axis(values: np.ndarray, c: Constellation) -> np.ndarray:
    """Nearest amplitude level per entry.

    Distance ties prefer the smaller amplitude, then the positive level
    (so exactly 0 quantizes to +1, matching sign(0) = +1 elsewhere).
    """
    order = np.array(sorted(c.levels, key=lambda v: (abs(v), -v)), dtype=np.float64)
    d = np.abs(np.asarray(values, dtype=np.float64)[:, None] - order[None, :])
    return order[np.argmin(d, axis=1)]


def quantize_symbols(symbols: np.ndarray, c: Constellation) -> np.ndarray:
    """Per-axis hard quantization onto the constellation lattice."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    re = quantize_axis(symbols.real, c)
    if not c.complex_axes:
        return re.astype(np.complex128)
    return re + 1j * quantize_axis(symbols.imag, c)


def demodulate_hard(symbols: np.ndarray, c: Constellation) -> np.ndarray:
    """Nearest-point detection followed by the inverse bit labeling."""
    q = quantize_symbols(np.asarray(symbols, dtype=np.complex128), c)
    re_spins = axis_values_to_spins(q.real, c.bits_per_axis)
    if not c.complex_axes:
        return spins_to_bit_values(re_spins).ravel()
    im_spins = axis_values_to_spins(q.imag, c.bits_per_axis)
    per_symbol = np.concatenate([re_spins, im_spins], axis=1)
    return spins_to_bit_values(per_symbol).ravel()


def sample_channel(nt: int, nr: int, rng: np.random.Generator) -> np.ndarray:
    """nr x nt i.i.d. circularly-symmetric complex Gaussian, unit variance."""
    if nt < 1 or nr < 1:
        raise ValueError(f"need nt, nr >= 1, got nt = {nt}, nr = {nr}")
    re = rng.standard_normal((nr, nt))
    im = rng.standard_normal((nr, nt))
    return np.sqrt(0.5) * (re + 1j * im)


def noise_variance_for_snr(snr_db: float, nt: int, c: Constellation) -> float:
    """Total complex noise variance per receive antenna for a target SNR."""
    if nt < 1:
        raise ValueError(f"need nt >= 1, got {nt}")
    return nt * c.symbol_energy / 10.0 ** (snr_db / 10.0)


def add_awgn(
    clean: np.ndarray, noise_var: float, rng: np.random.Generator
) -> np.ndarray:
    """Add complex white Gaussian noise, noise_var per entry (half per axis)."""
    if noise_var < 0:
        raise ValueError(f"noise_var must be >= 0, got {noise_var}")
    clean = np.asarray(clean, dtype=np.complex128)
    scale = np.sqrt(noise_var / 2.0)
    re = rng.standard_normal(clean.shape)
    im = rng.standard_normal(clean.shape)
    return clean + scale * (re + 1j * im)


def realify(H: np.ndarray, y: np.ndarray, c: Constellation) -> RealizedSystem:
    """Real-valued system preserving the residual norm.

    Complex constellations use the doubled block form
    [[Re H, -Im H], [Im H, Re H]]; BPSK stacks [Re H; Im H] and keeps the
    nt real unknowns.
    """
    H = np.asarray(H, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    if H.shape[0] != y.shape[0]:
        raise ValueError(
            f"H has {H.shape[0]} rows but y has length {y.shape[0]}"
        )
    y_r = np.concatenate([y.real, y.imag])
    if not c.complex_axes:
        return RealizedSystem(h_r=np.vstack([H.real, H.imag]), y_r=y_r)
    h_r = np.block([[H.real, -H.imag], [H.imag, H.real]])
    return RealizedSystem(h_r=h_r, y_r=y_r)


def realify_symbols(x: np.ndarray, c: Constellation) -> np.ndarray:
    """The real symbol vector matching realify()'s column layout."""
    x = np.asarray(x, dtype=np.complex128)
    if not c.complex_axes:
        return x.real.copy()
    return np.concatenate([x.real, x.imag])


def sample_instance(
    nt: int,
    nr: int,
    c: Constellation,
    snr_db: float,
    rng: np.random.Generator,
) -> ChannelInstance:
    """Draw one transmission: bits, channel, then noise, in that order."""
    tx_bits = rng.integers(0, 2, nt * c.bps).astype(np.int8)
    tx_symbols = modulate(tx_bits, c)
    h = sample_channel(nt, nr, rng)
    noise_var = noise_variance_for_snr(snr_db, nt, c)
    y = add_awgn(h @ tx_symbols, noise_var, rng)
    return ChannelInstance(
        nt=nt,
        nr=nr,
        h=h,
        tx_bits=tx_bits,
        tx_symbols=tx_symbols,
        noise_var=noise_var,
        y=y,
    )


def instance_to_json(inst: ChannelInstance, c: Constellation) -> str:
    """Serialize an instance as a regression fixture."""
    return json.dumps(
        {
            "modulation": c.name,
            "nt": inst.nt,
            "nr": inst.nr,
            "h_re": inst.h.real.tolist(),
            "h_im": inst.h.imag.tolist(),
            "tx_bits": inst.tx_bits.tolist(),
            "y_re": inst.y.real.tolist(),
            "y_im": inst.y.imag.tolist(),
            "noise_var": inst.noise_var,
        }
    )


def instance_from_json(text: str) -> tuple[ChannelInstance, Constellation]:
    doc = json.loads(text)
    c = get_constellation(doc["modulation"])
    h = np.array(doc["h_re"], dtype=np.float64) + 1j * np.array(
        doc["h_im"], dtype=np.float64
    )
    tx_bits = np.array(doc["tx_bits"], dtype=np.int8)
    y = np.array(doc["y_re"], dtype=np.float64) + 1j * np.array(
        doc["y_im"], dtype=np.float64
    )
    inst = ChannelInstance(
        nt=int(doc["nt"]),
        nr=int(doc["nr"]),
        h=h,
        tx_bits=tx_bits,
        tx_symbols=modulate(tx_bits, c),
        noise_var=float(doc["noise_var"]),
        y=y,
    )
    return inst, c
