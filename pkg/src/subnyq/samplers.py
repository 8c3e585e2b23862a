"""Acquisition front ends and minimal-rate calculators.

Covers pointwise sampling through a track-and-hold bandwidth model,
undersampling rate regions for bandpass signals, periodic nonuniform
sampling, the modulated wideband converter (MWC) bank, the random
demodulator, and the known lower bounds on sampling rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signals import DenseSignal, HarmonicSpec, as_int

__all__ = [
    "ThModel",
    "PnsConfig",
    "MwcConfig",
    "RdConfig",
    "RateInterval",
    "undersample_valid_rates",
    "th_sample",
    "pns_sample",
    "mwc_matrix",
    "mwc_sample",
    "render_sign_waveform",
    "rd_sample",
    "rd_integrate_matrix",
    "landau_min_rate",
    "blind_min_rate",
    "mwc_compute_load",
]


@dataclass(frozen=True)
class ThModel:
    """Track-and-hold front end modeled as an ideal lowpass of cutoff b."""

    analog_bandwidth: float

    def __post_init__(self) -> None:
        if not self.analog_bandwidth > 0:
            raise ValueError("analog bandwidth must be positive")


@dataclass(frozen=True)
class PnsConfig:
    """Periodic nonuniform sampling: m channels at interval T_s with offsets."""

    interval: float
    offsets: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "offsets", tuple(float(p) for p in self.offsets))
        if self.interval <= 0:
            raise ValueError("interval must be positive")
        if not self.offsets:
            raise ValueError("at least one channel offset required")
        if len(set(self.offsets)) != len(self.offsets):
            raise ValueError("offsets must be distinct")
        for p in self.offsets:
            if not (0 <= p < self.interval):
                raise ValueError(f"offset {p} outside [0, interval)")

    @property
    def channels(self) -> int:
        return len(self.offsets)


@dataclass(frozen=True)
class MwcConfig:
    """Modulated wideband converter bank, basic configuration (f_s == f_p).

    ``sign_patterns`` holds one +/-1 chip sequence of length M per channel;
    each waveform alternates M times within the period 1/f_p.  The sensing
    matrix columns follow the harmonic order l = -L..L ascending with
    L = (M - 1) // 2.
    """

    channels: int
    chips_per_period: int
    f_p: float
    sign_patterns: np.ndarray
    f_s: float | None = None

    def __post_init__(self) -> None:
        if self.channels < 1:
            raise ValueError("need at least one channel")
        if self.chips_per_period < 1 or self.chips_per_period % 2 == 0:
            raise ValueError("chips_per_period must be odd and positive")
        if self.f_p <= 0:
            raise ValueError("f_p must be positive")
        pats = np.asarray(self.sign_patterns, dtype=float)
        if pats.shape != (self.channels, self.chips_per_period):
            raise ValueError(
                f"sign_patterns must have shape ({self.channels}, {self.chips_per_period})"
            )
        if not np.all(np.abs(pats) == 1):
            raise ValueError("sign patterns must take values in {+1, -1}")
        pats = np.ascontiguousarray(pats)
        pats.setflags(write=False)
        object.__setattr__(self, "sign_patterns", pats)
        if self.f_s is None:
            object.__setattr__(self, "f_s", self.f_p)
        elif not math.isclose(self.f_s, self.f_p, rel_tol=1e-12):
            raise ValueError("basic configuration requires f_s == f_p")

    @property
    def harmonic_bound(self) -> int:
        """L = (M - 1) / 2, the largest harmonic the matrix represents."""
        return (self.chips_per_period - 1) // 2

    @property
    def matrix(self) -> np.ndarray:
        """Derived m x M sensing matrix (see mwc_matrix)."""
        return mwc_matrix(self)

    @property
    def slice_indices(self) -> np.ndarray:
        return np.arange(-self.harmonic_bound, self.harmonic_bound + 1)

    def covers(self, f_max: float) -> bool:
        """Whether the M width-f_p slices tile the input range |f| <= f_max."""
        return self.chips_per_period * self.f_p >= 2 * f_max

    @classmethod
    def random(
        cls, channels: int, chips_per_period: int, f_p: float, seed: int = 0
    ) -> "MwcConfig":
        rng = np.random.default_rng(seed)
        pats = rng.choice([-1.0, 1.0], size=(channels, chips_per_period))
        return cls(channels, chips_per_period, f_p, pats)


@dataclass(frozen=True)
class RdConfig:
    """Random demodulator: chips at rate W, integrate-and-dump at rate R."""

    tone_grid_size: int
    rate: int
    chips: np.ndarray

    def __post_init__(self) -> None:
        w, r = self.tone_grid_size, self.rate
        if w < 1 or r < 1:
            raise ValueError("tone_grid_size and rate must be positive")
        if w % r:
            raise ValueError("rate must divide tone_grid_size")
        chips = np.asarray(self.chips, dtype=float)
        if chips.shape != (w,):
            raise ValueError(f"chips must have length {w}")
        if not np.all(np.abs(chips) == 1):
            raise ValueError("chips must take values in {+1, -1}")
        chips = np.ascontiguousarray(chips)
        chips.setflags(write=False)
        object.__setattr__(self, "chips", chips)

    @classmethod
    def random(cls, tone_grid_size: int, rate: int, seed: int = 0) -> "RdConfig":
        rng = np.random.default_rng(seed)
        chips = rng.choice([-1.0, 1.0], size=tone_grid_size)
        return cls(tone_grid_size, rate, chips)


@dataclass(frozen=True)
class RateInterval:
    """Closed interval of valid uniform sampling rates, possibly unbounded.

    ``high`` is meaningful only when ``unbounded_above`` is False; the k = 1
    region has no upper limit and carries the explicit flag instead of a
    sentinel value.
    """

    low: float
    high: float
    k: int
    unbounded_above: bool = False

    def contains(self, rate: float) -> bool:
        if rate < self.low:
            return False
        return self.unbounded_above or rate <= self.high


def undersample_valid_rates(f_l: float, f_u: float) -> list[RateInterval]:
    """Valid uniform rates for a bandpass support (f_l, f_u).

    For each integer fold count k the region is [2 f_u / k, 2 f_l / (k - 1)]
    (unbounded above for k = 1).  Empty regions are dropped and the list is
    ordered by decreasing k, i.e. lowest rates first.
    """
    if not (0 < f_l < f_u):
        raise ValueError("need 0 < f_l < f_u")
    band = f_u - f_l
    k_max = int(math.floor(f_u / band))
    out: list[RateInterval] = []
    for k in range(k_max, 0, -1):
        lo = 2 * f_u / k
        if k == 1:
            out.append(RateInterval(lo, math.inf, k, unbounded_above=True))
        else:
            hi = 2 * f_l / (k - 1)
            if lo <= hi:
                out.append(RateInterval(lo, hi, k))
    return out


def _lowpass_bins(n: int, grid_rate: float, cutoff: float, half_open: bool) -> np.ndarray:
    """Boolean DFT mask keeping |f| <= cutoff (or the half-open variant
    -cutoff <= f < cutoff used for slice tiling)."""
    freqs = np.fft.fftfreq(n, d=1.0 / grid_rate)
    tol = 1e-9 * grid_rate / n
    if half_open:
        return (freqs >= -cutoff - tol) & (freqs < cutoff - tol)
    return np.abs(freqs) <= cutoff + tol


def th_sample(x: DenseSignal, rate: float, th: ThModel | None = None) -> np.ndarray:
    """Pointwise sampling at ``rate`` behind a track-and-hold bandwidth model.

    The signal is brickwall-filtered at the T/H cutoff (exact DFT mask under
    the periodic convention) and then decimated.  ``th=None`` models an ideal
    pointwise sampler with unlimited front-end bandwidth.
    """
    stride = as_int(x.grid_rate / rate, "decimation ratio")
    samples = x.samples
    if th is not None:
        spec = np.fft.fft(samples)
        spec[~_lowpass_bins(x.n, x.grid_rate, th.analog_bandwidth, half_open=False)] = 0
        samples = np.fft.ifft(spec)
    return samples[::stride]


def pns_sample(x: DenseSignal, cfg: PnsConfig) -> list[np.ndarray]:
    """Read the grid signal at the shifted lattices n*T_s + phi_i."""
    stride = as_int(x.grid_rate * cfg.interval, "grid points per interval")
    out = []
    for phi in cfg.offsets:
        start = as_int(x.grid_rate * phi, f"grid offset for phi={phi}")
        out.append(x.samples[start::stride].copy())
    return out


def mwc_matrix(cfg: MwcConfig) -> np.ndarray:
    """Closed-form sensing matrix: Fourier coefficients of the sign waveforms.

    Entry (i, l) is the coefficient of channel i's waveform at harmonic l,
    columns ordered l = -L..L.  For piecewise-constant chips s_ik:
    C_{i,0} = mean(s_i), and for l != 0
    C_{i,l} = d_l * sum_k s_ik e^{-j 2 pi l k / M} with
    d_l = (1 - e^{-j 2 pi l / M}) / (j 2 pi l).
    """
    m_chips = cfg.chips_per_period
    big_l = cfg.harmonic_bound
    pattern_dft = np.fft.fft(cfg.sign_patterns, axis=1)  # S_l at l mod M
    ls = np.arange(-big_l, big_l + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = (1 - np.exp(-2j * np.pi * ls / m_chips)) / (2j * np.pi * ls)
    d[ls == 0] = 1.0 / m_chips
    return pattern_dft[:, np.mod(ls, m_chips)] * d[None, :]


def render_sign_waveform(cfg: MwcConfig, channel: int, grid_rate: float) -> np.ndarray:
    """One period of a sign waveform rendered bandlimited on the grid.

    The waveform is reproduced from its exact Fourier series truncated at the
    grid's representable harmonic range, so mixing on the grid matches the
    continuous mixing for any in-band input.  Pointwise chip sampling would
    instead bias the high harmonics by ~pi*l/(samples per period), a grid
    artifact the density-convergence experiment quantifies separately.
    """
    n_per = as_int(grid_rate / cfg.f_p, "grid points per waveform period")
    as_int(grid_rate / (cfg.chips_per_period * cfg.f_p), "grid points per chip")
    m_chips = cfg.chips_per_period
    pattern_dft = np.fft.fft(cfg.sign_patterns[channel])
    half = n_per // 2
    ls = np.arange(1, half)  # unpaired Nyquist harmonic dropped for even n_per
    d = (1 - np.exp(-2j * np.pi * ls / m_chips)) / (2j * np.pi * ls)
    coeffs = np.zeros(half + 1, dtype=np.complex128)
    coeffs[0] = pattern_dft[0].real / m_chips
    coeffs[1:half] = d * pattern_dft[np.mod(ls, m_chips)]
    return np.fft.irfft(coeffs * n_per, n=n_per)


def mwc_sample(x: DenseSignal, cfg: MwcConfig) -> np.ndarray:
    """Simulate the converter bank: mix, ideal lowpass at f_s/2, decimate.

    Returns an (m, n_out) array of channel sequences at rate f_s.  Requires
    the grid rate to be an integer multiple of both M*f_p (chips align to
    grid cells) and f_s, and the duration to span whole waveform periods.
    The lowpass keeps the half-open band [-f_s/2, f_s/2) so that adjacent
    width-f_p slices tile the axis without double counting shared edges.
    """
    n = x.n
    as_int(x.grid_rate / (cfg.chips_per_period * cfg.f_p), "grid points per chip")
    stride = as_int(x.grid_rate / cfg.f_s, "decimation ratio")
    n_per = as_int(x.grid_rate / cfg.f_p, "grid points per waveform period")
    if n % n_per:
        raise ValueError("duration must span an integer number of waveform periods")
    if n % stride:
        raise ValueError("duration must span an integer number of output samples")
    n_out = n // stride
    periods = n // n_per
    k_lo = -(n_out // 2)
    ks = np.arange(k_lo, k_lo + n_out)
    src = np.mod(ks, n)
    dst = np.mod(ks, n_out)
    out = np.empty((cfg.channels, n_out), dtype=np.complex128)
    for i in range(cfg.channels):
        waveform = np.tile(render_sign_waveform(cfg, i, x.grid_rate), periods)
        mixed_spec = np.fft.fft(x.samples * waveform)
        small = np.zeros(n_out, dtype=np.complex128)
        small[dst] = mixed_spec[src]
        out[i] = np.fft.ifft(small) * (n_out / n)
    return out


def rd_integrate_matrix(w: int) -> np.ndarray:
    """Map tone coefficients (DFT layout) to integrate-and-dump values.

    Entry (n, p) is the exact integral of e^{j 2 pi k t} over
    [n/W, (n+1)/W) for the tone index k represented at DFT position p.
    Position W/2 carries the +W/2 tone of the harmonic model (the grid
    samples cannot tell +/-W/2 apart, but their interval integrals differ).
    """
    ks = np.arange(w, dtype=float)
    ks[ks > w // 2] -= w  # DFT position -> signed tone index, +W/2 kept
    ns = np.arange(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        gains = (np.exp(2j * np.pi * ks / w) - 1) / (2j * np.pi * ks)
    gains[ks == 0] = 1.0 / w
    return np.exp(2j * np.pi * np.outer(ns, ks) / w) * gains[None, :]


def rd_sample(spec: HarmonicSpec, cfg: RdConfig) -> tuple[np.ndarray, np.ndarray]:
    """Random demodulator output and its sensing matrix.

    The tone sum is chipped by the +/-1 sequence at rate W and integrated and
    dumped at rate R; per-interval tone integrals use the exact closed form
    rather than Riemann sums, so the returned matrix A (mapping the length-W
    coefficient vector in DFT layout to the R measurements) reproduces the
    signal path to machine precision.
    """
    if spec.tone_grid_size != cfg.tone_grid_size:
        raise ValueError("spec and config disagree on the tone grid size")
    w, r = cfg.tone_grid_size, cfg.rate
    block = w // r
    # Phi row r sums chips over its block of 1/W intervals.
    phi = np.zeros((r, w))
    for row in range(r):
        sl = slice(row * block, (row + 1) * block)
        phi[row, sl] = cfg.chips[sl]
    a = phi @ rd_integrate_matrix(w)
    z = np.zeros(w, dtype=np.complex128)
    z[spec.dft_positions()] = np.asarray(spec.coefficients)
    return a @ z, a


def save_channels_csv(channels, path) -> None:
    """Dump sampled sequences: one channel per column, complex values as
    re,im column pairs."""
    from .signals import CSV_FLOAT_FMT

    fmt = CSV_FLOAT_FMT.format
    arr = np.asarray(channels, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr[None, :]
    header = ",".join(f"ch{i}_re,ch{i}_im" for i in range(arr.shape[0]))
    lines = [header]
    for n in range(arr.shape[1]):
        cells = []
        for i in range(arr.shape[0]):
            cells.append(fmt(arr[i, n].real))
            cells.append(fmt(arr[i, n].imag))
        lines.append(",".join(cells))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def landau_min_rate(occupied_measure: float) -> float:
    """Minimal average rate for a known spectral support: its measure.

    For N bands of width B (counting both spectral sides) that is N*B.
    """
    if occupied_measure < 0:
        raise ValueError("measure must be nonnegative")
    return float(occupied_measure)


def blind_min_rate(occupancy: float, f_nyq: float) -> float:
    """Minimal rate when only the occupied fraction is known:
    min(2 * occupancy * f_nyq, f_nyq).  No reduction is possible above 50%."""
    if not (0 < occupancy < 1):
        raise ValueError("occupancy must lie in (0, 1)")
    if f_nyq <= 0:
        raise ValueError("f_nyq must be positive")
    return min(2 * occupancy * f_nyq, f_nyq)


def mwc_compute_load(n_bands: int, channels: int, f_s: float) -> float:
    """Steady-state multiplications per second of the recovery stage:
    2 * N * m * f_s."""
    if n_bands < 0 or channels < 0 or f_s < 0:
        raise ValueError("arguments must be nonnegative")
    return 2.0 * n_bands * channels * f_s
