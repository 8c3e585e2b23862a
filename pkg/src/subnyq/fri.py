"""Pulse-stream recovery at the rate of innovation.

The pipeline: a sampling kernel (ideal lowpass or a sum-of-sincs filter)
isolates a block of consecutive Fourier-series coefficients of the periodic
pulse stream, uniform samples over one period yield those coefficients
through a DFT and a diagonal correction, an annihilating filter factors out
the pulse delays, and the amplitudes follow from a Vandermonde least-squares
solve.  A real single-channel kernel needs an odd coefficient count, so the
minimal number of samples per period is 2L + 1 for L pulses.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .signals import DenseSignal, FriSpec, PulseSpectrum, as_int, dirac_pulse

__all__ = [
    "SosKernel",
    "LowpassKernel",
    "FourierCoeffs",
    "KernelCheck",
    "FriStageError",
    "sos_time_response",
    "sos_freq_response",
    "kernel_admissible",
    "filter_and_sample",
    "coeffs_from_samples",
    "annihilating_filter",
    "delays_from_filter",
    "amplitudes_from_delays",
    "fri_recover",
    "fri_spec_to_json",
    "fri_spec_from_json",
]

#: Magnitudes below this count as spectral zeros in admissibility checks and
#: in the diagonal inversion of the sample-to-coefficient map.
SPECTRAL_ZERO_TOL = 1e-12


class FriStageError(RuntimeError):
    """Recovery failure tagged with the pipeline stage that raised it."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


def _check_consecutive(indices: tuple[int, ...]) -> None:
    for a, b in zip(indices, indices[1:]):
        if b != a + 1:
            raise ValueError("index set must be consecutive integers")


@dataclass(frozen=True)
class SosKernel:
    """Sum-of-sincs sampling filter, time compact with support = period.

    Frequency response G(w) = tau/sqrt(2 pi) * sum_{k in K} b_k sinc(w / (2
    pi / tau) - k); on the series lattice w = 2 pi k'/tau it reduces to the
    weight b_{k'} (scaled) inside K and vanishes at integer indices outside.
    """

    indices: tuple[int, ...]
    weights: tuple[complex, ...]
    period: float
    real_valued: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", tuple(int(k) for k in self.indices))
        object.__setattr__(self, "weights", tuple(complex(b) for b in self.weights))
        if self.period <= 0:
            raise ValueError("period must be positive")
        if len(self.indices) < 2:
            raise ValueError("need at least two coefficients")
        _check_consecutive(self.indices)
        if len(self.weights) != len(self.indices):
            raise ValueError("one weight per index required")
        if any(abs(b) < SPECTRAL_ZERO_TOL for b in self.weights):
            raise ValueError("all weights must be nonzero")
        if self.real_valued:
            if len(self.indices) % 2 == 0 or self.indices[0] != -self.indices[-1]:
                raise ValueError("real kernel needs a symmetric odd index set")
            lut = dict(zip(self.indices, self.weights))
            for k in self.indices:
                if abs(lut[-k] - np.conj(lut[k])) > 1e-12:
                    raise ValueError("real kernel needs b_{-k} = conj(b_k)")

    @classmethod
    def dirichlet(cls, half_width: int, period: float) -> "SosKernel":
        """Unit-weight kernel on {-p..p}; its impulse response is the
        rect-windowed Dirichlet kernel."""
        ks = tuple(range(-half_width, half_width + 1))
        return cls(ks, (1.0,) * len(ks), period, real_valued=True)

    def freq_at_index(self, k: int) -> complex:
        """S(2 pi k / tau) on the series lattice."""
        if k in self.indices:
            return self.period / math.sqrt(2 * np.pi) * self.weights[k - self.indices[0]]
        return 0.0j


@dataclass(frozen=True)
class LowpassKernel:
    """Ideal lowpass passing exactly the lattice indices |k| <= max_index."""

    max_index: int
    period: float

    def __post_init__(self) -> None:
        if self.max_index < 0 or self.period <= 0:
            raise ValueError("need max_index >= 0 and positive period")

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(range(-self.max_index, self.max_index + 1))

    def freq_at_index(self, k: int) -> complex:
        return 1.0 + 0.0j if abs(k) <= self.max_index else 0.0j


def sos_time_response(kernel: SosKernel, t) -> np.ndarray:
    """Impulse response rect(t/tau) * sum_k b_k e^{j 2 pi k t / tau}."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    tau = kernel.period
    ks = np.asarray(kernel.indices)
    bs = np.asarray(kernel.weights)
    out = np.exp(2j * np.pi * np.outer(t, ks) / tau) @ bs
    out[np.abs(t) > tau / 2] = 0.0
    return out


def sos_freq_response(kernel: SosKernel, omega) -> np.ndarray:
    """Frequency response of the sum-of-sincs filter at angular frequency."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    tau = kernel.period
    ks = np.asarray(kernel.indices)
    bs = np.asarray(kernel.weights)
    args = omega[:, None] / (2 * np.pi / tau) - ks[None, :]
    return tau / math.sqrt(2 * np.pi) * (np.sinc(args) @ bs)


@dataclass(frozen=True)
class KernelCheck:
    admissible: bool
    detail: str = ""

    def __bool__(self) -> bool:  # pragma: no cover
        return self.admissible


def kernel_admissible(
    kernel: SosKernel | LowpassKernel,
    indices: tuple[int, ...],
    pulse: PulseSpectrum,
) -> KernelCheck:
    """Check the kernel/pulse pair against the coefficient-isolation rules.

    Requires S(2 pi k / tau) nonzero on the index block, zero at lattice
    points outside it, and H(2 pi k / tau) nonzero on the block; off-lattice
    behaviour is unconstrained and never evaluated.  The failing index is
    named in the diagnostics.
    """
    indices = tuple(int(k) for k in indices)
    _check_consecutive(indices)
    tau = kernel.period
    for k in indices:
        if abs(kernel.freq_at_index(k)) < SPECTRAL_ZERO_TOL:
            return KernelCheck(False, f"kernel response vanishes at lattice index {k}")
    lo, hi = min(indices), max(indices)
    probe = [k for k in range(lo - 2, hi + 3) if k not in indices]
    for k in probe:
        if abs(kernel.freq_at_index(k)) >= SPECTRAL_ZERO_TOL:
            return KernelCheck(False, f"kernel leaks at out-of-block index {k}")
    h_vals = pulse(2 * np.pi * np.asarray(indices) / tau)
    small = np.abs(h_vals) < SPECTRAL_ZERO_TOL
    if np.any(small):
        k = indices[int(np.flatnonzero(small)[0])]
        return KernelCheck(False, f"pulse spectrum vanishes at lattice index {k}")
    return KernelCheck(True, "")


def filter_and_sample(
    x: DenseSignal, kernel: SosKernel | LowpassKernel, n_samples: int
) -> np.ndarray:
    """Forward acquisition path: kernel-filter the grid signal over one
    period and read n_samples uniform values at spacing period/n_samples.

    Filtering multiplies the series coefficients by conj(S(2 pi k / tau)),
    matching the inner-product sampling model.
    """
    n_per = as_int(x.grid_rate * kernel.period, "grid points per period")
    if x.n % n_per:
        raise ValueError("signal duration must be a whole number of periods")
    if n_per % n_samples:
        raise ValueError("per-period grid length must be divisible by n_samples")
    if max(abs(k) for k in kernel.indices) > (n_per - 1) // 2:
        raise ValueError("grid too coarse to represent every kernel index")
    period = x.samples[:n_per]
    spec = np.fft.fft(period)
    gains = np.zeros(n_per, dtype=np.complex128)
    for k in kernel.indices:
        gains[k % n_per] = np.conj(kernel.freq_at_index(k))
    filtered = np.fft.ifft(spec * gains)
    return filtered[:: n_per // n_samples].copy()


@dataclass(frozen=True)
class FourierCoeffs:
    """Series coefficients X[k] on a consecutive index block."""

    values: np.ndarray
    indices: tuple[int, ...]
    period: float

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.complex128)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "indices", tuple(int(k) for k in self.indices))
        if vals.ndim != 1 or vals.size != len(self.indices):
            raise ValueError("one value per index required")
        _check_consecutive(self.indices)
        if self.period <= 0:
            raise ValueError("period must be positive")


def coeffs_from_samples(
    samples: np.ndarray, kernel: SosKernel | LowpassKernel, period: float
) -> FourierCoeffs:
    """Invert the sampling map: coefficients = DFT(samples) / (M * conj(S)).

    ``samples`` are the M = |K| uniform reads of the kernel-filtered signal
    over one period; the DFT bin k mod M carries M * X[k] * conj(S_k) for the
    block indices k, so dividing by the diagonal recovers X on the block.
    """
    c = np.asarray(samples, dtype=np.complex128)
    ks = kernel.indices
    m = len(ks)
    if c.shape != (m,):
        raise ValueError(f"expected {m} samples, one per kernel index")
    if not math.isclose(period, kernel.period, rel_tol=1e-12):
        raise ValueError("kernel period disagrees with the requested period")
    dft = np.fft.fft(c)
    vals = np.empty(m, dtype=np.complex128)
    for j, k in enumerate(ks):
        s = np.conj(kernel.freq_at_index(k))
        if abs(s) < SPECTRAL_ZERO_TOL:
            raise ValueError(f"kernel response vanishes at lattice index {k}")
        vals[j] = dft[k % m] / (m * s)
    return FourierCoeffs(vals, ks, period)


def annihilating_filter(coeffs: FourierCoeffs, n_pulses: int) -> np.ndarray:
    """Filter taps A[0..L] whose convolution annihilates the coefficients.

    Stacks the (|K| - L) x (L + 1) Toeplitz constraints and takes the right
    singular vector of the smallest singular value (a total-least-squares
    null vector, so a small true leading tap cannot break the solve), then
    rescales to A[0] = 1.  Raises when the effective rank indicates fewer
    than L exponentials or when the leading tap is degenerate.
    """
    x = coeffs.values
    m = x.size
    l = n_pulses
    if l < 1:
        raise ValueError("need at least one pulse")
    if m < 2 * l + 1:
        raise ValueError(f"need at least 2L+1 = {2 * l + 1} coefficients, got {m}")
    rows = m - l
    toep = np.empty((rows, l + 1), dtype=np.complex128)
    for r in range(rows):
        toep[r] = x[r + l :: -1][: l + 1]
    _, svals, vh = np.linalg.svd(toep)
    smax = float(svals[0])
    if smax == 0.0:
        raise ValueError("coefficient block is identically zero (rank deficient)")
    # numerical rank with the usual size-scaled tolerance; closely spaced
    # delays legitimately produce tiny singular values, only true null
    # directions fall below this
    rank_tol = max(toep.shape) * np.finfo(float).eps * smax
    rank = int(np.sum(svals > rank_tol))
    if rank < l:
        raise ValueError(
            f"coefficients carry only {rank} exponentials, expected {l}"
        )
    a = vh[-1].conj()
    if abs(a[0]) < 1e-10:
        raise ValueError("degenerate annihilator: leading tap vanishes")
    return a / a[0]


def delays_from_filter(taps: np.ndarray, period: float) -> tuple[np.ndarray, np.ndarray]:
    """Pulse delays from the annihilator roots, with the root magnitudes.

    Roots come from the companion-matrix eigenvalues of A(z); each root u
    maps to t = -period/(2 pi) * arg(u) reduced to [0, period).  Delays are
    returned ascending; magnitudes should sit on the unit circle for
    noiseless data.
    """
    a = np.asarray(taps, dtype=np.complex128)
    if a.ndim != 1 or a.size < 2:
        raise ValueError("need a filter of degree >= 1")
    if abs(a[0] - 1) > 1e-9:
        raise ValueError("filter must be normalized to A[0] = 1")
    roots = np.roots(a)
    # companion-matrix eigenvalues split an exact double root by about
    # sqrt(machine eps) ~ 1.5e-8, so the distinctness threshold must sit
    # above that; 1e-7 is still orders below any resolvable separation
    for i in range(roots.size):
        for j in range(i + 1, roots.size):
            if abs(roots[i] - roots[j]) < 1e-7:
                raise ValueError("repeated annihilator roots: delays not distinct")
    delays = np.mod(-period / (2 * np.pi) * np.angle(roots), period)
    # a root infinitesimally past angle 0 makes the modulo round up to the
    # period itself; fold it back onto 0
    delays[delays >= period] = 0.0
    order = np.argsort(delays)
    return delays[order], np.abs(roots)[order]


def amplitudes_from_delays(
    coeffs: FourierCoeffs,
    delays: np.ndarray,
    pulse: PulseSpectrum,
    period: float,
) -> np.ndarray:
    """Pulse amplitudes by linear regression on the exponential model.

    Solves tau * X[k] / H(2 pi k / tau) = sum_l a_l e^{-j 2 pi k t_l / tau}
    over the coefficient block in the least-squares sense.
    """
    delays = np.asarray(delays, dtype=float)
    ks = np.asarray(coeffs.indices)
    h = pulse(2 * np.pi * ks / period)
    if np.any(np.abs(h) < SPECTRAL_ZERO_TOL):
        bad = ks[int(np.argmin(np.abs(h)))]
        raise ValueError(f"pulse spectrum vanishes at lattice index {bad}")
    rhs = period * coeffs.values / h
    vand = np.exp(-2j * np.pi * np.outer(ks, delays) / period)
    svals = np.linalg.svd(vand, compute_uv=False)
    if svals[-1] < 1e-12 * svals[0]:
        raise ValueError("delays too close: exponential system is rank deficient")
    amps, *_ = np.linalg.lstsq(vand, rhs, rcond=None)
    return amps


def fri_recover(
    samples: np.ndarray,
    kernel: SosKernel | LowpassKernel,
    n_pulses: int,
    period: float,
    pulse: PulseSpectrum | None = None,
) -> FriSpec:
    """Full pipeline: coefficients -> annihilator -> delays -> amplitudes.

    Stage failures re-raise as FriStageError tagged with the stage name.
    """
    pulse = pulse if pulse is not None else dirac_pulse()

    def stage(name, fn, *args):
        try:
            return fn(*args)
        except FriStageError:
            raise
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise FriStageError(name, str(exc)) from exc

    coeffs = stage("coefficients", coeffs_from_samples, samples, kernel, period)
    taps = stage("annihilator", annihilating_filter, coeffs, n_pulses)
    delays, _ = stage("delays", delays_from_filter, taps, period)
    amps = stage("amplitudes", amplitudes_from_delays, coeffs, delays, pulse, period)
    try:
        return FriSpec(period, tuple(delays), tuple(amps), pulse)
    except ValueError as exc:
        raise FriStageError("assembly", str(exc)) from exc


def fri_spec_to_json(spec: FriSpec) -> str:
    """Serialize an estimated pulse stream (period, count, delays, complex
    amplitudes, pulse name)."""
    payload = {
        "period": spec.period,
        "pulse_count": spec.pulse_count,
        "delays": list(spec.delays),
        "amplitudes": [[a.real, a.imag] for a in spec.amplitudes],
        "pulse": spec.pulse.name,
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def fri_spec_from_json(text: str, pulse: PulseSpectrum | None = None) -> FriSpec:
    """Load a serialized pulse stream; non-Dirac pulses must be re-supplied
    since spectra do not round-trip through JSON."""
    payload = json.loads(text)
    if pulse is None:
        if payload["pulse"] != "dirac":
            raise ValueError(f"supply the {payload['pulse']!r} pulse spectrum explicitly")
        pulse = dirac_pulse()
    amps = tuple(complex(re, im) for re, im in payload["amplitudes"])
    return FriSpec(payload["period"], tuple(payload["delays"]), amps, pulse)
