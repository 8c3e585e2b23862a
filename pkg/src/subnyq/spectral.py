"""Frequency-support detection and reconstruction for multiband inputs.

Two pipelines live here: continuous-to-finite (CTF) support detection plus
slice recovery/resynthesis for converter-bank measurements, and the
second-order periodic-nonuniform-sampling reconstruction for a single
bandpass band.

Slice sequence convention: z_l is what mixing the input with
e^{+j 2 pi l f_p t}, ideal lowpass at f_s/2 and decimation would produce, so
y[n] = C z[n] holds with the plain Fourier-coefficient matrix C and content
at frequency f lands in slice l = -round(f / f_p).  Resynthesis therefore
modulates slice l back with e^{-j 2 pi l f_p t}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signals import CSV_FLOAT_FMT, DenseSignal, as_int
from .sparse import SupportSet, omp_mmv, solve_on_support

__all__ = [
    "SliceRecovery",
    "ctf",
    "recover_slices",
    "mwc_resynthesize",
    "slice_index",
    "pns_beta",
    "beta_values",
    "pns_reconstruct",
    "select_pns_phase",
    "save_slices_csv",
]

#: A time shift phi is rejected when |1 - e^{-j 2 pi beta phi B}| falls below
#: this margin for some in-band fold index beta (the per-bin 2x2 systems
#: become numerically singular).
PHASE_MARGIN_TOL = 1e-6


@dataclass(frozen=True)
class SliceRecovery:
    """Recovered spectrum-slice sequences on a signed index support.

    ``support`` holds slice indices in the l = -L..L convention;
    ``slice_sequences`` has one row per support index, all equal length.
    Slices outside the support are implicitly zero.
    """

    support: SupportSet
    slice_sequences: np.ndarray

    def __post_init__(self) -> None:
        seqs = np.asarray(self.slice_sequences, dtype=np.complex128)
        if len(self.support) == 0:
            seqs = seqs.reshape(0, seqs.shape[1] if seqs.ndim == 2 else 0)
        elif seqs.ndim != 2 or seqs.shape[0] != len(self.support):
            raise ValueError("one sequence per support index required")
        object.__setattr__(self, "slice_sequences", seqs)


def _support_to_columns(support: SupportSet, harmonic_bound: int) -> SupportSet:
    cols = [l + harmonic_bound for l in support]
    if cols and (min(cols) < 0 or max(cols) > 2 * harmonic_bound):
        raise ValueError("slice index outside the matrix harmonic range")
    return SupportSet(tuple(cols))


def ctf(
    measurements: np.ndarray,
    c: np.ndarray,
    sparsity_bound: int,
    eig_tol: float = 1e-12,
    real_input: bool = False,
) -> SupportSet:
    """Continuous-to-finite support detection over a measurement block.

    Builds the frame Q = sum_n y[n] y[n]^H, keeps the eigenpairs above
    eig_tol relative to the largest eigenvalue (the threshold is the noise
    knob; the default suits noiseless runs), scales eigenvectors by the
    square roots of their eigenvalues and hands the resulting frame to the
    joint-sparse solver.  Returns signed slice indices; for real inputs the
    support is symmetrized to include -l alongside every selected l.
    """
    y = np.asarray(measurements, dtype=np.complex128)
    if y.ndim != 2 or y.shape[1] < 1:
        raise ValueError("measurements must be an m x T block with T >= 1")
    c = np.asarray(c, dtype=np.complex128)
    big_l = (c.shape[1] - 1) // 2
    q = y @ y.conj().T
    evals, evecs = np.linalg.eigh(q)
    lam_max = float(evals[-1])
    if lam_max <= 0:
        return SupportSet(())
    keep = evals > eig_tol * lam_max
    frame = evecs[:, keep] * np.sqrt(evals[keep])[None, :]
    cols = omp_mmv(frame, c, sparsity_bound, 0.0)
    slices = {col - big_l for col in cols}
    if real_input:
        slices |= {-l for l in slices}
    return SupportSet(tuple(sorted(slices)))


def recover_slices(
    measurements: np.ndarray, c: np.ndarray, support: SupportSet
) -> SliceRecovery:
    """Recover the active slice sequences by pseudo-inversion on the support.

    One least-squares solve covers every time index at once; indices outside
    the support are implicitly zero.
    """
    y = np.asarray(measurements, dtype=np.complex128)
    big_l = (np.asarray(c).shape[1] - 1) // 2
    cols = _support_to_columns(support, big_l)
    if len(cols) == 0:
        return SliceRecovery(support, np.zeros((0, y.shape[1])))
    seqs = solve_on_support(y, c, cols)
    return SliceRecovery(support, seqs)


def mwc_resynthesize(
    rec: SliceRecovery, f_p: float, grid_rate: float, duration: float
) -> DenseSignal:
    """Rebuild the dense-grid signal from recovered slice sequences.

    Each sequence is interpolated to the grid by DFT zero padding (exact
    under the periodic convention) and modulated back to its slice position;
    the half-open slice convention of the sampler is preserved.
    """
    n = as_int(grid_rate * duration, "grid length")
    if len(rec.support) == 0:
        return DenseSignal(np.zeros(n, dtype=np.complex128), grid_rate)
    n_s = rec.slice_sequences.shape[1]
    shift = as_int(f_p * duration, "slice shift in bins")
    if n % n_s:
        raise ValueError("grid length must be a multiple of the sequence length")
    k_lo = -(n_s // 2)
    ks = np.arange(k_lo, k_lo + n_s)
    dense_spec = np.zeros(n, dtype=np.complex128)
    for l, seq in zip(rec.support, rec.slice_sequences):
        spec = np.fft.fft(seq)
        dense_spec[np.mod(ks - l * shift, n)] += spec[np.mod(ks, n_s)]
    samples = np.fft.ifft(dense_spec) * (n / n_s)
    return DenseSignal(samples, grid_rate)


def slice_index(f: float, f_p: float) -> int:
    """Slice housing content at frequency f: the l with f + l f_p in
    [-f_p/2, f_p/2).

    The small bias keeps boundary frequencies (f exactly at an odd multiple
    of f_p/2) on the included side of the half-open slice, matching the
    sampler's lowpass mask convention.
    """
    return -int(math.floor(f / f_p + 0.5 + 1e-9))


def pns_beta(f: float, band: tuple[float, float]) -> int:
    """Fold index of the negative-band image onto frequency f.

    For a bandpass support (f_l, f_u) of width B sampled at 1/B per channel,
    returns the unique integer l with f - l*B inside (-f_u, -f_l); extended
    antisymmetrically to negative f.  Raises when f sits exactly on a fold
    transition (no integer qualifies).
    """
    f_l, f_u = band
    if not (0 < f_l < f_u):
        raise ValueError("need 0 < f_l < f_u")
    if f < 0:
        return -pns_beta(-f, band)
    if not (f_l < f < f_u):
        raise ValueError(f"frequency {f} outside the band ({f_l}, {f_u})")
    b = f_u - f_l
    bound = int(math.ceil(2 * f_u / b)) + 1
    for l in range(-bound, bound + 1):
        if -f_u < f - l * b < -f_l:
            return l
    raise ValueError(f"no fold index for frequency {f} (fold transition point)")


def beta_values(band: tuple[float, float]) -> list[int]:
    """Distinct fold indices occurring across the positive band."""
    f_l, f_u = band
    if not (0 < f_l < f_u):
        raise ValueError("need 0 < f_l < f_u")
    b = f_u - f_l
    out = set()
    bound = int(math.ceil(2 * f_u / b)) + 1
    for l in range(-bound, bound + 1):
        # image of the negative band under shift l*B, intersected with (f_l, f_u)
        lo, hi = l * b - f_u, l * b - f_l
        if hi > f_l and lo < f_u:
            out.add(l)
    return sorted(out)


def _phase_margin(phase: float, band: tuple[float, float]) -> tuple[float, int]:
    """Worst-case |1 - e^{-j 2 pi beta phase B}| over in-band folds, with the
    fold index attaining it."""
    b = band[1] - band[0]
    worst, worst_beta = math.inf, 0
    for beta in beta_values(band):
        margin = abs(1 - np.exp(-2j * np.pi * beta * phase * b))
        if margin < worst:
            worst, worst_beta = margin, beta
    return worst, worst_beta


def pns_reconstruct(
    y1: np.ndarray,
    y2: np.ndarray,
    band: tuple[float, float],
    phase: float,
    grid_rate: float | None = None,
) -> DenseSignal:
    """Reconstruct a real bandpass signal from second-order PNS sequences.

    Both channels sample at 1/B (B the band width), channel two delayed by
    ``phase``.  The interpolation filters are realized digitally: per
    positive DFT bin the two aliased images (the bin itself and the
    negative-band image folded onto it) satisfy a 2x2 linear system whose
    inverse is the pair of piecewise-constant filter responses; solving it
    bin by bin fills both spectral sides exactly.  The fold lands bin-exact
    because the fold offset beta*B spans a whole number of bins.
    """
    f_l, f_u = band
    y1 = np.asarray(y1, dtype=np.complex128)
    y2 = np.asarray(y2, dtype=np.complex128)
    if y1.shape != y2.shape or y1.ndim != 1 or y1.size == 0:
        raise ValueError("channel sequences must be equal-length vectors")
    b = f_u - f_l
    n_s = y1.size
    duration = n_s / b
    margin, bad_beta = _phase_margin(phase, band)
    if margin < PHASE_MARGIN_TOL:
        raise ValueError(
            f"time shift {phase} makes fold index beta={bad_beta} unresolvable "
            f"(|1 - e^(-j2 pi beta phi B)| = {margin:.2e})"
        )
    if grid_rate is None:
        grid_rate = math.ceil(2 * f_u * duration) / duration
    n = as_int(grid_rate * duration, "output grid length")
    if grid_rate < 2 * f_u:
        raise ValueError("output grid rate below twice the upper band edge")

    spec1 = np.fft.fft(y1) / n_s
    spec2 = np.fft.fft(y2) / n_s
    dense_spec = np.zeros(n, dtype=np.complex128)
    k_lo = int(math.floor(f_l * duration)) + 1
    k_hi = int(math.ceil(f_u * duration)) - 1
    for k in range(k_lo, k_hi + 1):
        f = k / duration
        try:
            beta = pns_beta(f, band)
        except ValueError:
            continue  # fold-transition bin, carries no in-model content
        k_img = k - beta * n_s
        base = np.exp(2j * np.pi * k * phase / duration)
        ratio = np.exp(-2j * np.pi * beta * phase * b)
        rhs = np.array([spec1[k % n_s], spec2[k % n_s]])
        mat = np.array([[1.0, 1.0], [base, base * ratio]])
        pos, neg = np.linalg.solve(mat, rhs)
        dense_spec[k % n] = pos
        dense_spec[k_img % n] = neg
    samples = np.fft.ifft(dense_spec) * n
    defect = float(np.linalg.norm(samples.imag))
    scale = float(np.linalg.norm(samples))
    return DenseSignal(samples, grid_rate, real=(scale == 0 or defect <= 1e-10 * scale))


def select_pns_phase(
    band: tuple[float, float], candidates: int, grid_rate: float | None = None
) -> float:
    """Pick the channel-two time shift with the best fold conditioning.

    Grid-searches ``candidates`` shifts inside (0, T_s) and returns the one
    maximizing the worst-case |1 - e^{-j 2 pi beta phi B}| over in-band fold
    indices.  When ``grid_rate`` is given the candidates are restricted to
    multiples of the simulation grid spacing so the shifted lattice stays on
    the grid.
    """
    if candidates < 1:
        raise ValueError("need at least one candidate shift")
    f_l, f_u = band
    if not (0 < f_l < f_u):
        raise ValueError("need 0 < f_l < f_u")
    b = f_u - f_l
    t_s = 1.0 / b
    if grid_rate is None:
        shifts = [(c + 1) * t_s / (candidates + 1) for c in range(candidates)]
    else:
        per = as_int(grid_rate * t_s, "grid points per interval")
        if per < 2:
            raise ValueError("grid too coarse to offset the second channel")
        count = min(candidates, per - 1)
        picks = np.unique(np.linspace(1, per - 1, count).round().astype(int))
        shifts = [p / grid_rate for p in picks]
    best_phi, best_margin = None, -math.inf
    for phi in shifts:
        margin, _ = _phase_margin(phi, band)
        if margin > best_margin:
            best_phi, best_margin = phi, margin
    if best_margin < PHASE_MARGIN_TOL:
        raise ValueError("no candidate shift resolves every in-band fold")
    return float(best_phi)


def save_slices_csv(rec: SliceRecovery, path) -> None:
    """Dump recovered slices: one row per slice, index then re,im pairs."""
    fmt = CSV_FLOAT_FMT.format
    lines = []
    for l, seq in zip(rec.support, rec.slice_sequences):
        cells = [str(l)]
        for v in seq:
            cells.append(fmt(v.real))
            cells.append(fmt(v.imag))
        lines.append(",".join(cells))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
