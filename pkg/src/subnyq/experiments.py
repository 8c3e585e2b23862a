"""Reproducible experiment runner: seeded Monte Carlo over the sampling
pipelines, rate-bound reports, and the simulation-methodology sweeps
(quadrature density convergence, off-grid tone mismatch).

Determinism contract: (config, seed) fixes every random draw and every
emitted CSV byte.  Floats in CSV output always use 17 significant digits in
scientific notation.  Per-trial generators come from
``default_rng(SeedSequence((seed, trial_index)))`` so parallel trials never
share streams and execution order cannot matter.  Stage wall times are
measured and kept on the in-memory results and in the summary, but stay out
of the per-trial CSV so reruns are byte-identical.

Per-trial CSV columns (all scenarios): ``trial``, ``support_exact``,
``support_jaccard``, ``nmse``, ``failure``.  Their meaning per scenario:

* mwc  - support columns compare the detected slice set against the slice
         set implied by the drawn carriers; nmse is the resynthesis error.
* pns  - no support notion: the support columns are fixed true/1.0 and nmse
         is the reconstruction error on the dense grid.
* rd   - support columns compare the recovered tone set against the planted
         one; nmse is the coefficient-vector error.
* fri  - support columns report whether every delay matched within the
         configured tolerance (and the matched fraction); nmse is the
         amplitude error after circular delay matching.
"""

from __future__ import annotations

import json
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from . import schemas
from .fri import (
    FriStageError,
    LowpassKernel,
    SosKernel,
    filter_and_sample,
    fri_recover,
)
from .samplers import (
    MwcConfig,
    PnsConfig,
    RdConfig,
    blind_min_rate,
    landau_min_rate,
    mwc_matrix,
    mwc_sample,
    pns_sample,
    rd_sample,
)
from .signals import (
    CSV_FLOAT_FMT,
    DenseSignal,
    FriSpec,
    HarmonicSpec,
    MultibandSpec,
    as_int,
    dirac_pulse,
    gen_fri_periodic,
    gen_multiband,
    nmse,
)
from .sparse import SupportSet, omp
from .spectral import (
    ctf,
    mwc_resynthesize,
    pns_beta,
    pns_reconstruct,
    recover_slices,
    select_pns_phase,
    slice_index,
)

__all__ = [
    "TrialResult",
    "ExperimentOutcome",
    "BoundsReport",
    "trial_rng",
    "run_experiment",
    "bounds_report",
    "density_convergence",
    "sign_coefficients_quadrature",
    "mismatch_sweep",
    "match_delays",
]

_FMT = CSV_FLOAT_FMT.format


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Per-trial stream: ``default_rng(SeedSequence((seed, trial)))``.

    Seeding from the entropy pair (rather than seed-plus-index arithmetic)
    gives collision-free, reproducible streams for every (seed, trial)
    combination, independent of trial execution order.
    """
    return np.random.default_rng(np.random.SeedSequence((int(seed), int(trial))))


class _StageFailure(RuntimeError):
    """Trial-stage failure; carries the stage tag for the failure histogram."""

    def __init__(self, stage: str, original: Exception):
        super().__init__(f"[{stage}] {original}")
        self.stage = stage


@contextmanager
def _stage(name: str, timings: dict[str, float]):
    t0 = time.perf_counter()
    try:
        yield
    except (FriStageError, _StageFailure):
        raise
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise _StageFailure(name, exc) from exc
    finally:
        timings[name] = time.perf_counter() - t0


@dataclass(frozen=True)
class TrialResult:
    """Outcome of one seeded trial.

    ``support_jaccard`` is intersection-over-union of detected versus true
    supports (two empty supports count as 1.0); an exact support forces
    jaccard 1.  ``timings`` maps stage names to seconds, informational only.
    """

    trial: int
    support_exact: bool
    support_jaccard: float
    nmse: float
    timings: dict[str, float] = field(default_factory=dict)
    failure: str | None = None

    def __post_init__(self) -> None:
        j = self.support_jaccard
        if not math.isnan(j) and not (0.0 <= j <= 1.0):
            raise ValueError("jaccard must lie in [0, 1]")
        if self.support_exact and j != 1.0:
            raise ValueError("an exact support must have jaccard 1")


_TRIAL_COLUMNS = ("trial", "support_exact", "support_jaccard", "nmse", "failure")


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _FMT(v)
    return str(v)


@dataclass
class ExperimentOutcome:
    scenario: str
    summary: dict
    trials: list[TrialResult] = field(default_factory=list)
    table: list[dict] | None = None

    def csv_text(self) -> str:
        """Deterministic CSV: per-trial rows, or the report table for the
        bounds/density scenarios."""
        if self.table is not None:
            cols = list(self.table[0].keys())
            lines = [",".join(cols)]
            lines.extend(
                ",".join(_cell(row[c]) for c in cols) for row in self.table
            )
            return "\n".join(lines) + "\n"
        lines = [",".join(_TRIAL_COLUMNS)]
        for t in self.trials:
            lines.append(
                ",".join(
                    (
                        str(t.trial),
                        "true" if t.support_exact else "false",
                        _FMT(t.support_jaccard),
                        _FMT(t.nmse),
                        t.failure or "",
                    )
                )
            )
        return "\n".join(lines) + "\n"

    def summary_json(self) -> str:
        return json.dumps(self.summary, indent=2, sort_keys=True)


def _jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


# ---------------------------------------------------------------------------
# multiband / converter-bank scenario


def _draw_carrier_bins(
    rng: np.random.Generator, count: int, lo: int, hi: int, min_gap: int
) -> list[int]:
    if hi < lo:
        raise ValueError("carrier range is empty; bands do not fit the grid")
    for _ in range(10_000):
        bins = sorted(int(b) for b in rng.integers(lo, hi + 1, size=count))
        if all(b - a >= min_gap for a, b in zip(bins, bins[1:])):
            return bins
    raise ValueError("could not place non-overlapping bands; range too tight")


def _multiband_support(
    carrier_bins: list[int], half_bins: int, duration: float, f_p: float
) -> set[int]:
    """Slice set of the drawn content, in the detector's convention.

    Both spectral sides are walked explicitly: under the half-open slice
    tiling a content bin exactly on a slice edge maps asymmetrically (+edge
    to the upper slice, -edge to the lower one), so the negative side is not
    the mirror of the positive one.  The final set is symmetrized because
    the detector reports conjugate slices together for real inputs.
    """
    occupied: set[int] = set()
    for kc in carrier_bins:
        for center in (kc, -kc):
            lo_l = slice_index((center + half_bins) / duration, f_p)
            hi_l = slice_index((center - half_bins) / duration, f_p)
            occupied.update(range(lo_l, hi_l + 1))
    return occupied | {-l for l in occupied}


def _mwc_trial(cfg: schemas.MwcExperiment, trial: int) -> TrialResult:
    rng = trial_rng(cfg.seed, trial)
    model, sampler, recovery = cfg.model, cfg.sampler, cfg.recovery
    f_nyq = model.nyquist_rate
    m_chips = sampler.chips_per_period
    f_p = sampler.f_p if sampler.f_p is not None else f_nyq / m_chips
    duration = sampler.snapshots / f_p
    grid_rate = cfg.grid_density_factor * f_nyq
    timings: dict[str, float] = {}

    with _stage("generate", timings):
        half_bins = int(math.floor(model.band_width / 2 * duration))
        if model.carriers is not None:
            carrier_bins = [as_int(f * duration, "carrier bin") for f in model.carriers]
        else:
            lo = half_bins + 1
            hi = min(
                int(math.floor((model.f_max - model.band_width / 2) * duration)),
                int(math.floor(model.f_max * duration)) - half_bins - 2,
            )
            carrier_bins = _draw_carrier_bins(
                rng,
                model.band_count // 2,
                lo,
                hi,
                int(math.ceil(model.band_width * duration)),
            )
        spec = MultibandSpec(
            model.band_width, tuple(b / duration for b in carrier_bins), model.f_max
        )
        x = gen_multiband(spec, grid_rate, duration, seed=int(rng.integers(2**63)))
        if model.content_scale != 1.0:
            x = DenseSignal(x.samples * model.content_scale, grid_rate, real=True)
        truth = (
            set()
            if model.content_scale == 0.0
            else _multiband_support(carrier_bins, half_bins, duration, f_p)
        )

    with _stage("sample", timings):
        if sampler.pattern_seed is not None:
            bank = MwcConfig.random(
                sampler.channels, m_chips, f_p, sampler.pattern_seed
            )
        else:
            pats = rng.choice([-1.0, 1.0], size=(sampler.channels, m_chips))
            bank = MwcConfig(sampler.channels, m_chips, f_p, pats)
        y = mwc_sample(x, bank)

    with _stage("recover", timings):
        c = mwc_matrix(bank)
        bound = (
            recovery.sparsity_bound
            if recovery.sparsity_bound is not None
            else 2 * model.band_count
        )
        detected = ctf(y, c, bound, recovery.eig_tol, real_input=True)
        rec = recover_slices(y, c, detected)

    with _stage("resynthesize", timings):
        x_hat = mwc_resynthesize(rec, f_p, grid_rate, duration)
        err = nmse(x.samples, x_hat.samples)

    got = set(detected)
    return TrialResult(trial, got == truth, _jaccard(got, truth), err, timings)


# ---------------------------------------------------------------------------
# bandpass / periodic-nonuniform scenario


def _pns_trial(cfg: schemas.PnsExperiment, trial: int) -> TrialResult:
    rng = trial_rng(cfg.seed, trial)
    f_l, f_u = cfg.model.f_low, cfg.model.f_high
    band = (f_l, f_u)
    width = f_u - f_l
    t_s = 1.0 / width
    n_snap = cfg.sampler.samples_per_channel
    duration = n_snap * t_s
    per_interval = int(math.ceil(cfg.grid_density_factor * 2 * f_u * t_s))
    grid_rate = per_interval * width
    n = n_snap * per_interval
    timings: dict[str, float] = {}

    with _stage("generate", timings):
        spec_arr = np.zeros(n, dtype=np.complex128)
        k_lo = int(math.floor(f_l * duration)) + 1
        k_hi = int(math.ceil(f_u * duration)) - 1
        for k in range(k_lo, k_hi + 1):
            try:
                pns_beta(k / duration, band)
            except ValueError:
                continue  # fold-transition bin, outside the model class
            coeff = (rng.standard_normal() + 1j * rng.standard_normal()) / math.sqrt(2)
            spec_arr[k % n] = coeff
            spec_arr[-k % n] = np.conj(coeff)
        x = DenseSignal(np.fft.ifft(spec_arr) * n, grid_rate, real=True)

    with _stage("sample", timings):
        candidates = cfg.sampler.phase_candidates or per_interval - 1
        phase = select_pns_phase(band, candidates, grid_rate)
        y1, y2 = pns_sample(x, PnsConfig(t_s, (0.0, phase)))

    with _stage("recover", timings):
        x_hat = pns_reconstruct(y1, y2, band, phase, grid_rate)
        err = nmse(x, x_hat)
    return TrialResult(trial, True, 1.0, err, timings)


# ---------------------------------------------------------------------------
# sparse-harmonic / random-demodulator scenario


def _draw_harmonic(rng: np.random.Generator, w: int, k: int) -> HarmonicSpec:
    indices = rng.choice(np.arange(-(w // 2 - 1), w // 2 + 1), size=k, replace=False)
    mags = 0.5 + rng.random(k)
    phases = rng.random(k) * 2 * np.pi
    coeffs = mags * np.exp(1j * phases)
    return HarmonicSpec(w, tuple(int(i) for i in indices), tuple(coeffs))


def _rd_trial(cfg: schemas.RdExperiment, trial: int) -> TrialResult:
    rng = trial_rng(cfg.seed, trial)
    w, k = cfg.model.tone_grid_size, cfg.model.active_count
    timings: dict[str, float] = {}

    with _stage("sample", timings):
        spec = _draw_harmonic(rng, w, k)
        chips = rng.choice([-1.0, 1.0], size=w)
        rd = RdConfig(w, cfg.sampler.rate, chips)
        y, a = rd_sample(spec, rd)

    with _stage("recover", timings):
        sol = omp(y, a, max_support=k, residual_tol=cfg.recovery.residual_tol)
        truth_positions = SupportSet.from_indices(spec.dft_positions())
        z_true = np.zeros(w, dtype=np.complex128)
        z_true[spec.dft_positions()] = np.asarray(spec.coefficients)
        err = nmse(z_true, sol.dense(w))

    got, truth = set(sol.support), set(truth_positions)
    return TrialResult(trial, got == truth, _jaccard(got, truth), err, timings)


# ---------------------------------------------------------------------------
# pulse-stream scenario


def match_delays(
    true_delays: np.ndarray, est_delays: np.ndarray, period: float
) -> tuple[np.ndarray, int]:
    """Circular-distance errors under the best cyclic alignment.

    Both delay lists are sorted; on a circle the optimal assignment between
    two sorted point sets is a cyclic shift, so every shift is tried and the
    smallest total distance wins.  Returns the per-pulse errors aligned to
    the sorted true delays and the winning shift (estimate index i pairs
    with true index (i - shift) mod L), so companion quantities such as
    amplitudes can be aligned the same way with ``np.roll(est, -shift)``.
    """
    t = np.sort(np.asarray(true_delays, dtype=float))
    e = np.sort(np.asarray(est_delays, dtype=float))
    if t.shape != e.shape:
        raise ValueError("delay counts differ")

    def circ(a, b):
        d = np.abs(a - b) % period
        return np.minimum(d, period - d)

    best_errs, best_shift, best_total = None, 0, math.inf
    for shift in range(t.size):
        errs = circ(t, np.roll(e, -shift))
        total = float(errs.sum())
        if total < best_total:
            best_errs, best_shift, best_total = errs, shift, total
    return best_errs, best_shift


def _draw_delays(
    rng: np.random.Generator, count: int, period: float, gap_factor: float
) -> np.ndarray:
    """Random delays with circular separation >= gap_factor * period / count.

    Jittered-lattice draw: each delay moves freely inside its own slot of
    width (1 - gap_factor) * period / count and the whole pattern gets a
    random circular offset, so the separation holds by construction (a
    rejection draw would almost never satisfy it for large counts).
    """
    if not (0 < gap_factor <= 1):
        raise ValueError("gap_factor must lie in (0, 1]")
    slot = period / count
    base = (np.arange(count) + gap_factor / 2 + (1 - gap_factor) * rng.random(count)) * slot
    return np.sort((base + rng.random() * period) % period)


def _fri_trial(cfg: schemas.FriExperiment, trial: int) -> TrialResult:
    rng = trial_rng(cfg.seed, trial)
    tau, count = cfg.model.period, cfg.model.pulse_count
    m = cfg.sampler.samples_per_period or 2 * count + 1
    if m % 2 == 0 or m < 2 * count + 1:
        raise ValueError("samples_per_period must be odd and at least 2L+1")
    half = (m - 1) // 2
    timings: dict[str, float] = {}

    with _stage("generate", timings):
        delays = _draw_delays(rng, count, tau, cfg.model.min_gap_factor)
        amps = (0.5 + rng.random(count)) * rng.choice([-1.0, 1.0], size=count)
        spec = FriSpec(tau, tuple(delays), tuple(amps))
        grid_per = cfg.sampler.grid_per_period or 16 * m
        grid_per -= grid_per % m  # keep the read lattice on the grid
        x = gen_fri_periodic(spec, grid_per / tau, periods=1)

    with _stage("sample", timings):
        if cfg.sampler.kernel == "sos":
            kernel: SosKernel | LowpassKernel = SosKernel.dirichlet(half, tau)
        else:
            kernel = LowpassKernel(half, tau)
        samples = filter_and_sample(x, kernel, m)

    with _stage("recover", timings):
        est = fri_recover(samples, kernel, count, tau, dirac_pulse())

    errs, shift = match_delays(np.asarray(spec.delays), np.asarray(est.delays), tau)
    tol = cfg.recovery.delay_pass * tau
    matched = int(np.sum(errs <= tol))
    amp_err = nmse(
        np.asarray(spec.amplitudes), np.roll(np.asarray(est.amplitudes), -shift)
    )
    return TrialResult(
        trial, matched == count, matched / count if count else 1.0, amp_err, timings
    )


# ---------------------------------------------------------------------------
# runner


_TRIAL_FNS = {
    "mwc": _mwc_trial,
    "pns": _pns_trial,
    "rd": _rd_trial,
    "fri": _fri_trial,
}


def run_experiment(cfg) -> ExperimentOutcome:
    """Run a validated experiment config and aggregate the results.

    Monte Carlo scenarios (mwc, pns, rd, fri) run ``cfg.trials`` seeded
    trials; per-trial failures are recorded as stage-tagged rows, not
    raised.  The bounds and density scenarios produce report tables instead.
    When ``cfg.out_dir`` is set, the CSV and summary JSON are written there
    as well.
    """
    if isinstance(cfg, (dict, str, bytes)):
        cfg = schemas.parse_config(cfg)
    start = time.perf_counter()
    if cfg.scenario == "bounds":
        report = bounds_report(cfg.model, cfg.sampler)
        summary = {"scenario": "bounds", **report.as_dict()}
        outcome = ExperimentOutcome("bounds", summary, table=[report.as_dict()])
    elif cfg.scenario == "density":
        rng = np.random.default_rng(
            np.random.SeedSequence((cfg.seed, cfg.pattern_seed))
        )
        pattern = rng.choice([-1.0, 1.0], size=cfg.chips)
        rows = density_convergence(pattern, cfg.densities)
        outcome = ExperimentOutcome(
            "density",
            {
                "scenario": "density",
                "chips": cfg.chips,
                "densities": [r for r, _ in rows],
                "max_errors": [e for _, e in rows],
            },
            table=[{"density": r, "max_error": e} for r, e in rows],
        )
    else:
        outcome = _run_monte_carlo(cfg)
    outcome.summary["wall_time_s"] = time.perf_counter() - start
    if cfg.out_dir:
        _write_outputs(outcome, cfg.out_dir)
    return outcome


def _run_monte_carlo(cfg) -> ExperimentOutcome:
    fn = _TRIAL_FNS[cfg.scenario]
    results: list[TrialResult] = []
    for trial in range(cfg.trials):
        try:
            results.append(fn(cfg, trial))
        except (FriStageError, _StageFailure) as exc:
            results.append(
                TrialResult(trial, False, math.nan, math.nan, {}, failure=exc.stage)
            )
    completed = [t for t in results if t.failure is None]
    failures: dict[str, int] = {}
    for t in results:
        if t.failure is not None:
            failures[t.failure] = failures.get(t.failure, 0) + 1
    errs = sorted(t.nmse for t in completed)
    summary = {
        "scenario": cfg.scenario,
        "trials": cfg.trials,
        "successes": len(completed),
        "success_rate": len(completed) / cfg.trials,
        "support_exact_rate": sum(t.support_exact for t in results) / cfg.trials,
        "median_nmse": float(np.median(errs)) if errs else None,
        "max_nmse": max(errs) if errs else None,
        "failures": failures,
    }
    return ExperimentOutcome(cfg.scenario, summary, trials=results)


def _write_outputs(outcome: ExperimentOutcome, out_dir: str) -> None:
    import os

    os.makedirs(out_dir, exist_ok=True)
    name = "trials.csv" if outcome.table is None else f"{outcome.scenario}.csv"
    with open(os.path.join(out_dir, name), "w", encoding="ascii", newline="\n") as fh:
        fh.write(outcome.csv_text())
    with open(
        os.path.join(out_dir, "summary.json"), "w", encoding="ascii", newline="\n"
    ) as fh:
        fh.write(outcome.summary_json() + "\n")


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class BoundsReport:
    nyquist: float
    landau: float
    blind: float
    occupancy: float
    chosen_sampler_rate: float
    sampler_rate_sufficient: bool

    def as_dict(self) -> dict:
        return {
            "nyquist": self.nyquist,
            "landau": self.landau,
            "blind": self.blind,
            "occupancy": self.occupancy,
            "chosen_sampler_rate": self.chosen_sampler_rate,
            "sampler_rate_sufficient": self.sampler_rate_sufficient,
        }


def bounds_report(
    model: schemas.MultibandModel, sampler: schemas.MwcSampler
) -> BoundsReport:
    """Rate bounds for a multiband class next to the configured bank's rate.

    Known-support bound: the occupied measure N*B.  Blind bound:
    min(2 Omega f_NYQ, f_NYQ) with Omega = N*B / f_NYQ, so no reduction is
    possible once half the range is occupied.  The bank's total rate is
    m * f_s.
    """
    f_nyq = model.nyquist_rate
    landau = landau_min_rate(model.band_count * model.band_width)
    occupancy = landau / f_nyq
    blind = blind_min_rate(occupancy, f_nyq) if occupancy < 1 else f_nyq
    f_s = sampler.f_p if sampler.f_p is not None else f_nyq / sampler.chips_per_period
    total = sampler.channels * f_s
    return BoundsReport(f_nyq, landau, blind, occupancy, total, total >= blind)


def sign_coefficients_quadrature(
    pattern: np.ndarray, points_per_chip: int
) -> np.ndarray:
    """Waveform Fourier coefficients by per-chip Gauss-Legendre quadrature.

    Integrates (1/T_p) p(t) e^{-j 2 pi l t / T_p} chip by chip with
    ``points_per_chip`` nodes, for l = -L..L.  The integrand is smooth inside
    every chip, so the rule converges rapidly toward the closed form as the
    density grows; a single node reduces to the midpoint rule.
    """
    pattern = np.asarray(pattern, dtype=float)
    m = pattern.size
    big_l = (m - 1) // 2
    if points_per_chip < 1:
        raise ValueError("need at least one quadrature point per chip")
    nodes, weights = np.polynomial.legendre.leggauss(points_per_chip)
    starts = np.arange(m) / m
    width = 1.0 / m
    t = (starts[:, None] + width * (nodes[None, :] + 1) / 2).ravel()
    w = np.tile(weights * width / 2, m) * np.repeat(pattern, points_per_chip)
    ls = np.arange(-big_l, big_l + 1)
    return np.exp(-2j * np.pi * np.outer(ls, t)) @ w


def density_convergence(
    pattern: np.ndarray, densities: list[int]
) -> list[tuple[int, float]]:
    """Max coefficient error versus quadrature density, one row per density.

    For each density r the coefficients are recomputed with r quadrature
    points per chip and compared against the closed form; the error column
    is non-increasing as the density grows.
    """
    pattern = np.asarray(pattern, dtype=float)
    if list(densities) != sorted(densities) or (densities and densities[0] < 1):
        raise ValueError("densities must be increasing and >= 1")
    bank = MwcConfig(1, pattern.size, 1.0, pattern[None, :])
    exact = mwc_matrix(bank)[0]
    rows = []
    for r in densities:
        approx = sign_coefficients_quadrature(pattern, int(r))
        rows.append((int(r), float(np.max(np.abs(approx - exact)))))
    return rows


def mismatch_sweep(req: schemas.MismatchRequest) -> list[tuple[float, float]]:
    """Reconstruction error of the nominal tone pipeline on off-grid tones.

    Tones are planted at frequencies (k + delta) while the sampler and the
    recovery matrix assume integer spacing; for every delta the recovered
    coefficients are resynthesized on the nominal grid and compared with the
    true (off-grid) waveform samples.  delta = 0 is the in-model case and
    recovers exactly; larger offsets are reported without a pass criterion.
    """
    w, k = req.model.tone_grid_size, req.model.active_count
    rng = trial_rng(req.seed, 0)
    spec = _draw_harmonic(rng, w, k)
    chips = rng.choice([-1.0, 1.0], size=w)
    rd = RdConfig(w, req.sampler.rate, chips)
    _, a = rd_sample(spec, rd)
    block = w // req.sampler.rate
    phi_rows = [slice(r * block, (r + 1) * block) for r in range(req.sampler.rate)]
    t_grid = np.arange(w) / w
    rows = []
    for delta in req.deltas:
        nus = np.asarray(spec.active_indices, dtype=float) + delta
        coeffs = np.asarray(spec.coefficients)
        # exact integrate-and-dump of each off-grid tone on the 1/W intervals
        with np.errstate(divide="ignore", invalid="ignore"):
            gains = (np.exp(2j * np.pi * nus / w) - 1) / (2j * np.pi * nus)
        gains = np.where(nus == 0, 1.0 / w, gains)
        f_vec = (np.exp(2j * np.pi * np.outer(np.arange(w), nus) / w) * gains) @ coeffs
        y = np.array([np.sum(chips[sl] * f_vec[sl]) for sl in phi_rows])
        sol = omp(y, a, max_support=k, residual_tol=0.0)
        f_hat = np.fft.ifft(sol.dense(w)) * w
        f_true = np.exp(2j * np.pi * np.outer(t_grid, nus)) @ coeffs
        rows.append((float(delta), float(nmse(f_true, f_hat))))
    return rows
