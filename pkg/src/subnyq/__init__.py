"""Sub-Nyquist sampling workbench.

Simulation library for acquisition below the Nyquist rate: multiband signal
synthesis on dense periodic grids, undersampling and periodic nonuniform
sampling, the modulated wideband converter with continuous-to-finite support
detection, the random demodulator, and pulse-stream recovery at the rate of
innovation.  A FastAPI service (``subnyq.service``) and a thin-client CLI
(``subnyq.cli``) drive reproducible seeded experiments.
"""

from .signals import (
    DenseSignal,
    FriSpec,
    HarmonicSpec,
    MultibandSpec,
    PulseSpectrum,
    dirac_pulse,
    gaussian_pulse,
    gen_fri_periodic,
    gen_harmonic,
    gen_multiband,
    nmse,
    raised_cosine_pulse,
    shannon_interpolate,
)
from .samplers import (
    MwcConfig,
    PnsConfig,
    RateInterval,
    RdConfig,
    ThModel,
    blind_min_rate,
    landau_min_rate,
    mwc_compute_load,
    mwc_matrix,
    mwc_sample,
    pns_sample,
    rd_sample,
    th_sample,
    undersample_valid_rates,
)
from .sparse import (
    RankDeficiencyError,
    SparseSolution,
    SupportSet,
    mutual_coherence,
    omp,
    omp_mmv,
    solve_on_support,
    unique_if,
)
from .spectral import (
    SliceRecovery,
    ctf,
    mwc_resynthesize,
    pns_beta,
    pns_reconstruct,
    recover_slices,
    select_pns_phase,
    slice_index,
)
from .fri import (
    FourierCoeffs,
    FriStageError,
    LowpassKernel,
    SosKernel,
    amplitudes_from_delays,
    annihilating_filter,
    coeffs_from_samples,
    delays_from_filter,
    filter_and_sample,
    fri_recover,
    kernel_admissible,
    sos_time_response,
)
from .experiments import (
    BoundsReport,
    ExperimentOutcome,
    TrialResult,
    bounds_report,
    density_convergence,
    match_delays,
    mismatch_sweep,
    run_experiment,
    trial_rng,
)

__version__ = "0.1.0"
