"""Experiment configuration and service payload models.

Configs are JSON documents with top-level ``scenario``, ``model``,
``sampler``, ``recovery``, ``trials``, ``seed`` and ``grid_density_factor``
keys; the scenario discriminates which model/sampler/recovery schema
applies.  The same models validate service request bodies, so schema
violations surface with full field paths in both the CLI and the API.
"""

from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MultibandModel(_Strict):
    """Real multiband input class: N bands of width B below f_max."""

    band_count: int = Field(default=6, ge=2)
    band_width: float = Field(default=50e3, gt=0)
    f_max: float = Field(default=5e6, gt=0)
    carriers: list[float] | None = None
    content_scale: float = Field(default=1.0, ge=0)

    @model_validator(mode="after")
    def _check(self) -> "MultibandModel":
        if self.band_count % 2:
            raise ValueError("band_count counts both spectral sides and must be even")
        if self.carriers is not None and len(self.carriers) != self.band_count // 2:
            raise ValueError("need one carrier per positive band (band_count / 2)")
        if self.band_count // 2 * self.band_width > self.f_max:
            raise ValueError("bands do not fit below f_max")
        return self

    @property
    def nyquist_rate(self) -> float:
        return 2 * self.f_max


class MwcSampler(_Strict):
    """Converter bank: m channels, M chips per period, f_s = f_p."""

    channels: int = Field(default=35, ge=1)
    chips_per_period: int = Field(default=195, ge=3)
    f_p: float | None = Field(default=None, gt=0)
    snapshots: int = Field(default=60, ge=2)
    pattern_seed: int | None = None

    @model_validator(mode="after")
    def _check(self) -> "MwcSampler":
        if self.chips_per_period % 2 == 0:
            raise ValueError("chips_per_period must be odd")
        return self


class MwcRecovery(_Strict):
    sparsity_bound: int | None = Field(default=None, ge=1)
    eig_tol: float = Field(default=1e-12, gt=0)


class PnsModel(_Strict):
    """Bandpass input class on (f_low, f_high)."""

    f_low: float = Field(default=600.0, gt=0)
    f_high: float = Field(default=625.0, gt=0)

    @model_validator(mode="after")
    def _check(self) -> "PnsModel":
        if self.f_low >= self.f_high:
            raise ValueError("need f_low < f_high")
        return self


class PnsSampler(_Strict):
    samples_per_channel: int = Field(default=50, ge=2)
    phase_candidates: int | None = Field(default=None, ge=1)


class PnsRecovery(_Strict):
    nmse_pass: float = Field(default=1e-6, gt=0)


class RdModel(_Strict):
    tone_grid_size: int = Field(default=512, ge=2)
    active_count: int = Field(default=5, ge=1)

    @model_validator(mode="after")
    def _check(self) -> "RdModel":
        if self.tone_grid_size % 2:
            raise ValueError("tone_grid_size must be even")
        if self.active_count > self.tone_grid_size:
            raise ValueError("more active tones than grid positions")
        return self


class RdSampler(_Strict):
    rate: int = Field(default=128, ge=1)


class RdRecovery(_Strict):
    residual_tol: float = Field(default=0.0, ge=0)


class FriModel(_Strict):
    """Pulse-stream class; delays are drawn at least min_gap_factor times
    the average spacing period/pulse_count apart, keeping the instance
    well conditioned at the critical sampling rate."""

    period: float = Field(default=1.0, gt=0)
    pulse_count: int = Field(default=4, ge=1)
    min_gap_factor: float = Field(default=0.5, gt=0, le=1)


class FriSampler(_Strict):
    kernel: Literal["sos", "lowpass"] = "sos"
    samples_per_period: int | None = Field(default=None, ge=3)
    grid_per_period: int | None = Field(default=None, ge=4)


class FriRecovery(_Strict):
    delay_pass: float = Field(default=1e-6, gt=0)


class _CommonRun(_Strict):
    trials: int = Field(default=1, ge=1)
    seed: int = 0
    grid_density_factor: float = Field(default=10.0, ge=1)
    out_dir: str | None = None


class MwcExperiment(_CommonRun):
    scenario: Literal["mwc"] = "mwc"
    model: MultibandModel = MultibandModel()
    sampler: MwcSampler = MwcSampler()
    recovery: MwcRecovery = MwcRecovery()


class PnsExperiment(_CommonRun):
    scenario: Literal["pns"] = "pns"
    model: PnsModel = PnsModel()
    sampler: PnsSampler = PnsSampler()
    recovery: PnsRecovery = PnsRecovery()


class RdExperiment(_CommonRun):
    scenario: Literal["rd"] = "rd"
    model: RdModel = RdModel()
    sampler: RdSampler = RdSampler()
    recovery: RdRecovery = RdRecovery()

    @model_validator(mode="after")
    def _check(self) -> "RdExperiment":
        if self.model.tone_grid_size % self.sampler.rate:
            raise ValueError("sampler rate must divide the tone grid size")
        return self


class FriExperiment(_CommonRun):
    scenario: Literal["fri"] = "fri"
    model: FriModel = FriModel()
    sampler: FriSampler = FriSampler()
    recovery: FriRecovery = FriRecovery()


class BoundsExperiment(_CommonRun):
    """Rate-bound report for a multiband class and a converter bank."""

    scenario: Literal["bounds"] = "bounds"
    model: MultibandModel = MultibandModel()
    sampler: MwcSampler = MwcSampler()


class DensityExperiment(_CommonRun):
    """Sign-waveform coefficient convergence versus quadrature density."""

    scenario: Literal["density"] = "density"
    chips: int = Field(default=9, ge=3)
    pattern_seed: int = 0
    densities: list[int] = Field(default=[1, 2, 5, 10, 50, 100])

    @model_validator(mode="after")
    def _check(self) -> "DensityExperiment":
        if self.chips % 2 == 0:
            raise ValueError("chips must be odd")
        if any(r < 1 for r in self.densities):
            raise ValueError("densities must be >= 1")
        if list(self.densities) != sorted(self.densities):
            raise ValueError("densities must be increasing")
        return self


ExperimentConfig = Annotated[
    Union[
        MwcExperiment,
        PnsExperiment,
        RdExperiment,
        FriExperiment,
        BoundsExperiment,
        DensityExperiment,
    ],
    Field(discriminator="scenario"),
]

CONFIG_ADAPTER: TypeAdapter = TypeAdapter(ExperimentConfig)


def parse_config(payload) -> ExperimentConfig:
    """Validate a config mapping (or JSON string) into its scenario model."""
    if isinstance(payload, (str, bytes)):
        return CONFIG_ADAPTER.validate_json(payload)
    return CONFIG_ADAPTER.validate_python(payload)


class MismatchRequest(_Strict):
    """Off-grid tone sweep through the nominal random-demodulator pipeline."""

    deltas: list[float] = Field(default=[0.0, 0.1, 0.25, 0.5])
    model: RdModel = RdModel()
    sampler: RdSampler = RdSampler()
    seed: int = 0

    @model_validator(mode="after")
    def _check(self) -> "MismatchRequest":
        if any(not (0 <= d <= 0.5) for d in self.deltas):
            raise ValueError("deltas must lie in [0, 0.5]")
        if self.model.tone_grid_size % self.sampler.rate:
            raise ValueError("sampler rate must divide the tone grid size")
        return self


class SummaryPayload(_Strict):
    scenario: str
    trials: int
    successes: int
    success_rate: float
    support_exact_rate: float
    median_nmse: float | None
    max_nmse: float | None
    failures: dict[str, int]
    wall_time_s: float


class SimulateResponse(_Strict):
    summary: SummaryPayload
    trials_csv: str


class BoundsResponse(_Strict):
    nyquist: float
    landau: float
    blind: float
    occupancy: float
    chosen_sampler_rate: float
    sampler_rate_sufficient: bool


class DensityResponse(_Strict):
    densities: list[int]
    max_errors: list[float]
    csv: str


class MismatchResponse(_Strict):
    deltas: list[float]
    nmse: list[float]
    csv: str
