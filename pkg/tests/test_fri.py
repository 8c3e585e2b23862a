"""Tests for pulse-stream recovery via the annihilating filter."""

import numpy as np
import pytest

from subnyq.fri import (
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
    fri_spec_from_json,
    fri_spec_to_json,
    kernel_admissible,
    sos_freq_response,
    sos_time_response,
)
from subnyq.signals import FriSpec, PulseSpectrum, dirac_pulse, gen_fri_periodic


def jittered_delays(rng: np.random.Generator, count: int, period: float) -> np.ndarray:
    slot = period / count
    base = (np.arange(count) + 0.25 + 0.5 * rng.random(count)) * slot
    return np.sort((base + rng.random() * period) % period)


def synth_coeffs(
    delays, amps, period: float, indices, pulse=None
) -> FourierCoeffs:
    """Series coefficients straight from the model sum (forward oracle)."""
    pulse = pulse or dirac_pulse()
    ks = np.asarray(indices)
    phases = np.exp(-2j * np.pi * np.outer(ks, np.asarray(delays)) / period)
    vals = pulse(2 * np.pi * ks / period) / period * (phases @ np.asarray(amps))
    return FourierCoeffs(vals, tuple(int(k) for k in ks), period)


class TestSosKernel:
    def test_unit_weights_give_dirichlet(self):
        # b_k = 1 on {-p..p}: rect-windowed Dirichlet kernel
        p, tau = 3, 2.0
        kernel = SosKernel.dirichlet(p, tau)
        t = np.linspace(-0.49 * tau, 0.49 * tau, 201)
        got = sos_time_response(kernel, t)
        x = 2 * np.pi * t / tau
        with np.errstate(divide="ignore", invalid="ignore"):
            expected = np.sin((p + 0.5) * x) / np.sin(x / 2)
        expected[np.abs(x) < 1e-12] = 2 * p + 1
        np.testing.assert_allclose(got.real, expected, atol=1e-9)
        np.testing.assert_allclose(got.imag, 0.0, atol=1e-9)

    def test_compact_support(self):
        kernel = SosKernel.dirichlet(2, 1.0)
        assert sos_time_response(kernel, 1.0)[0] == 0.0
        assert sos_time_response(kernel, -0.51)[0] == 0.0

    def test_lattice_response_proportional_to_weights(self):
        # frequency response at lattice points: proportional to b_k on the
        # block, zero at integer indices outside
        tau = 1.5
        ks = (-2, -1, 0, 1, 2)
        bs = (1.0, 2.0, 1.5, 2.0, 1.0)
        kernel = SosKernel(ks, bs, tau, real_valued=True)
        on = sos_freq_response(kernel, 2 * np.pi * np.asarray(ks) / tau)
        scale = tau / np.sqrt(2 * np.pi)
        np.testing.assert_allclose(on, scale * np.asarray(bs), atol=1e-12)
        off = sos_freq_response(kernel, 2 * np.pi * np.array([-4, -3, 3, 4]) / tau)
        np.testing.assert_allclose(off, 0.0, atol=1e-12)
        for k in ks:
            assert kernel.freq_at_index(k) == pytest.approx(scale * dict(zip(ks, bs))[k])

    def test_zero_weight_rejected(self):
        with pytest.raises(ValueError, match="nonzero"):
            SosKernel((-1, 0, 1), (1.0, 0.0, 1.0), 1.0)

    def test_real_kernel_needs_symmetry(self):
        with pytest.raises(ValueError, match="symmetric"):
            SosKernel((0, 1, 2), (1.0, 1.0, 1.0), 1.0, real_valued=True)


class TestKernelAdmissible:
    def test_lowpass_covering_block(self):
        check = kernel_admissible(LowpassKernel(3, 1.0), tuple(range(-3, 4)), dirac_pulse())
        assert check.admissible

    def test_pulse_zero_named(self):
        zero_at_two = PulseSpectrum(
            "notched", lambda w: np.where(np.abs(w - 2 * np.pi * 2) < 1e-9, 0.0, 1.0)
        )
        check = kernel_admissible(LowpassKernel(3, 1.0), tuple(range(-3, 4)), zero_at_two)
        assert not check.admissible
        assert "index 2" in check.detail

    def test_kernel_not_covering_block(self):
        check = kernel_admissible(LowpassKernel(2, 1.0), tuple(range(-3, 4)), dirac_pulse())
        assert not check.admissible
        assert "index" in check.detail

    def test_sos_any_nonzero_weights_admissible_for_impulses(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            bs = rng.uniform(0.2, 2.0, size=7)
            kernel = SosKernel(tuple(range(-3, 4)), tuple(bs), 1.0)
            assert kernel_admissible(kernel, tuple(range(-3, 4)), dirac_pulse()).admissible


class TestCoeffsFromSamples:
    def test_zero_samples_zero_coeffs(self):
        kernel = LowpassKernel(2, 1.0)
        got = coeffs_from_samples(np.zeros(5), kernel, 1.0)
        np.testing.assert_array_equal(got.values, 0.0)

    def test_impulse_at_origin_flat_coeffs(self):
        tau = 2.0
        spec = FriSpec(tau, (0.0,), (1.0,))
        kernel = LowpassKernel(1, tau)
        x = gen_fri_periodic(spec, 30 / tau, periods=1)
        c = filter_and_sample(x, kernel, 3)
        got = coeffs_from_samples(c, kernel, tau)
        np.testing.assert_allclose(got.values, 1 / tau, atol=1e-12)

    def test_three_pulse_block_matches_series_oracle(self):
        tau = 1.0
        spec = FriSpec(tau, (0.11, 0.47, 0.83), (1.0, -0.7, 2.2))
        kernel = LowpassKernel(3, tau)  # M = 2L + 1 = 7
        x = gen_fri_periodic(spec, 70.0, periods=1)
        c = filter_and_sample(x, kernel, 7)
        got = coeffs_from_samples(c, kernel, tau)
        oracle = synth_coeffs(spec.delays, spec.amplitudes, tau, range(-3, 4))
        assert np.max(np.abs(got.values - oracle.values)) <= 1e-8

    def test_wrong_sample_count_rejected(self):
        with pytest.raises(ValueError, match="samples"):
            coeffs_from_samples(np.zeros(4), LowpassKernel(2, 1.0), 1.0)


class TestAnnihilatingFilter:
    def test_single_exponential_closed_form(self):
        tau, t1 = 1.0, 0.3
        coeffs = synth_coeffs([t1], [1.7], tau, range(-1, 2))
        taps = annihilating_filter(coeffs, 1)
        expected = np.array([1.0, -np.exp(-2j * np.pi * t1 / tau)])
        np.testing.assert_allclose(taps, expected, atol=1e-12)

    def test_zero_coefficients_rejected(self):
        coeffs = FourierCoeffs(np.zeros(5), tuple(range(-2, 3)), 1.0)
        with pytest.raises(ValueError, match="rank deficient"):
            annihilating_filter(coeffs, 2)

    def test_annihilation_identity(self):
        tau = 1.0
        coeffs = synth_coeffs([0.2, 0.7], [1.0, 2.0], tau, range(-2, 3))
        taps = annihilating_filter(coeffs, 2)
        conv = np.convolve(taps, coeffs.values, mode="valid")
        assert np.max(np.abs(conv)) <= 1e-10

    def test_too_few_coefficients_rejected(self):
        coeffs = synth_coeffs([0.2, 0.7], [1.0, 2.0], 1.0, range(-1, 2))
        with pytest.raises(ValueError, match="2L\\+1"):
            annihilating_filter(coeffs, 2)

    def test_fewer_exponentials_reported_with_count(self):
        coeffs = synth_coeffs([0.2], [1.0], 1.0, range(-3, 4))
        with pytest.raises(ValueError, match="only 1 exponential"):
            annihilating_filter(coeffs, 3)


class TestDelaysFromFilter:
    def test_unit_root_is_zero_delay(self):
        delays, mags = delays_from_filter(np.array([1.0, -1.0]), 2.0)
        assert delays[0] == pytest.approx(0.0, abs=1e-12)
        assert mags[0] == pytest.approx(1.0)

    def test_negative_root_is_half_period(self):
        taps = np.array([1.0, -np.exp(-1j * np.pi)])
        delays, _ = delays_from_filter(taps, 2.0)
        assert delays[0] == pytest.approx(1.0, abs=1e-12)

    def test_five_random_delays_recovered(self):
        tau = 1.0
        rng = np.random.default_rng(3)
        for _ in range(20):
            d = jittered_delays(rng, 5, tau)
            coeffs = synth_coeffs(d, 0.5 + rng.random(5), tau, range(-5, 6))
            taps = annihilating_filter(coeffs, 5)
            got, mags = delays_from_filter(taps, tau)
            assert np.max(np.abs(got - d)) <= 1e-9 * tau
            np.testing.assert_allclose(mags, 1.0, atol=1e-9)

    def test_repeated_roots_rejected(self):
        # a double root splits by ~sqrt(eps) through the companion matrix,
        # well inside the distinctness threshold
        u1 = np.exp(-2j * np.pi * 0.3)
        taps = np.array([1.0, -2 * u1, u1 * u1])
        with pytest.raises(ValueError, match="repeated"):
            delays_from_filter(taps, 1.0)

    def test_unnormalized_filter_rejected(self):
        with pytest.raises(ValueError, match="normalized"):
            delays_from_filter(np.array([2.0, 1.0]), 1.0)


class TestAmplitudesFromDelays:
    def test_single_pulse_exact(self):
        tau = 1.0
        coeffs = synth_coeffs([0.4], [2.5], tau, range(-1, 2))
        got = amplitudes_from_delays(coeffs, np.array([0.4]), dirac_pulse(), tau)
        np.testing.assert_allclose(got, [2.5], atol=1e-12)

    def test_zero_coeffs_zero_amplitudes(self):
        coeffs = FourierCoeffs(np.zeros(5), tuple(range(-2, 3)), 1.0)
        got = amplitudes_from_delays(coeffs, np.array([0.2, 0.7]), dirac_pulse(), 1.0)
        np.testing.assert_allclose(got, 0.0, atol=1e-14)

    def test_four_pulse_recovery(self):
        tau = 1.0
        rng = np.random.default_rng(4)
        d = jittered_delays(rng, 4, tau)
        amps = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        coeffs = synth_coeffs(d, amps, tau, range(-4, 5))
        got = amplitudes_from_delays(coeffs, d, dirac_pulse(), tau)
        assert np.linalg.norm(got - amps) <= 1e-9 * np.linalg.norm(amps)

    def test_coincident_delays_rejected(self):
        coeffs = synth_coeffs([0.2, 0.7], [1.0, 1.0], 1.0, range(-2, 3))
        with pytest.raises(ValueError, match="rank deficient"):
            amplitudes_from_delays(coeffs, np.array([0.3, 0.3]), dirac_pulse(), 1.0)


class TestFriRecover:
    def test_round_trip_all_pulse_counts(self):
        tau = 1.0
        rng = np.random.default_rng(5)
        for count in range(1, 11):
            m = 2 * count + 1
            d = jittered_delays(rng, count, tau)
            amps = (0.5 + rng.random(count)) * rng.choice([-1, 1], size=count)
            spec = FriSpec(tau, tuple(d), tuple(amps))
            x = gen_fri_periodic(spec, 16 * m / tau, periods=1)
            kernel = SosKernel.dirichlet(count, tau)
            est = fri_recover(filter_and_sample(x, kernel, m), kernel, count, tau)
            assert np.max(np.abs(np.array(est.delays) - d)) <= 1e-6 * tau
            assert np.linalg.norm(np.array(est.amplitudes) - amps) <= 1e-6 * np.linalg.norm(amps)

    def test_zero_samples_fail_in_annihilator_stage(self):
        kernel = SosKernel.dirichlet(2, 1.0)
        with pytest.raises(FriStageError) as err:
            fri_recover(np.zeros(5), kernel, 2, 1.0)
        assert err.value.stage == "annihilator"

    def test_sos_and_lowpass_kernels_agree(self):
        tau = 1.0
        rng = np.random.default_rng(6)
        for count in (1, 3, 6):
            m = 2 * count + 1
            d = jittered_delays(rng, count, tau)
            amps = 0.5 + rng.random(count)
            spec = FriSpec(tau, tuple(d), tuple(amps))
            x = gen_fri_periodic(spec, 16 * m / tau, periods=1)
            k1, k2 = SosKernel.dirichlet(count, tau), LowpassKernel(count, tau)
            e1 = fri_recover(filter_and_sample(x, k1, m), k1, count, tau)
            e2 = fri_recover(filter_and_sample(x, k2, m), k2, count, tau)
            assert np.max(np.abs(np.array(e1.delays) - np.array(e2.delays))) <= 1e-8
            assert np.max(np.abs(np.array(e1.amplitudes) - np.array(e2.amplitudes))) <= 1e-8


class TestRecoveryProperties:
    def test_time_shift_covariance(self):
        # shifting all delays rotates X[k] by e^{-j 2 pi k d / tau} and must
        # shift recovered delays while preserving amplitudes
        tau = 1.0
        rng = np.random.default_rng(7)
        for _ in range(30):
            count = int(rng.integers(1, 5))
            d = jittered_delays(rng, count, tau)
            amps = 0.5 + rng.random(count)
            shift = rng.random() * 0.2
            shifted = np.sort((d + shift) % tau)
            ks = range(-count, count + 1)
            base = synth_coeffs(d, amps, tau, ks)
            moved = synth_coeffs((d + shift) % tau, amps, tau, ks)
            taps = annihilating_filter(moved, count)
            got_d, _ = delays_from_filter(taps, tau)
            got_a = amplitudes_from_delays(moved, got_d, dirac_pulse(), tau)
            assert np.max(np.abs(got_d - shifted)) <= 1e-8
            ref_taps = annihilating_filter(base, count)
            ref_d, _ = delays_from_filter(ref_taps, tau)
            ref_a = amplitudes_from_delays(base, ref_d, dirac_pulse(), tau)
            # amplitude multiset preserved under the shift
            assert np.max(np.abs(np.sort(np.abs(got_a)) - np.sort(np.abs(ref_a)))) <= 1e-8

    def test_amplitude_scaling_equivariance(self):
        tau = 1.0
        rng = np.random.default_rng(8)
        for _ in range(30):
            count = int(rng.integers(1, 5))
            d = jittered_delays(rng, count, tau)
            amps = 0.5 + rng.random(count)
            ks = range(-count, count + 1)
            base = synth_coeffs(d, amps, tau, ks)
            alpha = rng.uniform(0.1, 10) * rng.choice([-1, 1])
            scaled = FourierCoeffs(base.values * alpha, base.indices, tau)
            d1, _ = delays_from_filter(annihilating_filter(base, count), tau)
            d2, _ = delays_from_filter(annihilating_filter(scaled, count), tau)
            assert np.max(np.abs(d1 - d2)) <= 1e-9
            a2 = amplitudes_from_delays(scaled, d2, dirac_pulse(), tau)
            assert np.linalg.norm(a2 - alpha * amps) <= 1e-8 * abs(alpha) * np.linalg.norm(amps)

    def test_root_magnitudes_on_unit_circle(self):
        tau = 1.0
        rng = np.random.default_rng(9)
        for _ in range(30):
            count = int(rng.integers(1, 8))
            d = jittered_delays(rng, count, tau)
            coeffs = synth_coeffs(d, 0.5 + rng.random(count), tau, range(-count, count + 1))
            _, mags = delays_from_filter(annihilating_filter(coeffs, count), tau)
            assert np.max(np.abs(mags - 1.0)) <= 1e-6

    def test_critical_rate_is_sufficient(self):
        # exactly 2L + 1 samples per period recover the stream
        tau = 1.0
        rng = np.random.default_rng(10)
        for count in (1, 2, 5, 9):
            m = 2 * count + 1
            d = jittered_delays(rng, count, tau)
            amps = 0.5 + rng.random(count)
            spec = FriSpec(tau, tuple(d), tuple(amps))
            x = gen_fri_periodic(spec, 16 * m / tau, periods=1)
            kernel = SosKernel.dirichlet(count, tau)
            samples = filter_and_sample(x, kernel, m)
            assert samples.size == 2 * count + 1
            est = fri_recover(samples, kernel, count, tau)
            assert np.max(np.abs(np.array(est.delays) - d)) <= 1e-8


class TestFriSpecJson:
    def test_round_trip(self):
        spec = FriSpec(2.0, (0.3, 1.1), (1.5, -2.0 + 1j))
        back = fri_spec_from_json(fri_spec_to_json(spec))
        assert back.period == spec.period
        assert back.delays == spec.delays
        assert back.amplitudes == spec.amplitudes

    def test_non_impulse_pulse_requires_spectrum(self):
        from subnyq.signals import gaussian_pulse

        spec = FriSpec(1.0, (0.3,), (1.0,), gaussian_pulse(0.05))
        text = fri_spec_to_json(spec)
        with pytest.raises(ValueError, match="gaussian"):
            fri_spec_from_json(text)
        back = fri_spec_from_json(text, gaussian_pulse(0.05))
        assert back.delays == spec.delays


class TestDelayWraparound:
    def test_root_just_past_zero_angle_folds_to_zero(self):
        # the modulo of an infinitesimal negative delay rounds up to the
        # period itself; the fold must land back on 0, not outside [0, tau)
        taps = np.array([1.0, -np.exp(-2j * np.pi * (-1e-18))])
        delays, _ = delays_from_filter(taps, 1.0)
        assert 0.0 <= delays[0] < 1.0
        assert delays[0] == pytest.approx(0.0, abs=1e-12)


class TestOverdeterminedBlock:
    def test_more_samples_than_critical(self):
        # any larger odd contiguous block is accepted and recovers too
        tau = 1.0
        rng = np.random.default_rng(12)
        count = 3
        for m in (2 * count + 1, 2 * count + 5, 2 * count + 11):
            d = jittered_delays(rng, count, tau)
            amps = 0.5 + rng.random(count)
            spec = FriSpec(tau, tuple(d), tuple(amps))
            x = gen_fri_periodic(spec, 16 * m / tau, periods=1)
            half = (m - 1) // 2
            kernel = SosKernel.dirichlet(half, tau)
            est = fri_recover(filter_and_sample(x, kernel, m), kernel, count, tau)
            assert np.max(np.abs(np.array(est.delays) - d)) <= 1e-9

    def test_harness_accepts_overdetermined_config(self):
        from subnyq.experiments import run_experiment

        out = run_experiment(
            {
                "scenario": "fri",
                "model": {"pulse_count": 3},
                "sampler": {"samples_per_period": 11},
                "trials": 3,
                "seed": 8,
            }
        )
        assert out.summary["support_exact_rate"] == 1.0
