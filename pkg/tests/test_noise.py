import math

import numpy as np
import pytest

from oracle import gate_fidelity
import rydgate.noise as noise
from rydgate import Pulse, PulseSequence, StructuralVector
from rydgate.diophantine import candidate_params
from rydgate.errors import NumericalError
from rydgate.noise import (
    NoiseSpec,
    candidate_sequence,
    delta_area,
    delta_R_effective,
    delta_ratio,
    monte_carlo,
    noise_series,
    preset,
    sample_protocol,
)

PI = math.pi
QUIET = NoiseSpec(delta_I=0.0, delta_R=0.0, delta_phi=0.0)


@pytest.mark.parametrize("dI, dA", [(0.03, 0.015), (0.0, 0.0), (0.007, 0.0035)])
def test_delta_area(dI, dA):
    assert delta_area(dI) == pytest.approx(dA)


def test_delta_area_rejects_negative():
    with pytest.raises(ValueError):
        delta_area(-0.1)


def test_delta_ratio_examples():
    assert delta_ratio(0.4, 0.0, 0.03, 0.01) == pytest.approx(0.03)
    assert delta_ratio(1.0, 0.5, 0.0, 0.01) == pytest.approx(math.sqrt(2.5 * 0.25) * 0.01)
    assert delta_ratio(1.0, 0.5, 0.0, 0.01) == pytest.approx(0.0079, abs=1e-4)
    assert delta_ratio(1 / 13, 0.5, 0.0, 0.01) == pytest.approx(math.sqrt((2 + 169 / (1 + 1 / 169)) * 0.25) * 0.01)
    assert delta_ratio(1 / 13, 0.5, 0.0, 0.01) == pytest.approx(0.0655, abs=5e-4)
    with pytest.raises(ValueError):
        delta_ratio(0.0, 0.5, 0.0, 0.01)


def test_delta_r_effective_anchors():
    assert delta_R_effective(NoiseSpec(temperature=25.0)) == pytest.approx(0.01)
    assert delta_R_effective(NoiseSpec(temperature=3.0)) == pytest.approx(math.sqrt(3 / 25) * 0.01)
    assert delta_R_effective(NoiseSpec(temperature=3.0)) == pytest.approx(0.0035, abs=1e-4)
    assert delta_R_effective(NoiseSpec(temperature=7.0, T_ref=7.0, delta_R_ref=0.02)) == pytest.approx(0.02)
    assert delta_R_effective(NoiseSpec(delta_R=0.05, temperature=3.0)) == 0.05
    assert delta_R_effective(NoiseSpec(diffusion_D=2.0, t_gate=1.0, distance=100.0)) == pytest.approx(0.02)
    with pytest.raises(ValueError):
        delta_R_effective(NoiseSpec())
    with pytest.raises(ValueError):
        delta_R_effective(NoiseSpec(diffusion_D=2.0, t_gate=1.0))


def test_spec_validation():
    with pytest.raises(ValueError):
        NoiseSpec(delta_I=-0.1)
    with pytest.raises(ValueError):
        NoiseSpec(samples=0)
    with pytest.raises(ValueError):
        NoiseSpec(theta=1.0)
    with pytest.raises(ValueError):
        preset("heroic")
    assert preset("ultra", samples=5).samples == 5


def test_presets_verbatim():
    s, u = preset("standard"), preset("ultra")
    assert (s.delta_I, s.temperature, s.delta_phi, s.samples) == (0.03, 25.0, 0.1 * PI, 1000)
    assert (u.delta_I, u.temperature, u.delta_phi, u.samples) == (0.007, 3.0, 0.01 * PI, 1000)


# -- sampling --------------------------------------------------------------------


def test_zero_noise_sample_is_identical():
    seq = PulseSequence([Pulse.from_ratio(5.0, 0.3, 0.2), Pulse.from_ratio(-2.0, 2.0, 1.0)])
    assert sample_protocol(seq, QUIET, 7) == seq


def test_sampling_deterministic_and_index_dependent():
    seq = candidate_sequence(2, 2, 0)
    spec = preset("standard", seed=11)
    assert sample_protocol(seq, spec, 3) == sample_protocol(seq, spec, 3)
    assert sample_protocol(seq, spec, 3) != sample_protocol(seq, spec, 4)
    assert sample_protocol(seq, spec, 3) != sample_protocol(seq, spec.with_(seed=12), 3)


def test_area_spread():
    seq = PulseSequence([Pulse.from_ratio(26 * PI, 1 / 13)])
    spec = NoiseSpec(delta_I=0.03, delta_R=0.0, delta_phi=0.0)
    areas = np.array([sample_protocol(seq, spec, i)[0].area for i in range(20000)])
    assert areas.std() / PI == pytest.approx(0.39, rel=0.03)
    assert areas.mean() / PI == pytest.approx(26.0, abs=0.02)


def test_ratio_spread_matches_delta_ratio():
    x, theta, dI, dR = 0.5, 0.3, 0.02, 0.01
    seq = PulseSequence([Pulse.from_ratio(4 * PI, x)])
    spec = NoiseSpec(delta_I=dI, delta_R=dR, delta_phi=0.0, theta=theta)
    rel = np.array([sample_protocol(seq, spec, i)[0].structural.ratio / x - 1 for i in range(20000)])
    assert rel.std() == pytest.approx(delta_ratio(x, theta, dI, dR), rel=0.03)


def test_shared_intensity_draw_correlates_area_and_ratio():
    seq = PulseSequence([Pulse.from_ratio(4 * PI, 0.5)])
    spec = NoiseSpec(delta_I=0.03, delta_R=0.0, delta_phi=0.0)
    s = [sample_protocol(seq, spec, i)[0] for i in range(2000)]
    da = np.array([p.area for p in s]) / (4 * PI) - 1
    dx = np.array([p.structural.ratio for p in s]) / 0.5 - 1
    np.testing.assert_allclose(dx, 2 * da, atol=1e-12)


def test_negative_ratio_draws_are_redrawn():
    seq = PulseSequence([Pulse.from_ratio(26 * PI, 1 / 13)])
    spec = NoiseSpec(delta_I=0.5, delta_R=0.0, delta_phi=0.0, samples=500)
    s = monte_carlo(seq, spec)
    assert s.truncations > 0
    for i in range(200):
        p = sample_protocol(seq, spec, i)[0]
        assert p.structural.ratio > 0


def test_degenerate_vector_ratio_untouched():
    seq = PulseSequence([Pulse(4 * PI, StructuralVector(1.0, 0.0))])
    spec = NoiseSpec(delta_I=0.03, delta_R=0.01, delta_phi=0.0)
    for i in range(20):
        assert sample_protocol(seq, spec, i)[0].structural == StructuralVector(1.0, 0.0)


def test_redraw_exhaustion_raises(monkeypatch):
    monkeypatch.setattr(noise, "MAX_REDRAWS", 1)
    seq = PulseSequence([Pulse.from_ratio(4 * PI, 0.5)])
    spec = NoiseSpec(delta_I=100.0, delta_R=0.0, delta_phi=0.0, samples=200)
    with pytest.raises(NumericalError):
        monte_carlo(seq, spec)


# -- Monte Carlo statistics -------------------------------------------------------


def test_zero_noise_point_mass():
    s = monte_carlo(candidate_sequence(3, 3, 0), preset("none"))
    assert s.mean_f == s.ideal_f
    assert s.std_f == 0.0


def test_standard_spread_at_sixth_candidate():
    s = monte_carlo(candidate_sequence(6, 6, 0), preset("standard"))
    assert s.std_f == pytest.approx(0.17, abs=0.05)
    assert 0.0 <= s.mean_f <= 1.0


def independent_mc(l, n, rng):
    """Same noise law, different RNG stream, full-space expm propagators."""
    x, A = candidate_params(l, l, 0)
    out = np.empty(n)
    for i in range(n):
        gI, gR, gP = rng.standard_normal(3)
        f = 1 + 0.03 * gI + gR * math.sqrt(2 + 1 / (x * x * (x * x + 1))) * 0.25 * 0.01
        xs = x * f
        a = 1 / math.sqrt(1 + xs * xs)
        out[i] = gate_fidelity([(A * (1 + 0.015 * gI), a, xs * a, 0.1 * PI * gP)])
    return out


def test_low_area_protocol_robust_against_oracle():
    ref = independent_mc(0, 10000, np.random.default_rng(2024))
    s = monte_carlo(candidate_sequence(0, 0, 0), preset("standard"), keep_samples=True)
    assert s.mean_f == pytest.approx(s.ideal_f, abs=0.02)
    se = math.hypot(ref.std() / math.sqrt(ref.size), s.std_f / math.sqrt(s.samples))
    assert abs(s.mean_f - ref.mean()) < 4 * se
    assert s.fidelities.shape == (1000,)


def test_thread_count_does_not_change_summary():
    seq = PulseSequence([Pulse.from_ratio(9.0, 0.3, 0.1), Pulse.from_ratio(5.0, 2.0, 1.0)])
    spec = preset("standard", seed=5, samples=777)
    ref = monte_carlo(seq, spec, threads=1, keep_samples=True)
    for t in (2, 3, 8):
        other = monte_carlo(seq, spec, threads=t, keep_samples=True)
        assert other.mean_f == ref.mean_f and other.std_f == ref.std_f
        np.testing.assert_array_equal(other.fidelities, ref.fidelities)


def test_monotone_degradation_beyond_second_candidate():
    rows = noise_series(range(7), preset("standard"))
    n = 1000
    for lo, hi in zip(rows[2:], rows[3:]):
        allowance = 2 * math.hypot(lo.std_f, hi.std_f) / math.sqrt(n)
        assert hi.mean_f <= lo.mean_f + allowance


def test_intensity_noise_dominates_position_noise():
    seq = candidate_sequence(6, 6, 0)
    only_i = monte_carlo(seq, NoiseSpec(delta_I=0.03, delta_R=0.0, delta_phi=0.0))
    only_r = monte_carlo(seq, NoiseSpec(delta_I=0.0, delta_R=0.02, delta_phi=0.0))
    assert only_i.mean_f < only_r.mean_f


def test_phase_noise_null_on_single_pulses():
    for l in range(4):
        s = monte_carlo(candidate_sequence(l, l, 0), NoiseSpec(delta_I=0.0, delta_R=0.0, delta_phi=0.5))
        assert s.std_f == 0.0 and s.mean_f == pytest.approx(s.ideal_f, abs=1e-15)


def test_phase_noise_acts_on_sequences():
    seq = PulseSequence([Pulse.from_ratio(3 * PI, 0.5), Pulse.from_ratio(3 * PI, 2.0)])
    s = monte_carlo(seq, NoiseSpec(delta_I=0.0, delta_R=0.0, delta_phi=0.3, samples=200))
    assert s.std_f > 1e-3


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_ultra_regime_temperature_insensitive(seed):
    cold = noise_series(range(7), preset("ultra", seed=seed))
    warm = noise_series(range(7), preset("ultra", seed=seed, temperature=30.0))
    assert max(abs(c.mean_f - w.mean_f) for c, w in zip(cold, warm)) < 0.005


def test_noise_series_rows():
    rows = noise_series([0, 3], preset("none"))
    assert [r.l_prime for r in rows] == [0, 3]
    assert rows[1].x == pytest.approx(1 / 7)
    assert rows[1].area == pytest.approx(candidate_params(3, 3, 0)[1])


def test_empty_sequence_rejected():
    with pytest.raises(ValueError):
        monte_carlo(PulseSequence([]), QUIET)
