import math

import numpy as np
import pytest

from oracle import gate_fidelity, ratio_pulse
from rydgate import Pulse, PulseSequence, StructuralVector, Subsystem, compose, fidelity, fidelity_single, two_pulse_closed_form
from rydgate.core import PropagatorSet
from rydgate.fidelity import Mechanism, classify_mechanism, fidelity_batch, sequence_fidelity

PI = math.pi

# full-space expm oracle values, frozen
F_000 = 0.8044883909494547  # (1+sqrt2)pi, x=1
F_110 = 0.9679327192031452  # (3+sqrt10)pi, x=1/3
F_660 = 0.998181754510986  # (13+sqrt170)pi, x=1/13
F_14 = 0.9937820801608622  # 14.07pi, x=1
F_TWO_PULSE = 0.9571625822566017  # (4pi, 1/4) then (sqrt5 pi, 1/2)
F_PHASED = 0.18755357034578402  # three phased pulses below
PHASED = [(3.1, 0.6, 0.8, 0.4), (7.7, -0.28, 0.96, 2.0), (-4.2, 0.8, -0.6, 5.5)]


def seq_of(tuples):
    return PulseSequence(Pulse(A, StructuralVector(a, b), phi) for A, a, b, phi in tuples)


def test_perfect_gate():
    u = PropagatorSet(V=-np.eye(3), A=-np.eye(2), B=-np.eye(2))
    assert fidelity(u) == 1.0


@pytest.mark.parametrize(
    "A, x, frozen",
    [((1 + math.sqrt(2)) * PI, 1.0, F_000), ((3 + math.sqrt(10)) * PI, 1 / 3, F_110), ((13 + math.sqrt(170)) * PI, 1 / 13, F_660), (14.07 * PI, 1.0, F_14)],
)
def test_single_pulse_frozen(A, x, frozen):
    assert fidelity_single(A, x) == pytest.approx(frozen, abs=1e-12)


def test_quoted_single_pulse_values():
    assert fidelity_single((1 + math.sqrt(2)) * PI, 1.0) == pytest.approx(0.804, abs=0.002)
    assert fidelity_single(6.17 * PI, 1 / 3) == pytest.approx(0.968, abs=0.002)
    assert 0.990 <= fidelity_single(14.07 * PI, 1.0) <= 0.995


def test_two_pi_decoupled():
    assert fidelity_single(2 * PI, 0.0) == pytest.approx(0.25, abs=1e-15)


def test_multi_pulse_frozen():
    seq = PulseSequence([Pulse.from_ratio(4 * PI, 0.25), Pulse.from_ratio(math.sqrt(5) * PI, 0.5)])
    assert sequence_fidelity(seq) == pytest.approx(F_TWO_PULSE, abs=1e-12)
    assert sequence_fidelity(seq_of(PHASED)) == pytest.approx(F_PHASED, abs=1e-12)


def test_against_oracle_random():
    rng = np.random.default_rng(21)
    for _ in range(30):
        pulses = [ratio_pulse(rng.uniform(-30, 30), rng.uniform(-3, 3), rng.uniform(0, 6)) for _ in range(rng.integers(1, 4))]
        assert sequence_fidelity(seq_of(pulses)) == pytest.approx(gate_fidelity(pulses), abs=1e-12)


def test_inverse_ratio_symmetry():
    rng = np.random.default_rng(22)
    A = rng.uniform(0, 40, 200)
    x = rng.uniform(0.02, 20, 200)
    np.testing.assert_allclose(fidelity_single(A, x), fidelity_single(A, 1 / x), atol=1e-13)


def test_scalar_and_array_paths_agree():
    rng = np.random.default_rng(23)
    A = rng.uniform(0, 40, 50)
    x = rng.uniform(0, 3, 50)
    arr = fidelity_single(A, x)
    assert arr.shape == (50,)
    np.testing.assert_allclose(arr, [fidelity_single(float(a), float(v)) for a, v in zip(A, x)], atol=1e-13)


def test_batch_matches_compose():
    seq = seq_of(PHASED)
    areas, a, b, phi = seq.as_arrays()
    assert fidelity_batch(areas, a, b, phi)[0] == pytest.approx(sequence_fidelity(seq), abs=1e-13)


def test_fidelity_in_unit_interval():
    rng = np.random.default_rng(24)
    n, p = 2000, 4
    f = fidelity_batch(rng.uniform(-40, 40, (n, p)), *np.moveaxis(_unit(rng, n, p), -1, 0), rng.uniform(0, 6, (n, p)))
    assert f.min() >= 0.0 and f.max() <= 1.0 + 1e-15


def _unit(rng, n, p):
    v = rng.normal(size=(n, p, 2))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


# -- two-pulse closed form --------------------------------------------------


def test_closed_form_matches_products():
    rng = np.random.default_rng(25)
    for _ in range(200):
        A1, A2 = rng.uniform(-30, 30, 2)
        e1 = StructuralVector.normalized(*rng.normal(size=2))
        e2 = StructuralVector.normalized(*rng.normal(size=2))
        u = compose([Pulse(A1, e1), Pulse(A2, e2)])
        cf = two_pulse_closed_form(A1, A2, e1, e2)
        for s, c in zip(Subsystem, cf):
            assert u.u11(s) == pytest.approx(c, abs=1e-12)


def test_closed_form_special_vectors():
    e = StructuralVector.normalized(0.3, 0.9)
    assert two_pulse_closed_form(1.1, 2.3, e, e)[0] == pytest.approx(math.cos(1.7), abs=1e-15)
    assert two_pulse_closed_form(1.1, 2.3, e, -e)[0] == pytest.approx(math.cos(-0.6), abs=1e-15)
    orth = StructuralVector(-e.b, e.a)
    for l in range(4):
        for m in range(4):
            assert two_pulse_closed_form((4 * l + 2) * PI, 4 * m * PI, e, orth)[0] == pytest.approx(-1.0, abs=1e-12)


def test_aligned_and_anti_aligned_reductions():
    rng = np.random.default_rng(26)
    for _ in range(100):
        A1, A2 = rng.uniform(-30, 30, 2)
        x = rng.uniform(0.01, 10)
        e = StructuralVector.normalized(1.0, x)
        assert sequence_fidelity(PulseSequence([Pulse(A1, e), Pulse(A2, e)])) == pytest.approx(fidelity_single(A1 + A2, x), abs=1e-12)
        assert sequence_fidelity(PulseSequence([Pulse(A1, e), Pulse(A2, -e)])) == pytest.approx(fidelity_single(A1 - A2, x), abs=1e-12)


def test_orthogonal_vectors_v_factorizes():
    rng = np.random.default_rng(27)
    for _ in range(50):
        A1, A2 = rng.uniform(-30, 30, 2)
        e = StructuralVector.normalized(*rng.normal(size=2))
        uv = two_pulse_closed_form(A1, A2, e, StructuralVector(-e.b, e.a))[0]
        assert uv == pytest.approx(math.cos(A1 / 2) * math.cos(A2 / 2), abs=1e-14)


# -- mechanism labels -----------------------------------------------------------


def test_single_pulse_is_zero_loop():
    labels = classify_mechanism(PulseSequence([Pulse.from_ratio(6 * PI, 1 / 3)]))
    assert all(m.mechanism is Mechanism.ZERO_LOOP and m.w1 == 0.0 for m in labels.values())


def test_b_subsystem_opens_a_loop():
    seq = PulseSequence([Pulse.from_ratio(4 * PI, 0.25), Pulse.from_ratio(math.sqrt(5) * PI, 0.5)])
    labels = classify_mechanism(seq)
    assert labels[Subsystem.B].mechanism is Mechanism.ONE_LOOP
    assert labels[Subsystem.A].mechanism is Mechanism.ZERO_LOOP


def test_zero_area_pulses_are_zero_loop():
    labels = classify_mechanism(PulseSequence([Pulse.from_ratio(0.0, 1.0), Pulse.from_ratio(0.0, 0.3)]))
    assert all(m.mechanism is Mechanism.ZERO_LOOP and m.w1 == 0.0 and m.w0 == 1.0 for m in labels.values())


def test_mixed_label_and_weight_bounds():
    seq = PulseSequence([Pulse.from_ratio(PI / 2, 1.0), Pulse.from_ratio(PI / 2, 1.0)])
    labels = classify_mechanism(seq)
    assert labels[Subsystem.V].mechanism is Mechanism.MIXED
    rng = np.random.default_rng(28)
    for _ in range(50):
        seq = PulseSequence(Pulse.from_ratio(rng.uniform(-20, 20), rng.uniform(0, 3)) for _ in range(3))
        for m in classify_mechanism(seq).values():
            assert 0.0 <= m.w0 <= 1.0 and 0.0 <= m.w1 <= 1.0


def test_classify_empty_rejected():
    with pytest.raises(ValueError):
        classify_mechanism(PulseSequence([]))
