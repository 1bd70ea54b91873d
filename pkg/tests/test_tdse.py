import math

import numpy as np
import pytest

from rydgate import Pulse, PulseSequence, StructuralVector, Subsystem, compose
from rydgate.errors import ConvergenceError
from rydgate.tdse import SHAPES, Envelope, propagate_numeric

PI = math.pi


@pytest.mark.parametrize("shape", SHAPES)
def test_envelope_integrates_to_area(shape):
    env = Envelope(shape, 2.0)
    t = np.linspace(0, 2.0, 200001)
    assert np.trapezoid(env.rabi(3.3, t), t) == pytest.approx(3.3, rel=1e-9)


def test_envelope_validation():
    with pytest.raises(ValueError):
        Envelope("lorentzian")
    with pytest.raises(ValueError):
        Envelope("square", 0.0)


def test_gaussian_pi_pulse_on_qubit_a():
    u = propagate_numeric([Pulse(PI, StructuralVector(1.0, 0.0))])
    assert abs(u.A[0, 0]) < 1e-6


def test_envelopes_agree_by_area_theorem():
    seq = [Pulse.from_ratio(5.1, 0.4, 0.3), Pulse.from_ratio(-2.2, 1.7, 1.1)]
    g = propagate_numeric(seq, Envelope("gaussian"))
    s = propagate_numeric(seq, Envelope("square", 3.0))
    assert g.max_deviation(s) < 1e-6


def test_matches_closed_form_mixed_envelopes():
    rng = np.random.default_rng(11)
    for _ in range(8):
        seq = PulseSequence(
            Pulse(rng.uniform(-10, 10), StructuralVector.normalized(*rng.normal(size=2)), rng.uniform(0, 6)) for _ in range(rng.integers(1, 5))
        )
        envs = [Envelope(str(rng.choice(SHAPES)), rng.uniform(0.5, 2)) for _ in seq]
        assert propagate_numeric(seq, envs).max_deviation(compose(seq)) < 1e-6


def test_numeric_propagators_unitary():
    u = propagate_numeric([Pulse.from_ratio(20.0, 0.3)])
    assert u.unitarity_error() < 1e-8
    assert u.u11(Subsystem.V) == pytest.approx(math.cos(10.0), abs=1e-7)


def test_argument_validation():
    with pytest.raises(ValueError):
        propagate_numeric([])
    with pytest.raises(ValueError):
        propagate_numeric([Pulse.from_ratio(1.0, 1.0)], steps=10)
    with pytest.raises(ValueError):
        propagate_numeric([Pulse.from_ratio(1.0, 1.0)], [Envelope(), Envelope()])


def test_convergence_failure_raises():
    with pytest.raises(ConvergenceError):
        propagate_numeric([Pulse.from_ratio(3.0, 1.0)], tol=1e-20)
