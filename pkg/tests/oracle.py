"""Independent reference model for the tests.

Two three-level atoms {|0>, |1>, |r>} in the full 9-dimensional product
space, both driven on |0> <-> |r> with site amplitudes (a, b), and the
doubly excited state |rr> removed by the blockade. Propagators come from a
dense matrix exponential, so nothing here shares code with the block
formulas under test.
"""

import itertools

import numpy as np
from scipy.linalg import expm

LEVELS = ("0", "1", "r")
BASIS = [p + q for p, q in itertools.product(LEVELS, LEVELS) if p + q != "rr"]
INDEX = {s: i for i, s in enumerate(BASIS)}
COMPUTATIONAL = ("00", "01", "10", "11")


def coupling(a, b, phi=0.0):
    """Hermitian generator K with U = exp(i (A/2) K)."""
    K = np.zeros((len(BASIS), len(BASIS)), dtype=complex)
    for s in BASIS:
        # atom 1 (amplitude a), atom 2 (amplitude b)
        for site, amp in ((0, a), (1, b)):
            if s[site] == "0":
                t = s[:site] + "r" + s[site + 1 :]
                if t in INDEX:
                    K[INDEX[s], INDEX[t]] += amp * np.exp(1j * phi)
                    K[INDEX[t], INDEX[s]] += amp * np.exp(-1j * phi)
    return K


def full_propagator(pulses):
    """pulses: iterable of (area, a, b, phi); later pulses act last."""
    U = np.eye(len(BASIS), dtype=complex)
    for area, a, b, phi in pulses:
        U = expm(0.5j * area * coupling(a, b, phi)) @ U
    return U


def diag(pulses):
    """Return amplitudes of |00>, |01>, |10>, |11> (the V, A, B, idle blocks)."""
    U = full_propagator(pulses)
    return {s: U[INDEX[s], INDEX[s]] for s in COMPUTATIONAL}


def gate_fidelity(pulses):
    """|Tr(CZ^dag U_comp)|^2 / 16 with CZ = diag(-1, -1, -1, 1)."""
    d = diag(pulses)
    return abs(-d["00"] - d["01"] - d["10"] + d["11"]) ** 2 / 16


def ratio_pulse(area, x, phi=0.0):
    a = 1.0 / np.sqrt(1.0 + x * x)
    return (area, a, x * a, phi)
