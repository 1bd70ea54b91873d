"""Pure-numpy versions of the hot kernels.

Mirrors ``_kernels.pyx`` argument for argument; used when the compiled
extension is unavailable or ``RYDGATE_PURE=1`` is set.
"""

import numpy as np


def sequence_u11(areas, a, b, phi):
    """First diagonal element of each block propagator for a batch of sequences.

    All inputs are float arrays of shape ``(n, p)``: ``n`` independent
    sequences of ``p`` pulses in time order. Returns three complex arrays of
    shape ``(n,)`` for the V, A and B blocks.
    """
    areas = np.asarray(areas, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    n, p = areas.shape

    # evolve the ground-state column of each block: c <- U_k c
    v0 = np.ones(n, dtype=np.complex128)
    v1 = np.zeros(n, dtype=np.complex128)
    v2 = np.zeros(n, dtype=np.complex128)
    a0 = np.ones(n, dtype=np.complex128)
    a1 = np.zeros(n, dtype=np.complex128)
    b0 = np.ones(n, dtype=np.complex128)
    b1 = np.zeros(n, dtype=np.complex128)

    for k in range(p):
        half = 0.5 * areas[:, k]
        ak = a[:, k]
        bk = b[:, k]
        ep = np.exp(1j * phi[:, k])
        em = np.conj(ep)

        c = np.cos(half)
        s = np.sin(half)
        n0 = c * v0 + 1j * s * ep * (ak * v1 + bk * v2)
        n1 = 1j * s * em * ak * v0 + (ak * ak * c + bk * bk) * v1 + ak * bk * (c - 1.0) * v2
        n2 = 1j * s * em * bk * v0 + ak * bk * (c - 1.0) * v1 + (bk * bk * c + ak * ak) * v2
        v0, v1, v2 = n0, n1, n2

        ca = np.cos(ak * half)
        sa = np.sin(ak * half)
        a0, a1 = ca * a0 + 1j * sa * ep * a1, 1j * sa * em * a0 + ca * a1

        cb = np.cos(bk * half)
        sb = np.sin(bk * half)
        b0, b1 = cb * b0 + 1j * sb * ep * b1, 1j * sb * em * b0 + cb * b1

    return v0, a0, b0


def rk4_evolve(coupling, omega, dt):
    """Integrate dU/dt = (i/2) omega(t) M U from U = I with classic RK4.

    ``omega`` holds the Rabi frequency at half-step resolution: ``2*steps + 1``
    samples spaced ``dt/2`` apart, so each RK4 step reads three consecutive
    samples.
    """
    m = np.asarray(coupling, dtype=np.complex128)
    omega = np.asarray(omega, dtype=np.float64)
    steps = (omega.shape[0] - 1) // 2
    g = 0.5j * m
    u = np.eye(m.shape[0], dtype=np.complex128)
    for j in range(steps):
        w0 = omega[2 * j]
        wh = omega[2 * j + 1]
        w1 = omega[2 * j + 2]
        k1 = w0 * (g @ u)
        k2 = wh * (g @ (u + 0.5 * dt * k1))
        k3 = wh * (g @ (u + 0.5 * dt * k2))
        k4 = w1 * (g @ (u + dt * k3))
        u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return u
