"""Compiled fixed-step RK4 integration loops.

Two independent routes through the same physics: a real 3-vector integrator
for dR/dt = Omega x R, and a complex 2-amplitude integrator for the
rotating-frame Schroedinger equation.  They share only the scalar drive
evaluation; each is an oracle for the other.
"""

import numpy as np
from numba import njit

EDGE_EXPONENT = 9.0


@njit(cache=True, nogil=True, inline="always")
def _drive_coupling(t, duration, peak_ang, constant_env):
    if constant_env:
        return peak_ang
    x = 2.0 * t / duration - 1.0
    return peak_ang * np.exp(-EDGE_EXPONENT * x * x)


@njit(cache=True, nogil=True, inline="always")
def _drive_detuning(t, duration, span_ang, offset_ang):
    return span_ang * (t / duration - 0.5) + offset_ang


@njit(cache=True, nogil=True)
def rk4_bloch(duration, peak_ang, span_ang, offset_ang, cos_phi, sin_phi,
              constant_env, r0x, r0y, r0z, n_steps):
    """Integrate the cross-product equation of motion with classical RK4.

    Returns an (n_steps+1, 3) array of Bloch vectors on the uniform grid
    t_k = duration * k / n_steps, including both endpoints.
    """
    out = np.empty((n_steps + 1, 3))
    rx, ry, rz = r0x, r0y, r0z
    out[0, 0], out[0, 1], out[0, 2] = rx, ry, rz
    h = duration / n_steps
    for k in range(n_steps):
        t0 = duration * k / n_steps
        tm = duration * (k + 0.5) / n_steps
        t1 = duration * (k + 1.0) / n_steps

        e0 = _drive_coupling(t0, duration, peak_ang, constant_env)
        em = _drive_coupling(tm, duration, peak_ang, constant_env)
        e1 = _drive_coupling(t1, duration, peak_ang, constant_env)
        d0 = _drive_detuning(t0, duration, span_ang, offset_ang)
        dm = _drive_detuning(tm, duration, span_ang, offset_ang)
        d1 = _drive_detuning(t1, duration, span_ang, offset_ang)

        ox0, oy0 = e0 * cos_phi, e0 * sin_phi
        oxm, oym = em * cos_phi, em * sin_phi
        ox1, oy1 = e1 * cos_phi, e1 * sin_phi

        k1x = oy0 * rz - d0 * ry
        k1y = d0 * rx - ox0 * rz
        k1z = ox0 * ry - oy0 * rx

        ax, ay, az = rx + 0.5 * h * k1x, ry + 0.5 * h * k1y, rz + 0.5 * h * k1z
        k2x = oym * az - dm * ay
        k2y = dm * ax - oxm * az
        k2z = oxm * ay - oym * ax

        ax, ay, az = rx + 0.5 * h * k2x, ry + 0.5 * h * k2y, rz + 0.5 * h * k2z
        k3x = oym * az - dm * ay
        k3y = dm * ax - oxm * az
        k3z = oxm * ay - oym * ax

        ax, ay, az = rx + h * k3x, ry + h * k3y, rz + h * k3z
        k4x = oy1 * az - d1 * ay
        k4y = d1 * ax - ox1 * az
        k4z = ox1 * ay - oy1 * ax

        rx += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        ry += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        rz += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
        out[k + 1, 0], out[k + 1, 1], out[k + 1, 2] = rx, ry, rz
    return out


@njit(cache=True, nogil=True)
def rk4_amplitudes(duration, peak_ang, span_ang, offset_ang, cos_phi, sin_phi,
                   constant_env, c0_init, c1_init, n_steps):
    """Integrate i d/dt (c0, c1) = H (c0, c1) with classical RK4.

    H has diagonal (+delta/2, -delta/2) and off-diagonal
    (coupling/2) exp(-i phi) / (coupling/2) exp(+i phi), so the drive torque
    vector seen by the Bloch form is (coupling cos phi, coupling sin phi,
    delta).  Returns an (n_steps+1, 2) complex array.
    """
    out = np.empty((n_steps + 1, 2), dtype=np.complex128)
    c0, c1 = c0_init, c1_init
    out[0, 0], out[0, 1] = c0, c1
    h = duration / n_steps
    e_minus = complex(cos_phi, -sin_phi)   # exp(-i phi)
    e_plus = complex(cos_phi, sin_phi)
    for k in range(n_steps):
        t0 = duration * k / n_steps
        tm = duration * (k + 0.5) / n_steps
        t1 = duration * (k + 1.0) / n_steps

        g0 = 0.5 * _drive_coupling(t0, duration, peak_ang, constant_env)
        gm = 0.5 * _drive_coupling(tm, duration, peak_ang, constant_env)
        g1 = 0.5 * _drive_coupling(t1, duration, peak_ang, constant_env)
        d0 = 0.5 * _drive_detuning(t0, duration, span_ang, offset_ang)
        dm = 0.5 * _drive_detuning(tm, duration, span_ang, offset_ang)
        d1 = 0.5 * _drive_detuning(t1, duration, span_ang, offset_ang)

        k1a = -1j * (d0 * c0 + g0 * e_minus * c1)
        k1b = -1j * (g0 * e_plus * c0 - d0 * c1)

        a0, a1 = c0 + 0.5 * h * k1a, c1 + 0.5 * h * k1b
        k2a = -1j * (dm * a0 + gm * e_minus * a1)
        k2b = -1j * (gm * e_plus * a0 - dm * a1)

        a0, a1 = c0 + 0.5 * h * k2a, c1 + 0.5 * h * k2b
        k3a = -1j * (dm * a0 + gm * e_minus * a1)
        k3b = -1j * (gm * e_plus * a0 - dm * a1)

        a0, a1 = c0 + h * k3a, c1 + h * k3b
        k4a = -1j * (d1 * a0 + g1 * e_minus * a1)
        k4b = -1j * (g1 * e_plus * a0 - d1 * a1)

        c0 = c0 + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        c1 = c1 + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        out[k + 1, 0], out[k + 1, 1] = c0, c1
    return out
