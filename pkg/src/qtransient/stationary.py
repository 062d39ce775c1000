"""Continuous-wave scattering off the rectangular barrier.

Conventions: unit-amplitude incidence exp(ikx) from the left, transmitted
wave T exp(ikx) for x > L, reflected wave R exp(-ikx) for x < 0.  Inside the
barrier the solution is A exp(iqx) + B exp(-iqx) with q = sqrt(k^2 - 2mV/hbar^2);
for E < V this is evaluated with decaying real exponentials (q = i kappa), so
large opacities stay well conditioned.

All amplitude formulas are even functions of the sqrt branch of q, so they
extend directly to complex k (needed for T(-k) and for the resonance poles of
the transmission denominator).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import XOutOfRange, ZeroWavenumber
from .systems import BarrierSystem


def _q_of_k(k, v):
    """Internal wavenumber sqrt(k^2 - v); branch is immaterial downstream."""
    return np.sqrt(np.asarray(k, dtype=complex) ** 2 - v)


def denominator(k, sys: BarrierSystem):
    """Transmission denominator D(k) = (k+q)^2 e^{-iqL} - (k-q)^2 e^{iqL}.

    D is odd under q -> -q, so D itself is branch dependent; use
    pole_function for anything that must be single valued in k.
    """
    k = np.asarray(k, dtype=complex)
    q = _q_of_k(k, sys.v_strength)
    return (k + q) ** 2 * np.exp(-1j * q * sys.L) - (k - q) ** 2 * np.exp(1j * q * sys.L)


def pole_function(k, sys: BarrierSystem):
    """G(k) = D(k)/q(k): entire in k, zero exactly at the resonance poles."""
    k = np.asarray(k, dtype=complex)
    q = _q_of_k(k, sys.v_strength)
    small = np.abs(q) < 1e-8
    if np.any(small):
        # removable point q ~ 0: G = 4k - 2i(L k^2 + ...) + O(q^2); expand
        out = np.empty(np.broadcast(k, q).shape, dtype=complex)
        km, qm = np.broadcast_arrays(k, q)
        out[~small] = denominator(km[~small], sys) / qm[~small]
        ks = km[small]
        L = sys.L
        # series of D/q in q^2 around q=0
        qs = qm[small] ** 2
        out[small] = (4 * ks - 2j * L * ks**2
                      + qs * (-2j * L - 2 * L**2 * ks + 1j * L**3 * ks**2 / 3))
        return out
    return denominator(k, sys) / q


def pole_function_scale(k, sys: BarrierSystem):
    """Magnitude scale of the two terms of G(k), for relative residuals."""
    k = np.asarray(k, dtype=complex)
    q = _q_of_k(k, sys.v_strength)
    aq = np.maximum(np.abs(q), 1e-8)
    return (np.abs((k + q) ** 2 * np.exp(-1j * q * sys.L))
            + np.abs((k - q) ** 2 * np.exp(1j * q * sys.L))) / aq


@dataclass(frozen=True)
class StationaryState:
    k: float
    T: complex
    R: complex
    A: complex  # coefficient of exp(+iqx) inside
    B: complex  # coefficient of exp(-iqx) inside
    q: complex  # internal wavenumber


def transmission(k, sys: BarrierSystem):
    """Transmission amplitude T(k); accepts complex k (and arrays)."""
    k_arr = np.asarray(k, dtype=complex)
    if np.any(k_arr == 0):
        raise ZeroWavenumber("transmission undefined at k = 0")
    q = _q_of_k(k_arr, sys.v_strength)
    t = 4 * k_arr * np.exp(-1j * k_arr * sys.L) / pole_function(k_arr, sys)
    return t if t.shape else complex(t)


def reflection(k, sys: BarrierSystem):
    """Reflection amplitude R(k) = -2i v sin(qL) / D(k)."""
    k_arr = np.asarray(k, dtype=complex)
    if np.any(k_arr == 0):
        raise ZeroWavenumber("reflection undefined at k = 0")
    v = sys.v_strength
    q = _q_of_k(k_arr, sys.v_strength)
    # sin(qL)/q is even in q; pair it with G = D/q
    r = -2j * v * np.sinc(q * sys.L / np.pi) * sys.L / pole_function(k_arr, sys)
    return r if r.shape else complex(r)


def scattering_state(k: float, sys: BarrierSystem) -> StationaryState:
    """Full matched state at real incidence wavenumber k."""
    if k == 0:
        raise ZeroWavenumber("k = 0")
    q = complex(_q_of_k(k, sys.v_strength))
    t = transmission(k, sys)
    r = reflection(k, sys)
    phase = t * cmath.exp(1j * k * sys.L) / (2 * q)
    a = phase * (q + k) * cmath.exp(-1j * q * sys.L)
    b = phase * (q - k) * cmath.exp(1j * q * sys.L)
    return StationaryState(k=k, T=t, R=r, A=a, B=b, q=q)


def phi_stationary(x, k, sys: BarrierSystem):
    """Internal stationary wavefunction Phi_k(x) on 0 <= x <= L.

    Matched so that Phi_k(0) = 1 + R_k and Phi_k(L) = T_k exp(ikL).  Accepts
    complex k; x may be an array.  Exponentials are organized around x - L so
    that for E < V every magnitude is bounded by the dominant barrier scale.
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any((x_arr < 0) | (x_arr > sys.L * (1 + 1e-12))):
        raise XOutOfRange("phi_stationary requires 0 <= x <= L")
    k_c = complex(k)
    q = complex(_q_of_k(k_c, sys.v_strength))
    t = transmission(k_c, sys)
    pref = t * cmath.exp(1j * k_c * sys.L) / (2 * q)
    val = pref * ((q + k_c) * np.exp(1j * q * (x_arr - sys.L))
                  + (q - k_c) * np.exp(-1j * q * (x_arr - sys.L)))
    return val if val.shape else complex(val)


def phase_time_delay(sys: BarrierSystem, rel_step=1e-6):
    """Transmission phase delay hbar d(arg T)/dE in fs, by central difference.

    The difference is taken on the angle of the ratio T(E+dE)/T(E-dE), which
    is immune to 2 pi wraps of the individual phases.  Negative values mark
    the opacity regime in which a transient density maximum can form at the
    barrier edge before the monotone filling sets in.
    """
    from .systems import HBAR_EV_FS, make_system
    dE = rel_step * sys.E
    lo = make_system(sys.V, sys.E - dE, sys.L, sys.mass_ratio)
    hi = make_system(sys.V, sys.E + dE, sys.L, sys.mass_ratio)
    ratio = transmission(hi.k, hi) / transmission(lo.k, lo)
    return HBAR_EV_FS * cmath.phase(ratio) / (2.0 * dE)
