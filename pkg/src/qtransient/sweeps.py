"""Parameter scans of the transient peak: width, position, and opacity sweeps.

Three one-dimensional scans cover the phenomenology of the under-the-barrier
forerunner:

* t_max as a function of barrier width L (fixed V, E) -- shows a basin
  (non-monotonic dip) at small widths followed by linear growth;
* omega_av/omega_V at the local peak as a function of position x -- below 1
  throughout the barrier and out to about 2L, above 1 far outside;
* omega_av/omega_V at x = L as a function of opacity alpha at fixed u = V/E
  -- the curve only depends on (alpha, u), and its unit crossing together
  with the sign change of the transmission phase delay bounds the opacity
  window [alpha_c, alpha_u] in which the forerunner is a genuine tunneling
  signal.

Opacity is realized by varying L at fixed V (and E = V/u): the (alpha, u)
scaling invariance makes the choice immaterial, and it keeps the pole solver
in a well-conditioned regime.

Every sweep is a pure map over its grid: each grid point builds its own
system and pole set, so permuting the grid permutes nothing but row order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import find_time_domain_resonance
from .errors import NoCrossing, NonPositiveParameter
from .propagator import pole_cache
from .stationary import phase_time_delay
from .systems import BarrierSystem, length_for_alpha, make_system

SWEEP_TOL = 1e-8
SWEEP_SCAN = 1200


@dataclass(frozen=True)
class SweepRow:
    independent: float
    t_max: float
    omega_ratio: float
    exists: bool


@dataclass(frozen=True)
class SweepTable:
    kind: str                     # TmaxVsL | FreqVsX | FreqVsAlpha
    fixed_params: dict
    rows: tuple

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])


def _row(independent, tdr) -> SweepRow:
    return SweepRow(independent=float(independent), t_max=tdr.t_max,
                    omega_ratio=tdr.omega_ratio, exists=tdr.exists)


def sweep_tmax_vs_L(L_grid, V, E, mass_ratio=1.0, tol=SWEEP_TOL,
                    n_scan=SWEEP_SCAN) -> SweepTable:
    """t_max at x = L for each barrier width; rows sorted by L."""
    rows = []
    for L in sorted(float(v) for v in np.asarray(L_grid, dtype=float)):
        if L <= 0:
            raise NonPositiveParameter(f"L must be > 0, got {L}")
        sys = make_system(V, E, L, mass_ratio)
        tdr = find_time_domain_resonance(sys, tol=tol, n_scan=n_scan)
        rows.append(_row(L, tdr))
    return SweepTable(kind="TmaxVsL",
                      fixed_params=dict(V=V, E=E, mass_ratio=mass_ratio),
                      rows=tuple(rows))


def sweep_freq_vs_x(x_grid, sys: BarrierSystem, tol=SWEEP_TOL,
                    n_scan=SWEEP_SCAN) -> SweepTable:
    """Peak frequency ratio at each position, inside and beyond the barrier."""
    cache = pole_cache(sys)
    rows = []
    for x in sorted(float(v) for v in np.asarray(x_grid, dtype=float)):
        if x <= 0:
            raise NonPositiveParameter(f"x must be > 0, got {x}")
        tdr = find_time_domain_resonance(sys, x=x, tol=tol, n_scan=n_scan,
                                         poles=cache)
        rows.append(_row(x, tdr))
    return SweepTable(kind="FreqVsX",
                      fixed_params=dict(V=sys.V, E=sys.E, L=sys.L,
                                        mass_ratio=sys.mass_ratio),
                      rows=tuple(rows))


def _ratio_at_alpha(alpha, u, V_ref, mass_ratio, tol, n_scan):
    L = length_for_alpha(alpha, V_ref, mass_ratio)
    sys = make_system(V_ref, V_ref / u, L, mass_ratio)
    return find_time_domain_resonance(sys, tol=tol, n_scan=n_scan)


def sweep_freq_vs_alpha(alpha_grid, u, V_ref, mass_ratio=1.0, tol=SWEEP_TOL,
                        n_scan=SWEEP_SCAN) -> SweepTable:
    """Frequency ratio at the barrier edge versus opacity, at fixed u = V/E."""
    if u <= 1:
        raise NonPositiveParameter(f"u must be > 1 (tunneling), got {u}")
    rows = []
    for alpha in sorted(float(v) for v in np.asarray(alpha_grid, dtype=float)):
        if alpha <= 0:
            raise NonPositiveParameter(f"alpha must be > 0, got {alpha}")
        tdr = _ratio_at_alpha(alpha, u, V_ref, mass_ratio, tol, n_scan)
        rows.append(_row(alpha, tdr))
    return SweepTable(kind="FreqVsAlpha",
                      fixed_params=dict(u=u, V_ref=V_ref, mass_ratio=mass_ratio),
                      rows=tuple(rows))


def detect_basin(table: SweepTable):
    """Indices (i, j, k) with t(i) > t(j) < t(k): the non-monotonic basin.

    Returns (i, j, k) using the global interior minimum as j, or None when
    the scan is monotone (no basin in range).
    """
    t = table.column("t_max")
    ok = np.isfinite(t)
    if ok.sum() < 3:
        return None
    j = int(np.nanargmin(t))
    before = np.flatnonzero(ok[:j] & (t[:j] > t[j]))
    after = j + 1 + np.flatnonzero(ok[j + 1:] & (t[j + 1:] > t[j]))
    if len(before) == 0 or len(after) == 0:
        return None
    return int(before[0]), j, int(after[-1])


def linear_suffix(table: SweepTable, r2_min=0.999):
    """Least-squares line over the largest suffix of rows with R^2 > r2_min.

    Returns (start_index, slope, intercept, r2) or None if no suffix of at
    least 3 points is that straight.
    """
    x = table.column("independent")
    t = table.column("t_max")
    ok = np.isfinite(t)
    for start in range(len(x) - 2):
        sel = ok.copy()
        sel[:start] = False
        if sel.sum() < 3:
            break
        xs, ts = x[sel], t[sel]
        slope, intercept = np.polyfit(xs, ts, 1)
        resid = ts - (slope * xs + intercept)
        ss_tot = np.sum((ts - ts.mean()) ** 2)
        r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
        if r2 > r2_min:
            return start, float(slope), float(intercept), float(r2)
    return None


def opacity_window(u, V_ref, mass_ratio=1.0, tol=1e-3, alpha_span=(1.2, 6.0),
                   sweep_tol=SWEEP_TOL, n_scan=SWEEP_SCAN):
    """(alpha_c, alpha_u): the opacity interval of genuine tunneling forerunners.

    alpha_c is the critical opacity at which the transmission phase delay
    hbar d(arg T)/dE changes sign (bisection on the delay); below it the
    delay is positive and no transient peak forms at the barrier edge, above
    it the delay is negative and time-domain resonances become possible.
    alpha_u is where omega_av/omega_V at the peak crosses 1 (bisection on
    the ratio).  Both to absolute tolerance tol in alpha.
    """
    if u <= 1:
        raise NonPositiveParameter(f"u must be > 1, got {u}")

    def probe(alpha):
        return _ratio_at_alpha(alpha, u, V_ref, mass_ratio, sweep_tol, n_scan)

    def delay(alpha):
        L = length_for_alpha(alpha, V_ref, mass_ratio)
        return phase_time_delay(make_system(V_ref, V_ref / u, L, mass_ratio))

    lo, hi = alpha_span
    coarse = np.linspace(lo, hi, 13)
    tdrs = [probe(a) for a in coarse]

    # sign change of the phase delay for alpha_c
    delays = [delay(a) for a in coarse]
    flips = [i for i in range(len(coarse) - 1)
             if delays[i] > 0.0 >= delays[i + 1]]
    if not flips:
        raise NoCrossing(f"no delay sign change for alpha in {alpha_span} at u={u}")
    a0, a1 = coarse[flips[0]], coarse[flips[0] + 1]
    while a1 - a0 > tol:
        mid = 0.5 * (a0 + a1)
        if delay(mid) <= 0.0:
            a1 = mid
        else:
            a0 = mid
    alpha_c = 0.5 * (a0 + a1)

    # unit crossing of the ratio for alpha_u
    ratios = [t.omega_ratio if t.exists else math.nan for t in tdrs]
    cross = [i for i in range(len(coarse) - 1)
             if (ratios[i] < 1.0 <= ratios[i + 1])]
    if not cross:
        raise NoCrossing(f"no ratio=1 crossing for alpha in {alpha_span} at u={u}")
    b0, b1 = coarse[cross[-1]], coarse[cross[-1] + 1]
    r0 = ratios[cross[-1]]
    while b1 - b0 > tol:
        mid = 0.5 * (b0 + b1)
        rm = probe(mid).omega_ratio
        if rm < 1.0:
            b0, r0 = mid, rm
        else:
            b1 = mid
    alpha_u = 0.5 * (b0 + b1)
    return alpha_c, alpha_u
