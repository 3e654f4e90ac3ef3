"""Adaptive Gauss-Legendre quadrature against the measure of the criterion.

All distance integrals in this package are taken against

    d mu(t) = dt / (2 pi (1/4 + t^2)),      total mass 1 over the real line.

For an even integrand f the two-sided integral reduces to

    integral f d mu = (1/pi) int_0^inf f(t) w(t) dt,   w(t) = 1/(1/4 + t^2).

weighted_integral approximates this by adaptive 12-point Gauss-Legendre
panels with bisection refinement on [0, t_max], plus a conservative tail
term: the measure of [t_max, inf), which is (pi - 2 atan(2 t_max))/pi,
times the supremum of |f| sampled on [t_max, 2 t_max].  With f == 1 the
truncated mass and the tail term add up to 1 to within panel tolerance.

Refinement is generation-synchronous: every pending panel of a generation
is bisected at once and all child nodes are evaluated in a single call to
the integrand, so integrands that batch internally (vectorized zeta runs)
see large arrays.  A panel is accepted when the parent-versus-children
discrepancy is below panel_tolerance * (panel width / t_max) plus a
machine-noise floor; accepted values are the refined child sums.  Final
panel values are added with exact summation in ascending interval order,
so results are independent of refinement bookkeeping order.

Integrands may be vector-valued (return shape (k, len(t))); the error
test then takes the worst component, which lets several probe functions
share one panel decomposition (used by the Gram builder).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError

__all__ = ["QuadratureSpec", "IntegralResult", "weighted_integral",
           "adaptive_panels", "panel_rule", "tail_mass"]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)
# Acceptance floor for the parent-vs-children error estimate.  The
# estimate itself carries roundoff of order (GL points + few) * eps times
# the panel magnitude, so panels whose true error is below that can never
# look converged; 64 eps * |children| keeps every panel's floor at a
# ~1e-14 relative level, which summed over panels stays far below any
# supported panel_tolerance.
_NOISE_FLOOR = 64.0 * np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureSpec:
    """Truncation height, per-run tolerance, and panel budget.

    panel_tolerance is an absolute target for the [0, t_max] part; it is
    distributed over panels proportionally to width.  t_max >= 1 and
    panel_tolerance >= 1e-12 (double-precision floor) are enforced.
    """

    t_max: float = 200.0
    panel_tolerance: float = 1.0e-10
    max_panels: int = 200_000

    def __post_init__(self) -> None:
        if not (self.t_max >= 1.0):
            raise ValueError("t_max must be >= 1")
        if not (self.panel_tolerance >= 1.0e-12):
            raise ValueError("panel_tolerance must be >= 1e-12")
        if not (8 <= self.max_panels <= 5_000_000):
            raise ValueError("max_panels must be in [8, 5e6]")


@dataclass(frozen=True)
class IntegralResult:
    """Weighted integral value with its tail accounting.

    value = main_part + tail_part, where tail_part = tail_sup * mass of
    [t_max, inf).  panels counts every panel ever integrated (parents and
    children); evaluations counts integrand points.
    """

    value: float
    main_part: float
    tail_part: float
    tail_sup: float
    panels: int
    evaluations: int
    t_max: float


def tail_mass(t_max: float) -> float:
    """Measure of {|t| >= t_max} under d mu: (pi - 2 atan(2 t_max))/pi."""
    return (math.pi - 2.0 * math.atan(2.0 * t_max)) / math.pi


def _weight(t: np.ndarray) -> np.ndarray:
    return 1.0 / (0.25 + t * t)


def _panel_integrals(f, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gauss-Legendre integrals of f(t) w(t)/pi over each [a_i, b_i].

    Returns shape (k, len(a)) where k is the integrand's component count.
    """
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    t = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    flat = t.reshape(-1)
    vals = np.asarray(f(flat), dtype=float)
    if vals.ndim == 1:
        vals = vals[None, :]
    g = vals * (_weight(flat) / math.pi)[None, :]
    g = g.reshape(vals.shape[0], a.size, _GL_NODES.size)
    return (g * _GL_WEIGHTS[None, None, :]).sum(axis=2) * half[None, :]


def adaptive_panels(f, spec: QuadratureSpec, freq_hint: float | None = None,
                    rel_noise: float = 0.0):
    """Refine [0, t_max] until every panel passes the bisection test.

    Returns (edges_a, edges_b, values, panels, evaluations) where values
    has shape (k, n_panels) and panels are sorted by left edge.  The seed
    partition is uniform with width about 11.3/freq_hint (roughly 1.8
    periods of the fastest expected oscillation per panel).

    rel_noise declares the relative reproducibility of f itself (for
    integrands built from approximate special-function evaluations); a
    panel is accepted once its bisection error falls to that fraction of
    its magnitude, since refining below the evaluation noise can only
    split panels forever without improving the result.
    """
    T = spec.t_max
    if freq_hint is not None and freq_hint > 0.0:
        width = min(T, 11.3 / freq_hint)
    else:
        width = T / 8.0
    n0 = max(8, int(math.ceil(T / width)))
    if n0 > spec.max_panels:
        raise QuadratureError(
            f"seed partition needs {n0} panels, exceeding budget {spec.max_panels}")
    edges = np.linspace(0.0, T, n0 + 1)
    pa, pb = edges[:-1].copy(), edges[1:].copy()
    pv = _panel_integrals(f, pa, pb)
    evaluations = pa.size * _GL_NODES.size
    total_panels = pa.size
    done_a: list[np.ndarray] = []
    done_b: list[np.ndarray] = []
    done_v: list[np.ndarray] = []
    while pa.size:
        mid = 0.5 * (pa + pb)
        ca = np.concatenate([pa, mid])
        cb = np.concatenate([mid, pb])
        cv = _panel_integrals(f, ca, cb)
        evaluations += ca.size * _GL_NODES.size
        total_panels += ca.size
        if total_panels > spec.max_panels:
            raise QuadratureError(
                f"panel budget {spec.max_panels} exhausted at t_max={T}")
        vl, vr = cv[:, :pa.size], cv[:, pa.size:]
        refined = vl + vr
        err = np.abs(pv - refined).max(axis=0)
        floor = max(_NOISE_FLOOR, rel_noise) * \
            (np.abs(vl) + np.abs(vr)).max(axis=0)
        ok = err <= spec.panel_tolerance * (pb - pa) / T + floor
        if np.any(ok):
            done_a.append(pa[ok])
            done_b.append(pb[ok])
            done_v.append(refined[:, ok])
        bad = ~ok
        pa = np.concatenate([pa[bad], mid[bad]])
        pb = np.concatenate([mid[bad], pb[bad]])
        pv = np.concatenate([vl[:, bad], vr[:, bad]], axis=1)
    a = np.concatenate(done_a)
    order = np.argsort(a, kind="stable")
    a = a[order]
    b = np.concatenate(done_b)[order]
    v = np.concatenate(done_v, axis=1)[:, order]
    return a, b, v, total_panels, evaluations


def panel_rule(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flatten panels into one discrete rule for integral f(t) w(t)/pi dt.

    Returns (points, weights) with all weights positive, so any quadratic
    form assembled on this rule is positive semidefinite by construction.
    """
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    t = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).reshape(-1)
    c = (half[:, None] * _GL_WEIGHTS[None, :]).reshape(-1) * _weight(t) / math.pi
    return t, c


def weighted_integral(f, spec: QuadratureSpec | None = None,
                      freq_hint: float | None = None,
                      rel_noise: float = 0.0) -> IntegralResult:
    """integral of an even real integrand f against d mu over the line.

    f receives an ndarray of nonnegative t and must return values of the
    same length (or (1, len) for the vector form).  The returned value is
    the [0, t_max] quadrature plus the sup-times-mass tail bound.
    """
    spec = spec or QuadratureSpec()
    a, _b, v, panels, evaluations = adaptive_panels(f, spec, freq_hint,
                                                    rel_noise)
    main = math.fsum(v[0].tolist())
    samples = np.linspace(spec.t_max, 2.0 * spec.t_max, 129)
    fv = np.asarray(f(samples), dtype=float)
    if fv.ndim == 1:
        fv = fv[None, :]
    tail_sup = float(np.max(np.abs(fv[0])))
    evaluations += samples.size
    mass = tail_mass(spec.t_max)
    tail = tail_sup * mass
    return IntegralResult(value=main + tail, main_part=main, tail_part=tail,
                          tail_sup=tail_sup, panels=panels,
                          evaluations=evaluations, t_max=spec.t_max)
