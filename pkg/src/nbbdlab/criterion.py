"""Criterion distance integrals, the Gram system, and d_N^2.

The squared criterion distance at mollifier length N is

    d_N^2 = inf_{A} integral |1 - zeta(1/2+it) A(1/2+it)|^2 d mu(t),

the infimum over Dirichlet polynomials A of length N, with d mu the
normalized Cauchy measure of quadrature.py.  Two views are provided:

  * criterion_integral evaluates the distance integral for one concrete
    polynomial (no minimization), including the conservative tail term;
  * build_gram / solve_dN2 minimize over coefficients under the measure
    truncated to [0, t_max]: with e_n(s) = n^(-s),

        G[m][n] = integral Re(zeta e_m conj(zeta e_n)) d mu_T,
        b[n]    = integral Re(zeta e_n) d mu_T,
        d_N^2   = mu_T(1) - 2 a.b + a.G.a   at   G a = b.

All Gram and moment entries reuse one shared panel decomposition, refined
against probe integrands that majorize every entry (|zeta|^2 and |zeta|
times the fastest cosine present).  The quadrature rule therefore has
strictly positive weights common to all entries, which makes G a true
Gram matrix of vectors in C^(nodes): positive semidefinite by
construction, and d_N^2 nonincreasing in N because the minimization is
over nested coefficient spaces against one fixed discrete measure at a
fixed truncation height.

The truncated measure omits the tail mass (pi - 2 atan(2 t_max))/pi, so
solve_dN2 slightly underestimates the untruncated distance, while
criterion_integral overestimates it; hence d_N^2 <= criterion_integral of
the same polynomial, structurally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .mollifier import DirichletPolynomial
from .quadrature import (IntegralResult, QuadratureSpec, adaptive_panels,
                         panel_rule, weighted_integral)
from .special_functions import PrecisionSpec, zeta_line

__all__ = ["weighted_integral", "criterion_integral", "GramSystem",
           "build_gram", "DNSquared", "solve_dN2", "default_quadrature"]

_GRAM_CAP = 64
_LINE_PRECISION = PrecisionSpec(target_abs_error=2.0e-10)


def default_quadrature(N: int, panel_tolerance: float = 1.0e-10) -> QuadratureSpec:
    """Default truncation grows with the polynomial length: t_max = max(200, 2N)."""
    return QuadratureSpec(t_max=max(200.0, 2.0 * N),
                          panel_tolerance=panel_tolerance)


def _line_frequency(N: int, t_max: float) -> float:
    """Upper bound for the local angular frequency of zeta(1/2+it) V_N:
    log N from the polynomial plus log(t/2 pi)/2 from zeta's phase."""
    return math.log(max(N, 2)) + max(0.5 * math.log(t_max / (2 * math.pi)), 0.0) + 1.0


def criterion_integral(poly: DirichletPolynomial,
                       spec: QuadratureSpec | None = None,
                       zeta_like=None) -> IntegralResult:
    """integral |1 - Z(1/2+it) poly(1/2+it)|^2 d mu, tail bound included.

    zeta_like(t) -> values of the zeta-like factor at 1/2 + i t; defaults
    to the built-in Euler-Maclaurin line evaluator at 2e-10 accuracy.
    """
    spec = spec or default_quadrature(poly.length)
    if zeta_like is None:
        zeta_like = lambda t: zeta_line(t, 0.5, 0, _LINE_PRECISION)[0]

    def f(t: np.ndarray) -> np.ndarray:
        z = zeta_like(t)
        p = poly.evaluate_line(t, 0.5)
        r = 1.0 - z * p
        return (r * r.conjugate()).real

    hint = _line_frequency(poly.length, spec.t_max)
    return weighted_integral(f, spec, freq_hint=hint)


@dataclass(frozen=True)
class GramSystem:
    """Moments of the truncated measure for lengths 1..size.

    gram[m-1][n-1] = <zeta e_m, zeta e_n>_T, moments[n-1] = <1, zeta e_n>_T,
    norm_one = mu_T(1) = 2 atan(2 t_max)/pi.
    """

    size: int
    gram: np.ndarray
    moments: np.ndarray
    norm_one: float
    t_max: float
    nodes: int


def build_gram(size: int, spec: QuadratureSpec | None = None,
               zeta_like=None) -> GramSystem:
    """Assemble the Gram matrix and moment vector on a shared panel rule."""
    if not (1 <= size <= _GRAM_CAP):
        raise CapacityError(f"Gram size must be in [1, {_GRAM_CAP}]")
    spec = spec or default_quadrature(size)
    if zeta_like is None:
        zeta_like = lambda t: zeta_line(t, 0.5, 0, _LINE_PRECISION)[0]
    x_max = math.log(max(size, 2))

    def probes(t: np.ndarray) -> np.ndarray:
        z = zeta_like(t)
        az2 = (z * z.conjugate()).real
        az = np.sqrt(az2)
        c, s = np.cos(x_max * t), np.sin(x_max * t)
        return np.stack([az2, az2 * c, az2 * s, az * c, az * s])

    hint = _line_frequency(size, spec.t_max)
    pa, pb, _v, _panels, _evals = adaptive_panels(probes, spec, freq_hint=hint)
    t, c = panel_rule(pa, pb)
    z = zeta_like(t)
    n = np.arange(1, size + 1, dtype=float)
    # E[k, n-1] = n^(-1/2) exp(-i t_k log n)
    E = np.exp(np.outer(-1j * t, np.log(n))) / np.sqrt(n)[None, :]
    zE = z[:, None] * E
    G = (zE.conjugate().T * c[None, :]) @ zE
    G = 0.5 * (G + G.conjugate().T)
    # moments pair against the basis itself (no conjugation):
    # b[n] = sum_k c_k Re[z_k n^(-1/2-i t_k)]
    b = E.T @ (c * z)
    norm_one = 2.0 * math.atan(2.0 * spec.t_max) / math.pi
    return GramSystem(size=size, gram=G.real.copy(), moments=b.real.copy(),
                      norm_one=norm_one, t_max=spec.t_max, nodes=t.size)


@dataclass(frozen=True)
class DNSquared:
    """Minimized truncated distance with its linear-algebra diagnostics.

    d2 is d2_raw clipped at zero; d2_raw keeps the (possibly slightly
    negative) unclipped value.  residual is ||G a - b|| of the
    unregularized system evaluated at the ridge solution.
    """

    size: int
    d2: float
    d2_raw: float
    residual: float
    min_eigenvalue: float
    ridge: float
    norm_one: float
    coefficients: np.ndarray


def solve_dN2(system: GramSystem | int, ridge: float = 1.0e-10,
              spec: QuadratureSpec | None = None) -> DNSquared:
    """Minimize the truncated distance over length-size coefficients.

    The normal system is solved with a relative ridge lambda =
    ridge * trace(G)/size by Cholesky factorization of G + lambda I.
    """
    if isinstance(system, int):
        system = build_gram(system, spec)
    G, b = system.gram, system.moments
    lam = ridge * float(np.trace(G)) / system.size
    L = np.linalg.cholesky(G + lam * np.eye(system.size))
    y = np.linalg.solve(L, b)
    a = np.linalg.solve(L.T, y)
    d2_raw = system.norm_one - 2.0 * float(b @ a) + float(a @ (G @ a))
    residual = float(np.linalg.norm(G @ a - b))
    min_eig = float(np.linalg.eigvalsh(G)[0])
    return DNSquared(size=system.size, d2=max(d2_raw, 0.0), d2_raw=d2_raw,
                     residual=residual, min_eigenvalue=min_eig, ridge=lam,
                     norm_one=system.norm_one, coefficients=a)
