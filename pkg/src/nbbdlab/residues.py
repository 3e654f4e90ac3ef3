"""Residue terms R_N, the trivial-zero series F_s, and the lemma sums.

Definition (per-zero residue term):

    R_N(rho, s) = Res_{z=rho} N^(z-s) / (F(z) (z-s)^2),

with F the zeta-like function whose zero rho is.  For a simple zero the
residue is the closed form N^(rho-s)/(F'(rho) (rho-s)^2); for higher
multiplicity it is evaluated by a trapezoid rule on a small circle, which
is spectrally accurate for periodic analytic integrands.

The trivial zeros contribute the rapidly convergent series

    F_s(z) = pi z^s sum_{n>=1} (-1)^n (2 pi)^(2n+1) z^(2n)
             / ((2n)! zeta(2n+1) (2n+s)^2),       0 < z < 1,

of size O(N^(-s-2)) at z = 1/N.  Note the conventional prefactor: the
actual residue sum over trivial zeros, sum_n N^(-2n-s) / (zeta'(-2n)
(2n+s)^2) with zeta'(-2n) = (-1)^n (2n)! zeta(2n+1) / (2^(2n+1) pi^(2n)),
equals F_s(1/N) / pi^2 exactly, so the reconstruction identity carries a
1/pi^2 on its trivial term.  (Dropping the 1/pi^2 leaves a residual of
size (1 - 1/pi^2) |F|/log N that no truncation height can remove; the
check below confirms the normalization numerically.)  The decomposition
sums are

    Sigma1(N, s) = (1/log N) sum over on-line zeros (and conjugates) of R_N,
    Sigma2(N, s) = (1/log N) sum over engineered off-line zeros of R_N,

and the reconstruction identity under test is

    V_N(s) = (1/zeta(s)) (1 - (1/log N)(zeta'/zeta)(s))
             + Sigma1(N, s) + (1/(pi^2 log N)) F_s(1/N),

with the zero sum truncated at the table height.  Summation order is
deterministic: ascending ordinate, each zero paired immediately with its
conjugate, accumulated by exact summation.

Sigma2 supports two conventions (see the mode flag): the literal
definition sums only the upper pair {sigma0 +- i gamma0}; the quadruplet
mode adds the reflected pair {1-sigma0 +- i gamma0}, whose terms are
smaller by N^(1-2 sigma0) on the critical line.  Both are exposed;
nothing in this module decides which convention downstream asymptotics
should quote.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CollisionError, PoleError, PrecisionError
from .mollifier import build_VN
from .special_functions import (DEFAULT_PRECISION, odd_zeta_table, zeta,
                                zeta_derivative)
from .zeros import ZeroTable

__all__ = ["residue_RN", "F_series", "sigma1", "sigma1_tail_estimate",
           "sigma2", "DecompositionReport", "lemma23_reconstruct"]

_COLLISION_THRESHOLD = 1.0e-3
_F_MAX_TERMS = 200
_ODD_ZETA = None


def _odd_zeta() -> np.ndarray:
    global _ODD_ZETA
    if _ODD_ZETA is None:
        _ODD_ZETA = odd_zeta_table(_F_MAX_TERMS)
    return _ODD_ZETA


def _contour_residue(f, center: complex, radius: float, points: int) -> complex:
    """(1/2 pi i) closed-contour integral of f around a circle; the
    trapezoid rule on the periodic parametrization converges spectrally."""
    k = np.arange(points)
    w = np.exp(2j * math.pi * k / points)
    zs = center + radius * w
    vals = np.array([f(z) for z in zs], dtype=complex)
    return complex(np.sum(vals * (zs - center)) / points)


def residue_RN(rho: complex, mult: int, s: complex, N: int,
               zeta_like=None, zeta_prime=None,
               contour_points: int = 64,
               contour_radius: float | None = None) -> complex:
    """The residue term R_N(rho, s) for a zero of multiplicity mult.

    mult = 1 uses the closed form N^(rho-s)/(F'(rho)(rho-s)^2), taking
    F'(rho) from zeta_prime when supplied (cached tables), from the
    built-in zeta derivative when zeta_like is the default zeta, and from
    a Cauchy contour for a custom zeta_like.  mult >= 2 integrates
    N^(z-s)/(F(z)(z-s)^2) on a circle of radius < |rho - s|/4; the circle
    must not enclose s or any other zero of F (caller's responsibility,
    radius is validated against s only).
    """
    rho = complex(rho)
    s = complex(s)
    if N < 2:
        raise ValueError("N must be >= 2")
    if mult < 1:
        raise ValueError("multiplicity must be >= 1")
    dist = abs(rho - s)
    if dist < _COLLISION_THRESHOLD:
        raise CollisionError(
            f"|rho - s| = {dist:.2e} below threshold {_COLLISION_THRESHOLD}")
    if mult == 1:
        if zeta_prime is None:
            if zeta_like is None:
                zeta_prime = zeta_derivative(rho, 1)
            else:
                # Cauchy derivative on a small circle around the zero
                r = contour_radius if contour_radius is not None else dist / 8.0
                k = np.arange(contour_points)
                w = np.exp(2j * math.pi * k / contour_points)
                zs = rho + r * w
                vals = np.array([zeta_like(z) for z in zs], dtype=complex)
                zeta_prime = complex(np.sum(vals / (zs - rho)) / contour_points)
        return np.exp((rho - s) * math.log(N)) / (zeta_prime * (rho - s) ** 2)
    F = zeta_like if zeta_like is not None else zeta
    r = contour_radius if contour_radius is not None else dist / 8.0
    if not (0.0 < r < dist / 4.0):
        raise ValueError(f"contour radius {r} must lie in (0, |rho-s|/4)")
    lnN = math.log(N)
    return _contour_residue(
        lambda z: np.exp((z - s) * lnN) / (F(z) * (z - s) ** 2),
        rho, r, contour_points)


def F_series(s: complex, z: float, term_scale=None) -> complex:
    """The trivial-zero series F_s(z) for 0 < z < 1.

    term_scale(n) optionally multiplies term n (used by the counterfactual
    model, whose Laurent data at -2n differs from zeta's by 1/S(-2n)).
    Terms decay factorially; for z <= 1/10 fewer than 25 terms are needed.
    Truncation: |term| < 1e-16 |partial sum|, defensive cap at 200 terms.
    """
    s = complex(s)
    if not (0.0 < z < 1.0):
        raise ValueError("z must lie in (0, 1)")
    odd = _odd_zeta()
    two_pi_z = 2.0 * math.pi * z
    # term n: (-1)^n (2 pi)^(2n+1) z^(2n) / ((2n)! zeta(2n+1) (2n+s)^2);
    # ratio-free accumulation of (2 pi z)^(2n)/(2n)! avoids overflow
    base = 2.0 * math.pi
    partial = 0.0 + 0.0j
    pw = 1.0  # (2 pi z)^(2n) / (2n)! at current n, starting n=0
    sign = 1.0
    for n in range(1, _F_MAX_TERMS + 1):
        pw *= two_pi_z * two_pi_z / ((2 * n - 1) * (2 * n))
        sign = -sign
        denom = s + 2 * n
        if abs(denom) < 1.0e-12:
            raise PoleError(f"F_s has a pole factor at s = {-2 * n}")
        term = sign * base * pw / (odd[n - 1] * denom * denom)
        if term_scale is not None:
            term = term * term_scale(n)
        partial += term
        if abs(term) < 1.0e-16 * max(abs(partial), 1.0e-300):
            break
    else:
        raise PrecisionError("F_series failed to converge within 200 terms")
    return math.pi * np.exp(s * math.log(z)) * partial


def _closed_form_terms(rhos: np.ndarray, primes: np.ndarray, s: complex,
                       N: int) -> np.ndarray:
    lnN = math.log(N)
    d = rhos - s
    return np.exp(d * lnN) / (primes * d * d)


def sigma1(N: int, s: complex, table: ZeroTable) -> complex:
    """(1/log N) sum of R_N over the table's on-line zeros and conjugates.

    Requires cached zeta' values in the table; raises CollisionError when
    s comes within 1e-3 of any zero or conjugate zero.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    s = complex(s)
    if len(table) == 0:
        return 0.0j
    g = table.gammas()
    zp = table.zeta_primes()
    if np.any(zp == 0):
        raise ValueError("table lacks cached zeta' values")
    rho = 0.5 + 1j * g
    dist = np.minimum(np.abs(rho - s), np.abs(rho.conjugate() - s))
    if float(dist.min()) < _COLLISION_THRESHOLD:
        k = int(dist.argmin())
        raise CollisionError(
            f"s within {dist[k]:.2e} of zero ordinate {g[k]:.6f}")
    up = _closed_form_terms(rho, zp, s, N)
    down = _closed_form_terms(rho.conjugate(), zp.conjugate(), s, N)
    mult = table.multiplicities()
    if np.any(mult != 1):
        raise ValueError("sigma1 closed form covers simple zeros only")
    pair = up + down  # ascending gamma, zero paired with its conjugate
    total = complex(math.fsum(pair.real.tolist()),
                    math.fsum(pair.imag.tolist()))
    return total / math.log(N)


def sigma1_tail_estimate(N: int, s: complex, table: ZeroTable) -> float:
    """Heuristic size of the zero-sum tail beyond the table height.

    Term magnitude ~ N^(1/2 - Re s)/(|zeta'(rho)| gamma^2) integrated
    against the zero density log(gamma/2 pi)/(2 pi): the density integral
    equals (log(T/2 pi)+1)/(pi T); the 1/|zeta'| level is estimated from
    the last decile of the table.
    """
    if len(table) == 0:
        return 0.0
    zp = np.abs(table.zeta_primes())
    tail_level = float(np.mean(1.0 / zp[int(0.9 * len(zp)):]))
    T = table.height
    density_tail = (math.log(T / (2.0 * math.pi)) + 1.0) / (math.pi * T)
    return (N ** (0.5 - s.real)) * tail_level * density_tail / math.log(N)


def sigma2(N: int, s: complex, model, mode: str = "quadruplet") -> complex:
    """(1/log N) sum of R_N over the engineered off-line zeros of a model.

    mode 'pair' sums {sigma0 +- i gamma0} (the literal definition);
    'quadruplet' (default) also sums {1-sigma0 +- i gamma0}.
    """
    from .model import model_zeta_prime, quadruplet_zeros
    if N < 2:
        raise ValueError("N must be >= 2")
    s = complex(s)
    zeros = quadruplet_zeros(model, mode)
    total = 0.0j
    lnN = math.log(N)
    for rho in zeros:
        if abs(rho - s) < _COLLISION_THRESHOLD:
            raise CollisionError(f"s within 1e-3 of engineered zero {rho}")
        mp = model_zeta_prime(rho, model)
        total += np.exp((rho - s) * lnN) / (mp * (rho - s) ** 2)
    return total / lnN


@dataclass(frozen=True)
class DecompositionReport:
    """Two-sided evaluation of the reconstruction identity.

    For the true zeta: lhs is the direct V_N(s), rhs the assembled
    decomposition at the given truncation height; direct_term, zero_sum
    and trivial_term are its three pieces.  For a counterfactual model
    (no independent closed form for the mollifier exists) the report is a
    truncation self-consistency check: lhs uses the full table, rhs the
    table truncated to half height; the component fields then describe
    the full-height assembly.
    """

    lhs: complex
    rhs: complex
    truncation_height: float
    error: float
    direct_term: complex
    zero_sum_term: complex
    trivial_term: complex


def lemma23_reconstruct(N: int, s: complex, table: ZeroTable,
                        model=None) -> DecompositionReport:
    """Check V_N(s) against its explicit-formula decomposition.

    Valid for 0 < Re s < 1, s away from zeros (CollisionError otherwise).
    With a model given, performs the self-consistency variant described
    on DecompositionReport.
    """
    s = complex(s)
    if not (0.0 < s.real < 1.0):
        raise ValueError("reconstruction requires 0 < Re s < 1")
    lnN = math.log(N)
    if model is None:
        z = zeta(s, DEFAULT_PRECISION)
        zp = zeta_derivative(s, 1, DEFAULT_PRECISION)
        direct = (1.0 / z) * (1.0 - zp / z / lnN)
        zsum = sigma1(N, s, table)
        # residue-true normalization of the trivial-zero series (module
        # docstring): the series prefactor overcounts by pi^2
        triv = F_series(s, 1.0 / N) / (math.pi ** 2 * lnN)
        lhs = build_VN(N).evaluate(s)
        rhs = direct + zsum + triv
        return DecompositionReport(lhs=lhs, rhs=rhs,
                                   truncation_height=table.height,
                                   error=abs(lhs - rhs), direct_term=direct,
                                   zero_sum_term=zsum, trivial_term=triv)
    from .model import counterfactual_mollifier, model_parts
    lhs = complex(counterfactual_mollifier(N, s, model, table))
    half = table.truncated(table.height / 2.0)
    rhs = complex(counterfactual_mollifier(N, s, model, half))
    direct, zsum, triv = model_parts(N, s, model, table)
    return DecompositionReport(lhs=lhs, rhs=rhs,
                               truncation_height=table.height,
                               error=abs(lhs - rhs), direct_term=direct,
                               zero_sum_term=zsum, trivial_term=triv)
