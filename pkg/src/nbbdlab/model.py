"""Counterfactual zeta with an engineered off-line zero quadruplet.

The model is M(s) = zeta(s) S(s) with the rational swap factor

    S(s) = Q_off(s) / Q_on(s),
    Q_off(s) = ((s - sigma0)^2 + gamma0^2) ((s - 1 + sigma0)^2 + gamma0^2),
    Q_on(s)  = ((s - 1/2)^2 + gamma_a^2) ((s - 1/2)^2 + gamma_b^2),

whose numerator vanishes exactly at the quadruplet sigma0 +- i gamma0,
1 - sigma0 +- i gamma0 and whose denominator cancels the zeros of zeta at
the removed on-line ordinates gamma_a, gamma_b.  Both quartics are monic
with real coefficients and invariant under s -> 1-s, so S(1-s) = S(s),
S(conj s) = conj S(s), and S -> 1 at infinity: M inherits zeta's
functional-equation symmetry and asymptotics, but its non-trivial zero
set is the true one with two on-line pairs removed and the off-line
quadruplet inserted.  Near a removed ordinate the 0/0 cancellation is
evaluated through a first-order expansion of zeta about the removed zero
with the vanishing linear factor of Q_on cancelled analytically.

The main-term integral of the oscillation analysis is

    (1/log^2 N) (1/2 pi i) int_(1/2) T2(s) T2(1-s) M(s) M(1-s) / (s(1-s)) ds,

where T2 is the plain residue sum over the engineered zeros (mode 'pair'
for the upper/lower pair at Re s = sigma0, 'quadruplet' to include the
reflected pair).  The 1/log^2 N written here is the entire normalization:
T2 carries no 1/log N of its own, which keeps the total consistent with
the N^(2 sigma0 - 1)/log^2 N shape being fitted.  On the critical line
s(1-s) = 1/4 + t^2 > 0 and T2(1-s) M(1-s) is the exact complex conjugate
of T2(s) M(s), so the integrand is a nonnegative |.|^2 pairing; both
factors are still evaluated independently and the imaginary residual is
checked against 1e-6 relative.

The full distance integral replaces V_N by the model mollifier A_N^M,
defined pointwise by the decomposition that reduces to V_N when M = zeta:

    A_N^M(s) = (1/M)(1 - (1/log N)(M'/M))
               + (1/log N) sum over zeros of M of R_N(rho, s)
               + (1/log N) F-term,

with the zero sum truncated at the table height and the F-term reusing
zeta's trivial-zero series with the exact rational correction 1/S(-2n).
The individual terms have double poles at each zero of M that cancel in
the sum; the cancellation amplifies the underlying zeta evaluation error
by about 2/(log N |s - rho|^3) near a zero, so pointwise values inside
|s - rho| ~ 1e-3 of an ordinary zero carry relative noise ~1e-4 and grow
cubically worse closer in.  This is harmless under an integral (the
noisy set has negligible measure and the integrand stays bounded in
exact arithmetic) and is therefore not guarded in batch evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import PoleError, PrecisionError
from .quadrature import (IntegralResult, QuadratureSpec, adaptive_panels,
                         tail_mass)
from .special_functions import (DEFAULT_PRECISION, PrecisionSpec, zeta,
                                zeta_derivative, zeta_line)
from .zeros import ZeroTable

__all__ = ["ModelSpec", "default_model", "swap_factor", "model_zeta",
           "model_zeta_prime", "model_zeta_line", "quadruplet_zeros",
           "counterfactual_mollifier", "model_parts", "main_term_integral",
           "full_counterfactual_integral", "FitResult",
           "fit_theorem_constants"]

# Refined first two zero ordinates (defaults for the removed pair)
_GAMMA_1 = 14.134725141734693
_GAMMA_2 = 21.022039638771555

_EXPANSION_RADIUS = 1.0e-4   # switch to the 0/0 expansion inside this
# Handoff radius for vectorized line evaluation: chosen where the
# expansion truncation (~ u^2 |zeta'''/6 zeta'|) and the direct branch's
# amplified zeta noise (~ eps_zeta / (|zeta'| u)) are both ~1e-9 relative,
# minimizing the branch mismatch seen by adaptive quadrature.
_LINE_PATCH_RADIUS = 3.0e-5
# Relative reproducibility of integrands built from the model: dominated
# by the branch handoff above and by zeta-evaluation consistency across
# chunked batches; 2e-8 bounds both with an order of magnitude to spare.
_MODEL_REL_NOISE = 2.0e-8
_POLE_GUARD = 1.0e-8
# Line evaluations feeding the mollifier keep a tight zeta target: near
# an ordinary zero the decomposition's double-pole cancellation amplifies
# zeta error by |s - rho|^(-3)/log N, so every decade here buys a decade
# of usable approach distance.
_LINE_PRECISION = PrecisionSpec(target_abs_error=1.0e-12)
# Criterion-integrand patch radius around tabled ordinates: beyond it the
# rounding of the stored ordinate (5e-10 at nine decimals) perturbs the
# lead/zero-sum cancellation by under ~1e-3 relative; inside it the
# analytic sinc^2 limit is used instead (see full_counterfactual_integral).
_TABLE_ZERO_PATCH = 5.0e-4


@dataclass(frozen=True)
class ModelSpec:
    """Off-line zero configuration: sigma0 in (1/2, 1), gamma0 > 0, and
    the two removed on-line ordinates (must be genuine zero ordinates
    present in whatever table the model is used with)."""

    sigma0: float = 0.75
    gamma0: float = 10.0
    removed_ordinates: tuple[float, float] = (_GAMMA_1, _GAMMA_2)

    def __post_init__(self) -> None:
        if not (0.5 < self.sigma0 < 1.0):
            raise ValueError("sigma0 must lie strictly inside (1/2, 1)")
        if not (self.gamma0 > 0.0):
            raise ValueError("gamma0 must be positive")
        ga, gb = self.removed_ordinates
        if not (0.0 < ga and 0.0 < gb and ga != gb):
            raise ValueError("removed ordinates must be distinct and positive")
        if min(abs(self.gamma0 - ga), abs(self.gamma0 - gb)) < 1.0e-6:
            raise ValueError("gamma0 must differ from the removed ordinates")

    @property
    def rho0(self) -> complex:
        return complex(self.sigma0, self.gamma0)


def default_model() -> ModelSpec:
    return ModelSpec()


def quadruplet_zeros(model: ModelSpec, mode: str = "quadruplet") -> list[complex]:
    """Engineered zeros in deterministic order: upper pair first."""
    if mode not in ("pair", "quadruplet"):
        raise ValueError("mode must be 'pair' or 'quadruplet'")
    s0, g0 = model.sigma0, model.gamma0
    zeros = [complex(s0, g0), complex(s0, -g0)]
    if mode == "quadruplet":
        zeros += [complex(1.0 - s0, g0), complex(1.0 - s0, -g0)]
    return zeros


def _quartics(s, model: ModelSpec, order: int = 0):
    """Q_off, Q_on and (order>=1) their derivatives, vectorized in s."""
    s0, g0 = model.sigma0, model.gamma0
    ga, gb = model.removed_ordinates
    a1 = (s - s0) ** 2 + g0 * g0
    a2 = (s - 1.0 + s0) ** 2 + g0 * g0
    b1 = (s - 0.5) ** 2 + ga * ga
    b2 = (s - 0.5) ** 2 + gb * gb
    q_off = a1 * a2
    q_on = b1 * b2
    if order == 0:
        return q_off, q_on
    d_off = 2.0 * (s - s0) * a2 + a1 * 2.0 * (s - 1.0 + s0)
    d_on = 2.0 * (s - 0.5) * (b1 + b2)
    return q_off, q_on, d_off, d_on


def swap_factor(s: complex, model: ModelSpec) -> complex:
    """S(s) = Q_off/Q_on; PoleError within 1e-8 of a Q_on root."""
    s = complex(s)
    for g in model.removed_ordinates:
        if abs(s - complex(0.5, g)) < _POLE_GUARD or \
           abs(s - complex(0.5, -g)) < _POLE_GUARD:
            raise PoleError(f"swap factor pole at 1/2 +- {g}i")
    q_off, q_on = _quartics(s, model)
    return q_off / q_on


@lru_cache(maxsize=32)
def _removed_zero_data(gamma_r: float) -> tuple[complex, complex]:
    """zeta'(rho) and zeta''(rho) at a removed zero rho = 1/2 + i gamma_r."""
    rho = complex(0.5, gamma_r)
    return (zeta_derivative(rho, 1, DEFAULT_PRECISION),
            zeta_derivative(rho, 2, DEFAULT_PRECISION))


def _nearest_removed(s: complex, model: ModelSpec):
    """The removed zero nearest to s, or None when outside the expansion
    radius."""
    best, best_d = None, _EXPANSION_RADIUS
    for g in model.removed_ordinates:
        for rho in (complex(0.5, g), complex(0.5, -g)):
            d = abs(s - rho)
            if d < best_d:
                best, best_d = rho, d
    return best


def _expansion_eval(s: complex, rho_r: complex, model: ModelSpec,
                    want_derivative: bool):
    """M (and M') near a removed zero: the vanishing linear factor of
    Q_on is cancelled against the zeta expansion analytically."""
    ga, gb = model.removed_ordinates
    g_r = abs(rho_r.imag)
    g_other = gb if abs(g_r - ga) < abs(g_r - gb) else ga
    zp, zpp = _removed_zero_data(g_r)
    if rho_r.imag < 0:
        zp, zpp = zp.conjugate(), zpp.conjugate()
    u = s - rho_r
    g = zp + 0.5 * zpp * u                    # zeta(s)/(s - rho_r) to O(u^2)
    q_off = ((s - model.sigma0) ** 2 + model.gamma0 ** 2) * \
            ((s - 1.0 + model.sigma0) ** 2 + model.gamma0 ** 2)
    rest = (s - rho_r.conjugate()) * ((s - 0.5) ** 2 + g_other ** 2)
    m = g * q_off / rest
    if not want_derivative:
        return m, None
    d_off = 2.0 * (s - model.sigma0) * ((s - 1.0 + model.sigma0) ** 2 + model.gamma0 ** 2) \
        + ((s - model.sigma0) ** 2 + model.gamma0 ** 2) * 2.0 * (s - 1.0 + model.sigma0)
    d_rest = ((s - 0.5) ** 2 + g_other ** 2) + \
        (s - rho_r.conjugate()) * 2.0 * (s - 0.5)
    mp = (0.5 * zpp * q_off + g * d_off) / rest - g * q_off * d_rest / rest ** 2
    return m, mp


def model_zeta(s: complex, model: ModelSpec,
               prec: PrecisionSpec = DEFAULT_PRECISION) -> complex:
    """M(s) = zeta(s) S(s), with the removed -ordinate 0/0 evaluated by
    first-order expansion inside |s - rho| < 1e-4."""
    s = complex(s)
    near = _nearest_removed(s, model)
    if near is not None:
        return complex(_expansion_eval(s, near, model, False)[0])
    q_off, q_on = _quartics(s, model)
    return zeta(s, prec) * q_off / q_on


def model_zeta_prime(s: complex, model: ModelSpec,
                     prec: PrecisionSpec = DEFAULT_PRECISION) -> complex:
    """M'(s) by the product rule; expansion branch near removed zeros.

    At an engineered zero Q_off vanishes identically (the arithmetic is
    exact for representable sigma0, gamma0), so M' reduces to
    zeta(rho) Q_off'(rho)/Q_on(rho) automatically.
    """
    s = complex(s)
    near = _nearest_removed(s, model)
    if near is not None:
        return complex(_expansion_eval(s, near, model, True)[1])
    q_off, q_on, d_off, d_on = _quartics(s, model, order=1)
    z = zeta(s, prec)
    zp = zeta_derivative(s, 1, prec)
    sw = q_off / q_on
    swp = (d_off * q_on - q_off * d_on) / (q_on * q_on)
    return zp * sw + z * swp


def model_zeta_line(t: np.ndarray, model: ModelSpec, max_order: int = 0,
                    prec: PrecisionSpec = _LINE_PRECISION,
                    sigma: float = 0.5) -> list[np.ndarray]:
    """Vectorized M (and M') at s = sigma + i t; points that fall inside
    the expansion radius of a removed zero are patched individually."""
    t = np.asarray(t, dtype=float)
    s = sigma + 1j * t
    vals = zeta_line(t, sigma, max_order, prec)
    # A node exactly on a Q_on root divides by zero here; every such node
    # lies inside the expansion radius and is overwritten below.
    with np.errstate(divide="ignore", invalid="ignore"):
        if max_order == 0:
            q_off, q_on = _quartics(s, model)
            out = [vals[0] * q_off / q_on]
        else:
            q_off, q_on, d_off, d_on = _quartics(s, model, order=1)
            sw = q_off / q_on
            swp = (d_off * q_on - q_off * d_on) / (q_on * q_on)
            out = [vals[0] * sw, vals[1] * sw + vals[0] * swp]
    ga, gb = model.removed_ordinates
    if abs(sigma - 0.5) < _LINE_PATCH_RADIUS:
        near = np.zeros(t.shape, dtype=bool)
        for g in (ga, gb):
            near |= np.abs(np.abs(t) - g) ** 2 + (sigma - 0.5) ** 2 \
                < _LINE_PATCH_RADIUS ** 2
        for k in np.flatnonzero(near):
            sk = complex(s.reshape(-1)[k])
            rho = _nearest_removed(sk, model)
            m, mp = _expansion_eval(sk, rho, model, max_order >= 1)
            out[0].reshape(-1)[k] = m
            if max_order >= 1:
                out[1].reshape(-1)[k] = mp
    return out


@lru_cache(maxsize=32)
def _quadruplet_data(model: ModelSpec) -> tuple[tuple[complex, complex], ...]:
    """(zero, M'(zero)) for the four engineered zeros."""
    return tuple((rho, model_zeta_prime(rho, model))
                 for rho in quadruplet_zeros(model, "quadruplet"))


def _engineered_terms(model: ModelSpec, mode: str):
    data = _quadruplet_data(model)
    return data[:2] if mode == "pair" else data


def _match_removed(model: ModelSpec, table: ZeroTable) -> np.ndarray:
    """Boolean mask of table entries that are the removed ordinates."""
    g = table.gammas()
    mask = np.zeros(g.size, dtype=bool)
    for gr in model.removed_ordinates:
        d = np.abs(g - gr)
        k = int(d.argmin()) if g.size else -1
        if k < 0 or d[k] > 1.0e-6:
            raise ValueError(
                f"removed ordinate {gr} not found in the zero table")
        mask[k] = True
    if np.any(np.abs(g - model.gamma0) < 1.0e-6):
        raise ValueError("gamma0 collides with a table ordinate")
    return mask


def _mollifier_zero_sum(N: int, s: np.ndarray, model: ModelSpec,
                        table: ZeroTable) -> np.ndarray:
    """sum of R_N over all zeros of M (table minus removed, conjugates,
    plus quadruplet), vectorized over s; NOT divided by log N."""
    lnN = math.log(N)
    removed = _match_removed(model, table)
    g = table.gammas()[~removed]
    zp = table.zeta_primes()[~removed]
    rho_up = 0.5 + 1j * g
    # M' at surviving on-line zeros: zeta'(rho) S(rho)
    q_off, q_on = _quartics(rho_up, model)
    mp_up = zp * q_off / q_on
    rhos = [rho_up, rho_up.conjugate()]
    mps = [mp_up, mp_up.conjugate()]
    for rho, mp in _engineered_terms(model, "quadruplet"):
        rhos.append(np.array([rho]))
        mps.append(np.array([mp]))
    rho_all = np.concatenate(rhos)
    coef = np.exp((rho_all - 0.5) * lnN) / np.concatenate(mps)
    out = np.zeros(s.shape, dtype=complex)
    flat_s = s.reshape(-1)
    chunk = max(1, int(4_000_000 // max(rho_all.size, 1)))
    for i0 in range(0, flat_s.size, chunk):
        ss = flat_s[i0:i0 + chunk]
        d = rho_all[None, :] - ss[:, None]
        out.reshape(-1)[i0:i0 + chunk] = \
            (np.exp((0.5 - ss) * lnN)) * ((coef[None, :] / (d * d)).sum(axis=1))
    return out


def _f_term_batch(N: int, s: np.ndarray, model: ModelSpec | None) -> np.ndarray:
    """Residue-true trivial-zero sum at z = 1/N, vectorized over s: the
    conventional series F_s(1/N) divided by pi^2, with the model's exact
    rational 1/S(-2n) correction when a model is given (M'(-2n) =
    zeta'(-2n) S(-2n)); NOT divided by log N."""
    from .residues import _odd_zeta
    z = 1.0 / N
    odd = _odd_zeta()
    two_pi_z = 2.0 * math.pi * z
    partial = np.zeros(s.shape, dtype=complex)
    pw = 1.0
    sign = 1.0
    for n in range(1, 201):
        pw *= two_pi_z * two_pi_z / ((2 * n - 1) * (2 * n))
        sign = -sign
        denom = s + 2 * n
        term = sign * 2.0 * math.pi * pw / (odd[n - 1] * denom * denom)
        if model is not None:
            q_off, q_on = _quartics(-2.0 * n, model)
            term = term * (q_on / q_off)
        partial += term
        if 2.0 * math.pi * pw < 1.0e-22:
            break
    return math.pi * np.exp(s * math.log(z)) * partial / math.pi ** 2


def counterfactual_mollifier(N: int, s, model: ModelSpec,
                             table: ZeroTable):
    """The model mollifier A_N^M(s); reduces to the residue-decomposition
    right side (the lemma23 identity) when S is identically 1.  Accepts
    scalar s or a 1-d array."""
    if N < 2:
        raise ValueError("N must be >= 2")
    scalar = np.isscalar(s) or isinstance(s, complex)
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    lnN = math.log(N)
    if np.all(np.abs(s_arr.real - 0.5) < 1.0e-12) and np.all(s_arr.imag >= 0):
        mv, mp = model_zeta_line(s_arr.imag, model, 1)
    else:
        mv = np.array([model_zeta(complex(x), model) for x in s_arr])
        mp = np.array([model_zeta_prime(complex(x), model) for x in s_arr])
    lead = (1.0 / mv) * (1.0 - mp / (mv * lnN))
    zsum = _mollifier_zero_sum(N, s_arr, model, table) / lnN
    f = _f_term_batch(N, s_arr, model) / lnN
    out = lead + zsum + f
    return complex(out[0]) if scalar else out


def model_parts(N: int, s: complex, model: ModelSpec,
                table: ZeroTable) -> tuple[complex, complex, complex]:
    """The three decomposition components of A_N^M at scalar s."""
    s_arr = np.array([complex(s)])
    mv = model_zeta(complex(s), model)
    mp = model_zeta_prime(complex(s), model)
    lnN = math.log(N)
    lead = (1.0 / mv) * (1.0 - mp / (mv * lnN))
    zsum = complex(_mollifier_zero_sum(N, s_arr, model, table)[0]) / lnN
    f = complex(_f_term_batch(N, s_arr, model)[0]) / lnN
    return lead, zsum, f


def _sigma2_unnormalized(t: np.ndarray, N: int, model: ModelSpec,
                         mode: str, lower_half: bool) -> np.ndarray:
    """sum of R_N over engineered zeros at s = 1/2 + i t (or 1/2 - i t
    when lower_half): no 1/log N factor."""
    lnN = math.log(N)
    s = 0.5 - 1j * t if lower_half else 0.5 + 1j * t
    out = np.zeros(t.shape, dtype=complex)
    for rho, mp in _engineered_terms(model, mode):
        d = rho - s
        out += np.exp((rho - 0.5) * lnN) / (mp * d * d)
    phase = np.exp((0.5 - s) * lnN)
    return out * phase


def main_term_integral(N: int, model: ModelSpec,
                       spec: QuadratureSpec | None = None,
                       mode: str = "quadruplet") -> float:
    """The two-Sigma2-factor sub-product of the distance expansion:

        (1/log^2 N)(1/2 pi) int T2(1/2+it) M(1/2+it)
                                T2(1/2-it) M(1/2-it) dt/(1/4+t^2).

    Both factors are evaluated independently; the imaginary part must
    come out below 1e-6 relative (PrecisionError otherwise) and the real
    part is returned.
    """
    if N < 10:
        raise ValueError("main_term_integral requires N >= 10")
    if mode not in ("pair", "quadruplet"):
        raise ValueError("mode must be 'pair' or 'quadruplet'")
    spec = spec or QuadratureSpec(t_max=200.0, panel_tolerance=1.0e-12)

    def f(t: np.ndarray) -> np.ndarray:
        upper = _sigma2_unnormalized(t, N, model, mode, False) * \
            model_zeta_line(t, model, 0)[0]
        lower = _sigma2_unnormalized(t, N, model, mode, True) * \
            model_zeta_line(-t, model, 0)[0]
        prod = upper * lower
        return np.stack([prod.real, prod.imag])

    hint = math.log(N) + 3.0
    a, _b, v, panels, evals = adaptive_panels(f, spec, freq_hint=hint,
                                              rel_noise=_MODEL_REL_NOISE)
    main_re = math.fsum(v[0].tolist())
    main_im = math.fsum(v[1].tolist())
    samples = np.linspace(spec.t_max, 2.0 * spec.t_max, 129)
    fv = f(samples)
    mass = tail_mass(spec.t_max)
    total_re = main_re + float(np.max(np.abs(fv[0]))) * mass * \
        math.copysign(1.0, main_re)
    total_im = main_im
    if abs(total_im) > 1.0e-6 * abs(total_re):
        raise PrecisionError(
            f"imaginary residual {total_im:.3e} vs real {total_re:.3e}")
    return total_re / math.log(N) ** 2


def full_counterfactual_integral(N: int, model: ModelSpec,
                                 spec: QuadratureSpec | None = None,
                                 table: ZeroTable | None = None) -> IntegralResult:
    """(1/2 pi) int |1 - M(1/2+it) A_N^M(1/2+it)|^2 dt/(1/4+t^2), with
    the standard conservative tail term; nonnegative by construction."""
    if N < 10:
        raise ValueError("full_counterfactual_integral requires N >= 10")
    if table is None:
        from .zeros import load_bundled_table
        table = load_bundled_table()
    # The mollifier below is a residue sum over tabled zeros, so it is
    # only faithful for t below the table height: past it, 1/M keeps its
    # poles at the un-tabled zeros while the compensating zero-sum terms
    # are absent, and |1 - M A| genuinely grows like 1/(|t - gamma| log N)
    # near each one.  The sup-tail scan reaches 2 t_max, hence the cap.
    t_cap = 0.5 * table.height
    if spec is None:
        spec = QuadratureSpec(t_max=min(max(200.0, 2.0 * N), t_cap),
                              panel_tolerance=1.0e-10)
    elif 2.0 * spec.t_max > table.height:
        raise ValueError(
            f"t_max={spec.t_max:g} too large for this zero table: the "
            f"sup-tail scan reaches 2 t_max, which must stay below the "
            f"table height {table.height:g}")
    lnN = math.log(N)
    removed = _match_removed(model, table)
    g = table.gammas()[~removed]
    zp = table.zeta_primes()[~removed]
    rho_up = 0.5 + 1j * g
    q_off, q_on = _quartics(rho_up, model)
    mp_up = zp * q_off / q_on
    rho_all = np.concatenate([rho_up, rho_up.conjugate()] +
                             [np.array([r]) for r, _ in _engineered_terms(model, "quadruplet")])
    mp_all = np.concatenate([mp_up, mp_up.conjugate()] +
                            [np.array([m]) for _, m in _engineered_terms(model, "quadruplet")])
    coef = np.exp((rho_all - 0.5) * lnN) / mp_all

    def f(t: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            mv, mp = model_zeta_line(t, model, 1)
            lead = (1.0 / mv) * (1.0 - mp / (mv * lnN))
            zsum = np.empty(t.size, dtype=complex)
            chunk = max(1, int(8_000_000 // max(rho_all.size, 1)))
            for i0 in range(0, t.size, chunk):
                tt = t[i0:i0 + chunk]
                d = rho_all[None, :] - (0.5 + 1j * tt)[:, None]
                zsum[i0:i0 + chunk] = (coef[None, :] / (d * d)).sum(axis=1)
            zsum *= np.exp(-1j * t * lnN) / lnN
            a_m = lead + zsum + _f_term_batch(N, 0.5 + 1j * t, model) / lnN
            r = 1.0 - mv * a_m
            vals = (r * r.conjugate()).real
        # Within _TABLE_ZERO_PATCH of a tabled ordinate the double poles of
        # lead and zsum cancel only up to the table's rounding (an error
        # amplified like u^-2 after the M factor), so the computed value is
        # replaced by the analytic limit: on the line, 1 - M A ->
        # (1 - N^(-i u))/(i u log N) for u = t - gamma, whose squared
        # modulus is sinc^2(u log N / 2); exact at the ordinate, O(u)
        # accurate at the patch boundary.
        if g.size:
            idx = np.searchsorted(g, t)
            d_left = np.abs(t - g[np.clip(idx - 1, 0, g.size - 1)])
            d_right = np.abs(t - g[np.clip(idx, 0, g.size - 1)])
            du = np.minimum(d_left, d_right)
            near = du < _TABLE_ZERO_PATCH
            if np.any(near):
                half = 0.5 * du[near] * lnN
                vals[near] = np.sinc(half / math.pi) ** 2
        return vals

    hint = lnN + max(0.5 * math.log(spec.t_max / (2 * math.pi)), 0.0) + 1.0
    a, _b, v, panels, evals = adaptive_panels(f, spec, freq_hint=hint,
                                              rel_noise=_MODEL_REL_NOISE)
    main = math.fsum(v[0].tolist())
    samples = np.linspace(spec.t_max, 2.0 * spec.t_max, 129)
    sup = float(np.max(np.abs(f(samples))))
    tail = sup * tail_mass(spec.t_max)
    return IntegralResult(value=main + tail, main_part=main, tail_part=tail,
                          tail_sup=sup, panels=panels,
                          evaluations=evals + samples.size, t_max=spec.t_max)


@dataclass(frozen=True)
class FitResult:
    """Fitted oscillation constants for the N^(2 sigma0 - 1) law.

    Expected (not enforced) invariants when fitting genuine main-term
    data: B >= 0.95 |A| (nonnegativity of the integral) and frequency
    close to 2 gamma0.
    """

    A: float
    B: float
    frequency: float
    rms_relative_residual: float
    N_grid: tuple[int, ...]


def fit_theorem_constants(values, model: ModelSpec,
                          fit_frequency: bool = False) -> FitResult:
    """Least squares for u(N) = A cos(omega log N) + B on the normalized
    data u = value * log^2 N / N^(2 sigma0 - 1).

    With fit_frequency the frequency is refined by a dense scan within
    +-10% of 2 gamma0 followed by a bounded 1-d minimization; otherwise
    omega = 2 gamma0 exactly.  Requires >= 8 points with log N span
    > pi/gamma0 (one half period).
    """
    pts = [(int(n), float(y)) for n, y in values]
    if len(pts) < 8:
        raise ValueError("need at least 8 grid points")
    n_arr = np.array([p[0] for p in pts], dtype=float)
    y_arr = np.array([p[1] for p in pts], dtype=float)
    ln = np.log(n_arr)
    if ln.max() - ln.min() <= math.pi / model.gamma0:
        raise ValueError("degenerate grid: log N span must exceed pi/gamma0")
    u = y_arr * ln ** 2 / n_arr ** (2.0 * model.sigma0 - 1.0)

    def solve(omega: float):
        X = np.column_stack([np.cos(omega * ln), np.ones_like(ln)])
        beta, *_ = np.linalg.lstsq(X, u, rcond=None)
        r = X @ beta - u
        return beta, float(np.linalg.norm(r))

    omega0 = 2.0 * model.gamma0
    if fit_frequency:
        grid = np.linspace(0.9 * omega0, 1.1 * omega0, 4001)
        ssr = np.array([solve(w)[1] for w in grid])
        k = int(ssr.argmin())
        lo = grid[max(k - 1, 0)]
        hi = grid[min(k + 1, grid.size - 1)]
        res = minimize_scalar(lambda w: solve(w)[1], bounds=(lo, hi),
                              method="bounded",
                              options={"xatol": 1e-10})
        omega = float(res.x)
    else:
        omega = omega0
    beta, rnorm = solve(omega)
    rms_rel = rnorm / float(np.linalg.norm(u))
    return FitResult(A=float(beta[0]), B=float(beta[1]), frequency=omega,
                     rms_relative_residual=rms_rel,
                     N_grid=tuple(int(n) for n in n_arr))
