"""Tests for the counterfactual model: swap factor, mollifier, integrals,
and the oscillation fit."""

from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss
from scipy.special import loggamma

from nbbdlab.errors import PoleError
from nbbdlab.model import (ModelSpec, counterfactual_mollifier, default_model,
                           fit_theorem_constants, full_counterfactual_integral,
                           main_term_integral, model_zeta, model_zeta_line,
                           model_zeta_prime, quadruplet_zeros, swap_factor)
from nbbdlab.quadrature import QuadratureSpec
from nbbdlab.special_functions import zeta, zeta_line
from nbbdlab.zeros import ZeroTable, load_bundled_table

# [DERIVED] M'(rho0) and M'(1 - sigma0 + i gamma0) for the default model,
# frozen from the expansion-branch evaluation cross-checked against a
# Cauchy contour around each engineered zero
MP_RHO0 = -0.008456189660342723 + 0.0014307119881911976j
MP_RHO0_REFLECTED = 0.009629909935370115 + 0.00020895020800824752j
# [DERIVED] frozen main-term values at N = 100 (default quadrature)
U_PAIR_100 = 1.516134
U_QUAD_100 = 1.273026


def test_modelspec_validation():
    with pytest.raises(ValueError):
        ModelSpec(sigma0=0.5)
    with pytest.raises(ValueError):
        ModelSpec(sigma0=1.0)
    with pytest.raises(ValueError):
        ModelSpec(gamma0=0.0)
    with pytest.raises(ValueError):
        ModelSpec(removed_ordinates=(14.1, 14.1))
    with pytest.raises(ValueError):
        ModelSpec(removed_ordinates=(-3.0, 21.0))
    with pytest.raises(ValueError):
        ModelSpec(gamma0=21.022039638771555)
    assert default_model().rho0 == 0.75 + 10.0j


def test_quadruplet_zeros_modes():
    m = default_model()
    assert quadruplet_zeros(m, "pair") == [0.75 + 10j, 0.75 - 10j]
    assert quadruplet_zeros(m, "quadruplet") == [0.75 + 10j, 0.75 - 10j,
                                                 0.25 + 10j, 0.25 - 10j]
    with pytest.raises(ValueError):
        quadruplet_zeros(m, "both")


def test_swap_factor_symmetries():
    # S(1-s) = S(s) and S(conj s) = conj S(s), pointwise to 1e-12
    m = default_model()
    rng = np.random.default_rng(11)
    pts = rng.uniform(0.05, 0.95, 100) + 1j * rng.uniform(-40.0, 40.0, 100)
    for s in pts:
        v = swap_factor(complex(s), m)
        assert abs(swap_factor(1.0 - complex(s), m) - v) <= 1e-12 * abs(v)
        assert abs(swap_factor(complex(s).conjugate(), m)
                   - v.conjugate()) <= 1e-12 * abs(v)


def test_swap_factor_limits_and_poles():
    m = default_model()
    assert swap_factor(2.0, m).imag == 0.0
    assert abs(swap_factor(1.0e6, m) - 1.0) < 1e-4
    with pytest.raises(PoleError):
        swap_factor(complex(0.5, m.removed_ordinates[0]) + 1e-9, m)


def test_model_vanishes_at_engineered_zeros():
    m = default_model()
    for rho in quadruplet_zeros(m, "quadruplet"):
        assert abs(model_zeta(rho, m)) < 1e-8


def test_model_alive_at_removed_ordinates():
    # the swap factor cancels zeta's zero: |M| is order one there
    m = default_model()
    for g in m.removed_ordinates:
        assert abs(model_zeta(complex(0.5, g), m)) > 1e-4


def test_lambda_functional_equation():
    # Lambda_M(s) = pi^(-s/2) Gamma(s/2) M(s) must equal Lambda_M(1-s):
    # zeta's completed equation plus the exact S(1-s) = S(s) symmetry.
    m = default_model()
    rng = np.random.default_rng(23)
    pts = rng.uniform(0.1, 0.9, 20) + 1j * rng.uniform(0.5, 30.0, 20)

    def completed(s: complex) -> complex:
        return np.exp(loggamma(s / 2.0) - 0.5 * s * math.log(math.pi)) \
            * model_zeta(s, m)

    for s in pts:
        a = completed(complex(s))
        b = completed(1.0 - complex(s))
        assert abs(a - b) <= 1e-6 * abs(a)


def test_model_zeta_prime_frozen_values():
    m = default_model()
    got = model_zeta_prime(m.rho0, m)
    assert abs(got - MP_RHO0) < 1e-9 * abs(MP_RHO0)
    got_r = model_zeta_prime(0.25 + 10.0j, m)
    assert abs(got_r - MP_RHO0_REFLECTED) < 1e-9 * abs(MP_RHO0_REFLECTED)


def test_expansion_branch_continuity():
    # crossing the 1e-4 expansion radius must not jump beyond the branch
    # mismatch budget (~2e-7 relative, measured)
    m = default_model()
    rho_r = complex(0.5, m.removed_ordinates[0])
    for phi in (0.3, 1.2, 2.5):
        w = np.exp(1j * phi)
        inner = model_zeta(rho_r + 0.999e-4 * w, m)
        outer = model_zeta(rho_r + 1.001e-4 * w, m)
        assert abs(inner - outer) < 1e-5 * abs(outer)


def test_line_evaluator_matches_scalar():
    m = default_model()
    for t in (37.0, m.removed_ordinates[0] + 2.0e-5):
        lv = model_zeta_line(np.array([t]), m)[0][0]
        sv = model_zeta(complex(0.5, t), m)
        assert abs(lv - sv) < 1e-9 * abs(sv)


def test_mollifier_batch_matches_scalar():
    m = default_model()
    table = load_bundled_table()
    pts = np.array([0.45 + 3.0j, 0.6 + 7.5j, 0.3 + 18.0j])
    batch = counterfactual_mollifier(100, pts, m, table)
    for k, s in enumerate(pts):
        assert abs(batch[k] - counterfactual_mollifier(100, complex(s), m,
                                                       table)) < 1e-12
    with pytest.raises(ValueError):
        counterfactual_mollifier(1, 0.45 + 3.0j, m, table)


def test_mollifier_table_requirements():
    m = default_model()
    incomplete = ZeroTable.from_ordinates(np.array([25.010857580145688]))
    with pytest.raises(ValueError):
        counterfactual_mollifier(100, 0.45 + 3.0j, m, incomplete)
    colliding = ModelSpec(gamma0=25.010857580145688)
    with pytest.raises(ValueError):
        counterfactual_mollifier(100, 0.45 + 3.0j, colliding,
                                 load_bundled_table())


def test_main_term_frozen_values():
    m = default_model()
    for mode, pin in (("pair", U_PAIR_100), ("quadruplet", U_QUAD_100)):
        got = main_term_integral(100, m, mode=mode)
        u = got * math.log(100.0) ** 2 / 100.0 ** (2 * m.sigma0 - 1)
        assert abs(u - pin) < 2e-5


def test_main_term_against_independent_oracle():
    # Rebuild the integrand from scratch: explicit quartics, engineered
    # residues with M'(rho) = zeta(rho) S'(rho), composite Gauss-Legendre
    # on [0, 200] (the tail term in the library value is ~5e-7 relative).
    m = default_model()
    s0, g0 = m.sigma0, m.gamma0
    ga, gb = m.removed_ordinates
    N, lnN = 100, math.log(100.0)

    def q_off(s):
        return ((s - s0) ** 2 + g0 * g0) * ((s - 1 + s0) ** 2 + g0 * g0)

    def q_on(s):
        return ((s - 0.5) ** 2 + ga * ga) * ((s - 0.5) ** 2 + gb * gb)

    def s_prime(s):
        d_off = (2 * (s - s0) * ((s - 1 + s0) ** 2 + g0 * g0)
                 + ((s - s0) ** 2 + g0 * g0) * 2 * (s - 1 + s0))
        d_on = 2 * (s - 0.5) * (((s - 0.5) ** 2 + ga * ga)
                                + ((s - 0.5) ** 2 + gb * gb))
        return (d_off * q_on(s) - q_off(s) * d_on) / q_on(s) ** 2

    zeros = [complex(s0, g0), complex(s0, -g0),
             complex(1 - s0, g0), complex(1 - s0, -g0)]
    primes = [zeta(r) * s_prime(r) for r in zeros]

    nodes, weights = leggauss(12)
    starts = np.arange(0.0, 200.0, 0.5)
    tt = np.concatenate([0.25 * nodes + a + 0.25 for a in starts])
    ww = np.tile(0.25 * weights, starts.size)
    m_up = zeta_line(tt, 0.5, 0)[0] * q_off(0.5 + 1j * tt) / q_on(0.5 + 1j * tt)
    u_sum = np.zeros(tt.size, dtype=complex)
    for r, d in zip(zeros, primes):
        u_sum += np.exp((r - (0.5 + 1j * tt)) * lnN) / (d * (r - (0.5 + 1j * tt)) ** 2)
    oracle = float(np.sum(np.abs(u_sum * m_up) ** 2 * ww
                          / (math.pi * (0.25 + tt * tt)))) / lnN ** 2
    got = main_term_integral(N, m, mode="quadruplet")
    assert abs(got - oracle) / oracle < 2e-6


def test_main_term_validation():
    m = default_model()
    with pytest.raises(ValueError):
        main_term_integral(5, m)
    with pytest.raises(ValueError):
        main_term_integral(100, m, mode="triplet")


def test_full_integral_brackets_main_term():
    m = default_model()
    res = full_counterfactual_integral(100, m)
    main = main_term_integral(100, m, mode="quadruplet")
    assert res.value > 0
    assert res.value == res.main_part + res.tail_part
    assert 0.5 < res.value / main < 2.0
    with pytest.raises(ValueError):
        full_counterfactual_integral(100, m,
                                     spec=QuadratureSpec(t_max=6000.0))
    with pytest.raises(ValueError):
        full_counterfactual_integral(5, m)


def _synthetic_values(model: ModelSpec, A: float, B: float,
                      noise: float = 0.0, seed: int = 0):
    grid = np.unique(np.geomspace(100, 100_000, 48).astype(int))
    rng = np.random.default_rng(seed)
    out = []
    for n in grid:
        ln = math.log(n)
        u = A * math.cos(2.0 * model.gamma0 * ln) + B
        y = u * n ** (2 * model.sigma0 - 1) / ln ** 2
        out.append((int(n), y * (1.0 + noise * rng.normal())))
    return out


def test_fit_recovers_exact_synthetic_data():
    m = default_model()
    fit = fit_theorem_constants(_synthetic_values(m, 1.2, 1.5), m)
    assert abs(fit.A - 1.2) < 1e-10
    assert abs(fit.B - 1.5) < 1e-10
    assert fit.frequency == 2.0 * m.gamma0
    assert fit.rms_relative_residual < 1e-12


def test_fit_free_frequency_recovers_2gamma0():
    m = default_model()
    fit = fit_theorem_constants(_synthetic_values(m, 1.2, 1.5, noise=0.01),
                                m, fit_frequency=True)
    assert abs(fit.frequency - 2.0 * m.gamma0) / (2.0 * m.gamma0) < 0.01
    assert fit.rms_relative_residual < 0.02
    assert abs(fit.A - 1.2) < 0.1
    assert abs(fit.B - 1.5) < 0.1


def test_fit_rejects_degenerate_grids():
    m = default_model()
    with pytest.raises(ValueError):
        fit_theorem_constants([(100 + k, 1.0) for k in range(4)], m)
    # 8 points but log N span below pi/gamma0
    narrow = [(100 + 3 * k, 1.0) for k in range(8)]
    with pytest.raises(ValueError):
        fit_theorem_constants(narrow, m)
