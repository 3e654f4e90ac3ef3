"""Moebius sieve and the tapered mollifier Dirichlet polynomial.

The mollifier of length N is

    V_N(s) = sum_{n <= N} (1 - log n / log N) mu(n) n^(-s),

the standard Nyman-Beurling test polynomial: a smoothed and truncated
approximation to 1/zeta(s).  Coefficients are built so that the taper
vanishes exactly at n = N (the ratio log N / log N is evaluated as x/x,
which is 1.0 in IEEE arithmetic, giving a_N = 0.0 with no rounding dust).

Evaluation is vectorized over points: the polynomial keeps its support
(indices with nonzero coefficient, about 6/pi^2 of all n) and computes
sum_n c_n n^(-sigma) e^(-i t log n) by chunked outer products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError

__all__ = ["moebius_sieve", "DirichletPolynomial", "build_VN", "eval_dirichlet"]

_SIEVE_CAP = 100_000_000


def moebius_sieve(limit: int) -> np.ndarray:
    """mu(0), mu(1), ..., mu(limit) as an int8 array; mu(0) is set to 0.

    Linear-memory multiplicative sieve: flip sign once per prime divisor,
    zero out multiples of squares of primes.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if limit > _SIEVE_CAP:
        raise CapacityError(f"sieve limit {limit} exceeds cap {_SIEVE_CAP}")
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    is_comp = np.zeros(limit + 1, dtype=bool)
    for p in range(2, math.isqrt(limit) + 1):
        if not is_comp[p]:
            is_comp[p * p::p] = True
    for p in np.flatnonzero(~is_comp[2:]) + 2:
        mu[p::p] *= -1
        mu[p * p::p * p] = 0
    return mu


@dataclass
class DirichletPolynomial:
    """Finite Dirichlet polynomial sum_{n<=N} c_n n^(-s).

    coefficients[k] is the coefficient of (k+1)^(-s); the support arrays
    (nonzero indices, their logs) are precomputed for batched evaluation.
    """

    coefficients: np.ndarray
    _n: np.ndarray = field(init=False, repr=False)
    _ln: np.ndarray = field(init=False, repr=False)
    _c: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        c = np.asarray(self.coefficients, dtype=float)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("coefficients must be a nonempty 1-d array")
        self.coefficients = c
        idx = np.flatnonzero(c)
        self._n = (idx + 1).astype(float)
        self._ln = np.log(self._n)
        self._c = c[idx]

    @property
    def length(self) -> int:
        return int(self.coefficients.size)

    @property
    def support_size(self) -> int:
        return int(self._c.size)

    def evaluate(self, s: complex) -> complex:
        s = complex(s)
        return complex(np.sum(self._c * np.exp(-s * self._ln)))

    def evaluate_line(self, t: np.ndarray, sigma: float = 0.5,
                      chunk_cells: int = 8_000_000) -> np.ndarray:
        """Values at s = sigma + i t for an array of t."""
        t = np.asarray(t, dtype=float)
        if self._c.size == 0:
            return np.zeros(t.shape, dtype=complex)
        amp = self._c * np.exp(-sigma * self._ln)
        out = np.empty(t.shape, dtype=complex)
        flat = t.reshape(-1)
        rows = max(1, int(chunk_cells // max(self._c.size, 1)))
        for i0 in range(0, flat.size, rows):
            tt = flat[i0:i0 + rows]
            out.reshape(-1)[i0:i0 + rows] = (
                np.exp(-1j * np.outer(tt, self._ln)) @ amp)
        return out


def build_VN(N: int, mu: np.ndarray | None = None) -> DirichletPolynomial:
    """The mollifier V_N; N >= 2 (the taper is undefined at N = 1).

    mu may pass in a precomputed sieve (of length >= N + 1) to avoid
    repeated sieving in sweeps over N.
    """
    if N < 2:
        raise ValueError("mollifier length N must be >= 2")
    if mu is None:
        mu = moebius_sieve(N)
    elif len(mu) < N + 1:
        raise ValueError("supplied Moebius table is shorter than N + 1")
    ln = np.log(np.arange(1, N + 1, dtype=float))
    taper = 1.0 - ln / ln[-1]
    coeff = taper * np.asarray(mu[1:N + 1], dtype=float)
    return DirichletPolynomial(coeff)


def eval_dirichlet(poly: DirichletPolynomial, s: complex) -> complex:
    """Scalar evaluation of a Dirichlet polynomial at s."""
    return poly.evaluate(s)
