"""Zero-ordinate tables and the zero-sum constants built from them.

A table stores ordinates gamma of non-trivial zeros rho = 1/2 + i gamma
(positive half; conjugates are accounted for by factors of 2 in the sums),
each with a multiplicity (1 in practice) and the cached derivative
zeta'(rho) needed by residue sums and the hypothesis diagnostic.

Ordinates are located and polished through the Hardy function

    Z(t) = Re[ e^(i theta(t)) zeta(1/2 + i t) ],
    theta(t) = Im log Gamma(1/4 + i t/2) - (t/2) log pi,

which is real with |Z(t)| = |zeta(1/2+it)|, so simple zeros appear as sign
changes and bisection converges unconditionally inside a bracketing
window.  Close pairs (Lehmer-like, gaps well under the scan step) are
caught by rescanning any suspiciously wide gap at an eight-fold finer
step before declaring a scan complete.

Zero-count sanity uses the exact theta-based estimate
N(T) ~ theta(T)/pi + 1 and the Riemann-von Mangoldt main term
(T/2 pi) log(T/(2 pi e)) + 7/8.

The zero-sum constant of interest is

    sum over rho of m(rho)/|rho|^2 = 2 + gamma_Euler - log 4 pi,

approximated by the table sum 2 m/(1/4+gamma^2) plus the density-based
tail correction (log(T/2 pi) + 1)/(pi T) beyond the table height T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np
from scipy.special import loggamma as _loggamma

from .errors import RefinementError, ZeroTableParseError
from .special_functions import PrecisionSpec, zeta_line

__all__ = [
    "ZeroEntry", "ZeroTable", "load_zero_table", "bundled_table_path",
    "load_bundled_table", "write_zero_table", "theta", "hardy_z",
    "zero_count_estimate", "rvm_estimate", "scan_zeros", "refine_ordinates",
    "ZeroSumResult", "zero_sum_constant", "burnol_lower_bound",
    "DiagnosticPoint", "bcf_hypothesis_diagnostic",
    "LindelofDiagnostic", "empirical_lindelof_diagnostic",
]

_LINE_PRECISION = PrecisionSpec(target_abs_error=1.0e-12)
_BISECT_TOL = 1.0e-11
_SCAN_STEP = 0.05


@dataclass(frozen=True)
class ZeroEntry:
    """One non-trivial zero: ordinate, multiplicity, cached zeta'(rho)."""

    ordinate: float
    multiplicity: int = 1
    zeta_prime: complex = 0.0j


@dataclass(frozen=True)
class ZeroTable:
    """Strictly increasing zero entries up to height T = max ordinate."""

    entries: tuple[ZeroEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def height(self) -> float:
        return self.entries[-1].ordinate if self.entries else 0.0

    def gammas(self) -> np.ndarray:
        return np.array([e.ordinate for e in self.entries], dtype=float)

    def multiplicities(self) -> np.ndarray:
        return np.array([e.multiplicity for e in self.entries], dtype=float)

    def zeta_primes(self) -> np.ndarray:
        return np.array([e.zeta_prime for e in self.entries], dtype=complex)

    def truncated(self, height: float) -> "ZeroTable":
        return ZeroTable(tuple(e for e in self.entries if e.ordinate <= height))

    @staticmethod
    def from_ordinates(gammas: np.ndarray,
                       multiplicities: np.ndarray | None = None,
                       cache_zeta_prime: bool = True) -> "ZeroTable":
        gammas = np.asarray(gammas, dtype=float)
        if gammas.size and np.any(np.diff(gammas) <= 0):
            raise ValueError("ordinates must be strictly increasing")
        if multiplicities is None:
            mult = np.ones(gammas.size, dtype=int)
        else:
            mult = np.asarray(multiplicities, dtype=int)
            if mult.shape != gammas.shape or np.any(mult < 1):
                raise ValueError("multiplicities must align with ordinates and be >= 1")
        if cache_zeta_prime and gammas.size:
            zp = zeta_line(gammas, 0.5, 1, _LINE_PRECISION)[1]
        else:
            zp = np.zeros(gammas.size, dtype=complex)
        return ZeroTable(tuple(
            ZeroEntry(float(g), int(m), complex(d))
            for g, m, d in zip(gammas, mult, zp)))


def theta(t: np.ndarray) -> np.ndarray:
    """Riemann-Siegel theta: Im log Gamma(1/4 + it/2) - (t/2) log pi."""
    t = np.asarray(t, dtype=float)
    return _loggamma(0.25 + 0.5j * t).imag - 0.5 * t * math.log(math.pi)


def hardy_z(t: np.ndarray) -> np.ndarray:
    """Hardy's real function Z(t) = Re[e^(i theta) zeta(1/2+it)]."""
    t = np.asarray(t, dtype=float)
    z = zeta_line(t, 0.5, 0, _LINE_PRECISION)[0]
    return (np.exp(1j * theta(t)) * z).real


def zero_count_estimate(T: float) -> float:
    """Smooth zero count N(T) ~ theta(T)/pi + 1 (error |S(T)| ~ O(1))."""
    return float(theta(np.array([T]))[0]) / math.pi + 1.0


def rvm_estimate(T: float) -> float:
    """Riemann-von Mangoldt main term (T/2 pi) log(T/(2 pi e)) + 7/8."""
    x = T / (2.0 * math.pi)
    return x * math.log(x / math.e) + 7.0 / 8.0


def _bisect_brackets(lo: np.ndarray, hi: np.ndarray,
                     tol: float = _BISECT_TOL) -> np.ndarray:
    """Vectorized bisection of Z on sign-changing brackets."""
    zlo = hardy_z(lo)
    zhi = hardy_z(hi)
    bad = np.sign(zlo) * np.sign(zhi) > 0
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise RefinementError(
            f"no sign change of Z in [{lo[k]:.6f}, {hi[k]:.6f}]")
    lo = lo.astype(float).copy()
    hi = hi.astype(float).copy()
    slo = np.sign(zlo)
    for _ in range(64):
        if np.all(hi - lo < tol):
            break
        mid = 0.5 * (lo + hi)
        sm = np.sign(hardy_z(mid))
        left = sm * slo <= 0
        hi = np.where(left, mid, hi)
        keep_lo = ~left
        lo = np.where(keep_lo, mid, lo)
        slo = np.where(keep_lo, sm, slo)
    return 0.5 * (lo + hi)


def _sign_change_brackets(grid: np.ndarray, zvals: np.ndarray):
    s = np.sign(zvals)
    flip = s[:-1] * s[1:] < 0
    return grid[:-1][flip], grid[1:][flip]


def scan_zeros(t_min: float, t_max: float, step: float = _SCAN_STEP,
               rescan_anomalies: bool = True) -> np.ndarray:
    """Locate and refine all ordinates in [t_min, t_max].

    A uniform scan at the given step collects sign changes of Z; gaps much
    wider than the local mean spacing 2 pi / log(t/2 pi) are rescanned at
    step/8 to catch close pairs that hide between grid points.
    """
    if not (0.0 <= t_min < t_max):
        raise ValueError("need 0 <= t_min < t_max")
    grid = np.arange(t_min, t_max + step, step)
    zv = hardy_z(grid)
    lo, hi = _sign_change_brackets(grid, zv)
    if rescan_anomalies and lo.size >= 2:
        mids = 0.5 * (lo + hi)
        gaps = np.diff(mids)
        local_mean = 2.0 * math.pi / np.log(np.maximum(mids[1:], 7.0)
                                            / (2.0 * math.pi))
        wide = gaps > 1.6 * local_mean
        extra_lo, extra_hi = [], []
        for k in np.flatnonzero(wide):
            # The fine grid must end exactly at lo[k + 1]: overshooting
            # would re-detect the next bracket's zero as a duplicate.
            n_fine = max(int(math.ceil((lo[k + 1] - hi[k]) / (step / 8.0))), 1)
            fine = np.linspace(hi[k], lo[k + 1], n_fine + 1)
            fl, fh = _sign_change_brackets(fine, hardy_z(fine))
            extra_lo.append(fl)
            extra_hi.append(fh)
        if extra_lo:
            lo = np.concatenate([lo] + extra_lo)
            hi = np.concatenate([hi] + extra_hi)
            order = np.argsort(lo, kind="stable")
            lo, hi = lo[order], hi[order]
    if lo.size == 0:
        return np.empty(0)
    roots = _bisect_brackets(lo, hi)
    # Safety net against pathological bracket-edge coincidences; genuine
    # neighbors in this range are never closer than ~1e-2.
    if roots.size >= 2:
        keep = np.concatenate([[True], np.diff(roots) > 1.0e-8])
        roots = roots[keep]
    return roots


def refine_ordinates(gammas: np.ndarray, window: float = _SCAN_STEP,
                     tol: float = _BISECT_TOL) -> np.ndarray:
    """Polish approximate ordinates by bisection on Z.

    The bracketing half-width is min(window, 0.45 * nearest neighbor gap)
    per ordinate, so brackets of adjacent zeros never overlap.
    """
    gammas = np.asarray(gammas, dtype=float)
    if gammas.size == 0:
        return gammas.copy()
    if gammas.size == 1:
        w = np.array([window])
    else:
        gap = np.diff(gammas)
        left = np.concatenate([[np.inf], gap])
        right = np.concatenate([gap, [np.inf]])
        w = np.minimum(window, 0.45 * np.minimum(left, right))
    return _bisect_brackets(gammas - w, gammas + w, tol)


def write_zero_table(path, gammas: np.ndarray, comments: list[str] | None = None,
                     decimals: int = 9) -> None:
    """Write the canonical plain-text format: '#' comments, one ordinate
    per line, fixed decimals, ascending."""
    gammas = np.asarray(gammas, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        for line in comments or []:
            fh.write(f"# {line}\n")
        for g in gammas:
            fh.write(f"{g:.{decimals}f}\n")


def load_zero_table(path, refine: bool = False,
                    cache_zeta_prime: bool = True) -> ZeroTable:
    """Parse a plain-text ordinate file; optionally re-polish each zero.

    Format: UTF-8, one positive decimal per line, strictly ascending;
    lines starting with '#' (and blank lines) are ignored.  With refine,
    every ordinate is bisection-polished on Z and must bracket a sign
    change within +-0.05 (RefinementError otherwise); zeta'(rho) is then
    cached from the line evaluator.
    """
    gammas = []
    with open(path, "r", encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            try:
                val = float(text)
            except ValueError:
                raise ZeroTableParseError(f"not a decimal ordinate: {text!r}", ln)
            if not math.isfinite(val) or val <= 0.0:
                raise ZeroTableParseError(f"ordinate must be finite and > 0: {text!r}", ln)
            if gammas and val <= gammas[-1]:
                raise ZeroTableParseError(
                    f"ordinates must be strictly ascending ({val} after {gammas[-1]})", ln)
            gammas.append(val)
    arr = np.array(gammas, dtype=float)
    if refine and arr.size:
        arr = refine_ordinates(arr)
    return ZeroTable.from_ordinates(arr, cache_zeta_prime=cache_zeta_prime)


def bundled_table_path():
    """Path of the bundled table of the first 10^4 ordinates (9 decimals)."""
    return resources.files("nbbdlab").joinpath("data/zeros_10k.txt")


@lru_cache(maxsize=4)
def load_bundled_table(refine: bool = False,
                       cache_zeta_prime: bool = True) -> ZeroTable:
    """Parse the packaged 10^4-zero table (cached: the zeta' pass over
    ten thousand ordinates is the expensive part)."""
    with resources.as_file(bundled_table_path()) as p:
        return load_zero_table(p, refine=refine, cache_zeta_prime=cache_zeta_prime)


@dataclass(frozen=True)
class ZeroSumResult:
    """Truncated zero sum, its tail correction, and their total."""

    value: float
    bare_sum: float
    tail_correction: float
    height: float
    count: int


def _tail_correction(T: float) -> float:
    return (math.log(T / (2.0 * math.pi)) + 1.0) / (math.pi * T)


def zero_sum_constant(table: ZeroTable) -> ZeroSumResult:
    """sum of 2 m /(1/4+gamma^2) over the table plus the density tail.

    Approximates sum m(rho)/|rho|^2 over all non-trivial zeros, whose
    conjectured value is 2 + gamma_Euler - log 4 pi ~ 0.0461914.
    """
    return _zero_sum(table, squared_multiplicity=False)


def burnol_lower_bound(table: ZeroTable) -> ZeroSumResult:
    """sum of 2 m^2/(1/4+gamma^2) plus tail: the liminf bound on
    d_N^2 log N; coincides with zero_sum_constant when all m = 1."""
    return _zero_sum(table, squared_multiplicity=True)


def _zero_sum(table: ZeroTable, squared_multiplicity: bool) -> ZeroSumResult:
    if len(table) == 0:
        raise ValueError("zero table is empty")
    g = table.gammas()
    m = table.multiplicities()
    if squared_multiplicity:
        m = m * m
    bare = float(math.fsum((2.0 * m / (0.25 + g * g)).tolist()))
    tail = _tail_correction(table.height)
    return ZeroSumResult(value=bare + tail, bare_sum=bare,
                         tail_correction=tail, height=table.height,
                         count=len(table))


@dataclass(frozen=True)
class DiagnosticPoint:
    """Partial sum S(T) = sum_{|Im rho| <= T} 1/|zeta'(rho)|^2 and the
    log-log slope fitted over grid points up to this T (nan if fewer
    than two points are available)."""

    T: float
    partial_sum: float
    fitted_exponent: float


def bcf_hypothesis_diagnostic(table: ZeroTable,
                              T_grid: np.ndarray) -> list[DiagnosticPoint]:
    """Growth diagnostic for the hypothesis sum: reports S(T) and the
    running log-log slope; the hypothesis posits slope <= 3/2 - delta.
    Purely diagnostic; nothing is asserted."""
    if len(table) == 0:
        raise ValueError("zero table is empty")
    T_grid = np.asarray(T_grid, dtype=float)
    if np.any(T_grid > table.height + _SCAN_STEP):
        raise ValueError("T_grid exceeds table height")
    g = table.gammas()
    zp = table.zeta_primes()
    if np.any(zp == 0):
        raise ValueError("table lacks cached zeta' values")
    terms = 2.0 / np.abs(zp) ** 2
    out: list[DiagnosticPoint] = []
    logs_T, logs_S = [], []
    for T in T_grid:
        s = float(np.sum(terms[g <= T]))
        if s > 0.0:
            logs_T.append(math.log(T))
            logs_S.append(math.log(s))
        if len(logs_T) >= 2:
            slope = float(np.polyfit(logs_T, logs_S, 1)[0])
        else:
            slope = float("nan")
        out.append(DiagnosticPoint(T=float(T), partial_sum=s,
                                   fitted_exponent=slope))
    return out


@dataclass(frozen=True)
class LindelofDiagnostic:
    """Log-log slope of the running maximum of |zeta(1/2+it)|."""

    slope: float
    t_values: np.ndarray
    running_max: np.ndarray


def empirical_lindelof_diagnostic(t_grid: np.ndarray | None = None,
                                  samples_per_window: int = 256) -> LindelofDiagnostic:
    """Empirical growth exponent of |zeta| on the critical line.

    Samples |zeta(1/2+it)| densely between consecutive grid heights and
    fits a line to log(running max) versus log t.  Diagnostic only: the
    Lindelof-type input of the asymptotic analysis has no finite check.
    """
    if t_grid is None:
        t_grid = np.geomspace(10.0, 1.0e4, 25)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size < 2 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be increasing with at least 2 points")
    if t_grid[0] < 10.0 or t_grid[-1] > 1.0e4:
        raise ValueError("t_grid must lie within [10, 1e4]")
    maxima = np.empty(t_grid.size - 1)
    for k in range(t_grid.size - 1):
        tt = np.linspace(t_grid[k], t_grid[k + 1], samples_per_window)
        z = zeta_line(tt, 0.5, 0, _LINE_PRECISION)[0]
        maxima[k] = float(np.max(np.abs(z)))
    running = np.maximum.accumulate(maxima)
    slope = float(np.polyfit(np.log(t_grid[1:]), np.log(running), 1)[0])
    return LindelofDiagnostic(slope=slope, t_values=t_grid[1:].copy(),
                              running_max=running)
