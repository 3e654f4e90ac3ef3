"""End-to-end experiment drivers shared by the service and the CLI.

Each driver resolves its parameters into a plain payload dictionary of
JSON-safe scalars, strings, and lists of row dicts: the service returns
these payloads directly, the CLI renders them as CSV or JSON, and the
results cache persists them.  Determinism contract: a driver called twice
with equal parameters produces equal payloads; summation and reduction
orders are fixed, nothing in a payload depends on wall time, and
undefined diagnostics are encoded as None rather than NaN.

Payload shape:

    {"subcommand": <name>,
     "parameters": {<fully resolved parameters>},
     "outputs": {"columns": [...], "rows": [...], <scalar results>}}

The columns/rows pair drives CSV emission; JSON consumers receive the
whole payload.  Grid drivers (criterion, fit) treat grid points as
independent jobs dispatched through a thread pool of the requested size,
with results reduced in fixed grid order regardless of completion order.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .cache import ResultsCache, RunRecord, content_hash, run_key
from .criterion import GramSystem, build_gram, criterion_integral, solve_dN2
from .errors import CollisionError
from .model import (ModelSpec, fit_theorem_constants,
                    full_counterfactual_integral, main_term_integral,
                    model_zeta_prime, quadruplet_zeros)
from .mollifier import build_VN
from .quadrature import QuadratureSpec
from .residues import F_series, lemma23_reconstruct, sigma1, sigma2
from .special_functions import constants, zeta_line
from .zeros import (bcf_hypothesis_diagnostic, burnol_lower_bound,
                    empirical_lindelof_diagnostic, load_bundled_table,
                    load_zero_table, rvm_estimate, write_zero_table,
                    zero_count_estimate, zero_sum_constant)

__all__ = ["run_constants", "run_criterion", "run_gram", "run_lemma23",
           "run_residues", "run_fit", "run_zeros_ingest", "run_diagnostics",
           "execute", "DRIVERS"]

_DEFAULT_REMOVED = (14.134725141734693, 21.022039638771555)


def _resolve_table(zeros):
    """(table, label): the bundled table for None, else the given file."""
    if zeros is None:
        return load_bundled_table(), "bundled"
    return load_zero_table(zeros), str(zeros)


def _model_from(sigma0: float, gamma0: float, removed) -> ModelSpec:
    return ModelSpec(sigma0=float(sigma0), gamma0=float(gamma0),
                     removed_ordinates=(float(removed[0]), float(removed[1])))


def _parallel_map(fn, items, threads: int):
    """Map with deterministic output order; pooled when threads > 1."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(fn, items))


def _as_complex(value) -> complex:
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    return complex(value)


def _finite_or_none(x: float):
    return float(x) if math.isfinite(x) else None


def run_constants(*, zeros=None, empty_table: bool = False) -> dict:
    """The analytic constants, plus bundled/table zero sums unless skipped."""
    bundle = constants()
    rows = [
        {"quantity": "euler_gamma", "value": bundle.euler_gamma},
        {"quantity": "log_4pi", "value": bundle.log_4pi},
        {"quantity": "nbbd_constant", "value": bundle.nbbd_constant},
    ]
    skipped = bool(empty_table)
    if not skipped:
        table, _label = _resolve_table(zeros)
        if len(table) == 0:
            skipped = True
    if not skipped:
        zs = zero_sum_constant(table)
        bl = burnol_lower_bound(table)
        rows += [
            {"quantity": "zero_sum_value", "value": zs.value},
            {"quantity": "zero_sum_bare", "value": zs.bare_sum},
            {"quantity": "zero_sum_tail_correction", "value": zs.tail_correction},
            {"quantity": "zero_sum_height", "value": zs.height},
            {"quantity": "zero_sum_deviation",
             "value": abs(zs.value - bundle.nbbd_constant)},
            {"quantity": "burnol_lower_bound", "value": bl.value},
        ]
    return {"subcommand": "constants",
            "parameters": {"zeros": "bundled" if zeros is None else str(zeros),
                           "empty_table": bool(empty_table)},
            "outputs": {"columns": ["quantity", "value"], "rows": rows,
                        "table_sums_skipped": skipped}}


def run_criterion(*, n_values, target: str = "real-zeta", tmax=None,
                  tol: float = 1.0e-10, zeros=None, sigma0: float = 0.75,
                  gamma0: float = 10.0, removed=_DEFAULT_REMOVED,
                  threads: int = 1) -> dict:
    """Criterion integral rows (N, value, value log N, tail bound) for the
    true zeta with V_N, or for the counterfactual model."""
    if target not in ("real-zeta", "model"):
        raise ValueError("target must be 'real-zeta' or 'model'")
    n_list = sorted({int(n) for n in n_values})
    if target == "model":
        model = _model_from(sigma0, gamma0, removed)
        table, _label = _resolve_table(zeros)

    def one(n: int) -> dict:
        if target == "real-zeta":
            spec = QuadratureSpec(t_max=float(tmax) if tmax else max(200.0, 2.0 * n),
                                  panel_tolerance=float(tol))
            res = criterion_integral(build_VN(n), spec)
        else:
            spec = None if tmax is None else \
                QuadratureSpec(t_max=float(tmax), panel_tolerance=float(tol))
            res = full_counterfactual_integral(n, model, spec, table)
        return {"N": n, "value": res.value,
                "value_log_n": res.value * math.log(n) if n > 1 else 0.0,
                "tail_bound": res.tail_part}

    rows = _parallel_map(one, n_list, int(threads))
    return {"subcommand": "criterion",
            "parameters": {"n_values": n_list, "target": target,
                           "tmax": None if tmax is None else float(tmax),
                           "tol": float(tol),
                           "zeros": "bundled" if zeros is None else str(zeros),
                           "sigma0": float(sigma0), "gamma0": float(gamma0),
                           "removed": [float(removed[0]), float(removed[1])],
                           "threads": int(threads)},
            "outputs": {"columns": ["N", "value", "value_log_n", "tail_bound"],
                        "rows": rows}}


def run_gram(*, n_max: int, tmax=None, tol: float = 1.0e-10) -> dict:
    """d_N^2 rows for N = 1..n_max from nested blocks of one Gram matrix.

    Nested leading blocks share quadrature nodes, which makes the
    monotonicity d_{N+1}^2 <= d_N^2 structural (a larger block minimizes
    over a superset of coefficient vectors on the identical form).
    """
    n_max = int(n_max)
    spec = QuadratureSpec(t_max=float(tmax) if tmax else max(200.0, 2.0 * n_max),
                          panel_tolerance=float(tol))
    system = build_gram(n_max, spec)
    rows = []
    for n in range(1, n_max + 1):
        sub = GramSystem(size=n, gram=system.gram[:n, :n],
                         moments=system.moments[:n],
                         norm_one=system.norm_one, t_max=system.t_max,
                         nodes=system.nodes)
        sol = solve_dN2(sub)
        rows.append({"N": n, "d2": sol.d2, "residual": sol.residual})
    full = solve_dN2(system)
    return {"subcommand": "gram",
            "parameters": {"n_max": n_max,
                           "tmax": None if tmax is None else float(tmax),
                           "tol": float(tol)},
            "outputs": {"columns": ["N", "d2", "residual"], "rows": rows,
                        "min_eigenvalue": full.min_eigenvalue,
                        "gram_trace": float(np.trace(system.gram)),
                        "t_max": system.t_max}}


def run_lemma23(*, n: int, s_values, heights, zeros=None,
                target: str = "real-zeta", sigma0: float = 0.75,
                gamma0: float = 10.0, removed=_DEFAULT_REMOVED) -> dict:
    """DecompositionReport rows over the (s, truncation height) grid."""
    if target not in ("real-zeta", "model"):
        raise ValueError("target must be 'real-zeta' or 'model'")
    table, _label = _resolve_table(zeros)
    model = None if target == "real-zeta" else \
        _model_from(sigma0, gamma0, removed)
    s_list = [_as_complex(s) for s in s_values]
    h_list = sorted(float(h) for h in heights)
    rows = []
    for s in s_list:
        for h in h_list:
            rep = lemma23_reconstruct(int(n), s, table.truncated(h),
                                      model=model)
            rows.append({"s_re": s.real, "s_im": s.imag, "height": h,
                         "lhs_re": rep.lhs.real, "lhs_im": rep.lhs.imag,
                         "rhs_re": rep.rhs.real, "rhs_im": rep.rhs.imag,
                         "abs_error": rep.error,
                         "rel_error": rep.error / abs(rep.lhs)})
    return {"subcommand": "lemma23",
            "parameters": {"n": int(n), "s_values": [str(s) for s in s_values],
                           "heights": h_list, "target": target,
                           "zeros": "bundled" if zeros is None else str(zeros),
                           "sigma0": float(sigma0), "gamma0": float(gamma0),
                           "removed": [float(removed[0]), float(removed[1])]},
            "outputs": {"columns": ["s_re", "s_im", "height", "lhs_re",
                                    "lhs_im", "rhs_re", "rhs_im", "abs_error",
                                    "rel_error"],
                        "rows": rows}}


def run_residues(*, n: int, s, zeros=None, sigma0: float = 0.75,
                 gamma0: float = 10.0, removed=_DEFAULT_REMOVED,
                 mode: str = "quadruplet") -> dict:
    """Per-zero residue terms at s for the engineered zeros, plus the
    aggregate sums Sigma1 (table), Sigma2 (model), and the trivial series."""
    sv = _as_complex(s)
    model = _model_from(sigma0, gamma0, removed)
    table, _label = _resolve_table(zeros)
    lnN = math.log(int(n))
    rows = []
    for rho in quadruplet_zeros(model, mode):
        if abs(rho - sv) < 1.0e-6:
            raise CollisionError(
                f"s={sv} collides with the engineered zero at {rho}")
        mp = model_zeta_prime(rho, model)
        r_val = np.exp((rho - sv) * lnN) / (mp * (rho - sv) ** 2)
        rows.append({"kind": "engineered", "rho_re": rho.real,
                     "rho_im": rho.imag, "R_re": float(r_val.real),
                     "R_im": float(r_val.imag)})
    s1 = sigma1(int(n), sv, table)
    s2 = sigma2(int(n), sv, model, mode)
    f_val = F_series(sv, 1.0 / int(n))
    return {"subcommand": "residues",
            "parameters": {"n": int(n), "s": str(s),
                           "zeros": "bundled" if zeros is None else str(zeros),
                           "sigma0": float(sigma0), "gamma0": float(gamma0),
                           "removed": [float(removed[0]), float(removed[1])],
                           "mode": mode},
            "outputs": {"columns": ["kind", "rho_re", "rho_im", "R_re", "R_im"],
                        "rows": rows,
                        "sigma1_re": s1.real, "sigma1_im": s1.imag,
                        "sigma2_re": s2.real, "sigma2_im": s2.imag,
                        "F_re": f_val.real, "F_im": f_val.imag}}


def run_fit(*, n_grid=None, mode: str = "pair", sigma0: float = 0.75,
            gamma0: float = 10.0, removed=_DEFAULT_REMOVED, tmax=None,
            tol: float = 1.0e-12, threads: int = 1) -> dict:
    """Main-term series over the N grid and the oscillation fits.

    Emits the fixed-frequency fit at omega = 2 gamma0 and the
    free-frequency refinement, plus the normalized series
    u = value log^2 N / N^(2 sigma0 - 1) row by row.
    """
    model = _model_from(sigma0, gamma0, removed)
    if n_grid is None:
        n_list = sorted({int(n) for n in np.geomspace(100, 100_000, 48)})
    else:
        n_list = sorted({int(n) for n in n_grid})
    spec = None if tmax is None else \
        QuadratureSpec(t_max=float(tmax), panel_tolerance=float(tol))

    def one(n: int) -> tuple[int, float]:
        return n, main_term_integral(n, model, spec, mode=mode)

    values = _parallel_map(one, n_list, int(threads))
    fixed = fit_theorem_constants(values, model)
    free = fit_theorem_constants(values, model, fit_frequency=True)
    rows = [{"N": n, "value": y,
             "u": y * math.log(n) ** 2 / n ** (2.0 * model.sigma0 - 1.0)}
            for n, y in values]

    def fit_dict(fit) -> dict:
        return {"A": fit.A, "B": fit.B, "frequency": fit.frequency,
                "rms_relative_residual": fit.rms_relative_residual}

    return {"subcommand": "fit",
            "parameters": {"n_grid": n_list, "mode": mode,
                           "sigma0": float(sigma0), "gamma0": float(gamma0),
                           "removed": [float(removed[0]), float(removed[1])],
                           "tmax": None if tmax is None else float(tmax),
                           "tol": float(tol), "threads": int(threads)},
            "outputs": {"columns": ["N", "value", "u"], "rows": rows,
                        "fixed_frequency": fit_dict(fixed),
                        "free_frequency": fit_dict(free)}}


def run_zeros_ingest(*, zeros, refine: bool = False, rewrite=None,
                     decimals: int = 9) -> dict:
    """Validate (and optionally polish and rewrite) an ordinate file."""
    if zeros is None:
        raise ValueError("zeros-ingest requires --zeros <path>")
    table = load_zero_table(zeros, refine=bool(refine))
    count = len(table)
    rows = [{"quantity": "count", "value": float(count)},
            {"quantity": "height", "value": table.height}]
    if count:
        g = table.gammas()
        est = zero_count_estimate(table.height)
        rows += [
            {"quantity": "theta_count_estimate", "value": est},
            {"quantity": "completeness_deviation", "value": est - count},
        ]
        if table.height >= 100.0:
            rvm = rvm_estimate(table.height)
            rows.append({"quantity": "rvm_relative_deviation",
                         "value": abs(rvm - count) / count})
        head = g[:100]
        resid = float(np.max(np.abs(zeta_line(head, 0.5, 0)[0])))
        rows.append({"quantity": "max_residual_first_100", "value": resid})
        if rewrite is not None:
            write_zero_table(rewrite, g,
                             comments=[f"ingested from {zeros}",
                                       f"refine={bool(refine)}",
                                       f"count={count}"],
                             decimals=int(decimals))
    return {"subcommand": "zeros-ingest",
            "parameters": {"zeros": str(zeros), "refine": bool(refine),
                           "rewrite": None if rewrite is None else str(rewrite),
                           "decimals": int(decimals)},
            "outputs": {"columns": ["quantity", "value"], "rows": rows,
                        "written": rewrite is not None and count > 0}}


def run_diagnostics(*, zeros=None, t_grid=None, lindelof_windows: int = 25,
                    lindelof_samples: int = 256) -> dict:
    """Hypothesis-sum growth rows plus the empirical line-growth slope.

    Reports 3/2 - slope for the hypothesis sum (the growth-deficit delta)
    without asserting any bound; single-point grids give fitted_exponent
    None.
    """
    table, _label = _resolve_table(zeros)
    if t_grid is None:
        grid = [h for h in (100.0, 300.0, 1000.0, 3000.0, table.height)
                if h <= table.height]
    else:
        grid = sorted(float(h) for h in t_grid)
    points = bcf_hypothesis_diagnostic(table, np.array(grid))
    rows = [{"T": p.T, "partial_sum": p.partial_sum,
             "fitted_exponent": _finite_or_none(p.fitted_exponent)}
            for p in points]
    slope = points[-1].fitted_exponent
    lind = empirical_lindelof_diagnostic(
        np.geomspace(10.0, 1.0e4, int(lindelof_windows)),
        samples_per_window=int(lindelof_samples))
    return {"subcommand": "diagnostics",
            "parameters": {"zeros": "bundled" if zeros is None else str(zeros),
                           "t_grid": grid,
                           "lindelof_windows": int(lindelof_windows),
                           "lindelof_samples": int(lindelof_samples)},
            "outputs": {"columns": ["T", "partial_sum", "fitted_exponent"],
                        "rows": rows,
                        "hypothesis_delta": _finite_or_none(1.5 - slope),
                        "lindelof_slope": lind.slope}}


DRIVERS = {
    "constants": run_constants,
    "criterion": run_criterion,
    "gram": run_gram,
    "lemma23": run_lemma23,
    "residues": run_residues,
    "fit": run_fit,
    "zeros-ingest": run_zeros_ingest,
    "diagnostics": run_diagnostics,
}


def execute(subcommand: str, params: dict, cache_dir=None) -> dict:
    """Run a driver through the results cache.

    The cache key covers the resolved parameters, tool version, and the
    content hash of any input file, so a hit reproduces the original
    payload byte for byte; wall time is recorded but never emitted."""
    if subcommand not in DRIVERS:
        raise ValueError(f"unknown subcommand {subcommand!r}")
    zeros = params.get("zeros")
    input_hash = content_hash([zeros] if zeros else [])
    cache = ResultsCache(cache_dir)
    key = run_key(subcommand, params, __version__, input_hash)
    hit = cache.get(key)
    if hit is not None:
        return {"subcommand": subcommand, "parameters": hit["parameters"],
                "outputs": hit["outputs"]}
    started = time.perf_counter()
    payload = DRIVERS[subcommand](**params)
    wall = time.perf_counter() - started
    record = RunRecord(subcommand=subcommand,
                       parameters=payload["parameters"],
                       outputs=payload["outputs"], wall_time_s=wall,
                       version=__version__, input_hash=input_hash)
    # stored under the lookup key (raw params may differ from the echoed,
    # normalized ones), so a rerun with the same raw params hits and
    # reproduces this exact payload
    cache.put(record, key=key)
    return payload
