"""Command-line client for the experiment service.

Subcommands map one-to-one onto the service's /v1/ endpoints.  By
default each request is dispatched to the FastAPI application in
process, so no socket is opened; --server redirects the identical
request to a remote instance instead.  Option values resolve as
flags > NBBDLAB_* environment variables > --config key=value file >
built-in defaults.

Output is deterministic: row order is fixed by the drivers, floats are
emitted with repr (shortest round trip), the parameter echo is sorted,
and payloads carry no timestamps, so rerunning a subcommand with
identical flags yields byte-identical bytes.  Exit status is 0 iff the
operation succeeded, 1 on a request or transport error, 2 on unusable
flags or config.
"""

from __future__ import annotations

import argparse
import asyncio
import os
import sys
from dataclasses import dataclass

import httpx

from .cache import canonical_json

_ENV_PREFIX = "NBBDLAB_"
_REMOVED_DEFAULT = (14.134725141734693, 21.022039638771555)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _split(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _parse_pair(text: str) -> list[float]:
    parts = [float(x) for x in _split(text)]
    if len(parts) != 2:
        raise ValueError(f"expected two comma-separated values, got {text!r}")
    return parts


_PARSERS = {
    "int": int,
    "float": float,
    "str": str,
    "bool": _parse_bool,
    "int_list": lambda text: [int(x) for x in _split(text)],
    "float_list": lambda text: [float(x) for x in _split(text)],
    "str_list": _split,
    "pair": _parse_pair,
}


@dataclass(frozen=True)
class Option:
    """One request-body option: flag, parse kind, default, constraints.

    flag_name decouples the user-visible flag from the request-body key
    (--s-list fills s_values); environment and config keys follow the
    flag."""

    name: str
    kind: str
    default: object = None
    required: bool = False
    choices: tuple = ()
    help: str = ""
    flag_name: str | None = None

    @property
    def flag(self) -> str:
        return "--" + (self.flag_name or self.name.replace("_", "-"))

    @property
    def key(self) -> str:
        return (self.flag_name or self.name).replace("-", "_")


def _zeros_opt() -> Option:
    return Option("zeros", "str",
                  help="ordinate table path (default: bundled table)")


def _model_opts() -> list[Option]:
    return [
        Option("sigma0", "float", 0.75,
               help="real part of the engineered off-line zeros"),
        Option("gamma0", "float", 10.0,
               help="ordinate of the engineered off-line zeros"),
        Option("removed", "pair", list(_REMOVED_DEFAULT),
               help="comma pair of removed true ordinates"),
    ]


def _quad_opts(tol_default: float) -> list[Option]:
    return [
        Option("tmax", "float", help="quadrature truncation height"),
        Option("tol", "float", tol_default,
               help=f"panel tolerance (default {tol_default:g})"),
    ]


def _threads_opt() -> Option:
    return Option("threads", "int", 1,
                  help="worker pool size for grid points; orchestration "
                       "stays single-threaded")


SUBCOMMANDS: dict[str, tuple[str, list[Option]]] = {
    "constants": (
        "print the analytic constants and the zero-sum checks",
        [_zeros_opt(),
         Option("empty_table", "bool", False,
                help="skip the table sums, constants only")]),
    "criterion": (
        "criterion integral over an N list (true zeta or model)",
        [Option("n_values", "int_list", required=True,
                help="comma list of mollifier lengths N"),
         Option("target", "str", "real-zeta",
                choices=("real-zeta", "model"),
                help="integrand: true zeta with V_N, or the counterfactual "
                     "model with its mollifier")]
        + _quad_opts(1.0e-10) + [_zeros_opt()] + _model_opts()
        + [_threads_opt()]),
    "gram": (
        "exact d_N^2 for N = 1..n_max from one nested Gram system",
        [Option("n_max", "int", required=True,
                help="largest mollifier length (<= 64)")]
        + _quad_opts(1.0e-10)),
    "lemma23": (
        "explicit-formula decomposition reports over an (s, T) grid",
        [Option("n", "int", required=True, help="mollifier length N"),
         Option("s_values", "str_list", required=True, flag_name="s-list",
                help="comma list of strip points, e.g. 0.45+3j,0.6+10j"),
         Option("heights", "float_list", required=True, flag_name="t-list",
                help="comma list of truncation heights T"),
         _zeros_opt(),
         Option("target", "str", "real-zeta",
                choices=("real-zeta", "model"),
                help="decompose V_N under zeta, or the model mollifier "
                     "under M")]
        + _model_opts()),
    "residues": (
        "per-zero residue terms and the aggregate sums at one point",
        [Option("n", "int", required=True, help="mollifier length N"),
         Option("s", "str", required=True,
                help="evaluation point, e.g. 0.45+3j"),
         _zeros_opt()] + _model_opts()
        + [Option("mode", "str", "quadruplet",
                  choices=("pair", "quadruplet"),
                  help="engineered zeros: right half-plane pair or full "
                       "quadruplet")]),
    "fit": (
        "main-term series over an N grid and its oscillation fits",
        [Option("n_grid", "int_list",
                help="comma list of N (default: 48 geometric points in "
                     "[100, 100000])"),
         Option("mode", "str", "pair", choices=("pair", "quadruplet"),
                help="engineered zeros entering the main term")]
        + _model_opts() + _quad_opts(1.0e-12) + [_threads_opt()]),
    "zeros-ingest": (
        "validate, optionally polish, and summarize an ordinate file",
        [Option("zeros", "str", required=True,
                help="ordinate table path to ingest"),
         Option("refine", "bool", False,
                help="polish ordinates against the Hardy function before "
                     "summarizing"),
         Option("rewrite", "str",
                help="write the canonical table form to this path"),
         Option("decimals", "int", 9,
                help="ordinate decimals in the rewritten table")]),
    "diagnostics": (
        "hypothesis-sum growth and empirical line-growth diagnostics",
        [_zeros_opt(),
         Option("t_grid", "float_list",
                help="comma list of heights T for the hypothesis sum"),
         Option("lindelof_windows", "int", 25,
                help="number of geometric sample windows on the line"),
         Option("lindelof_samples", "int", 256,
                help="Hardy-function samples per window")]),
}

_OUTPUT_OPTIONS = [
    Option("format", "str", None, choices=("csv", "json"),
           help="payload rendering (default: json for fit, csv otherwise)"),
    Option("out", "str", help="write the rendering here instead of stdout"),
    Option("cache_dir", "str",
           help="results cache directory (cache disabled when unset)"),
    Option("server", "str",
           help="base URL of a remote service instance (default: run the "
                "service in process)"),
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nbbdlab",
        description="Numerical laboratory for the Nyman-Beurling-Baez-"
                    "Duarte criterion and its counterfactual zeta model.")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name, (help_text, options) in SUBCOMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text,
                                    description=help_text)
        for opt in options + _OUTPUT_OPTIONS:
            if opt.kind == "bool":
                sub.add_argument(opt.flag, dest=opt.name, default=None,
                                 action="store_true", help=opt.help)
            else:
                sub.add_argument(opt.flag, dest=opt.name, default=None,
                                 type=str, help=opt.help)
        sub.add_argument("--config", default=None,
                         help="key=value option file (flags and environment "
                              "take precedence)")
    return parser


def _load_config(path: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for number, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ValueError(
                    f"{path}:{number}: expected key=value, got {stripped!r}")
            key, _, value = stripped.partition("=")
            entries[key.strip().lower().replace("-", "_")] = value.strip()
    return entries


def _resolve_options(options: list[Option], args: argparse.Namespace,
                     environ, config: dict[str, str]) -> dict:
    """Apply the precedence flags > environment > config > defaults."""
    resolved = {}
    for opt in options:
        raw = getattr(args, opt.name)
        if raw is None:
            raw = environ.get(_ENV_PREFIX + opt.key.upper())
        if raw is None:
            raw = config.get(opt.key)
        if raw is None:
            if opt.required:
                raise ValueError(f"missing required option {opt.flag} "
                                 f"(or {_ENV_PREFIX}{opt.key.upper()})")
            resolved[opt.name] = opt.default
            continue
        value = _PARSERS[opt.kind](raw) if isinstance(raw, str) else raw
        if opt.choices and value not in opt.choices:
            raise ValueError(f"{opt.flag}: expected one of "
                             f"{', '.join(opt.choices)}, got {value!r}")
        resolved[opt.name] = value
    return resolved


def _post_in_process(path: str, body: dict, cache_dir):
    from .service import create_app

    app = create_app(cache_dir=cache_dir)

    async def go():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport,
                                     base_url="http://nbbdlab.internal",
                                     timeout=None) as client:
            response = await client.post(path, json=body)
            return response.status_code, response.json()

    return asyncio.run(go())


def _post_remote(server: str, path: str, body: dict):
    with httpx.Client(base_url=server, timeout=None) as client:
        response = client.post(path, json=body)
        return response.status_code, response.json()


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(payload: dict) -> str:
    """Comment echo (sorted), scalar outputs (sorted), header, rows."""
    lines = [f"# subcommand={payload['subcommand']}"]
    parameters = payload["parameters"]
    for key in sorted(parameters):
        lines.append(f"# {key}={canonical_json(parameters[key])}")
    outputs = payload["outputs"]
    for key in sorted(outputs):
        if key in ("columns", "rows"):
            continue
        lines.append(f"# {key}={canonical_json(outputs[key])}")
    columns = outputs["columns"]
    lines.append(",".join(columns))
    for row in outputs["rows"]:
        lines.append(",".join(_cell(row[col]) for col in columns))
    return "\n".join(lines) + "\n"


def render_json(payload: dict) -> str:
    return canonical_json(payload) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    name = args.subcommand
    environ = os.environ
    try:
        config_path = args.config or environ.get(_ENV_PREFIX + "CONFIG")
        config = _load_config(config_path) if config_path else {}
        body = _resolve_options(SUBCOMMANDS[name][1], args, environ, config)
        output = _resolve_options(_OUTPUT_OPTIONS, args, environ, config)
    except (ValueError, OSError) as exc:
        print(f"nbbdlab {name}: {exc}", file=sys.stderr)
        return 2

    try:
        if output["server"]:
            status, payload = _post_remote(output["server"], f"/v1/{name}",
                                           body)
        else:
            status, payload = _post_in_process(f"/v1/{name}", body,
                                               output["cache_dir"])
    except httpx.HTTPError as exc:
        print(f"nbbdlab {name}: transport failure: {exc}", file=sys.stderr)
        return 1
    if status != 200:
        print(canonical_json(payload), file=sys.stderr)
        return 1

    fmt = output["format"] or ("json" if name == "fit" else "csv")
    text = render_json(payload) if fmt == "json" else render_csv(payload)
    if output["out"]:
        with open(output["out"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
