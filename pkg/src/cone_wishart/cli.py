"""Command-line entry point ``cone-wishart``.

Exit codes: 0 on success, 1 when a validation suite fails, 2 on bad input or
configuration. Errors are reported on stderr as a JSON object.
"""

import argparse
import itertools
import json
import sys
from pathlib import Path

import numpy as np

from . import algebra as ja
from . import io
from .algebra import AlgebraDescriptor
from .bartlett import bartlett_test
from .eigen import DensityKind, EigDensitySpec, MCMCConfig, sample_eigenvalues
from .errors import ConeWishartError
from .seeding import resolve_seed
from .special import TruncationPolicy, gamma_cone, hypergeom, log_gamma_cone, zonal
from .validation import SUITES, format_table, run_suites
from .wishart import WishartParams, log_density_noncentral, sample_wishart

COMMANDS = ("gamma", "zonal", "hyperg", "density", "eig-density", "sample", "eig-sample", "bartlett", "validate")
RUN_CONFIG_KEYS = {"command", "algebra", "params", "seed", "output"}


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _floats(text):
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _algebra(args):
    try:
        return AlgebraDescriptor.build(args.family, args.rank, args.ambient)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid algebra: {exc}") from exc


def _eig_or_element(alg, text=None, path=None):
    if path is not None:
        x = io.read_element(path)
        if x.alg != alg:
            raise ConfigError(f"{path}: algebra {x.alg} does not match {alg}")
        return x
    if text is None:
        return None
    vals = np.asarray(_floats(text))
    if vals.size != alg.rank:
        raise ConfigError(f"expected {alg.rank} comma-separated eigenvalues")
    return vals


def _policy(args):
    return TruncationPolicy(args.max_degree, args.tail_tol)


def _emit(args, payload, columns=None, rows=None, meta=None):
    """JSON for scalar results; CSV/JSON tables when rows are given."""
    if rows is not None:
        text = io.write_table(args.output, columns, rows, meta, args.format)
        if text is not None:
            sys.stdout.write(text)
        else:
            print(io.dumps({"output": str(args.output), "rows": len(rows), **(payload or {})}))
        return
    text = io.dumps(payload)
    if args.output:
        Path(args.output).write_text(text + "\n")
    print(text)


# ---------------------------------------------------------------------------
# command handlers


def cmd_gamma(args):
    alg = _algebra(args)
    s = args.z if args.s is None else np.asarray(_floats(args.s))
    if s is None:
        raise ConfigError("give --z or --s")
    meta = io.batch_metadata(alg, None)
    _emit(args, {"value": gamma_cone(alg, s), "log_value": log_gamma_cone(alg, s), "metadata": meta})
    return 0


def cmd_zonal(args):
    alg = _algebra(args)
    x = _eig_or_element(alg, args.x, args.x_file)
    if x is None:
        raise ConfigError("give --x or --x-file")
    lam = tuple(_ints(args.partition))
    _emit(args, {"partition": list(lam), "value": zonal(alg, lam, x), "metadata": io.batch_metadata(alg, None)})
    return 0


def cmd_hyperg(args):
    alg = _algebra(args)
    x = _eig_or_element(alg, args.x, args.x_file)
    y = _eig_or_element(alg, args.y, args.y_file)
    if x is None:
        raise ConfigError("give --x or --x-file")
    a = _floats(args.a) if args.a else []
    b = _floats(args.b) if args.b else []
    policy = _policy(args)
    res = hypergeom(alg, a, b, x, y, policy)
    _emit(args, {**res.to_dict(), "metadata": io.batch_metadata(alg, None, policy=policy)})
    return 0


def _scale(alg, args):
    if args.sigma_file:
        sigma = io.read_element(args.sigma_file)
        if sigma.alg != alg:
            raise ConfigError("sigma algebra mismatch")
        return sigma
    return args.zeta * ja.identity(alg)


def _epsilon(alg, args):
    if args.epsilon_file:
        eps = io.read_element(args.epsilon_file)
        if eps.alg != alg:
            raise ConfigError("epsilon algebra mismatch")
        return eps
    return None


def cmd_density(args):
    x = io.read_element(args.x_file)
    alg = x.alg
    params = WishartParams(args.eta, _scale(alg, args), _epsilon(alg, args))
    policy = _policy(args)
    value, series = log_density_noncentral(x, params, policy, return_series=True)
    payload = {"log_density": value, "metadata": io.batch_metadata(alg, None, policy=policy)}
    if series is not None:
        payload["series"] = series.to_dict()
    _emit(args, payload)
    return 0


def _density_spec(alg, args):
    kind = DensityKind(args.kind)
    eps = None if args.eps is None else np.asarray(_floats(args.eps))
    if kind in (DensityKind.CENTRAL_SCALAR, DensityKind.NONCENTRAL_SCALAR):
        if args.eta is None:
            raise ConfigError("--eta is required")
        params = {"eta": args.eta, "zeta": args.zeta, "eps": eps}
    else:
        if args.eta1 is None or args.eta2 is None:
            raise ConfigError("--eta1 and --eta2 are required")
        params = {"eta1": args.eta1, "eta2": args.eta2, "eps": eps, "variant": args.variant}
    return EigDensitySpec(alg, kind, params)


def cmd_eig_density(args):
    alg = _algebra(args)
    spec = _density_spec(alg, args)
    policy = _policy(args)
    if args.point is not None:
        res = spec.evaluate(np.asarray(_floats(args.point)), policy)
        _emit(args, {**res.to_dict(), "metadata": io.batch_metadata(alg, None, policy=policy)})
        return 0
    if args.grid is None:
        raise ConfigError("give --point or --grid lo:hi:num")
    lo, hi, num = args.grid.split(":")
    axis = np.linspace(float(lo), float(hi), int(num))
    rows = []
    for combo in itertools.product(axis, repeat=alg.rank):
        point = np.asarray(combo)
        if np.any(np.diff(point) >= 0):
            continue
        try:
            val = spec.evaluate(point, policy).log_value
        except ConeWishartError:
            continue
        rows.append(list(point) + [val])
    columns = [f"x{j + 1}" for j in range(alg.rank)] + ["log_density"]
    meta = io.batch_metadata(alg, None, {"kind": spec.kind.value, "params": {k: v for k, v in spec.params.items()}}, policy)
    _emit(args, None, columns, rows, meta)
    return 0


def cmd_sample(args):
    alg = _algebra(args)
    params = WishartParams(args.eta, _scale(alg, args), _epsilon(alg, args))
    seed = resolve_seed(args.seed)
    batch = sample_wishart(params, args.n, seed, args.threads)
    meta = io.batch_metadata(alg, seed, {"method": batch.method.value, "eta": args.eta, "n_draws": args.n})
    _emit(args, {"seed": seed}, io.coordinate_columns(alg), batch.coords, meta)
    return 0


def cmd_eig_sample(args):
    alg = _algebra(args)
    seed = resolve_seed(args.seed)
    cfg = MCMCConfig(args.burn_in, args.thin, args.shift)
    sample = sample_eigenvalues(alg, args.eta, args.zeta, args.n, seed, cfg, args.threads)
    meta = io.batch_metadata(
        alg,
        seed,
        {"eta": args.eta, "zeta": args.zeta, "acceptance_rate": sample.acceptance_rate, "mcmc": cfg.__dict__},
    )
    columns = [f"xi{j + 1}" for j in range(alg.rank)]
    _emit(args, {"seed": seed, "acceptance_rate": sample.acceptance_rate}, columns, sample.values, meta)
    return 0


def cmd_bartlett(args):
    x = io.read_element(args.x)
    y = io.read_element(args.y)
    seed = resolve_seed(args.seed)
    result = bartlett_test(x, y, args.eta, args.sims, seed, args.threads)
    payload = result.to_dict()
    payload["metadata"] = io.batch_metadata(x.alg, seed)
    _emit(args, payload)
    return 0


def cmd_validate(args):
    names = list(SUITES) if not args.suite or "all" in args.suite else args.suite
    seed = resolve_seed(args.seed)
    checks = run_suites(names, seed)
    ok = all(c.passed for c in checks)
    if args.format == "json" or args.output:
        payload = {"passed": ok, "seed": seed, "checks": [c.to_dict() for c in checks]}
        payload["metadata"] = io.batch_metadata(None, seed)
        _emit(args, payload)
    else:
        print(format_table(checks))
        print("all checks passed" if ok else "some checks FAILED")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# parser


def _add_algebra(p):
    p.add_argument("--family", required=True, choices=[f.value for f in ja.Family])
    p.add_argument("--rank", type=int)
    p.add_argument("--ambient", type=int)


def _add_series(p):
    p.add_argument("--max-degree", type=int, default=30)
    p.add_argument("--tail-tol", type=float, default=1e-10)


def _add_output(p, default_format="json"):
    p.add_argument("--output", type=Path, help="write to this file instead of stdout")
    p.add_argument("--format", choices=io.FORMATS, default=default_format)


def _add_seed(p):
    p.add_argument("--seed", type=int, help="64-bit seed (falls back to $CONE_WISHART_SEED, then 0)")
    p.add_argument("--threads", type=int, default=1)


def build_parser():
    parser = _Parser(prog="cone-wishart", description="Wishart laws on symmetric cones")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gamma", help="cone gamma function")
    _add_algebra(p)
    p.add_argument("--z", type=float)
    p.add_argument("--s", help="comma-separated power vector")
    _add_output(p)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("zonal", help="zonal polynomial")
    _add_algebra(p)
    p.add_argument("--partition", required=True, help="e.g. 2,1")
    p.add_argument("--x", help="comma-separated eigenvalues")
    p.add_argument("--x-file", type=Path)
    _add_output(p)
    p.set_defaults(func=cmd_zonal)

    p = sub.add_parser("hyperg", help="hypergeometric series of matrix argument")
    _add_algebra(p)
    p.add_argument("--a", help="comma-separated numerator parameters")
    p.add_argument("--b", help="comma-separated denominator parameters")
    p.add_argument("--x", help="comma-separated eigenvalues")
    p.add_argument("--x-file", type=Path)
    p.add_argument("--y", help="second argument eigenvalues")
    p.add_argument("--y-file", type=Path)
    _add_series(p)
    _add_output(p)
    p.set_defaults(func=cmd_hyperg)

    p = sub.add_parser("density", help="Wishart log density at an element")
    p.add_argument("--x-file", type=Path, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--zeta", type=float, default=1.0, help="scalar scale when --sigma-file is absent")
    p.add_argument("--sigma-file", type=Path)
    p.add_argument("--epsilon-file", type=Path)
    _add_series(p)
    _add_output(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("eig-density", help="joint eigenvalue densities")
    _add_algebra(p)
    p.add_argument("--kind", choices=[k.value for k in DensityKind], default="central")
    p.add_argument("--eta", type=float)
    p.add_argument("--zeta", type=float, default=1.0)
    p.add_argument("--eta1", type=float)
    p.add_argument("--eta2", type=float)
    p.add_argument("--eps", help="eigenvalues of the non-centrality")
    p.add_argument("--variant", choices=["a", "b"], default="a")
    p.add_argument("--point", help="comma-separated ordered point")
    p.add_argument("--grid", help="lo:hi:num grid on each axis; ordered points only")
    _add_series(p)
    _add_output(p, "csv")
    p.set_defaults(func=cmd_eig_density)

    p = sub.add_parser("sample", help="Wishart draws")
    _add_algebra(p)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--zeta", type=float, default=1.0)
    p.add_argument("--sigma-file", type=Path)
    p.add_argument("--epsilon-file", type=Path)
    p.add_argument("--n", type=int, default=1000)
    _add_seed(p)
    _add_output(p, "csv")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("eig-sample", help="eigenvalue draws by Metropolis-Hastings")
    _add_algebra(p)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--zeta", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--thin", type=int, default=5)
    p.add_argument("--shift", type=float, default=0.0)
    _add_seed(p)
    _add_output(p, "csv")
    p.set_defaults(func=cmd_eig_sample)

    p = sub.add_parser("bartlett", help="two-sample scale test")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--x", type=Path, required=True)
    p.add_argument("--y", type=Path, required=True)
    p.add_argument("--sims", type=int, default=999)
    _add_seed(p)
    _add_output(p)
    p.set_defaults(func=cmd_bartlett)

    p = sub.add_parser("validate", help="run self-check suites")
    p.add_argument("--suite", action="append", choices=list(SUITES) + ["all"])
    p.add_argument("--seed", type=int)
    _add_output(p, "csv")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="run a JSON config")
    p.add_argument("--config", type=Path, required=True)
    p.set_defaults(func=None)
    return parser


def config_to_argv(doc):
    """Translate a run config into an argument vector for the subcommand parser."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - RUN_CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    command = doc.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}")
    argv = [command]
    alg = doc.get("algebra")
    if alg is not None:
        alg = io.parse_algebra(alg)
        argv += ["--family", alg.family.value, "--rank", str(alg.rank), "--ambient", str(alg.ambient_dim)]
    for key, value in (doc.get("params") or {}).items():
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        elif isinstance(value, list):
            if key == "suite":
                for item in value:
                    argv += [flag, str(item)]
            else:
                argv += [flag, ",".join(repr(float(v)) if not isinstance(v, int) else str(v) for v in value)]
        else:
            argv += [flag, str(value)]
    if doc.get("seed") is not None:
        argv += ["--seed", str(int(doc["seed"]))]
    out = doc.get("output")
    if out is not None:
        if not isinstance(out, dict) or set(out) - {"path", "format"}:
            raise ConfigError("output must be an object with keys path and format")
        if "path" in out:
            argv += ["--output", str(out["path"])]
        if "format" in out:
            argv += ["--format", str(out["format"])]
    return argv


def _dispatch(parser, argv):
    args = parser.parse_args(argv)
    if args.command == "run":
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        args = parser.parse_args(config_to_argv(doc))
    return args.func(args)


def main(argv=None):
    parser = build_parser()
    try:
        return _dispatch(parser, sys.argv[1:] if argv is None else list(argv))
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (ConfigError, ConeWishartError, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
