"""Command-line front end.

Exit codes: 0 pass, 1 verification failed, 2 usage error, 3 truncation
guard tripped, 4 I/O failure.
"""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from . import solver as slv
from .errors import (
    InconsistentEstimateError,
    InsufficientTruncationError,
    InvalidInputError,
    InvalidParameterError,
    TruncationOverflowError,
)
from .fock import TruncationPolicy
from .optimal import BETA1, geometric_betas, schur_scan
from .states import MixedState, coherent_state, eigenstate, ground_state, translate_state
from .symplectic import quantum_length_squared

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TRUNCATION, EXIT_IO = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    theta: float = 1.0
    store_dim: int = 128
    pad: int = 4
    beta_grid: str = ""
    seed: int = 0
    tolerance: float = 1e-6
    rel_tol: float = None
    restarts: int = 8
    max_iter: int = 2000
    workers: int = 1
    format: str = "json"
    output: str = ""

    def validate(self):
        try:
            TruncationPolicy(self.store_dim, self.pad)
        except InvalidParameterError as exc:
            raise UsageError(str(exc)) from exc
        if not self.theta > 0:
            raise UsageError("theta must be positive")
        if self.format not in ("json", "csv"):
            raise UsageError(f"format must be json or csv, got {self.format!r}")
        if self.rel_tol is not None and not self.rel_tol >= 0:
            raise UsageError("rel_tol must be non-negative")
        if self.restarts < 0 or self.max_iter < 1 or self.workers < 1:
            raise UsageError("restarts >= 0, max_iter >= 1 and workers >= 1 are required")
        self.betas()
        return self

    def betas(self):
        return parse_beta_grid(self.beta_grid)

    def solver_options(self):
        grid = None
        if self.beta_grid:
            grid = tuple(b for b in self.betas() if self.store_dim > 2 / b + 2) or None
        return slv.SolverOptions(
            pad=self.pad, restarts=self.restarts, max_iter=self.max_iter,
            seed=self.seed, workers=self.workers, beta_grid=grid,
        )


_CASTS = {"theta": float, "store_dim": int, "pad": int, "beta_grid": str, "seed": int,
          "tolerance": float, "rel_tol": float, "restarts": int, "max_iter": int,
          "workers": int, "format": str, "output": str}


def parse_complex(text):
    t = str(text).strip().replace(" ", "").replace("i", "j")
    if t in ("j", "+j"):
        return 1j
    if t == "-j":
        return -1j
    try:
        return complex(t)
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


def parse_beta_grid(spec):
    """'' (default), 'a,b,c', or 'geom:lo:hi:n'.  Values must lie in (0, beta_1]."""
    spec = (spec or "").strip()
    if not spec:
        return geometric_betas(0.005, BETA1, 20)
    try:
        if spec.startswith("geom:"):
            _, lo, hi, n = spec.split(":")
            vals = geometric_betas(float(lo), float(hi), int(n))
        else:
            vals = [float(x) for x in spec.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad beta grid {spec!r}") from exc
    for b in vals:
        if not 0 < b <= BETA1 * (1 + 1e-12):
            raise UsageError(f"beta {b} outside (0, beta_1 = {BETA1:.6f}]")
    return [min(b, BETA1) for b in vals]


def read_config_file(path):
    """Flat 'key = value' lines; '#' starts a comment."""
    out = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CASTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _CASTS[key](val)
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}") from exc
    return out


def resolve_config(args):
    values = {}
    if args.config:
        values.update(read_config_file(args.config))
    for key in _CASTS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return RunConfig(**values).validate()


def parse_state(spec, cfg):
    dim, theta = cfg.store_dim, cfg.theta
    kind, _, arg = spec.partition(":")
    if kind == "ground" and not arg:
        return ground_state(dim, theta)
    if kind == "coherent" and arg:
        return coherent_state(parse_complex(arg), dim, theta)
    if kind == "eigen" and arg:
        try:
            n = int(arg)
        except ValueError as exc:
            raise UsageError(f"bad level in {spec!r}") from exc
        try:
            return eigenstate(n, dim, theta, cfg.pad)
        except InvalidParameterError as exc:
            raise UsageError(str(exc)) from exc
    if kind == "mixed" and arg:
        text = Path(arg).read_text()
        try:
            st = MixedState.from_json(text)
        except (InvalidInputError, ValueError) as exc:
            raise UsageError(f"bad state file {arg}: {exc}") from exc
        if st.dim != dim or st.theta != theta:
            raise UsageError(f"state file has dim={st.dim}, theta={st.theta}; config wants {dim}, {theta}")
        return st
    raise UsageError(f"bad state spec {spec!r}; use ground, coherent:K, eigen:N or mixed:FILE")


def _cplx(z):
    return [z.real, z.imag]


def _config_dict(cfg):
    return asdict(cfg)


def _write(cfg, text):
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


def emit_report(cfg, report):
    report = dict(report, config=_config_dict(cfg))
    if cfg.format == "json":
        _write(cfg, json.dumps(report, sort_keys=True, indent=2) + "\n")
    else:
        flat = {k: (json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v)
                for k, v in report.items()}
        emit_csv(cfg, [flat], sorted(flat))


def emit_table(cfg, columns, rows, passed):
    if cfg.format == "json":
        doc = {"columns": columns, "rows": rows, "pass": passed, "config": _config_dict(cfg)}
        _write(cfg, json.dumps(doc, sort_keys=True, indent=2) + "\n")
    else:
        conf = json.dumps(_config_dict(cfg), sort_keys=True)
        emit_csv(cfg, [dict(r, config=conf) for r in rows], columns + ["config"])


def emit_csv(cfg, rows, columns):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\r\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _csv_value(r.get(k)) for k in columns})
    _write(cfg, buf.getvalue())


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return v


def _num(x):
    return None if x is None or not math.isfinite(x) else float(x)


# -- subcommands ---------------------------------------------------------


def cmd_verify_translation(args, cfg):
    kappa = parse_complex(args.kappa)
    phi = parse_state(args.state, cfg)
    est = slv.translation_distance(phi, kappa, cfg.solver_options())
    tol = 0.02 if cfg.rel_tol is None else cfg.rel_tol
    ok = bool(est.gap <= tol * abs(kappa) + 1e-15)
    report = dict(est.to_dict(), command="verify-translation", state=args.state,
                  kappa=_cplx(kappa), rel_gap=(est.gap / abs(kappa) if kappa else 0.0),
                  source=est.source, **{"pass": ok})
    emit_report(cfg, report)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify_pythagoras(args, cfg):
    kappa = parse_complex(args.kappa)
    lam = args.lambda_param
    if not (lam > 0 and math.isfinite(lam)):
        raise UsageError("--lambda must be positive")
    phi = parse_state(args.state, cfg)
    opts = cfg.solver_options()
    moved = translate_state(phi, kappa)
    target = math.sqrt(abs(kappa) ** 2 + lam**-2)
    hint = kappa if kappa != 0 else None
    d_sheet = slv.double_distance(phi, 1, moved, 1, lam, kappa_hint=hint, opts=opts)
    d_internal = slv.double_distance(moved, 1, moved, 2, lam, opts=opts)
    d_diag = slv.double_distance(phi, 1, moved, 2, lam, kappa_hint=hint, opts=opts)
    residual = abs(target - d_diag.lower) / target
    tol = 0.02 if cfg.rel_tol is None else cfg.rel_tol
    ok = bool(residual <= tol)
    report = {
        "command": "verify-pythagoras",
        "state": args.state,
        "kappa": _cplx(kappa),
        "lambda": lam,
        "target": target,
        "residual": residual,
        "distances": {
            "same_sheet": {"lower": d_sheet.lower, "upper": _num(d_sheet.upper)},
            "internal": {"lower": d_internal.lower, "upper": _num(d_internal.upper)},
            "diagonal": d_diag.to_dict(),
        },
        "pass": ok,
    }
    emit_report(cfg, report)
    return EXIT_OK if ok else EXIT_FAIL


SCHUR_COLUMNS = ["beta", "row_sup", "col_sup", "schur_bound", "exact_norm", "in_ball"]


def cmd_schur_scan(args, cfg):
    certs = schur_scan(cfg.betas(), cfg.store_dim)
    rows = [c.as_row() for c in certs]
    ok = all(r["in_ball"] for r in rows)
    emit_table(cfg, SCHUR_COLUMNS, rows, ok)
    return EXIT_OK if ok else EXIT_FAIL


def _pairs(spec, base):
    out = []
    for item in spec.split(";") if ";" in spec else spec.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" in item:
            a, b = item.split(":", 1)
            out.append((parse_complex(a), parse_complex(b)))
        else:
            out.append((base, parse_complex(item)))
    if not out:
        raise UsageError("empty kappa list")
    return out


COHERENT_COLUMNS = ["kappa_re", "kappa_im", "kappa_t_re", "kappa_t_im", "dD_exact", "lower", "rel_gap"]


def cmd_coherent_table(args, cfg):
    base = parse_complex(args.base)
    opts = cfg.solver_options()
    tol = 0.01 if cfg.rel_tol is None else cfg.rel_tol
    rows, ok = [], True
    for k1, k2 in _pairs(args.kappa_list, base):
        a = coherent_state(k1, cfg.store_dim, cfg.theta)
        b = coherent_state(k2, cfg.store_dim, cfg.theta)
        exact = math.sqrt(2) * abs(k2 - k1)
        est = slv.maximize_distance(a, b, opts)
        rel = (exact - est.lower) / exact if exact > 0 else est.lower
        ok = ok and bool(rel <= tol)
        rows.append({"kappa_re": k1.real, "kappa_im": k1.imag, "kappa_t_re": k2.real,
                     "kappa_t_im": k2.imag, "dD_exact": exact, "lower": est.lower,
                     "rel_gap": rel})
    emit_table(cfg, COHERENT_COLUMNS, rows, ok)
    return EXIT_OK if ok else EXIT_FAIL


DFR_COLUMNS = ["kappa_re", "kappa_im", "dL2_self", "dL2_pair", "sqrt_gap", "dD_exact", "rel_err"]


def cmd_dfr_compare(args, cfg):
    base = parse_complex(args.base)
    phi = coherent_state(base, cfg.store_dim, cfg.theta)
    self_len = quantum_length_squared(phi, phi, cfg.pad)
    rows, ok = [], True
    for _, k in _pairs(args.kappa_list, base):
        other = coherent_state(k, cfg.store_dim, cfg.theta)
        pair = quantum_length_squared(phi, other, cfg.pad)
        gap = math.sqrt(max(pair - self_len, 0.0))
        exact = math.sqrt(2) * abs(k - base)
        err = abs(gap - exact) / exact if exact > 0 else gap
        ok = ok and bool(err <= cfg.tolerance)
        rows.append({"kappa_re": k.real, "kappa_im": k.imag, "dL2_self": self_len,
                     "dL2_pair": pair, "sqrt_gap": gap, "dD_exact": exact, "rel_err": err})
    emit_table(cfg, DFR_COLUMNS, rows, ok)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_solve(args, cfg):
    a = parse_state(args.state_a, cfg)
    b = parse_state(args.state_b, cfg)
    est = slv.maximize_distance(a, b, cfg.solver_options())
    report = dict(est.to_dict(), command="solve", state_a=args.state_a, state_b=args.state_b,
                  source=est.source, restarts=est.restarts, notes=list(est.notes))
    emit_report(cfg, report)
    return EXIT_OK


# -- parser --------------------------------------------------------------


def _config_parent():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration (overrides --config)")
    g.add_argument("--config", help="flat key = value file")
    for name, cast in _CASTS.items():
        flag = "--" + name.replace("_", "-")
        alias = "--" + name
        names = [flag] if flag == alias else [flag, alias]
        kw = {"dest": name, "default": None}
        if name == "format":
            kw["choices"] = ["json", "csv"]
        else:
            kw["type"] = cast
        g.add_argument(*names, **kw)
    return p


def build_parser():
    parent = _config_parent()
    p = argparse.ArgumentParser(prog="moyal-distance", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-translation", parents=[parent], help="d(phi, phi_kappa) = |kappa|")
    s.add_argument("--kappa", required=True)
    s.add_argument("--state", default="ground")
    s.set_defaults(func=cmd_verify_translation)

    s = sub.add_parser("verify-pythagoras", parents=[parent], help="distance across the two sheets")
    s.add_argument("--kappa", required=True)
    s.add_argument("--lambda", dest="lambda_param", type=float, required=True)
    s.add_argument("--state", default="ground")
    s.set_defaults(func=cmd_verify_pythagoras)

    s = sub.add_parser("schur-scan", parents=[parent], help="Schur certificates over a beta grid")
    s.set_defaults(func=cmd_schur_scan)

    s = sub.add_parser("coherent-table", parents=[parent], help="solver vs sqrt2|k~ - k|")
    s.add_argument("--kappa-list", required=True,
                   help="comma separated values paired with --base, or 'a:b' pairs separated by ';'")
    s.add_argument("--base", default="0")
    s.set_defaults(func=cmd_coherent_table)

    s = sub.add_parser("dfr-compare", parents=[parent], help="quantum length vs spectral distance")
    s.add_argument("--kappa-list", required=True)
    s.add_argument("--base", default="0")
    s.set_defaults(func=cmd_dfr_compare)

    s = sub.add_parser("solve", parents=[parent], help="generic lower bound for two states")
    s.add_argument("--state-a", required=True)
    s.add_argument("--state-b", required=True)
    s.set_defaults(func=cmd_solve)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except (UsageError, InvalidParameterError, InvalidInputError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TruncationOverflowError, InsufficientTruncationError) as exc:
        print(f"truncation guard: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except InconsistentEstimateError as exc:
        print(f"inconsistent estimate: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
