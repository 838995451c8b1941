"""Command-line front end.

Exit codes: 0 success, 1 validation or precondition failure, 2 numerical gate
failure, 3 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import io
from .complex import (
    ComplexError,
    betti_numbers,
    closed_spectrum,
    coclosed_spectrum,
    euler_characteristic,
    heat_invariants,
    laplacian_spectrum,
    log_torsion,
    validate,
)
from .gluing import (
    DEFAULT_GUARD,
    DEFAULT_STEP,
    SWEEP_COLUMNS,
    GluingData,
    PreconditionError,
    fd_tolerance,
    gluing_residuals,
    random_gluing,
    structural_checks,
    sweep,
    theta_complex,
    theta_grid,
)
from .model import IntervalSpectrum, cylinder_torsion, interval_log_det, interval_torsion, interval_zeta_prime_zero
from .sequences import milnor_terms, random_ses
from .simplicial import SimplicialComplex, builtin, cochain_complex, split

EXIT_OK, EXIT_INVALID, EXIT_GATE, EXIT_IO = 0, 1, 2, 3
HEAT_TIMES = (0.1, 1.0, 10.0)


@dataclass
class RunConfig:
    subcommand: str
    inputs: list = field(default_factory=list)
    tol_rank: float = 1e-10
    tol_residual: float = 1e-8
    tol_agree: float = 1e-9
    fd_step: float = DEFAULT_STEP
    tol_fd: float | None = None
    guard: float = DEFAULT_GUARD
    seed: int = 0
    out: str | None = None
    fmt: str = "text"

    def __post_init__(self):
        for name in ("tol_rank", "tol_residual", "tol_agree", "fd_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.tol_fd is None:
            self.tol_fd = fd_tolerance(self.fd_step)
        elif not self.tol_fd > 0:
            raise ValueError("tol_fd must be positive")
        if not 0 < self.guard < math.pi / 4:
            raise ValueError("guard must lie in (0, pi/4)")

    def header(self) -> str:
        return (f"# torsor {self.subcommand} tol_rank={self.tol_rank:g} tol_residual={self.tol_residual:g} "
                f"tol_agree={self.tol_agree:g} fd_step={self.fd_step:g} tol_fd={self.tol_fd:g} "
                f"guard={self.guard:g} seed={self.seed}")


class Report:
    """Ordered key/value report rendered as text (12 significant digits) or JSON."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.items: dict = {}

    def __setitem__(self, key, value):
        self.items[key] = value

    def emit(self, stream=None) -> None:
        stream = stream or sys.stdout
        if self.cfg.fmt == "json":
            payload = {"config": asdict(self.cfg), **self.items}
            stream.write(json.dumps(payload, indent=1, default=_jsonable) + "\n")
            return
        stream.write(self.cfg.header() + "\n")
        for k, v in self.items.items():
            stream.write(f"{k} = {_text(v)}\n")


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(type(v))


def _text(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    if isinstance(v, dict):
        return ", ".join(f"{k}: {_text(x)}" for k, x in v.items())
    if isinstance(v, (list, tuple, np.ndarray)):
        return " ".join(_text(x) for x in v)
    return str(v)


# ----------------------------------------------------------- input loading


def _kind(obj) -> str:
    if isinstance(obj, dict):
        if "vertices" in obj:
            return "triangulation"
        if {"C1", "C2", "B"} <= obj.keys():
            return "gluing"
        if {"A", "C", "B"} <= obj.keys():
            return "ses"
        if "dims" in obj:
            return "complex"
    raise io.FormatError("unrecognized file: expected a complex, sequence, gluing or triangulation object")


def _load(path):
    obj = io.load_json(path)
    kind = _kind(obj)
    reader = {
        "complex": io.complex_from_json,
        "ses": io.ses_from_json,
        "gluing": io.gluing_from_json,
        "triangulation": io.triangulation_from_json,
    }[kind]
    return kind, reader(obj)


def _triangulation(args):
    if getattr(args, "builtin", None):
        return builtin(args.builtin)
    if args.input:
        kind, data = _load(args.input)
        if kind != "triangulation":
            raise io.FormatError(f"{args.input}: expected a triangulation, got a {kind}")
        return data
    raise ValueError("give a triangulation file or --builtin")


def _complex(args):
    """A complex from a complex file, a triangulation file or a builtin name."""
    if getattr(args, "builtin", None):
        k, local = builtin(args.builtin)
        return cochain_complex(k, local)
    if not args.input:
        raise ValueError("an input file is required")
    kind, data = _load(args.input)
    if kind == "complex":
        return data
    if kind == "triangulation":
        return cochain_complex(*data)
    raise io.FormatError(f"{args.input}: expected a complex, got a {kind}")


def _parse_split(text: str, k: SimplicialComplex) -> SimplicialComplex:
    """``"0,3"`` is two vertices; ``"0-4,1-5"`` two edges; faces are closed automatically."""
    simplices = []
    for tok in text.replace(";", ",").split(","):
        tok = tok.strip()
        if tok:
            simplices.append(tuple(sorted(int(v) for v in tok.split("-"))))
    if not simplices:
        raise ValueError("empty --split")
    return SimplicialComplex.from_simplices(simplices, n_vertices=k.n_vertices)


def _dims(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def _gluing(args) -> GluingData:
    if args.split:
        k, local = _triangulation(args)
        return split(k, _parse_split(args.split, k), local)
    if getattr(args, "builtin", None):
        raise ValueError("--builtin needs --split")
    if args.input:
        kind, data = _load(args.input)
        if kind == "gluing":
            return data
        if kind == "triangulation":
            raise ValueError("a triangulation needs --split")
        raise io.FormatError(f"{args.input}: expected gluing data, got a {kind}")
    return random_gluing(_dims(args.dims_b), _dims(args.dims_k1), _dims(args.dims_k2), seed=args.seed,
                         isometric=not args.non_isometric)


# ----------------------------------------------------------- subcommands


def cmd_check(cfg: RunConfig, args) -> int:
    rep = Report(cfg)
    if args.builtin:
        k, local = builtin(args.builtin)
        kind, data = "triangulation", (k, local)
    else:
        kind, data = _load(args.input)
    rep["kind"] = kind
    if kind == "complex":
        diag = validate(data)
        rep["dims"] = list(data.dims)
        rep["worst_d2"] = diag.worst_d2
        rep["betti"] = betti_numbers(data, cfg.tol_rank)
    elif kind == "ses":
        data.validate()
        rep["dims_C"] = list(data.C.dims)
    elif kind == "gluing":
        data.validate()
        rep["partial_isometry"] = data.partial_isometry
    else:
        k, local = data
        k.validate()
        local.validate(k)
        rep["counts"] = k.counts()
        rep["flatness_defect"] = local.flatness_defect(k)
    rep["valid"] = True
    rep.emit()
    return EXIT_OK


def cmd_torsion(cfg: RunConfig, args) -> int:
    c = _complex(args)
    validate(c)
    r = log_torsion(c, "both", cfg.tol_rank)
    rep = Report(cfg)
    rep["dims"] = list(c.dims)
    rep["betti"] = r.betti_numbers
    rep["euler_characteristic"] = r.euler_characteristic
    if args.method in ("det", "both"):
        rep["log_tau_det"] = r.log_torsion_det
    if args.method in ("zeta", "both"):
        rep["log_tau_zeta"] = r.log_torsion_zeta
    rep["log_tau"] = r.log_torsion_zeta if args.method == "zeta" else r.log_torsion_det
    rep["residual"] = r.residual
    gate = cfg.tol_agree * (1 + abs(r.value))
    rep["gate"] = gate
    rep["ok"] = r.residual < gate
    rep.emit()
    return EXIT_OK if r.residual < gate else EXIT_GATE


def cmd_hodge(cfg: RunConfig, args) -> int:
    c = _complex(args)
    validate(c)
    rep = Report(cfg)
    rep["dims"] = list(c.dims)
    rep["betti"] = betti_numbers(c, cfg.tol_rank)
    chi = euler_characteristic(c, cfg.tol_rank)
    rep["euler_characteristic"] = chi
    worst = 0.0
    for j in c.degrees():
        rep[f"spectrum_{j}"] = laplacian_spectrum(c, j)
        rep[f"closed_spectrum_{j}"] = closed_spectrum(c, j, cfg.tol_rank)
        rep[f"coclosed_spectrum_{j}"] = coclosed_spectrum(c, j, cfg.tol_rank)
    for t in HEAT_TIMES:
        h = heat_invariants(c, t)
        res = abs(h.alternating_sum - chi)
        worst = max(worst, res)
        rep[f"mckean_singer_residual_t{t:g}"] = res
    rep["ok"] = worst < cfg.tol_residual
    rep.emit()
    return EXIT_OK if worst < cfg.tol_residual else EXIT_GATE


def cmd_milnor(cfg: RunConfig, args) -> int:
    if args.input:
        kind, s = _load(args.input)
        if kind != "ses":
            raise io.FormatError(f"{args.input}: expected a short exact sequence, got a {kind}")
    else:
        s = random_ses(_dims(args.dims_a), _dims(args.dims_b), seed=args.seed, random_grams=args.random_grams)
    s.validate()
    terms = milnor_terms(s, cfg.tol_rank)
    rep = Report(cfg)
    for k, v in terms.items():
        rep[f"log_tau_{k}" if k in ("A", "B", "C", "les") else k] = v
    res = abs(terms["C"] - terms["A"] - terms["B"] - terms["les"] + terms["local"])
    rep["residual"] = res
    rep["ok"] = res < cfg.tol_residual
    rep.emit()
    return EXIT_OK if res < cfg.tol_residual else EXIT_GATE


def _requested_checks(args, g: GluingData) -> list[str]:
    if args.check:
        return [c.strip().lower() for c in args.check.split(",") if c.strip()]
    return ["ha11", "ha12", "ha13"] if g.partial_isometry else ["ha11"]


def cmd_glue(cfg: RunConfig, args) -> int:
    g = _gluing(args)
    checks = _requested_checks(args, g)
    theta = args.theta
    gr = gluing_residuals(g, theta, checks)
    rep = Report(cfg)
    rep["theta"] = theta
    rep["checks"] = checks
    for k, v in gr.terms.items():
        rep[k] = v
    if "ha13_correction" in gr.terms:
        rep["ha13_correction_formula"] = "log(cos theta) * chi(B)"
    worst = 0.0
    for k, v in gr.residuals.items():
        rep[f"residual_{k}"] = v
        worst = max(worst, v)
    if args.structural and g.partial_isometry:
        for k, v in structural_checks(g, theta, cfg.fd_step, cfg.guard).items():
            rep[f"structural_{k}"] = v
    rep["ok"] = worst < cfg.tol_residual
    rep.emit()
    return EXIT_OK if worst < cfg.tol_residual else EXIT_GATE


def _fmt_cell(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_sweep_csv(rows: list[dict], stream) -> None:
    cols = list(SWEEP_COLUMNS) + sorted({k for r in rows for k in r if k.startswith("betti_")})
    if any("heat_probe" in r for r in rows):
        cols.append("heat_probe")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt_cell(r.get(c, 0)) for c in cols])


def cmd_sweep(cfg: RunConfig, args) -> int:
    g = _gluing(args)
    start = cfg.guard if args.theta_from is None else args.theta_from
    stop = math.pi / 2 - cfg.guard if args.theta_to is None else args.theta_to
    rows = sweep(g, theta_grid(start, stop, args.steps), cfg.fd_step, cfg.guard, args.explore_heat)
    worst = max((max(r["res_ha7"], r["res_ha8"], r["res_ha9"]) for r in rows), default=0.0)
    if cfg.fmt == "json":
        payload = json.dumps({"config": asdict(cfg), "rows": rows, "max_residual": worst}, indent=1,
                             default=_jsonable) + "\n"
        if cfg.out:
            with open(cfg.out, "w") as fh:
                fh.write(payload)
        else:
            sys.stdout.write(payload)
    elif cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            write_sweep_csv(rows, fh)
        sys.stdout.write(cfg.header() + "\n")
        sys.stdout.write(f"rows = {len(rows)}\nmax_residual = {worst:.12g}\nout = {cfg.out}\n")
    else:
        write_sweep_csv(rows, sys.stdout)
    if worst > cfg.tol_fd:
        sys.stderr.write(f"max finite-difference residual {worst:.3g} exceeds tol_fd={cfg.tol_fd:g}\n")
        return EXIT_GATE
    return EXIT_OK


def cmd_simplicial(cfg: RunConfig, args) -> int:
    k, local = _triangulation(args)
    k.validate()
    local.validate(k)
    c = cochain_complex(k, local)
    r = log_torsion(c, "both", cfg.tol_rank)
    rep = Report(cfg)
    rep["counts"] = k.counts()
    rep["betti"] = r.betti_numbers
    rep["euler_characteristic"] = r.euler_characteristic
    rep["log_tau"] = r.value
    rep["residual"] = r.residual
    ok = r.residual < cfg.tol_agree * (1 + abs(r.value))
    if args.split:
        g = split(k, _parse_split(args.split, k), local)
        gr = gluing_residuals(g, args.theta, ("ha11", "ha12", "ha13"))
        for key, v in gr.residuals.items():
            rep[f"residual_{key}"] = v
            ok = ok and v < cfg.tol_residual
        rep["betti_glued"] = betti_numbers(theta_complex(g, args.theta).compressed, cfg.tol_rank)
    if cfg.out:
        io.dump_json(io.complex_to_json(c), cfg.out)
        rep["out"] = cfg.out
    rep["ok"] = ok
    rep.emit()
    return EXIT_OK if ok else EXIT_GATE


def cmd_model(cfg: RunConfig, args) -> int:
    rep = Report(cfg)
    if args.model == "interval":
        spec = IntervalSpectrum(args.length)
        rep["length"] = args.length
        rep["zeta_prime_0"] = interval_zeta_prime_zero(spec)
        rep["log_det"] = interval_log_det(spec)
        rep["log_T"] = interval_torsion(args.length)
    else:
        if not args.eps > 0:
            raise ValueError(f"cylinder length must be positive, got {args.eps}")
        if os.path.exists(args.base):
            ns = argparse.Namespace(builtin=None, input=args.base)
        else:
            ns = argparse.Namespace(builtin=args.base, input=None)
        base = _complex(ns)
        rep["eps"] = args.eps
        rep["base_euler_characteristic"] = euler_characteristic(base)
        rep["log_T_base"] = log_torsion(base, "det").log_torsion_det
        rep["log T"] = cylinder_torsion(base, args.eps)
    rep.emit()
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "torsion": cmd_torsion,
    "hodge": cmd_hodge,
    "milnor": cmd_milnor,
    "glue": cmd_glue,
    "sweep": cmd_sweep,
    "simplicial": cmd_simplicial,
    "model": cmd_model,
}


# ----------------------------------------------------------- argument parsing


def _common(p: argparse.ArgumentParser, fmt_default: str = "text") -> None:
    p.add_argument("--tol-rank", type=float, default=1e-10)
    p.add_argument("--tol-residual", type=float, default=1e-8)
    p.add_argument("--tol-agree", type=float, default=1e-9, help="relative gate for two-method torsion agreement")
    p.add_argument("--tol-fd-step", type=float, default=DEFAULT_STEP, dest="fd_step")
    p.add_argument("--tol-fd", type=float, default=None, help="finite-difference gate (default max(1e-6, 10 h^2))")
    p.add_argument("--guard", type=float, default=DEFAULT_GUARD)
    p.add_argument("--seed", type=int, default=int(os.environ.get("TORSOR_SEED", "0")))
    p.add_argument("--out", default=None)
    p.add_argument("--format", dest="fmt", choices=("text", "json", "csv"), default=fmt_default)


def _gluing_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", nargs="?", help="gluing or triangulation JSON (random gluing if omitted)")
    p.add_argument("--builtin", help="builtin triangulation, e.g. interval_2 or circle_6")
    p.add_argument("--split", help="interface simplices, e.g. '1' or '0,3' or '0-4,1-5'")
    p.add_argument("--dims-b", default="1,2,1")
    p.add_argument("--dims-k1", default="2,3,1")
    p.add_argument("--dims-k2", default="1,2,2")
    p.add_argument("--non-isometric", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torsor", description="Torsion of finite-dimensional Hilbert complexes.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("check", help="validate an input file")
    p.add_argument("input", nargs="?")
    p.add_argument("--builtin")
    _common(p)

    for name, text in (("torsion", "log torsion by both methods"), ("hodge", "Hodge data and heat checks")):
        p = sub.add_parser(name, help=text)
        p.add_argument("input", nargs="?", help="complex or triangulation JSON")
        p.add_argument("--builtin")
        if name == "torsion":
            p.add_argument("--method", choices=("det", "zeta", "both"), default="both")
        _common(p)

    p = sub.add_parser("milnor", help="Milnor identity for a short exact sequence")
    p.add_argument("input", nargs="?", help="sequence JSON (random if omitted)")
    p.add_argument("--dims-a", default="2,3,1")
    p.add_argument("--dims-b", default="1,3,2")
    p.add_argument("--random-grams", action="store_true")
    _common(p)

    p = sub.add_parser("glue", help="gluing identities at one angle")
    _gluing_source(p)
    p.add_argument("--theta", type=float, default=math.pi / 4)
    p.add_argument("--check", help="comma list of ha11, ha12, ha12_milnor, ha13")
    p.add_argument("--no-structural", dest="structural", action="store_false")
    _common(p)

    p = sub.add_parser("sweep", help="theta sweep with finite-difference checks")
    _gluing_source(p)
    p.add_argument("--from", dest="theta_from", type=float, default=None)
    p.add_argument("--to", dest="theta_to", type=float, default=None)
    p.add_argument("--steps", type=int, default=33)
    p.add_argument("--explore-heat", action="store_true")
    _common(p, "csv")

    p = sub.add_parser("simplicial", help="cochain complex of a triangulation")
    p.add_argument("input", nargs="?", help="triangulation JSON")
    p.add_argument("--builtin")
    p.add_argument("--split")
    p.add_argument("--theta", type=float, default=math.pi / 4)
    _common(p)

    p = sub.add_parser("model", help="zeta-regularized model torsion")
    p.add_argument("model", choices=("interval", "cylinder"))
    p.add_argument("--length", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--base", default="circle_3", help="builtin name or complex/triangulation file")
    _common(p)
    return parser


def config_from_args(args) -> RunConfig:
    return RunConfig(
        subcommand=args.subcommand,
        inputs=[x for x in (getattr(args, "input", None),) if x],
        tol_rank=args.tol_rank,
        tol_residual=args.tol_residual,
        tol_agree=args.tol_agree,
        fd_step=args.fd_step,
        tol_fd=args.tol_fd,
        guard=args.guard,
        seed=args.seed,
        out=args.out,
        fmt=args.fmt,
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.subcommand](cfg, args)
    except (io.FormatError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    except (PreconditionError, ComplexError, ValueError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
