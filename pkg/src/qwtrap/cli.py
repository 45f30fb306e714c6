"""Command-line front end: single efficiency reports, sweeps, dark-state checks.

Output is deterministic: floats are written as 12-significant-digit decimal
strings, rows follow the order of the sweep axes as given (row-major), and
parallel evaluation only changes wall time.
"""

from __future__ import annotations

import argparse
import ast
import cmath
import csv
import io
import itertools
import json
import math
import operator
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .analytic import (
    Scenario,
    UncatalogedScenario,
    analytic_efficiency,
    default_trap,
    recipe_edges,
)
from .dynamics import HorizonError, IntegrationError, efficiency_numeric
from .graph import (
    TWO_PI,
    Complete,
    CompleteBipartite,
    FamilySpec,
    Graph,
    Star,
    build_family,
    format_family,
    parse_family,
    perturb_edge,
    read_edge_list,
)
from .hamiltonian import Localized, Superposition, TransportProblem, transport_hamiltonian
from .krylov import efficiency_overlap, krylov_basis
from .nulleff import family_null_conditions, has_real_eigenvalue, is_null_state, is_stationary

ANALYTIC_TOL = 1e-9
NUMERIC_TOL = 1e-3

COLUMNS = [
    "scenario_id", "N", "N1", "N2", "trap", "case", "lambda", "theta", "gamma",
    "kappa", "m", "eta_overlap", "eta_numeric", "horizon", "flags",
]
NULL_COLUMNS = [
    "scenario_id", "N", "trap", "family", "conditions", "residuals",
    "is_null", "stationary", "eps_real", "eps_imag", "flags",
]


class CliError(ValueError):
    pass


# ---------------------------------------------------------------------------
# number parsing

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi, "tau": TWO_PI, "e": math.e, "j": 1j, "i": 1j}
_FUNCS = {"sqrt": cmath.sqrt, "exp": cmath.exp, "cos": cmath.cos, "sin": cmath.sin}


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
        return node.value
    if isinstance(node, ast.Name) and node.id.lower() in _NAMES:
        return _NAMES[node.id.lower()]
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
        return _UNOPS[type(node.op)](_eval_node(node.operand))
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
        return _FUNCS[node.func.id](_eval_node(node.args[0]))
    raise CliError(f"unsupported expression element {ast.dump(node)}")


def parse_complex(text: str) -> complex:
    """Arithmetic over numbers, ``pi``, ``j`` and sqrt/exp/cos/sin."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise CliError(f"cannot parse number {text!r}") from exc
    try:
        return complex(_eval_node(tree))
    except (ZeroDivisionError, OverflowError, TypeError) as exc:
        raise CliError(f"cannot evaluate {text!r}: {exc}") from exc


def parse_real(text: str) -> float:
    z = parse_complex(text)
    if abs(z.imag) > 0:
        raise CliError(f"expected a real number, got {text!r}")
    return z.real


def parse_int(text: str) -> int:
    x = parse_real(text)
    if x != int(x):
        raise CliError(f"expected an integer, got {text!r}")
    return int(x)


def parse_axis_values(text: str, integer: bool = False) -> list:
    """``grid:N``, ``lin:a:b:n``, ``log:a:b:n``, ``a..b`` or a comma list."""
    text = text.strip()
    conv = parse_int if integer else parse_real
    if text.startswith("grid:"):
        n = parse_int(text[5:])
        if n < 1:
            raise CliError("grid needs at least one point")
        return [k * TWO_PI / n for k in range(n)]
    if text.startswith(("lin:", "log:")):
        parts = text[4:].split(":")
        if len(parts) != 3:
            raise CliError(f"expected {text[:3]}:start:stop:count, got {text!r}")
        a, b, n = parse_real(parts[0]), parse_real(parts[1]), parse_int(parts[2])
        if n < 1:
            raise CliError("count must be positive")
        if text.startswith("lin:"):
            vals = np.linspace(a, b, n)
        else:
            if a <= 0 or b <= 0:
                raise CliError("log spacing needs positive bounds")
            vals = np.geomspace(a, b, n)
        out = [float(v) for v in vals]
        return [int(round(v)) for v in out] if integer else out
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = parse_int(a), parse_int(b)
        if hi < lo:
            raise CliError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    vals = [conv(v) for v in text.split(",") if v.strip()]
    if not vals:
        raise CliError(f"no values in {text!r}")
    return vals


_AXES = {"lambda": "lam", "lam": "lam", "theta": "theta", "gamma": "gamma",
         "kappa": "kappa", "n": "N", "n1": "N1", "n2": "N2"}


def parse_sweep(text: str) -> tuple[str, list]:
    if "=" not in text:
        raise CliError(f"sweep axis must look like name=values, got {text!r}")
    name, values = text.split("=", 1)
    key = _AXES.get(name.strip().lower())
    if key is None:
        raise CliError(f"unknown sweep axis {name!r}; choose from lambda, theta, gamma, kappa, N, N1, N2")
    return key, parse_axis_values(values, integer=key in ("N", "N1", "N2"))


def parse_perturbation(text: str) -> tuple[int, int, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise CliError(f"perturbation must be r,s,lambda,theta, got {text!r}")
    return parse_int(parts[0]), parse_int(parts[1]), parse_real(parts[2]), parse_real(parts[3])


def parse_superposition(text: str) -> Superposition:
    parts = text.split(",")
    if len(parts) not in (2, 3):
        raise CliError(f"superposition must be i,j[,gamma], got {text!r}")
    gamma = parse_real(parts[2]) if len(parts) == 3 else 0.0
    try:
        return Superposition(parse_int(parts[0]), parse_int(parts[1]), gamma)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def parse_state(text: str) -> np.ndarray:
    return np.array([parse_complex(v) for v in text.split(",")], dtype=complex)


# ---------------------------------------------------------------------------
# configuration and reports


@dataclass(frozen=True)
class RunConfig:
    graph: str
    family: FamilySpec | None
    trap: int
    kappa: float = 1.0
    initial: Localized | Superposition | None = None
    perturbations: tuple[tuple[int, int, float, float], ...] = ()
    method: str = "overlap"
    lam: float | None = None
    theta: float | None = None
    edge_list: Graph | None = field(default=None, compare=False, repr=False)

    def base_graph(self) -> Graph:
        if self.family is not None:
            return build_family(self.family)
        return replace(self.edge_list, perturbations={})

    def perturbed_graph(self) -> Graph:
        g = self.base_graph()
        if self.family is None:
            for (r, s), (lam, th) in self.edge_list.perturbations.items():
                g = perturb_edge(g, r, s, lam, th)
        for r, s, lam, th in self.perturbations:
            g = perturb_edge(g, r, s, lam, th)
        if self.lam is not None:
            base = TransportProblem(g, self.trap, self.kappa, self.initial)
            for hub, leaf, role in recipe_edges(base):
                g = perturb_edge(g, hub, leaf, self.lam, (self.theta or 0.0) if role == "theta" else 0.0)
        return g

    def problem(self) -> TransportProblem:
        if self.initial is None:
            raise CliError("an initial state is required (--localized or --superpose)")
        return TransportProblem(self.perturbed_graph(), self.trap, self.kappa, self.initial)


@dataclass
class EfficiencyReport:
    scenario_id: str
    graph: str
    n: int
    n1: int | None
    n2: int | None
    trap: int
    kappa: float
    initial: str
    gamma: float | None
    perturbations: list[tuple[int, int, float, float]]
    lam: float | None
    theta: float | None
    case: str
    m: int
    eta_overlap: float
    krylov_residual: float
    off_tridiagonal: float
    eta_numeric: float | None = None
    eta_survival: float | None = None
    horizon: float | None = None
    eta_analytic: float | None = None
    asymptotic: bool = False
    flags: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        bad = {"analytic-mismatch", "numeric-mismatch", "horizon-error", "integration-error"}
        return not bad.intersection(self.flags)

    def row(self) -> dict[str, str]:
        return {
            "scenario_id": self.scenario_id,
            "N": str(self.n),
            "N1": _fmt(self.n1),
            "N2": _fmt(self.n2),
            "trap": str(self.trap),
            "case": self.case,
            "lambda": _fmt(self.lam),
            "theta": _fmt(self.theta),
            "gamma": _fmt(self.gamma),
            "kappa": _fmt(self.kappa),
            "m": str(self.m),
            "eta_overlap": _fmt(self.eta_overlap),
            "eta_numeric": _fmt(self.eta_numeric),
            "horizon": _fmt(self.horizon),
            "flags": ";".join(self.flags),
        }

    def as_json(self) -> dict:
        return {
            "scenario": {
                "id": self.scenario_id,
                "graph": self.graph,
                "N": self.n,
                "N1": self.n1,
                "N2": self.n2,
                "trap": self.trap,
                "kappa": _fmt(self.kappa),
                "initial": self.initial,
                "perturbations": [[r, s, _fmt(lam), _fmt(th)] for r, s, lam, th in self.perturbations],
            },
            "case": self.case,
            "krylov_dim": self.m,
            "eta_overlap": _fmt(self.eta_overlap),
            "eta_numeric": _fmt(self.eta_numeric) or None,
            "eta_survival": _fmt(self.eta_survival) or None,
            "horizon": _fmt(self.horizon) or None,
            "eta_analytic": _fmt(self.eta_analytic) or None,
            "asymptotic": self.asymptotic,
            "residuals": {
                "krylov_termination": _fmt(self.krylov_residual),
                "off_tridiagonal": _fmt(self.off_tridiagonal),
            },
            "flags": list(self.flags),
            "ok": self.ok,
        }


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x) + 0.0, ".12g")


def _describe_initial(ini) -> str:
    if isinstance(ini, Localized):
        return f"localized:{ini.l}"
    return f"superpose:{ini.l},{ini.k},{_fmt(ini.gamma)}"


def _summary_lam_theta(perts):
    if not perts:
        return None, None
    lam = perts[0][2]
    nonzero = [th for *_, th in perts if th != 0.0]
    return lam, (nonzero[0] if nonzero else perts[0][3])


def evaluate(cfg: RunConfig, scenario_id: str = "s0000") -> EfficiencyReport:
    problem = cfg.problem()
    g = problem.graph
    h = problem.hamiltonian()
    psi0 = problem.psi0()
    basis = krylov_basis(h, problem.trap)
    eta_o = efficiency_overlap(basis, psi0)
    perts = [(r, s, lam, th) for (r, s), (lam, th) in sorted(g.perturbations.items())]
    lam, theta = (cfg.lam, cfg.theta or 0.0) if cfg.lam is not None else _summary_lam_theta(perts)
    fam = cfg.family
    rep = EfficiencyReport(
        scenario_id=scenario_id,
        graph=cfg.graph if fam is None else format_family(fam),
        n=g.n,
        n1=fam.n1 if isinstance(fam, CompleteBipartite) else None,
        n2=fam.n2 if isinstance(fam, CompleteBipartite) else None,
        trap=problem.trap,
        kappa=problem.kappa,
        initial=_describe_initial(problem.initial),
        gamma=problem.initial.gamma if isinstance(problem.initial, Superposition) else None,
        perturbations=perts,
        lam=lam,
        theta=theta,
        case="edge-list" if fam is None else "uncataloged",
        m=basis.m,
        eta_overlap=eta_o,
        krylov_residual=basis.residual_log[-1] if basis.residual_log else 0.0,
        off_tridiagonal=basis.off_tridiagonal(),
    )
    if fam is not None:
        try:
            cf = analytic_efficiency(Scenario.from_graph(g, problem.trap, problem.initial))
        except UncatalogedScenario:
            cf = None
        if cf is not None:
            rep.case, rep.eta_analytic, rep.asymptotic = cf.label, cf.eta, cf.asymptotic
            if cf.asymptotic:
                rep.flags.append("asymptotic")
            rep.flags.append("analytic-match" if abs(cf.eta - eta_o) <= ANALYTIC_TOL else "analytic-mismatch")
    if cfg.method in ("dynamics", "both"):
        try:
            num = efficiency_numeric(h, psi0, problem.trap, problem.kappa)
            rep.eta_numeric, rep.eta_survival, rep.horizon = num.eta, num.eta_survival, num.horizon
        except HorizonError as exc:
            est = exc.estimate
            rep.eta_numeric, rep.eta_survival, rep.horizon = est.eta, est.eta_survival, est.horizon
            rep.flags.append("horizon-error")
        except IntegrationError:
            rep.flags.append("integration-error")
        if rep.eta_numeric is not None and "horizon-error" not in rep.flags:
            ref = rep.eta_analytic if rep.eta_analytic is not None else eta_o
            rep.flags.append("numeric-match" if abs(rep.eta_numeric - ref) <= NUMERIC_TOL else "numeric-mismatch")
    return rep


# ---------------------------------------------------------------------------
# sweeps


def _resize(family: FamilySpec, key: str, value: int) -> FamilySpec:
    if key == "N":
        if isinstance(family, Complete):
            return Complete(value)
        if isinstance(family, Star):
            return Star(value, family.trap_position)
        raise CliError("the N axis applies to complete and star graphs; use N1 or N2 for cbg")
    if not isinstance(family, CompleteBipartite):
        raise CliError(f"the {key} axis applies to cbg graphs only")
    return CompleteBipartite(value, family.n2) if key == "N1" else CompleteBipartite(family.n1, value)


def sweep_configs(cfg: RunConfig, axes: list[tuple[str, list]]) -> list[RunConfig]:
    if not axes:
        raise CliError("at least one --sweep axis is required")
    if len(axes) > 2:
        raise CliError("at most two sweep axes per invocation")
    names = [k for k, _ in axes]
    if len(set(names)) != len(names):
        raise CliError("each sweep axis may appear once")
    if {"lam", "theta"} & set(names) and cfg.perturbations:
        raise CliError("lambda/theta axes drive the recommended perturbation; drop --perturb")
    if {"N", "N1", "N2"} & set(names) and cfg.family is None:
        raise CliError("size axes need a graph family, not an edge list")
    out = []
    for point in itertools.product(*(vals for _, vals in axes)):
        c = cfg
        for key, val in zip(names, point):
            if key == "lam":
                c = replace(c, lam=val, theta=c.theta or 0.0)
            elif key == "theta":
                c = replace(c, theta=val, lam=c.lam if c.lam is not None else 1.0)
            elif key == "gamma":
                if not isinstance(c.initial, Superposition):
                    raise CliError("the gamma axis needs --superpose")
                c = replace(c, initial=Superposition(c.initial.l, c.initial.k, val))
            elif key == "kappa":
                c = replace(c, kappa=val)
            else:
                c = replace(c, family=_resize(c.family, key, val))
        out.append(c)
    return out


def _workers() -> int:
    env = os.environ.get("QWT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise CliError(f"QWT_THREADS must be an integer, got {env!r}") from None
    return min(8, os.cpu_count() or 1)


def run_sweep(configs: list[RunConfig]) -> list[EfficiencyReport]:
    ids = [f"s{i:04d}" for i in range(len(configs))]
    workers = min(_workers(), len(configs))
    if workers <= 1:
        return [evaluate(c, i) for c, i in zip(configs, ids)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(evaluate, configs, ids))


# ---------------------------------------------------------------------------
# output


def render_csv(rows: list[dict[str, str]], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def render_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument handling


def _config_from_args(args) -> RunConfig:
    edge_list = None
    try:
        family = parse_family(args.graph)
    except ValueError:
        path = Path(args.graph)
        if not path.is_file():
            raise CliError(f"--graph is neither a graph family (complete:N, cbg:N1,N2, star:N[:outer]) nor a readable edge list: {args.graph!r}")
        family = None
        edge_list = read_edge_list(path, parse_number=parse_real)
    if args.trap is not None:
        trap = parse_int(args.trap)
    else:
        trap = default_trap(family) if family is not None else 0
    initial = None
    if getattr(args, "localized", None) is not None:
        initial = Localized(parse_int(args.localized))
    elif getattr(args, "superpose", None) is not None:
        initial = parse_superposition(args.superpose)
    perts = tuple(parse_perturbation(p) for p in (getattr(args, "perturb", None) or []))
    kappa = parse_real(args.kappa)
    return RunConfig(
        graph=args.graph,
        family=family,
        trap=trap,
        kappa=kappa,
        initial=initial,
        perturbations=perts,
        method=getattr(args, "method", "overlap"),
        lam=parse_real(args.lam) if getattr(args, "lam", None) is not None else None,
        theta=parse_real(args.theta) if getattr(args, "theta", None) is not None else None,
        edge_list=edge_list,
    )


def _add_common(p: argparse.ArgumentParser, with_state: bool = True) -> None:
    p.add_argument("--graph", required=True,
                   help="complete:N, cbg:N1,N2, star:N, star:N:outer, or an edge-list file")
    p.add_argument("--trap", help="trap vertex (default 0; 1 for star:N:outer)")
    p.add_argument("--kappa", default="1.0", help="trapping rate (default 1.0)")
    p.add_argument("--perturb", action="append", metavar="r,s,lambda,theta",
                   help="add lambda*exp(i*theta) to H[r,s] (repeatable)")
    p.add_argument("--out", help="write to this file instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv" if with_state else "json")
    if with_state:
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--localized", metavar="i", help="start on vertex i")
        g.add_argument("--superpose", metavar="i,j[,gamma]",
                       help="start in (|i> + exp(i*gamma)|j>)/sqrt(2)")
        p.add_argument("--method", choices=("overlap", "dynamics", "both"), default="overlap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwtrap",
        description="Transport efficiency of quantum walks with a trap vertex.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("efficiency", help="efficiency of a single scenario")
    _add_common(p)

    p = sub.add_parser("sweep", help="efficiency over a grid of parameters")
    _add_common(p)
    p.add_argument("--sweep", action="append", default=[], metavar="axis=values",
                   help="axis in lambda, theta, gamma, kappa, N, N1, N2; values as a,b,c | grid:n | "
                        "lin:a:b:n | log:a:b:n | a..b (at most two axes)")
    p.add_argument("--lam", help="magnitude of the recommended perturbation when theta is swept")
    p.add_argument("--theta", help="phase of the recommended perturbation when lambda is swept")

    p = sub.add_parser("null-check", help="test whether a state is dark and/or stationary")
    _add_common(p, with_state=False)
    p.add_argument("--state", required=True, help="comma-separated complex amplitudes, one per vertex")
    p.add_argument("--normalize", action="store_true", help="normalize the state before checking")
    p.add_argument("--tol", default="1e-10", help="tolerance for nullity and stationarity")
    return parser


def cmd_efficiency(args) -> int:
    rep = evaluate(_config_from_args(args))
    text = render_json(rep.as_json()) if args.format == "json" else render_csv([rep.row()], COLUMNS)
    _emit(text, args.out)
    return 0 if rep.ok else 1


def cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    configs = sweep_configs(cfg, [parse_sweep(s) for s in args.sweep])
    reports = run_sweep(configs)
    if args.format == "json":
        text = render_json({"columns": COLUMNS, "rows": [r.row() for r in reports]})
    else:
        text = render_csv([r.row() for r in reports], COLUMNS)
    _emit(text, args.out)
    return 0 if all(r.ok for r in reports) else 1


def null_report(cfg: RunConfig, psi: np.ndarray, tol: float = 1e-10, normalize: bool = False) -> dict:
    g = cfg.perturbed_graph()
    if psi.shape != (g.n,):
        raise CliError(f"state has {psi.shape[0]} amplitudes, graph has {g.n} vertices")
    norm = float(np.linalg.norm(psi))
    if normalize:
        if norm == 0:
            raise CliError("cannot normalize the zero vector")
        psi = psi / norm
    elif abs(norm - 1.0) > 1e-9:
        raise CliError(f"state is not normalized (norm {norm:.12g}); pass --normalize")
    if g.perturbations:
        ham = TransportProblem(g, cfg.trap, cfg.kappa, Localized((cfg.trap + 1) % g.n)).hamiltonian()
    else:
        ham = transport_hamiltonian(g, cfg.trap, cfg.kappa)
    basis = krylov_basis(ham, cfg.trap)
    null = is_null_state(basis, psi, tol)
    stat, eps = is_stationary(ham, psi, tol)
    flags = []
    names, residuals, tag = [], [], "edge-list" if cfg.family is None else format_family(cfg.family)
    if cfg.family is not None:
        cond = family_null_conditions(cfg.family, cfg.trap)
        names, residuals = list(cond.labels), cond.residuals(psi)
        if not g.perturbations:
            agree = (max(residuals) <= tol) == null
            flags.append("conditions-agree" if agree else "conditions-disagree")
    if stat and has_real_eigenvalue(eps) and not null:
        flags.append("stationary-not-null")
    return {
        "scenario_id": "s0000",
        "N": str(g.n),
        "trap": str(cfg.trap),
        "family": tag,
        "conditions": ";".join(names),
        "residuals": ";".join(_fmt(r) for r in residuals),
        "is_null": "true" if null else "false",
        "stationary": "true" if stat else "false",
        "eps_real": _fmt(eps.real),
        "eps_imag": _fmt(eps.imag),
        "flags": ";".join(flags),
    }


def cmd_null_check(args) -> int:
    cfg = _config_from_args(args)
    row = null_report(cfg, parse_state(args.state), parse_real(args.tol), args.normalize)
    text = render_csv([row], NULL_COLUMNS) if args.format == "csv" else render_json(row)
    _emit(text, args.out)
    return 1 if ("conditions-disagree" in row["flags"] or "stationary-not-null" in row["flags"]) else 0


_COMMANDS = {"efficiency": cmd_efficiency, "sweep": cmd_sweep, "null-check": cmd_null_check}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (CliError, ValueError) as exc:
        print(f"qwtrap: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
