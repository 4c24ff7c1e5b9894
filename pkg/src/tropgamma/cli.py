"""Command-line front end.

Subcommands: compare (period vs Gamma pairing across a t-sweep), period
(single t, full piece breakdown), relations (weight tables), local-integrals
(numeric I values vs closed forms), amoeba (2D defect and 1D collision
models), chern (Euler characteristic and table stats).

Exit codes: 0 success, 2 validation error, 3 numeric failure.  Every report
embeds the resolved configuration so numbers are auditable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

from .errors import (QuadratureNotConverged, TropGammaError, ValidationError)
from .quadrature import QuadratureSpec
from .zetas import zeta_float


@dataclass
class RunConfig:
    command: str
    datum: str = None
    t_list: tuple = (1e-3, 1e-4)
    theta: tuple = None
    fmt: str = "table"
    out: str = None
    cache_dir: str = None
    seed: int = 20210
    rel_tol: float = 1e-7
    abs_tol: float = 1e-8
    cutoff: float = 40.0
    epsilon: float = None
    weight: int = 4
    max_weight: int = 5
    rect: tuple = (-8.0, 16.0, -8.0, 8.0)
    kink_size: float = 6.0

    def quad(self):
        return QuadratureSpec(rel_tol=self.rel_tol, abs_tol=self.abs_tol,
                              cutoff=self.cutoff, seed=self.seed)

    def resolved(self):
        d = asdict(self)
        return {k: v for k, v in d.items() if v is not None}


def _parse_t_list(s):
    try:
        ts = tuple(float(x) for x in s.split(","))
    except ValueError:
        raise ValidationError(f"cannot parse t list {s!r}")
    if any(not (0 < t <= 0.2) for t in ts):
        raise ValidationError("t values must lie in (0, 0.2]")
    return ts


def _emit(config: RunConfig, report: dict, table_lines):
    """Write the report in the chosen format; returns the text emitted."""
    if config.fmt == "json":
        text = json.dumps(report, indent=1, default=str) + "\n"
    elif config.fmt == "csv":
        buf = io.StringIO()
        rows = report.get("rows", [])
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        text = buf.getvalue()
    else:
        text = "\n".join(table_lines) + "\n"
    if config.out:
        with open(config.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return text


def _load(config):
    from .data import load_datum

    if not config.datum:
        raise ValidationError("this command needs --datum")
    return load_datum(config.datum)


def _table(config, datum):
    from .lattice import intersection_table

    cache = config.cache_dir or os.environ.get("TROPGAMMA_CACHE_DIR")
    return intersection_table(datum, cache_dir=cache)


def cmd_compare(config: RunConfig):
    from .engine import fit_asymptotics

    datum = _load(config)
    theta = config.theta if config.theta is not None else datum.theta
    table = _table(config, datum)
    rep = fit_asymptotics(datum, config.t_list, theta, config.quad(),
                          table=table, epsilon=config.epsilon)
    rows = [{"t": r["t"],
             "lhs_re": r["lhs"].real, "lhs_im": r["lhs"].imag,
             "rhs_re": r["rhs"].real, "rhs_im": r["rhs"].imag,
             "defect": r["defect"]} for r in rep.rows]
    report = {"config": config.resolved(), "rows": rows,
              "eps_hat": rep.eps_hat, "monotone": rep.monotone,
              "at_floor": rep.at_floor, "success": rep.success}
    lines = [f"{'t':>10} {'lhs_re':>16} {'lhs_im':>12} {'rhs_re':>16} "
             f"{'rhs_im':>12} {'defect':>12}"]
    for r in rows:
        lines.append(f"{r['t']:10.1e} {r['lhs_re']:16.8f} {r['lhs_im']:12.4e} "
                     f"{r['rhs_re']:16.8f} {r['rhs_im']:12.4e} {r['defect']:12.4e}")
    lines.append(f"fitted decay exponent: {rep.eps_hat:.3f}  "
                 f"monotone={rep.monotone} at_floor={rep.at_floor} "
                 f"success={rep.success}")
    _emit(config, report, lines)
    return 0


def cmd_period(config: RunConfig):
    from .engine import period

    datum = _load(config)
    theta = config.theta if config.theta is not None else datum.theta
    t = config.t_list[0]
    res = period(datum, t, theta, config.quad(), epsilon=config.epsilon)
    report = {"config": config.resolved(), "t": t, "theta": list(theta),
              "value": [res.value.real, res.value.imag],
              "per_piece": {f"q={q},K={list(K)}": [v.real, v.imag]
                            for (q, K), v in sorted(res.per_piece.items())},
              "quadrature_error": res.quadrature_error,
              "solver_stats": res.solver_stats}
    lines = [f"t = {t:g}, theta = {list(theta)}",
             f"period = {res.value.real:.10f} + {res.value.imag:.10f} i",
             f"quadrature error estimate: {res.quadrature_error:.3e}"]
    for key, v in sorted(report["per_piece"].items()):
        lines.append(f"  {key:24s} {v[0]:14.8f} {v[1]:+12.4e} i")
    _emit(config, report, lines)
    return 0


def cmd_relations(config: RunConfig):
    from .gamma import extract_relations

    rels = extract_relations(config.weight)
    rows = []
    lines = []
    for k in sorted(rels):
        info = rels[k]
        lines.append(f"weight {k}: {len(info['symbols'])} local integrals, "
                     f"{len(info['relations'])} relations")
        for rel in info["relations"]:
            lines.append(f"  {rel}")
            rows.append(rel.to_json())
    report = {"config": config.resolved(), "relations": rows,
              "counts": {k: {"symbols": len(rels[k]["symbols"]),
                             "relations": len(rels[k]["relations"])}
                         for k in rels}}
    _emit(config, report, lines)
    return 0


def cmd_local_integrals(config: RunConfig):
    from .gamma import isymbols_of_weight
    from .localints import I_known, I_numeric

    spec = config.quad()
    rows = []
    lines = [f"{'integral':>14} {'value':>16} {'error':>10} "
             f"{'closed form':>16} {'deviation':>10}"]
    for k in range(2, config.max_weight + 1):
        for sym in isymbols_of_weight(k):
            if len(sym.m) > 3:
                continue
            val, err = I_numeric(sym.ell, sym.m, spec, with_error=True)
            closed = I_known(sym.ell, sym.m)
            row = {"integral": str(sym), "value": val, "error_estimate": err,
                   "closed_form": str(closed) if closed is not None else None,
                   "deviation": abs(val - closed.to_float()) if closed is not None else None}
            rows.append(row)
            cf = f"{closed.to_float():16.10f}" if closed is not None else " " * 16
            dv = f"{row['deviation']:10.2e}" if row["deviation"] is not None else ""
            lines.append(f"{str(sym):>14} {val:16.10f} {err:10.2e} {cf} {dv}")
    report = {"config": config.resolved(), "rows": rows}
    _emit(config, report, lines)
    return 0


def cmd_amoeba(config: RunConfig):
    from .localints import (PolygonRegion, collision_model,
                            conifold_closed_form, trop_defect_2d)

    spec = config.quad()
    t = config.t_list[0]
    x0, x1, y0, y1 = config.rect
    rect = PolygonRegion(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))
    res = trop_defect_2d(rect, t, spec)
    B = config.kink_size
    kinked = PolygonRegion(((-B, -B), (-B, 0), (0, B), (B, B), (B, 0), (0, -B)))
    kres = trop_defect_2d(kinked, t, spec, transverse_margin=0.0)
    z2, z3 = zeta_float(2), zeta_float(3)
    rows = [
        {"case": "rectangle", "value": res.value, "length_coeff": res.length_coeff,
         "constant": res.constant, "affine_length": res.affine_len,
         "expected_constant": z3},
        {"case": "kinked-hexagon", "value": kres.value,
         "length_coeff": kres.length_coeff, "constant": kres.constant,
         "affine_length": kres.affine_len, "expected_constant": -1.25 * z3},
    ]
    for kind, params, expected in (
            ("two_sided", {"a": 1.0}, -2 * z2),
            ("two_sided", {"a": -1.0}, -z2 / 2),
            ("conifold", {"c": 2.0}, conifold_closed_form(2.0)),
            ("conifold", {"c": 0.0}, conifold_closed_form(0.0))):
        val = collision_model(kind, params, t, spec)
        rows.append({"case": f"{kind} {params}", "value": val,
                     "expected_constant": expected})
    lines = []
    for r in rows:
        exp = r["expected_constant"]
        got = r.get("constant", r["value"])
        lines.append(f"{r['case']:28s} value={r['value']:14.8f} "
                     f"constant={got:12.8f} expected={exp:12.8f} "
                     f"dev={abs(got - exp):8.1e}")
    report = {"config": config.resolved(), "rows": rows}
    _emit(config, report, lines)
    return 0


def cmd_chern(config: RunConfig):
    from .gamma import chern_euler

    datum = _load(config)
    table = _table(config, datum)
    chi, classes = chern_euler(table)
    report = {"config": config.resolved(), "chi": str(chi),
              "table_entries": len(table.entries),
              "table_degree": table.dim, "fingerprint": table.fingerprint}
    lines = [f"chi(X) = {chi}",
             f"intersection table: {len(table.entries)} nonzero entries of "
             f"degree {table.dim} (fingerprint {table.fingerprint})"]
    _emit(config, report, lines)
    return 0


_COMMANDS = {
    "compare": cmd_compare,
    "period": cmd_period,
    "relations": cmd_relations,
    "local-integrals": cmd_local_integrals,
    "amoeba": cmd_amoeba,
    "chern": cmd_chern,
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="tropgamma",
        description="Tropical period asymptotics vs Gamma-class pairings "
                    "for Batyrev mirror data.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, datum=False):
        sp.add_argument("--format", dest="fmt", default="table",
                        choices=("table", "json", "csv"),
                        help="output format (default table)")
        sp.add_argument("--out", help="write the report to a file")
        sp.add_argument("--seed", type=int, default=20210,
                        help="QMC seed (default 20210, fixed for reproducibility)")
        sp.add_argument("--rel-tol", type=float, default=1e-7)
        sp.add_argument("--abs-tol", type=float, default=1e-8)
        sp.add_argument("--cutoff", type=float, default=40.0,
                        help="upper integration limit replacing infinity")
        if datum:
            sp.add_argument("--datum", required=True,
                            help="datum file (JSON or TOML)")
            sp.add_argument("--cache-dir",
                            help="intersection-table cache directory "
                                 "(or TROPGAMMA_CACHE_DIR)")

    sp = sub.add_parser("compare", help="period vs Gamma pairing over a t sweep")
    common(sp, datum=True)
    sp.add_argument("--t", default="1e-3,1e-4", help="comma-separated t values")
    sp.add_argument("--theta", help="comma-separated phases (radians)")
    sp.add_argument("--epsilon", type=float, help="chart band width override")

    sp = sub.add_parser("period", help="single period with piece breakdown")
    common(sp, datum=True)
    sp.add_argument("--t", default="1e-3")
    sp.add_argument("--theta")
    sp.add_argument("--epsilon", type=float)

    sp = sub.add_parser("relations", help="zeta/local-integral relation tables")
    common(sp)
    sp.add_argument("--weight", type=int, default=4)

    sp = sub.add_parser("local-integrals", help="numeric I values vs closed forms")
    common(sp)
    sp.add_argument("--max-weight", type=int, default=5)

    sp = sub.add_parser("amoeba", help="2D defect and collision models")
    common(sp)
    sp.add_argument("--t", default="1e-4")
    sp.add_argument("--rect", default="-8,16,-8,8",
                    help="rectangle x0,x1,y0,y1 for the defect test")
    sp.add_argument("--kink-size", type=float, default=6.0,
                    help="half-size of the kinked hexagon")

    sp = sub.add_parser("chern", help="Euler characteristic and table stats")
    common(sp, datum=True)
    return p


def config_from_args(args) -> RunConfig:
    kw = {"command": args.command, "fmt": args.fmt, "out": args.out,
          "seed": args.seed, "rel_tol": args.rel_tol, "abs_tol": args.abs_tol,
          "cutoff": args.cutoff}
    if getattr(args, "datum", None):
        kw["datum"] = args.datum
        kw["cache_dir"] = getattr(args, "cache_dir", None)
    if getattr(args, "t", None):
        kw["t_list"] = _parse_t_list(args.t)
    if getattr(args, "theta", None):
        kw["theta"] = tuple(float(x) for x in args.theta.split(","))
    if getattr(args, "epsilon", None) is not None:
        kw["epsilon"] = args.epsilon
    if getattr(args, "weight", None) is not None:
        kw["weight"] = args.weight
    if getattr(args, "max_weight", None) is not None:
        kw["max_weight"] = args.max_weight
    if getattr(args, "rect", None):
        kw["rect"] = tuple(float(x) for x in args.rect.split(","))
    if getattr(args, "kink_size", None) is not None:
        kw["kink_size"] = args.kink_size
    return RunConfig(**kw)


def run(config: RunConfig) -> int:
    """Dispatch a command; returns the process exit code."""
    try:
        return _COMMANDS[config.command](config)
    except (ValidationError, *_VALIDATION) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureNotConverged, *_NUMERIC) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config)


def _exc_groups():
    from .errors import (DegenerateWeight, DegreeMismatch, EmptyPolytope,
                         HomotopyStuck, IProviderFailure, NewtonDiverged,
                         NonTransverseBoundary, NotSimplicial,
                         OriginNotInterior, UnboundedPolytope)

    validation = (NotSimplicial, DegenerateWeight, UnboundedPolytope,
                  EmptyPolytope, OriginNotInterior, DegreeMismatch,
                  NonTransverseBoundary)
    numeric = (NewtonDiverged, HomotopyStuck, IProviderFailure)
    return validation, numeric


_VALIDATION, _NUMERIC = _exc_groups()


if __name__ == "__main__":
    sys.exit(main())
