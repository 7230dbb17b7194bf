"""Command-line interface: ``cubeshape <command> ...``.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import __version__
from .cubic_rings import (
    BinaryCubicForm,
    LiteralError,
    classify_3,
    disc,
    is_irreducible,
    is_maximal,
    primitive_tzf,
    resolvent_disc,
)
from .enumeration import (
    THREE_CLASS_NAMES,
    FieldRecord,
    WindowSet,
    default_threads,
    enumerate_oriented,
    read_jsonl,
    to_unoriented,
    write_jsonl,
)
from .quad_geodesics import (
    BinaryQuadraticForm,
    class_of_form,
    geodesic_arc_samples,
    geodesic_context,
    gl2_classes,
    is_ambiguous,
    normalize_rep,
    pell_fundamental,
)

log = logging.getLogger("cubeshape")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    form: BinaryCubicForm | None = None
    q: list[BinaryQuadraticForm] = field(default_factory=list)
    disc: int | None = None
    xmax: Fraction | None = None
    inputs: list[str] = field(default_factory=list)
    out: str | None = None
    windows: WindowSet | None = None
    bins: int = 10
    threads: int = 1
    maximal: bool = False
    unoriented: bool = False
    samples: int = 4000

    def validate(self) -> "RunConfig":
        if self.xmax is not None and self.xmax <= 0:
            raise UsageError("--xmax must be positive")
        if self.bins < 1:
            raise UsageError("--bins must be positive")
        if self.threads < 1:
            raise UsageError("--threads must be positive")
        if self.samples < 2:
            raise UsageError("--samples must be at least 2")
        return self


def _round(v: float, nd: int = 10) -> float:
    return round(float(v), nd)


def _emit(obj) -> None:
    print(json.dumps(obj))


# -- commands --------------------------------------------------------------


def cmd_classes(cfg: RunConfig) -> int:
    out = []
    for c in gl2_classes(cfg.disc):
        members = []
        for m in c.members:
            Qn, _ = normalize_rep(m.representative)
            members.append({"tag": m.tag, "form": list(m.representative), "normalized": list(Qn)})
        out.append(
            {
                "class_id": c.class_id,
                "representative": list(c.representative),
                "ambiguous": c.ambiguous,
                "sl2_classes": members,
            }
        )
    _emit({"D": cfg.disc, "count": len(out), "classes": out})
    return 0


def cmd_pell(cfg: RunConfig) -> int:
    p = pell_fundamental(cfg.disc)
    _emit({"D": p.D, "U0": p.U0, "W0": p.W0, "eps0": _round(p.eps0_float), "log_eps0": _round(p.log_eps0)})
    return 0


def cmd_shape(cfg: RunConfig) -> int:
    from .shape_core import (
        boundary_test,
        field_of,
        majorant_check_exact,
        on_geodesic_certificate,
        reduce_to_gauss,
        shape_gram,
        shape_point,
    )

    F = cfg.form
    ctx = field_of(F)
    sp = shape_point(shape_gram(F, ctx))
    red, g = reduce_to_gauss(sp)
    tzf, content = primitive_tzf(F)
    maximal = is_maximal(F)
    x_exact = red.x_exact
    _emit(
        {
            "form": list(F),
            "shape": [_round(red.x_float), _round(red.y_float)],
            "tzf": list(tzf),
            "content": content,
            "disc": disc(F),
            "resolvent_disc": resolvent_disc(F),
            "maximal": maximal,
            "three_class": THREE_CLASS_NAMES[classify_3(F)] if maximal else None,
            "x_exact": str(x_exact),
            "x_is_rational": x_exact.is_rational(),
            "y_squared_exact": str(red.y_squared_exact),
            "transform": [list(row) for row in g],
            "boundary": boundary_test(F, ctx),
            "on_geodesic": on_geodesic_certificate(F, ctx),
            "majorant": majorant_check_exact(F, ctx),
        }
    )
    return 0


def cmd_geodesic(cfg: RunConfig) -> int:
    Q = cfg.q[0]
    Qn, g = normalize_rep(Q)
    ctx = geodesic_context(Qn)
    qc, member = class_of_form(Qn)
    out = {
        "Q": list(Q),
        "normalized": list(Qn),
        "transform": [list(row) for row in g],
        "D": ctx.D,
        "class_id": qc.class_id,
        "orientation": member.tag,
        "ambiguous": qc.ambiguous,
        "U0": ctx.pell.U0,
        "W0": ctx.pell.W0,
        "theta_plus": ctx.theta_plus,
        "theta_minus": ctx.theta_minus,
        "rho_plus": ctx.rho_plus,
        "rho_minus": ctx.rho_minus,
        "period": ctx.period,
        "apex_y": max(z.imag for z in geodesic_arc_samples(ctx, 2000)),
    }
    _emit(out)
    return 0


def cmd_enumerate(cfg: RunConfig) -> int:
    Q = cfg.q[0]
    Qn, _ = normalize_rep(Q)
    if Qn != Q:
        log.warning("using the normalized representative %s of %s", tuple(Qn), tuple(Q))
    filters = "maximal_only" if cfg.maximal else "orders"
    recs = enumerate_oriented(Qn, cfg.xmax, filters, threads=cfg.threads)
    if cfg.unoriented:
        recs = list(to_unoriented(recs, is_ambiguous(Qn), Qn).records)
    write_jsonl(recs, cfg.out)
    _emit({"q": list(Qn), "xmax": str(cfg.xmax), "filters": filters, "oriented": not cfg.unoriented,
           "count": len(recs), "out": cfg.out})
    return 0


def _load(cfg: RunConfig) -> list[FieldRecord]:
    recs: list[FieldRecord] = []
    for path in cfg.inputs:
        recs.extend(read_jsonl(path))
    return recs


def cmd_stats(cfg: RunConfig) -> int:
    from .stats import histogram, histogram_csv, summarize

    recs = _load(cfg)
    if not recs:
        raise ValueError("no records in input")
    for s in summarize(recs, float(cfg.xmax) if cfg.xmax else None, cfg.windows, cfg.bins):
        print(s.to_json())
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(histogram_csv(histogram([r.tau for r in recs], cfg.bins)))
    return 0


def audit_records(recs: Sequence[FieldRecord]) -> dict:
    """Recompute every exact invariant for stored records."""
    from .shape_core import (
        boundary_test,
        field_of,
        majorant_check_exact,
        on_geodesic_certificate,
        re_shape_is_rational,
    )
    from .stats import tame_wild_audit

    counts = {"on_geodesic": 0, "majorant": 0, "boundary": 0, "rationality": 0, "consistency": 0}
    failures = []
    for rec in recs:
        F = BinaryCubicForm(*rec.form)
        ctx = field_of(F)
        checks = {
            "on_geodesic": on_geodesic_certificate(F, ctx),
            "majorant": majorant_check_exact(F, ctx),
            "consistency": disc(F) == rec.disc and primitive_tzf(F) == (BinaryQuadraticForm(*rec.tzf), rec.content),
        }
        if rec.resolvent_disc != -3:
            checks["boundary"] = boundary_test(F, ctx) == "interior"
            checks["rationality"] = not re_shape_is_rational(F, ctx)[0]
        for name, ok in checks.items():
            if ok:
                counts[name] += 1
            else:
                failures.append({"form": list(F), "check": name})
    tw = tame_wild_audit(recs)
    for form, cls, k in tw.failures:
        failures.append({"form": list(form), "check": "tame_wild", "three_class": cls, "ord3": k})
    return {"records": len(recs), "passed": counts, "tame_wild": {"pass": tw.passed, "fail": tw.failed},
            "failures": failures, "ok": not failures}


def cmd_check(cfg: RunConfig) -> int:
    report = audit_records(_load(cfg))
    _emit(report)
    return 0 if report["ok"] else 1


def class_arcs(forms: Sequence[BinaryQuadraticForm], samples: int) -> dict[str, list[complex]]:
    arcs = {}
    for Q in forms:
        qc, _ = class_of_form(Q)
        if qc.class_id in arcs:
            continue
        Qn, _ = normalize_rep(qc.representative)
        arcs[qc.class_id] = geodesic_arc_samples(geodesic_context(Qn), samples)
    return arcs


def cmd_plot(cfg: RunConfig) -> int:
    from .plot import plot_svg

    recs = _load(cfg)
    forms = list(cfg.q)
    if cfg.disc is not None:
        forms += [c.representative for c in gl2_classes(cfg.disc)]
    if not forms:
        forms = [BinaryQuadraticForm(*r.tzf) for r in recs]
    arcs = class_arcs(forms, cfg.samples)
    plot_svg(recs, arcs, cfg.out)
    _emit({"out": cfg.out, "arcs": sorted(arcs), "markers": len(recs)})
    return 0


COMMANDS = {
    "classes": cmd_classes,
    "pell": cmd_pell,
    "shape": cmd_shape,
    "geodesic": cmd_geodesic,
    "enumerate": cmd_enumerate,
    "stats": cmd_stats,
    "check": cmd_check,
    "plot": cmd_plot,
}


# -- argument parsing ------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cubeshape", description="Shapes of complex cubic fields on closed geodesics.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("classes", help="GL2(Z)-classes of indefinite forms of discriminant D")
    s.add_argument("--disc", type=int, required=True)
    s = sub.add_parser("pell", help="fundamental solution of u^2 - D w^2 = 4")
    s.add_argument("--disc", type=int, required=True)
    s = sub.add_parser("shape", help="shape of the ring of a binary cubic form")
    s.add_argument("--form", required=True, help="a,b,c,d")
    s = sub.add_parser("geodesic", help="geodesic data of an indefinite form")
    s.add_argument("--q", required=True, help="r,s,t")
    s = sub.add_parser("enumerate", help="enumerate oriented rings with trace-zero form Q")
    s.add_argument("--q", required=True)
    s.add_argument("--xmax", required=True, help="discriminant bound X (|disc| < X)")
    s.add_argument("--maximal", action="store_true", help="keep maximal orders only")
    s.add_argument("--unoriented", action="store_true", help="one record per field")
    s.add_argument("--out", required=True)
    s.add_argument("--threads", type=int, default=None)
    s = sub.add_parser("stats", help="counting and equidistribution statistics")
    s.add_argument("--in", dest="inputs", action="append", required=True)
    s.add_argument("--window", default=None, help="lo:hi[,lo:hi...] in tau")
    s.add_argument("--bins", type=int, default=10)
    s.add_argument("--xmax", default=None)
    s.add_argument("--out", default=None, help="histogram CSV path")
    s = sub.add_parser("check", help="audit every exact invariant of stored records")
    s.add_argument("--in", dest="inputs", action="append", required=True)
    s = sub.add_parser("plot", help="SVG of shapes and geodesic arcs")
    s.add_argument("--in", dest="inputs", action="append", default=[])
    s.add_argument("--q", action="append", default=[])
    s.add_argument("--disc", type=int, default=None)
    s.add_argument("--samples", type=int, default=4000)
    s.add_argument("--out", required=True)
    return p


def _parse_x(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        try:
            return Fraction(float(text))
        except ValueError:
            raise UsageError(f"malformed bound {text!r}") from None


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command)
    try:
        if getattr(ns, "form", None):
            cfg.form = BinaryCubicForm.parse(ns.form)
        qs = ns.q if isinstance(getattr(ns, "q", None), list) else ([ns.q] if getattr(ns, "q", None) else [])
        cfg.q = [BinaryQuadraticForm.parse(q) for q in qs]
        if getattr(ns, "window", None):
            cfg.windows = WindowSet.parse(ns.window)
    except LiteralError as exc:
        raise UsageError(str(exc)) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cfg.disc = getattr(ns, "disc", None)
    if getattr(ns, "xmax", None) is not None:
        cfg.xmax = _parse_x(ns.xmax)
    cfg.inputs = getattr(ns, "inputs", None) or []
    cfg.out = getattr(ns, "out", None)
    cfg.bins = getattr(ns, "bins", 10)
    cfg.threads = getattr(ns, "threads", None) or default_threads()
    cfg.maximal = getattr(ns, "maximal", False)
    cfg.unoriented = getattr(ns, "unoriented", False)
    cfg.samples = getattr(ns, "samples", 4000)
    return cfg.validate()


def cmd_dispatch(argv: Sequence[str] | None = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
        cfg = config_from_args(ns)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[cfg.command](cfg)
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cmd_dispatch())


if __name__ == "__main__":
    main()
