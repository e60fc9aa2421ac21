"""Command-line front end.

Categories are named either by a JSON path or by ``catalog:<name>``; actions
by a JSON path or by the name of a catalog action on the same entry.  Exit
codes: 0 success, 1 a consistency or verification failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import catalog
from .algebra import (
    NotModularError,
    central_charge,
    check_super_modular,
    invariants,
    muger_center,
)
from .axioms import check_hexagon, check_pentagon, check_unitarity
from .core import EPS, CategoryError, Report, SuperMTC, category_to_dict, load_category, validate_structure
from .extensions import (
    ZestError,
    cascade_layer1,
    cascade_layer3,
    cascade_layer3_linear,
    zest_orbit,
)
from .indicators import (
    IndicatorResult,
    OffGridError,
    SymmetryTypeError,
    class_a_theta,
    class_c_theta,
    gaplessness_check,
    hall_conductance,
    indicator_epin,
    indicator_pin_plus,
    partition_cp2,
    tenfold_report,
)
from .symmetry import (
    SymmetryAction,
    action_to_dict,
    apply_gauge,
    check_action,
    load_action,
    random_gauge,
)

__all__ = ["RunConfig", "InputError", "main", "run_cli"]

SYMMETRIES = ("pin+", "epin", "classA", "classC", "AI", "AII", "AIII", "CI", "CII")
PREFIX = "catalog:"


class InputError(Exception):
    """Raised for anything that should exit with status 2."""


@dataclass
class RunConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    symmetry: str | None = None
    tolerance: float = EPS
    seed: int = 0
    samples: int = 0
    json: bool = False

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise InputError("--tolerance must be positive")


# ---------------------------------------------------------------------------
# loading


def _catalog_name(ref: str) -> str | None:
    return ref[len(PREFIX):] if ref.startswith(PREFIX) else None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def load_input(ref: str, action: str | None = None) -> tuple[SuperMTC, SymmetryAction | None, str | None]:
    """(category, action, catalog name or None)."""
    name = _catalog_name(ref)
    try:
        if name is not None:
            base = name.partition("/")[0]
            if action is not None and not Path(action).suffix == ".json":
                c, act = catalog.get(f"{base}/{action}")
                return c, act, base
            c, act = catalog.get(name)  # a bare name brings its default action
            if action is None:
                return c, act, base
        else:
            base = None
            c = load_category(_read(ref))
        if action is None:
            return c, None, base
        act_name = _catalog_name(action)
        if act_name is not None:
            c2, act = catalog.get(act_name)
            if c2.labels != c.labels:
                raise InputError(f"{action} acts on a different category")
            return c, act, base
        return c, load_action(_read(action), c), base
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from exc
    except CategoryError as exc:
        raise InputError(str(exc)) from exc


def _require_action(act: SymmetryAction | None, what: str) -> SymmetryAction:
    if act is None:
        raise InputError(f"{what} needs --action")
    return act


def _parse_charges(text: str, c: SuperMTC) -> tuple[Fraction, ...]:
    try:
        q = tuple(Fraction(x.strip()) for x in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad charge list {text!r}") from exc
    if len(q) != c.n:
        raise InputError(f"expected {c.n} charges, got {len(q)}")
    return q


# ---------------------------------------------------------------------------
# output


def _num(x: float) -> str:
    if abs(x) < 1e-12:
        x = 0.0
    return f"{x:.10g}"


def _cnum(z: complex) -> str:
    return f"({_num(z.real)}, {_num(z.imag)})"


def _jc(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _report_doc(rep: Report) -> dict:
    return {"title": rep.title, "ok": rep.ok, "checked": rep.checked, "violations": list(rep.violations)}


def _emit(cfg: RunConfig, doc: dict, lines: list[str], out) -> None:
    if cfg.json:
        out.write(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    else:
        out.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# commands


def _modularity(c: SuperMTC, tol: float) -> Report:
    if muger_center(c, tol) == [0]:
        rep = Report("modularity")
        rep.checked += 1
        try:
            central_charge(c)
        except NotModularError as exc:
            rep.add(str(exc))
        return rep
    return check_super_modular(c, tol).report


def cmd_verify(cfg: RunConfig, args, out) -> int:
    c, act, _ = load_input(args.category, args.action)
    reports = [validate_structure(c, cfg.tolerance)]
    if reports[0].ok:
        reports += [
            check_pentagon(c, cfg.tolerance),
            check_hexagon(c, cfg.tolerance),
            check_unitarity(c, cfg.tolerance),
            _modularity(c, cfg.tolerance),
        ]
        if act is not None:
            reports += check_action(c, act, cfg.tolerance)
    ok = all(r.ok for r in reports)
    lines = [r.summary() for r in reports]
    for r in reports:
        lines += [f"  {v}" for v in r.violations]
    lines.append("all checks passed" if ok else "FAILED")
    _emit(cfg, {"category": c.name, "ok": ok, "reports": [_report_doc(r) for r in reports]}, lines, out)
    return 0 if ok else 1


def cmd_invariants(cfg: RunConfig, args, out) -> int:
    c, _, _ = load_input(args.category)
    inv = invariants(c, cfg.tolerance)
    try:
        cc: str | None = str(central_charge(c))
    except NotModularError:
        cc = None
    L = c.labels
    lines = [f"{c.name}: {c.n} anyons, D = {_num(inv.D)}"]
    lines += [f"  {L[a]:>8}  d = {_num(inv.d[a])}  theta = {_cnum(inv.theta[a])}" for a in range(c.n)]
    lines.append(f"transparent: {', '.join(L[a] for a in inv.transparent)}")
    lines.append(f"central charge: {cc if cc is not None else 'undefined (not modular)'}")
    doc = {
        "category": c.name,
        "anyons": list(L),
        "d": [float(x) for x in inv.d],
        "D": float(inv.D),
        "theta": [_jc(z) for z in inv.theta],
        "S": [[_jc(z) for z in row] for row in inv.S],
        "transparent": [L[a] for a in inv.transparent],
        "central_charge": cc,
    }
    _emit(cfg, doc, lines, out)
    return 0


def _result_line(r: IndicatorResult) -> str:
    where = f"{r.manifold}: " if r.manifold else ""
    order = f"/{r.order}" if r.order else ""
    return f"{where}value = {_cnum(r.value)}  nu = {r.nu}{order}  [{r.classification}]"


def cmd_indicators(cfg: RunConfig, args, out) -> int:
    c, act, _ = load_input(args.category, args.action)
    sym = args.symmetry
    if args.charges is not None:
        q = _parse_charges(args.charges, c)
        if act is not None:
            act = act.with_(charges=q)
    else:
        q = act.charges if act is not None else None
    doc: dict[str, Any] = {"category": c.name, "symmetry": sym}
    lines: list[str] = []
    status = 0
    if sym in ("classA", "classC"):
        if q is None:
            raise InputError(f"{sym} needs charges (--charges or an action carrying them)")
        cls = sym[-1]
        theta = class_a_theta(c, q) if cls == "A" else class_c_theta(c, q)
        try:
            hall = hall_conductance(theta, cls)
        except OffGridError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        cp2 = partition_cp2(c, q)
        doc.update(
            classification="U1",
            cp2=_jc(cp2),
            theta=list(theta),
            kappa=str(hall.kappa),
            sigma_H=str(hall.sigma),
            modulus=hall.modulus,
        )
        lines = [
            f"Z(CP2) = {_cnum(cp2)}",
            f"Theta1 = {_num(theta[0])}  Theta2 = {_num(theta[1])}",
            f"kappa = {hall.kappa} mod {hall.modulus}  sigma_H = {hall.sigma} mod {hall.modulus}",
        ]
    else:
        act = _require_action(act, f"--symmetry {sym}")
        if sym == "pin+":
            results = [indicator_pin_plus(c, act, cfg.tolerance)]
        elif sym == "epin":
            phase = 1j if args.convention == "+i" else -1j
            results = [indicator_epin(c, act, cfg.tolerance, phase=phase)]
        else:
            results = tenfold_report(c, act, sym, cfg.tolerance)
        flags = gaplessness_check(results, sym if sym in ("CI", "CII") else None)
        doc["results"] = [r.to_dict() for r in results]
        doc["flags"] = flags
        lines = [_result_line(r) for r in results]
        if len(results) == 1 and results[0].shadows:
            lines.append("shadows: " + ", ".join(_cnum(z) for z in results[0].shadows))
        lines += [f"flag: {f}" for f in flags]
        status = 1 if flags else 0
    _emit(cfg, doc, lines, out)
    return status


def _indicator_for(c: SuperMTC, act: SymmetryAction, tol: float):
    sym = act.symmetry
    if sym.cyclic_order == 2 and sym.s[1] and sym.omega.any():
        return "pin+", lambda cc, aa: indicator_pin_plus(cc, aa, tol).value
    if sym.cyclic_order == 4 and sym.s[1]:
        return "epin", lambda cc, aa: indicator_epin(cc, aa, tol).value
    return None, None


def cmd_gauge_orbit(cfg: RunConfig, args, out) -> int:
    c, act, _ = load_input(args.category, args.action)
    act = _require_action(act, "gauge-orbit")
    name, fn = _indicator_for(c, act, cfg.tolerance)
    base = fn(c, act) if fn else None
    worst = 0.0
    failures: list[str] = []
    for i in range(cfg.samples):
        seed = cfg.seed + i
        c2, a2 = apply_gauge(c, act, random_gauge(c, act, seed))
        bad = [r for r in (check_pentagon(c2, cfg.tolerance), check_hexagon(c2, cfg.tolerance), *check_action(c2, a2, cfg.tolerance)) if not r.ok]
        if bad:
            failures.append(f"seed {seed}: {bad[0].summary()}")
        if fn:
            worst = max(worst, abs(fn(c2, a2) - base))
    ok = not failures and worst < max(cfg.tolerance, 1e-8)
    doc = {
        "category": c.name,
        "indicator": name,
        "value": None if base is None else _jc(base),
        "samples": cfg.samples,
        "seed": cfg.seed,
        "max_deviation": worst,
        "failures": failures,
        "ok": ok,
    }
    lines = [f"{cfg.samples} gauges from seed {cfg.seed}"]
    if name:
        lines.append(f"{name} value {_cnum(base)}, max deviation {worst:.3g}")
    lines += failures
    lines.append("gauge orbit consistent" if ok else "FAILED")
    _emit(cfg, doc, lines, out)
    return 0 if ok else 1


def cmd_zest(cfg: RunConfig, args, out) -> int:
    c, _, _ = load_input(args.category)
    try:
        orbit = zest_orbit(c, tol=cfg.tolerance)
    except ZestError as exc:
        raise InputError(str(exc)) from exc
    rows = []
    for r in orbit:
        cc = central_charge(r.category)
        rows.append({"b": _jc(r.b), "central_charge": str(cc), "fusion_group": list(r.orders)})
    target = None if args.target_c is None else Fraction(args.target_c) % 8
    hits = [row for row in rows if target is None or Fraction(row["central_charge"]) == target]
    lines = [
        f"b = {_cnum(complex(*row['b']))}  c = {row['central_charge']}  group = "
        + " x ".join(f"Z{n}" for n in row["fusion_group"])
        for row in hits
    ]
    if not hits:
        lines = [f"no consistent zest of {c.name} has c = {target}"]
    _emit(cfg, {"category": c.name, "target_c": None if target is None else str(target), "zests": hits}, lines, out)
    return 0 if hits else 1


def _fixture(smtc: str | None, ext_ref: str):
    name = _catalog_name(ext_ref)
    if name is None or smtc is None:
        return None
    for fx in catalog.build_extension_fixtures():
        if fx.name == name and fx.smtc == smtc:
            return fx
    return None


def cmd_cascade(cfg: RunConfig, args, out) -> int:
    c, act, base = load_input(args.category, args.action)
    act = _require_action(act, "cascade")
    fx = _fixture(base, args.extension)
    if fx is not None:
        ext, embedding, ext_act = fx
    else:
        ext, ext_act, _ = load_input(args.extension)
        if args.embedding is None:
            raise InputError("--embedding is required for extensions outside the catalog fixtures")
        embedding = None
    if args.embedding is not None:
        embedding = tuple(int(x) for x in args.embedding.split(","))
    if args.ext_action is not None:
        _, ext_act, _ = load_input(args.extension, args.ext_action)
    l1 = cascade_layer1(c, [ext], tol=cfg.tolerance)
    doc: dict[str, Any] = {
        "category": c.name,
        "extension": ext.name,
        "layer1": {
            "obstructed": l1.obstructed,
            "witness": l1.witness,
            "central_charges": [[n, str(q)] for n, q in l1.charges],
        },
    }
    lines = [f"layer 1: {'obstructed' if l1.obstructed else 'unobstructed'}"
             + (f" (c = 0 on {l1.witness})" if l1.witness else "")]
    if ext.rules.abelian and ext_act is not None:
        l3 = cascade_layer3(c, act, ext, ext_act, embedding, cfg.tolerance)
        linear = cascade_layer3_linear(c, act, ext, ext_act, embedding)
        doc["layer3"] = {
            "obstructed": l3.obstructed,
            "searched": l3.searched,
            "reason": l3.reason,
            "linear_obstructed": linear,
        }
        lines.append(f"layer 3: {'obstructed' if l3.obstructed else 'unobstructed'} ({l3.searched} torsor points)")
        lines.append(f"layer 3 linear route: {'obstructed' if linear else 'unobstructed'}")
        if linear != l3.obstructed:
            lines.append("layer 3 routes disagree")
            _emit(cfg, doc, lines, out)
            return 1
    else:
        doc["layer3"] = None
        lines.append("layer 3: skipped (needs an abelian extension with an action)")
    _emit(cfg, doc, lines, out)
    return 0


def cmd_catalog(cfg: RunConfig, args, out) -> int:
    if args.catalog_command == "list":
        entries = [
            {"name": e.name, "description": e.description, "actions": list(e.actions), "default": e.default_action}
            for e in catalog.CATALOG.values()
        ]
        lines = [
            f"{e['name']:<16} {e['description']:<32} actions: {', '.join(e['actions']) or '-'}" for e in entries
        ]
        _emit(cfg, {"entries": entries}, lines, out)
        return 0
    try:
        c, act = catalog.get(args.name)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from exc
    doc: dict[str, Any] = category_to_dict(c)
    target = Path(args.path)
    try:
        target.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        if act is not None and "/" in args.name:
            apath = target.with_suffix(".action.json")
            apath.write_text(json.dumps(action_to_dict(c, act), indent=1, sort_keys=True) + "\n")
    except OSError as exc:
        raise InputError(f"cannot write {target}: {exc.strerror}") from exc
    _emit(cfg, {"written": str(target)}, [f"wrote {target}"], out)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=argparse.SUPPRESS, help="numerical tolerance")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")

    p = argparse.ArgumentParser(prog="smtc-anomaly", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run every consistency check")
    v.add_argument("category")
    v.add_argument("--action")

    i = sub.add_parser("invariants", parents=[common], help="quantum dimensions, twists, S, c")
    i.add_argument("category")

    ind = sub.add_parser("indicators", parents=[common], help="anomaly indicators")
    ind.add_argument("category")
    ind.add_argument("--action")
    ind.add_argument("--symmetry", required=True, choices=SYMMETRIES)
    ind.add_argument("--charges", help="comma-separated charges, one per anyon")
    ind.add_argument("--convention", choices=("+i", "-i"), default="+i", help="epin spin-structure phase; write --convention=-i")

    g = sub.add_parser("gauge-orbit", parents=[common], help="recheck under random gauges")
    g.add_argument("category")
    g.add_argument("--action")
    g.add_argument("--samples", type=int, default=10)
    g.add_argument("--seed", type=int, default=0)

    z = sub.add_parser("zest", parents=[common], help="zesting orbit of an abelian extension")
    z.add_argument("category")
    z.add_argument("--target-c", dest="target_c")

    cs = sub.add_parser("cascade", parents=[common], help="layer-1 and layer-3 obstructions")
    cs.add_argument("category")
    cs.add_argument("--action")
    cs.add_argument("--extension", required=True)
    cs.add_argument("--ext-action", dest="ext_action")
    cs.add_argument("--embedding", help="comma-separated images of the anyons")

    cat = sub.add_parser("catalog", parents=[common], help="built-in data")
    cs2 = cat.add_subparsers(dest="catalog_command", required=True)
    cs2.add_parser("list", parents=[common])
    ex = cs2.add_parser("export", parents=[common])
    ex.add_argument("name", help="entry or entry/action")
    ex.add_argument("path")
    return p


COMMANDS = {
    "verify": cmd_verify,
    "invariants": cmd_invariants,
    "indicators": cmd_indicators,
    "gauge-orbit": cmd_gauge_orbit,
    "zest": cmd_zest,
    "cascade": cmd_cascade,
    "catalog": cmd_catalog,
}


def run_cli(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return 0 if exc.code == 0 else 2
    try:
        cfg = RunConfig(
            command=args.command,
            inputs=[x for x in (getattr(args, "category", None), getattr(args, "extension", None)) if x],
            symmetry=getattr(args, "symmetry", None),
            tolerance=getattr(args, "tolerance", EPS),
            seed=getattr(args, "seed", 0),
            samples=getattr(args, "samples", 0),
            json=getattr(args, "json", False),
        )
        return COMMANDS[args.command](cfg, args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SymmetryTypeError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OffGridError, NotModularError, ZestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # inconsistent data surfaced by a computation
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())
