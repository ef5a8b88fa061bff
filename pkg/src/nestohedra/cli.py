"""Command-line interface: ``nesto <subcommand> ...``.

Inputs are building-set JSON files, graph JSON files, ``preset:NAME``
(with ``--dim``) or ``graph:1-2,2-3``.  Exit status is 0 on success, 1 when
a verification fails and 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import building_sets as bs
from . import face_lattice as fl
from . import geometry as geo
from . import shaving_plan as sp
from .errors import InputError, NestoError, PreconditionError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _fmt(v) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def _read_source(text: str, dim: int | None):
    """Return ``("family", (ground, masks))`` or ``("bset", BuildingSet)``."""
    if text.startswith("preset:"):
        if dim is None:
            raise InputError("preset inputs need --dim")
        return "bset", bs.preset(text.split(":", 1)[1], dim)
    if text.startswith("graph:"):
        return "bset", bs.graphical(bs.parse_edges(text.split(":", 1)[1]))
    path = Path(text)
    if not path.exists():
        raise InputError(f"no such file: {text}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{text}: invalid JSON: {exc}") from exc
    if isinstance(data, dict) and "edges" in data:
        return "bset", bs.graphical(bs.load_graph(data))
    return "family", bs.load_family(data)


def load_building_set(text: str, dim: int | None = None) -> bs.BuildingSet:
    kind, value = _read_source(text, dim)
    if kind == "bset":
        return value
    ground, family = value
    return bs.BuildingSet(ground, tuple(family))


def _connected(b: bs.BuildingSet, out) -> bs.BuildingSet:
    if b.is_connected:
        return b
    c, _ = bs.connectify(b)
    print(f"note: building set is disconnected; using connectify -> {c}", file=out)
    return c


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args, out) -> int:
    kind, value = _read_source(args.input, args.dim)
    if kind == "bset":
        ground, family = value.ground_size, value.elements
    else:
        ground, family = value
    report = bs.validate(family, ground)
    if report.valid:
        print(f"valid ({'connected' if report.connected else 'disconnected'})", file=out)
        return EXIT_OK
    print(f"invalid: {len(report.violations)} violation(s)", file=out)
    for v in report.violations:
        print(f"  {v}", file=out)
    return EXIT_FAIL


def cmd_info(args, out) -> int:
    b = load_building_set(args.input, args.dim)
    if not b.is_connected:
        print("note: building set is disconnected; run `connectify` for an equivalent connected one", file=out)
        b, _ = bs.connectify(b)
    bundle = fl.polynomial_bundle(fl.f_vector_from_building_set(b))
    wanted = [k for k in ("f", "h", "gamma", "H2") if getattr(args, k)]
    if not wanted:
        print(f"building set = {b}", file=out)
        print(f"dim = {b.dim}, facets = {len(b) - 1}", file=out)
        wanted = ["f", "h", "gamma", "H2"]
    for k in wanted:
        if k == "H2":
            terms = " + ".join(f"{c}*a^{a}*t^{t}" for a, t, c in bundle.H2)
            print(f"H2 = {terms}", file=out)
        else:
            print(f"{k} = {_fmt(getattr(bundle, k))}", file=out)
    return EXIT_OK


def cmd_flag(args, out) -> int:
    b = _connected(load_building_set(args.input, args.dim), out)
    print(f"flag = {'true' if bs.is_flag(b) else 'false'}", file=out)
    return EXIT_OK


def cmd_plan(args, out) -> int:
    b = _connected(load_building_set(args.input, args.dim), out)
    plan = sp.plan_flag(b)
    print(f"B0 = {plan.base}", file=out)
    print(f"tree = {json.dumps(plan.tree.to_nested())}", file=out)
    for i, step in enumerate(plan.steps, start=1):
        print(f"{i}. {step}  (stage {step.stage})", file=out)
    gamma, trace = sp.gamma_via_plan(plan)
    print(f"gamma trace = {' -> '.join(_fmt(g) for g in trace.gammas)}", file=out)
    _write(args.json, plan.to_json())
    _write(args.trace, trace.to_csv())
    return EXIT_OK


def cmd_realize(args, out) -> int:
    b = _connected(load_building_set(args.input, args.dim), out)
    if args.method == "standard":
        hrep = geo.standard_realization(b)
        eps = None
    else:
        hrep, eps = geo.cubical_realization(sp.plan_flag(b))
    inc = geo.enumerate_vertices(hrep)
    if hrep.hyperplane is not None:
        h = hrep.hyperplane
        print(f"hyperplane: {_fmt(h.coeffs)} . x = {h.rhs}", file=out)
    for q in hrep.inequalities:
        print(f"{q.label}: {_fmt(q.normal)} . x <= {q.rhs}", file=out)
    if eps is not None:
        print(f"epsilon = [{', '.join(str(e) for e in eps)}]", file=out)
    print(f"vertices = {len(inc.vertices)}, f = {_fmt(inc.f_vector())}", file=out)
    if args.json:
        payload = geo.hrep_to_dict(hrep)
        if eps is not None:
            payload["epsilon"] = [geo.format_rational(e) for e in eps]
        Path(args.json).write_text(json.dumps(payload, indent=1))
    if args.off:
        geo.export(inc, "off", args.off)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    bsets = [_connected(load_building_set(s, args.dim), out) for s in args.inputs]
    flags = {k: getattr(args, k) for k in ("gal", "bounds", "monotone", "delzant", "oracle")}
    if not any(flags.values()):
        flags = dict.fromkeys(flags, True)
    failed = False
    if flags["gal"] or flags["bounds"] or flags["monotone"]:
        report = sp.verify_gamma_claims(
            bsets, gal=flags["gal"], bounds=flags["bounds"], monotone=flags["monotone"]
        )
        for c in report.checks:
            print(c, file=out)
        failed |= not report.passed
    for i, b in enumerate(bsets):
        tag = f"#{i} {b}"
        flag = bs.is_flag(b)
        if flags["delzant"]:
            if not flag:
                print(f"SKIP delzant {tag}: not flag", file=out)
            else:
                hrep, _ = geo.cubical_realization(sp.plan_flag(b))
                inc = geo.enumerate_vertices(hrep)
                dz = geo.delzant_check(hrep, inc)
                nm = geo.normals_check(hrep, b)
                eq = geo.combinatorial_equivalence(inc, fl.facet_system_from_building_set(b))
                for name, ok, detail in (
                    ("delzant", dz.passed, f"{dz.vertices_checked} vertices, {len(dz.violations)} bad"),
                    ("normals", nm.passed, f"{len(nm.bad_coefficients)} bad coefficients"),
                    ("incidence", eq, "cubical realization vs facet system"),
                ):
                    print(f"{'PASS' if ok else 'FAIL'} {name} {tag}: {detail}", file=out)
                    failed |= not ok
        if flags["oracle"]:
            direct = sp.direct_gamma(b)
            lattice = fl.facet_system_from_building_set(b)
            via_fs = fl.polynomial_bundle(fl.f_vector(lattice)).gamma
            ok = via_fs == direct
            print(f"{'PASS' if ok else 'FAIL'} oracle-lattice {tag}: {_fmt(direct)} vs {_fmt(via_fs)}", file=out)
            failed |= not ok
            if flag:
                g, _ = sp.gamma_via_plan(sp.plan_flag(b))
                ok = g == direct
                print(f"{'PASS' if ok else 'FAIL'} oracle-shaving {tag}: {_fmt(g)} vs {_fmt(direct)}", file=out)
                failed |= not ok
            inc = geo.enumerate_vertices(geo.standard_realization(b))
            ok = geo.combinatorial_equivalence(inc, lattice)
            print(f"{'PASS' if ok else 'FAIL'} oracle-geometry {tag}: {len(inc.vertices)} vertices", file=out)
            failed |= not ok
    return EXIT_FAIL if failed else EXIT_OK


def cmd_preset(args, out) -> int:
    b = bs.preset(args.name, args.dim)
    text = b.to_json()
    if args.out:
        _write(args.out, text + "\n")
    else:
        print(text, file=out)
    return EXIT_OK


def cmd_graph(args, out) -> int:
    if args.edges is not None:
        g = bs.parse_edges(args.edges, args.nodes)
    elif args.file is not None:
        g = bs.load_graph(Path(args.file).read_text())
    else:
        raise InputError("graph needs --edges or --file")
    b = bs.graphical(g)
    if not b.is_connected:
        print("note: graph is disconnected; run `connectify` before `info`/`plan`", file=sys.stderr)
    text = b.to_json()
    if args.out:
        _write(args.out, text + "\n")
    else:
        print(text, file=out)
    return EXIT_OK


def cmd_connectify(args, out) -> int:
    b = load_building_set(args.input, args.dim)
    c, _ = bs.connectify(b)
    text = c.to_json()
    if args.out:
        _write(args.out, text + "\n")
    else:
        print(text, file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nesto", description="Nestohedra, gamma-vectors and cubical realizations.")
    sub = p.add_subparsers(dest="command", required=True)

    def with_input(name, help_):
        q = sub.add_parser(name, help=help_)
        q.add_argument("input", help="JSON file, preset:NAME or graph:EDGES")
        q.add_argument("--dim", type=int, help="dimension for preset inputs")
        return q

    with_input("validate", "check the building-set axioms").set_defaults(func=cmd_validate)

    q = with_input("info", "f-, h-, gamma-vectors and the H-polynomial")
    for k in ("f", "h", "gamma", "H2"):
        q.add_argument(f"--{k}", action="store_true")
    q.set_defaults(func=cmd_info)

    with_input("flag", "decide flagness").set_defaults(func=cmd_flag)

    q = with_input("plan", "cube subset and codimension-2 shaving order")
    q.add_argument("--json", metavar="OUT")
    q.add_argument("--trace", metavar="CSV", help="write the gamma trace")
    q.set_defaults(func=cmd_plan)

    q = with_input("realize", "exact H-representation")
    q.add_argument("--method", choices=("cubical", "standard"), default="cubical")
    q.add_argument("--json", metavar="OUT")
    q.add_argument("--off", metavar="OUT")
    q.set_defaults(func=cmd_realize)

    q = sub.add_parser("verify", help="run the gamma, Delzant and oracle checks")
    q.add_argument("inputs", nargs="+")
    q.add_argument("--dim", type=int)
    for k in ("gal", "bounds", "monotone", "delzant", "oracle"):
        q.add_argument(f"--{k}", action="store_true")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("preset", help="emit a preset building set")
    q.add_argument("name", choices=bs.PRESETS)
    q.add_argument("--dim", type=int, required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_preset)

    q = sub.add_parser("graph", help="graphical building set of a graph")
    q.add_argument("--edges", help='edge list such as "1-2,2-3"')
    q.add_argument("--nodes", type=int, help="node count (default: largest endpoint)")
    q.add_argument("--file", help="graph JSON file")
    q.add_argument("--out")
    q.set_defaults(func=cmd_graph)

    q = with_input("connectify", "merge components into an equivalent connected building set")
    q.add_argument("--out")
    q.set_defaults(func=cmd_connectify)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args, out)
    except (InputError, PreconditionError, NestoError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
