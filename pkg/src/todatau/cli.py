"""Command line interface: ``todatau <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys

from .exact import EpsScalar, LatticePoly
from .parsing import ParseError, parse_lattice
from .ring import TodaPoly


def _ints(text: str):
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _doc(value):
    if isinstance(value, TodaPoly):
        return value.to_document()
    if isinstance(value, LatticePoly):
        return [{"monomial": {"n": i, "e": j}, "coefficient": str(c)}
                for (i, j), c in sorted(value.terms.items())]
    if isinstance(value, EpsScalar):
        return [{"eps_power": e, "value": str(c)} for e, c in sorted(value.terms.items())]
    return str(value)


def _emit(args, doc, text):
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(text)


def cmd_resolvent(args):
    from .resolvent import mr_compute

    r = mr_compute(args.order)
    blocks = r.render()
    lines = []
    for b in blocks:
        (r11, r12), (r21, r22) = b["entries"]
        lines.append(f"lambda^{b['power']}:  [{r11} | {r12}] [{r21} | {r22}]")
    _emit(args, {"order": args.order, "blocks": blocks}, "\n".join(lines))
    return 0


def cmd_tau_poly(args):
    from .tau import tau_structure

    ts = tau_structure()
    if args.q is None:
        val, name = ts.S(args.p), f"S_{args.p}"
    else:
        val, name = ts.omega2(args.p, args.q), f"Omega_{args.p},{args.q}"
    _emit(args, {"name": name, "value": _doc(val), "text": str(val)}, f"{name} = {val}")
    return 0


def cmd_omega(args):
    from .tau import omega_multi

    val = omega_multi(args.indices)
    name = "Omega_" + ",".join(map(str, args.indices))
    _emit(args, {"name": name, "value": _doc(val), "text": str(val)}, f"{name} = {val}")
    return 0


def cmd_correlators(args):
    from .resolvent import lattice_ring
    from .tau import correlators_kernel, correlators_mr
    from .wave import correlators_wave

    f, g = parse_lattice(args.f), parse_lattice(args.g)
    idx = tuple(sorted(args.indices))
    k = len(idx)
    if k < 2:
        raise SystemExit("need at least two indices")
    if args.method == "wave":
        val = correlators_wave((f, g), k, 0, indices=[idx])[idx]
    elif args.method == "mr":
        val = correlators_mr(k, 0, ring=lattice_ring(f, g), indices=[idx])[idx]
    else:
        val = correlators_kernel(k, 0, ring=lattice_ring(f, g), indices=[idx])[idx]
    if args.at_n is not None:
        val = val.evaluate(args.at_n)
    name = "Omega_" + ",".join(map(str, idx))
    _emit(args, {"name": name, "method": args.method, "value": _doc(val), "text": str(val)}, f"{name} = {val}")
    return 0


def cmd_gue(args):
    from .applications import gue_correlators

    val = gue_correlators(args.degrees)
    if args.at_n is not None:
        val = val.evaluate(args.at_n)
    name = "<" + " ".join(f"tr M^{d}" for d in args.degrees) + ">_c"
    _emit(args, {"degrees": list(args.degrees), "value": _doc(val), "text": str(val)}, f"{name} = {val}")
    return 0


def cmd_gw(args):
    from .applications import gw_correlators

    val = gw_correlators(args.indices, args.genus_max)
    name = "<" + " ".join(f"tau_{i}(w)" for i in args.indices) + ">"
    _emit(args, {"indices": list(args.indices), "genus_max": args.genus_max, "value": _doc(val)},
          f"{name} = {val}")
    return 0


def _suite(name: str, order: int):
    from . import applications as ap
    from . import prewave as pw
    from .resolvent import (mr_compute, verify_alpha_relations, verify_defining,
                            verify_gradient_identity, verify_K_subtractions)
    from .tau import verify_commutativity, verify_tau_axioms
    from .wave import build_pair, verify_K_D_relation, verify_rp_initial

    if name == "tau":
        yield verify_tau_axioms(min(order, 5))
        yield verify_commutativity(min(order, 4))
    elif name == "mr":
        r = mr_compute(max(order, 13))
        yield verify_defining(r)
        yield verify_alpha_relations(r)
        yield verify_gradient_identity(r, (min(order, 6), min(order, 6)))
        yield verify_K_subtractions(r, min(order, 6))
    elif name == "wave":
        for label, (f, g) in (("GUE", (ap.GUE_F, ap.GUE_G)), ("GW", ap.gw_data())):
            p = build_pair(f, g, order)
            for rep in (verify_rp_initial(p), verify_K_D_relation(p)):
                rep.title = f"{label} {rep.title}"
                yield rep
    elif name == "gue":
        yield ap.verify_gue_closed(order)
        yield ap.verify_binomial_identities(30)
        yield ap.verify_gue_wick()
    elif name == "gw":
        yield ap.gw_kernel_check(min(order, 4), 3)
        yield ap.verify_gw_routes(2, min(order, 4))
    elif name == "appendix":
        yield pw.verify_projector_entries(order)
        yield pw.verify_AB_formulas(order)
        yield pw.verify_dpre_pair(order)


SUITES = ("tau", "mr", "wave", "gue", "gw", "appendix")


def cmd_verify(args):
    names = SUITES if args.suite == "all" else (args.suite,)
    reports = [rep for n in names for rep in _suite(n, args.order)]
    ok = all(r.passed for r in reports)
    _emit(args, {"passed": ok, "reports": [r.to_document() for r in reports]},
          "\n".join(r.to_text() for r in reports))
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="todatau", description="Toda lattice tau-structures and correlators")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("resolvent", help="basic matrix resolvent coefficients")
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(func=cmd_resolvent)

    p = sub.add_parser("tau-poly", help="Omega_{p,q}, or S_p when --q is omitted")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int)
    p.set_defaults(func=cmd_tau_poly)

    p = sub.add_parser("omega", help="multi-point Omega polynomial")
    p.add_argument("--indices", type=_ints, required=True)
    p.set_defaults(func=cmd_omega)

    p = sub.add_parser("correlators", help="correlators on initial data f(n), g(n)")
    p.add_argument("--method", choices=("mr", "kernel", "wave"), default="wave")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--indices", type=_ints, required=True)
    p.add_argument("--at-n", type=int)
    p.set_defaults(func=cmd_correlators)

    p = sub.add_parser("gue", help="connected GUE correlators")
    p.add_argument("--degrees", type=_ints, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--symbolic", action="store_true")
    mode.add_argument("--at-n", type=int)
    p.set_defaults(func=cmd_gue)

    p = sub.add_parser("gw", help="stationary GW invariants of P^1")
    p.add_argument("--indices", type=_ints, required=True)
    p.add_argument("--genus-max", type=int, required=True)
    p.set_defaults(func=cmd_gw)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--order", type=int, default=6)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
