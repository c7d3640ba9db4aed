"""Command-line interface: ``effham {expand,diagrams,eval,validate,zeta}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from .evaluator import CapacityError, evaluate_integrand
from .hamiltonian import FormError, ParseError, parse_hamiltonian
from .series import MAX_ORDER, shift_hbar, heff_high_t, ho_closed_form
from .symbolic import Poly, zeta_even_coeff
from .validation import run_checks
from .wick import diagram_classes

HO = "p^2/(2*M) + (M*w^2/2)*x^2"


class UsageError(Exception):
    pass


def _add_common(p: argparse.ArgumentParser, hamiltonian: bool = True) -> None:
    if hamiltonian:
        p.add_argument("--hamiltonian", default=HO, help="H(p, x) in the documented grammar")
        p.add_argument("--order", type=int, default=4)
    for name, default in (("beta", 1.0), ("omega", 1.0), ("M", 1.0), ("hbar", 1.0),
                          ("p0", 0.0), ("x0", 0.0), ("g", 1.0)):
        p.add_argument(f"--{name}", type=float, default=default)
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="effham", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="high-temperature series of H_eff")
    _add_common(p)

    p = sub.add_parser("diagrams", help="connected diagram classes at one order")
    _add_common(p)
    p.add_argument("--evaluate", action="store_true", help="integrate each class")

    p = sub.add_parser("eval", help="numeric H_eff(p0, x0)")
    _add_common(p)
    p.add_argument("--closed-form", choices=("ho",), default=None)

    p = sub.add_parser("validate", help="run the validation suite")
    _add_common(p, hamiltonian=False)
    p.add_argument("--m-max", type=int, default=10_000, help="Matsubara oracle depth")

    p = sub.add_parser("zeta", help="zeta(2k) as rational multiples of pi^(2k)")
    p.add_argument("--order", type=int, default=5)
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _bindings(args) -> dict[str, float]:
    return {k: getattr(args, k) for k in ("beta", "omega", "M", "hbar", "p0", "x0", "g")}


def _check_order(order: int) -> None:
    if not 1 <= order <= MAX_ORDER:
        raise CapacityError(f"--order must be within 1..{MAX_ORDER}")


def cmd_expand(args, out) -> int:
    _check_order(args.order)
    series = heff_high_t(parse_hamiltonian(args.hamiltonian), args.order)
    if args.format == "json":
        out.write(series.to_json() + "\n")
        return 0
    out.write(f"# H = {series.hamiltonian}\n")
    for t in series.terms:
        out.write(f"n={t.order}  beta^{t.beta_power}  {t.coefficient.render()}\n")
    return 0


def cmd_diagrams(args, out) -> int:
    _check_order(args.order)
    h = parse_hamiltonian(args.hamiltonian)
    coeff_of = {v.monomial: v.coefficient for v in h.vertices}
    rows = []
    n = args.order
    for d in diagram_classes(h, n):
        vertex_factor = Poly.const(1)
        for m in d.monomials:
            vertex_factor = vertex_factor * coeff_of[m]
        integrand = d.representative.value()
        if args.evaluate:
            value = evaluate_integrand(integrand, n) * vertex_factor * Poly.const(d.multiplicity)
            # contribution to the order-n coefficient of H_eff
            value = shift_hbar(value.scale(Fraction((-1) ** (n + 1), math.factorial(n))), -n)
            shown = value.render()
        else:
            shown = f"{d.multiplicity} * ({vertex_factor.render()}) * [{integrand.render()}]"
        rows.append({"canonical_key": d.canonical_key, "topology": d.topology,
                     "multiplicity": str(d.multiplicity), "value": shown})
    if args.format == "json":
        out.write(json.dumps({"hamiltonian": args.hamiltonian, "order": n, "diagrams": rows}, indent=2) + "\n")
    else:
        for r in rows:
            out.write(f"{r['canonical_key']}\t{r['topology']}\t{r['multiplicity']}\t{r['value']}\n")
    return 0


def cmd_eval(args, out) -> int:
    b = _bindings(args)
    if args.closed_form == "ho":
        value = ho_closed_form(b["p0"], b["x0"], b["beta"], b["M"], b["omega"], b["hbar"])
    else:
        _check_order(args.order)
        value = heff_high_t(parse_hamiltonian(args.hamiltonian), args.order).evaluate(b)
    if args.format == "json":
        out.write(json.dumps({"value": value}) + "\n")
    else:
        out.write(f"{value:.15g}\n")
    return 0


def cmd_validate(args, out) -> int:
    results = run_checks(m_max=args.m_max)
    if args.format == "json":
        out.write(json.dumps([r.as_dict() for r in results], indent=2) + "\n")
    else:
        width = max(len(r.check) for r in results)
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            out.write(f"{status}  {r.check:<{width}}  expected={r.expected}  actual={r.actual}  tol={r.tolerance}\n")
    return 0 if all(r.passed for r in results) else 1


def cmd_zeta(args, out) -> int:
    if args.order < 1:
        raise UsageError("--order must be >= 1")
    rows = []
    for k in range(1, args.order + 1):
        r = zeta_even_coeff(k)
        rows.append({"k": k, "coefficient": str(r), "value": float(r) * math.pi ** (2 * k)})
    if args.format == "json":
        out.write(json.dumps(rows, indent=2) + "\n")
    else:
        for row in rows:
            out.write(f"zeta({2 * row['k']}) = {row['coefficient']} * pi^{2 * row['k']} = {row['value']:.15g}\n")
    return 0


COMMANDS = {
    "expand": cmd_expand,
    "diagrams": cmd_diagrams,
    "eval": cmd_eval,
    "validate": cmd_validate,
    "zeta": cmd_zeta,
}


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except (ParseError, FormError, CapacityError, UsageError, ValueError) as exc:
        err.write(f"effham: error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())
