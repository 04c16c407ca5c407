"""Command-line front end: ``spcheck check``, ``spcheck fuzz`` and ``spcheck demo``."""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import checker
from .core import DEFAULT_TOL, SPError
from .models import ClassicalModel, HilbertModel, PerturbedHilbertModel, SectoredModel, load_model
from .observables import apply, hermitian_to_observable, load_observable, mean_value
from .phases import CONTINUITY_COEFFICIENT, continuity_bound, continuity_family, phase_context, quantities

log = logging.getLogger("spcheck")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a natural number")
    return v


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit natural number")
    return v


def default_seed() -> int:
    raw = os.environ.get("SPCHECK_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return _seed(raw)
    except (ValueError, argparse.ArgumentTypeError):
        raise UsageError(f"SPCHECK_SEED={raw!r} is not a 64-bit natural number") from None


def parse_builtin(spec: str, tol=None):
    """Model named by ``hilbert:D``, ``classical:N``, ``sectored:D1,D2,...`` or ``perturbed:D[:NOISE]``."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "hilbert":
            return HilbertModel(int(rest), tol)
        if kind == "classical":
            return ClassicalModel(int(rest), tol)
        if kind == "sectored":
            return SectoredModel([int(d) for d in rest.split(",")], tol)
        if kind == "perturbed":
            dim, _, noise = rest.partition(":")
            return PerturbedHilbertModel(int(dim), float(noise) if noise else 1e-6, tol=tol)
    except (ValueError, SPError) as exc:
        raise UsageError(f"bad builtin model {spec!r}: {exc}") from None
    raise UsageError(f"unknown builtin model {spec!r}")


def load_model_arg(arg: str, tol=None):
    if arg.startswith("builtin:"):
        return parse_builtin(arg[len("builtin:"):], tol)
    try:
        with open(arg, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {arg}: {exc.strerror}") from None
    try:
        return load_model(data, tol)
    except SPError as exc:
        raise UsageError(f"{arg}: {exc}") from None


def _load_observable_arg(path: str, model, tol):
    try:
        with open(path, "rb") as fh:
            r = load_observable(fh.read(), tol)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except SPError as exc:
        raise UsageError(f"{path}: {exc}") from None
    if not model.is_linear or r.model.dimension != model.dimension:
        raise UsageError("the observable's dimension does not match the model")
    return r


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--model", required=True, help="JSON model file or builtin:KIND:ARGS")
    p.add_argument("--samples", type=_positive_int, default=1000, help="draws per axiom (default 1000)")
    p.add_argument("--seed", type=_seed, default=None, help="64-bit seed (default $SPCHECK_SEED or 0)")
    p.add_argument("--tol", type=float, default=None, help="equality and orthogonality tolerance")
    p.add_argument("--coefficient", type=float, default=CONTINUITY_COEFFICIENT,
                   help="square-root coefficient of the continuity bound (default 0.5)")
    p.add_argument("--observable", default=None, help="observable fixture for ObservableLaws")
    p.add_argument("--workers", type=int, default=1, help="threads for sample batches")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", help="JSON report")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text", help="text summary (default)")
    p.set_defaults(fmt="text")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spcheck", description="Check similarity-projection axioms on a model.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add_common(sub.add_parser("check", help="run every axiom family once"))
    fz = sub.add_parser("fuzz", help="adversarial rounds, worst report per axiom")
    _add_common(fz)
    fz.add_argument("--rounds", type=_positive_int, default=3)
    demo = sub.add_parser("demo", help="print a worked example")
    demo.add_argument("name", choices=sorted(DEMOS))
    return parser


def _run(args) -> int:
    tol = None
    if args.tol is not None:
        try:
            tol = DEFAULT_TOL.with_eq(args.tol)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    model = load_model_arg(args.model, tol)
    observable = _load_observable_arg(args.observable, model, tol) if args.observable else None
    seed = args.seed if args.seed is not None else default_seed()
    try:
        config = checker.CheckConfig(samples=args.samples, seed=seed, tol=tol, workers=max(1, args.workers),
                                     continuity_coefficient=args.coefficient)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.command == "fuzz":
        reports = checker.fuzz(model, config, rounds=args.rounds, observable=observable)
    else:
        reports = checker.run_suite(model, config, observable=observable)
    doc = checker.report_document(model, config, reports)
    sys.stdout.write(checker.to_json(doc) if args.fmt == "json" else checker.render_text(doc))
    return EXIT_FAIL if any(r.failed for r in reports) else EXIT_OK


# -- demos --------------------------------------------------------------------

def demo_spin_half(out=print):
    m = HilbertModel(2)
    up_z = m.state([1, 0])
    up_x = m.state([1, 1])
    out("spin-1/2 as the Hilbert model C^2")
    out("  |+z> = (1, 0), |+x> = (1, 1)/sqrt(2)")
    out(f"  p(|+z>, |+x>) = {m.similarity(up_z, up_x):.12f}")
    out(f"  p(|+z>, |-z>) = {m.similarity(up_z, m.state([0, 1])):.12f}")


def demo_two_level(out=print):
    out("two-level family x = sqrt(r) u + sqrt(1-r) v, y = sqrt(r-eps) u + sqrt(1-r+eps) v, z = u")
    out(f"{'r':>4} {'eps':>7} {'1-p(x,y)':>11} {'eps^2/(4r(1-r))':>16} "
        f"{'eps^2/(r(1-r))':>15} {'slack c=1/2':>12} {'slack c=1':>11}")
    for r in (0.2, 0.5, 0.8):
        for eps in (1e-2, 1e-3):
            fam = continuity_family(r, eps)
            m = fam.model
            q = 1.0 - m.similarity(fam.x, fam.y)
            s_half = continuity_bound(m, fam.x, fam.y, fam.u, 0.5)
            s_one = continuity_bound(m, fam.x, fam.y, fam.u, 1.0)
            out(f"{r:>4} {eps:>7.0e} {q:>11.4e} {eps ** 2 / (4 * r * (1 - r)):>16.4e} "
                f"{eps ** 2 / (r * (1 - r)):>15.4e} {s_half:>+12.3e} {s_one:>+11.3e}")
    out("1-p follows eps^2/(4r(1-r)); with coefficient 1/2 the slack at z = u is negative,")
    out("with coefficient 1 it stays positive and is tightest at r = 1/2.")


def demo_pauli(out=print):
    m = HilbertModel(2)
    paulis = {
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    }
    x = m.state([math.sqrt(0.8), math.sqrt(0.2)])
    out("Pauli observables on C^2, state x = (sqrt(0.8), sqrt(0.2))")
    for name, H in paulis.items():
        r = hermitian_to_observable(H, m)
        out(f"  sigma_{name}: eigenvalues {[round(v, 12) for v in r.lambdas]}, "
            f"mean value at x = {mean_value(r, x):+.6f}")
    r = hermitian_to_observable(np.diag([2.0, 1.0]).astype(complex), m)
    a = m.state([1, 1])
    e1 = m.state([1, 0])
    out("diag(2, 1) applied to (1, 1)/sqrt(2):")
    out(f"  p(r(a), e1) = {m.similarity(apply(r, a), e1):.6f}")
    sz = hermitian_to_observable(paulis["Z"], m)
    b = m.state([1, np.exp(1j * math.pi / 3)])
    ctx = phase_context(m, [sz.subspaces[0].basis[0]], [sz.subspaces[1].basis[0]])
    before = quantities(ctx, a, b).omega
    after = quantities(ctx, apply(sz, a), b).omega
    out(f"sigma_Z has eigenvalues of opposite sign: omega {before:+.6f} -> {after:+.6f}")


DEMOS = {"spin-half": demo_spin_half, "appendix-c": demo_two_level, "pauli": demo_pauli}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help exits 0, bad flags exit 2
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "demo":
            DEMOS[args.name]()
            return EXIT_OK
        return _run(args)
    except UsageError as exc:
        print(f"spcheck: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
