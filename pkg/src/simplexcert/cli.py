"""Command-line front end.

Exit codes (stable): 0 pass, 1 check or certification failed, 2 unreadable
or malformed input, 3 domain error, 4 the equivalent conditions disagree.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .alpha import ExponentialSpec, is_alpha_family
from .core import TOL_MEMBER, TOL_RANK, Alphabet, Dist, apply_channel, compose_channels
from .equivalence import DEFAULT_GRID, certify_simplex_equivalence, run_theorem_battery, simplex_model
from .errors import CertificationError, SimplexCertError
from .formats import (
    SpecParseError,
    build_model,
    load_spec,
    parse_certificate,
    render_certificate,
    render_diagnostic,
    render_report,
)
from .geometry import AUTOPARALLEL_TOL

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_DOMAIN, EXIT_FAULT = 0, 1, 2, 3, 4
ENV_TOL = "SIMPLEXCERT_TOL"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_PARSE)


def _alpha_list(text):
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _settings(args, spec):
    """Flag > spec file > environment > built-in default."""
    tol = TOL_MEMBER
    env = os.environ.get(ENV_TOL)
    if args.tol is None and "tol" not in spec.tolerances and env:
        try:
            tol = float(env)
        except ValueError:
            raise SpecParseError(f"{ENV_TOL}={env!r} is not a number") from None
    tol = spec.tolerances.get("tol", tol)
    tol_rank = spec.tolerances.get("tol_rank", TOL_RANK)
    auto = spec.tolerances.get("autoparallel", AUTOPARALLEL_TOL)
    if args.tol is not None:
        tol = args.tol
    if args.tol_rank is not None:
        tol_rank = args.tol_rank
    seed = spec.seed if args.seed is None else args.seed
    return tol, tol_rank, auto, seed


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_check_alpha(args):
    spec = load_spec(args.spec)
    tol, tol_rank, _, _ = _settings(args, spec)
    built = build_model(spec)
    alphas = args.alpha or list(DEFAULT_GRID)
    ok = True
    for a in alphas:
        v = is_alpha_family(a, built.model, tol=tol, tol_rank=tol_rank)
        ok &= v.is_family
        status = "PASS" if v.is_family else "FAIL"
        print(
            f"alpha={a:g}\t{status}\tdimension={v.dimension} (expected {v.expected_dimension})"
            f"\tresidual={v.max_residual:.3e}"
        )
    return EXIT_OK if ok else EXIT_FAIL


def cmd_certify(args):
    spec = load_spec(args.spec)
    tol, tol_rank, _, seed = _settings(args, spec)
    built = build_model(spec)
    try:
        cert = certify_simplex_equivalence(
            built.model, built.e_spec, built.m_spec, tol=tol, tol_rank=tol_rank, seed=seed
        )
    except CertificationError as exc:
        _write(args.out, render_diagnostic(exc, __version__))
        print(f"certification failed at stage {exc.stage}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _write(args.out, render_certificate(cert, __version__))
    return EXIT_OK


def cmd_battery(args):
    spec = load_spec(args.spec)
    tol, tol_rank, auto_tol, seed = _settings(args, spec)
    built = build_model(spec)
    grid = args.alpha or list(DEFAULT_GRID)
    report = run_theorem_battery(
        built.model, grid, tol=tol, tol_rank=tol_rank, autoparallel_tol=auto_tol, seed=seed
    )
    has_geo = report.autoparallel is not None
    head = "alpha\tfamily\tdim\tresidual" + ("\tautoparallel\tnormal" if has_geo else "")
    print(head)
    for a in report.alpha_grid:
        v = report.family[a]
        line = f"{a:g}\t{v.is_family}\t{v.dimension}\t{v.max_residual:.3e}"
        if has_geo:
            ap = report.autoparallel[a]
            line += f"\t{ap.verdict}\t{ap.max_normal_component:.3e}"
        print(line)
    print()
    labels = {
        "i": "(i)   equivalent to the simplex",
        "ii": "(ii)  exponential and mixture family",
        "iii": "(iii) alpha-family for two grid values",
        "iv": "(iv)  alpha-family for every grid value",
    }
    for k, text in labels.items():
        print(f"{text}: {report.conditions[k]}")
    if report.failure is not None:
        print(f"certification stage: {report.failure.stage}")
    if args.out:
        _write(args.out, render_report(report, __version__))
    if report.faults:
        for fault in report.faults:
            print(f"CONSISTENCY FAULT: {fault}", file=sys.stderr)
        return EXIT_FAULT
    return EXIT_OK


def _claim(ok, what):
    if not ok:
        raise AssertionError(what)


def demo_lines():
    """Run the three-point introductory example; returns the narrative and certificate text.

    Every claim is asserted; an AssertionError means the library disagrees
    with the example.
    """
    A = Alphabet(3)
    lams = np.linspace(0.05, 0.95, 10)
    model = np.array([[lam, (1 - lam) / 2, (1 - lam) / 2] for lam in lams])
    say = ["# Model M = {(lam, (1-lam)/2, (1-lam)/2) : 0 < lam < 1} on X = {0, 1, 2}"]

    q0, q1 = np.array([1.0, 0, 0]), np.array([0, 0.5, 0.5])
    mix = lams[:, None] * q0 + (1 - lams[:, None]) * q1
    _claim(np.array_equal(mix, model), "mixture form")
    say.append("# 1. mixture family: p_lam = lam (1,0,0) + (1-lam) (0,1/2,1/2)")

    e = ExponentialSpec(A, np.zeros(3), [[1.0, 0.0, 0.0]])
    thetas = np.log(2 * lams / (1 - lams))
    psi = e.psi(thetas[:, None])
    _claim(np.max(np.abs(psi - np.log(2 + np.exp(thetas)))) <= 1e-12, "psi(theta) = log(2 + e^theta)")
    _claim(np.max(np.abs(psi + np.log((1 - lams) / 2))) <= 1e-12, "psi(theta) = -log((1 - lam)/2)")
    expo = np.array([e.parametrization()(t) for t in thetas[:, None]])
    _claim(np.max(np.abs(expo - model)) <= 1e-12, "exponential form reproduces p_lam")
    say.append("# 2. exponential family: log p = theta F - psi(theta), F = (1,0,0),")
    say.append("#    theta = log(2 lam/(1-lam)), psi(theta) = log(2 + e^theta) at 10 values of theta")

    M = simplex_model([Dist(A, q0), Dist(A, q1)])
    for a in (-1.0, 1.0):
        _claim(is_alpha_family(a, M).is_family, "alpha-family at alpha = +-1")
    cert = certify_simplex_equivalence(M)
    V, W = cert.embedding.kernel, cert.left_inverse.kernel
    _claim(cert.partition.blocks == ((0,), (1, 2)), "partition {0}, {1, 2}")
    _claim(np.array_equal(V, [[1, 0], [0, 0.5], [0, 0.5]]), "matrix V")
    _claim(np.array_equal(W, [[1, 0, 0], [0, 1, 1]]), "matrix W")
    _claim(np.array_equal(compose_channels(cert.left_inverse, cert.embedding).kernel, np.eye(2)), "W V = I")
    for lam, p in zip(lams, model):
        out = apply_channel(cert.embedding, Dist(Alphabet(2), [lam, 1 - lam])).weights
        _claim(np.max(np.abs(out - p)) <= 1e-15, "V maps P_1 onto M")
    say.append("# 3. equivalent to P_1: V maps (lam, 1-lam) onto p_lam and W V = I,")
    say.append("#    V = [[1, 0], [0, 1/2], [0, 1/2]], W = [[1, 0, 0], [0, 1, 1]]")
    say.append("# certificate:")
    return say, render_certificate(cert, __version__)


def cmd_demo(args):
    try:
        say, cert_text = demo_lines()
    except AssertionError as exc:
        print(f"demo: claim failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = "\n".join(say) + "\n" + cert_text
    parse_certificate(text)  # the demo output is itself a certificate document
    sys.stdout.write(text)
    return EXIT_OK


def make_parser():
    p = _Parser(prog="simplexcert", description="Decide and certify statistical equivalence to a probability simplex.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("spec", help="model spec file (YAML)")
        sp.add_argument("--tol", type=float, help=f"membership tolerance (default {TOL_MEMBER:g}, env {ENV_TOL})")
        sp.add_argument("--tol-rank", type=float, help=f"relative singular-value cutoff (default {TOL_RANK:g})")
        sp.add_argument("--seed", type=int, help="seed for generic-element draws (default: spec seed or 0)")

    sp = sub.add_parser("check-alpha", help="test the model for alpha-family structure")
    common(sp)
    sp.add_argument("--alpha", type=_alpha_list, help="comma-separated alpha values")
    sp.set_defaults(func=cmd_check_alpha)

    sp = sub.add_parser("certify", help="build a simplex-equivalence certificate")
    common(sp)
    sp.add_argument("--out", help="certificate path (default stdout)")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("battery", help="evaluate all four equivalent conditions")
    common(sp)
    sp.add_argument("--alpha", type=_alpha_list, help="comma-separated alpha grid")
    sp.add_argument("--out", help="write a machine-readable report here")
    sp.set_defaults(func=cmd_battery)

    sp = sub.add_parser("demo", help="run the three-point introductory example")
    sp.set_defaults(func=cmd_demo)
    return p


def _attach_alpha_values(argv):
    # "--alpha -1,0" would otherwise read "-1,0" as an option
    out = []
    for tok in argv:
        if out and out[-1] == "--alpha" and tok[:1] == "-" and tok[1:2] in set("0123456789."):
            out[-1] = f"--alpha={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = make_parser().parse_args(_attach_alpha_values(argv))
    try:
        return args.func(args)
    except SpecParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SimplexCertError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
