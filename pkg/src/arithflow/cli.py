"""Batch verification command line.

Subcommands run the library's check suites deterministically and write a
single JSON report.  Exit codes: 0 all pass, 1 a check failed, 2 bad
usage/config, 3 internal error.  Per-check RNG seeds are derived from the
master seed and the check id by SHA-256, so enabling or reordering checks
does not change any individual sample set.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time

from .padic import TruncatedPadic, delta_base, teichmuller
from .poly import MultiPoly, Chart, ZZ, Zp, SphereNF, parse_poly, ParseError
from .forms import DiffForm, FiberFrame, lie_derivative
from .flows import (ClassicalFlow, PoissonStructure, poisson_from_symplectic,
                    lax_flow, generic_matrix, char_poly_coeffs,
                    check_prime_integral)
from . import euler as eu
from . import lax as lx
from . import jets

VERSION = "0.1.0"

DEFAULT_PRIMES = (5, 7, 13)
DEFAULT_PREC = 3
ALL_CHECKS = ("padic", "classical", "poisson", "lax_classical",
              "euler", "ap", "lax", "spectrum")


class ConfigError(ValueError):
    pass


class RunConfig:
    def __init__(self):
        self.primes = list(DEFAULT_PRIMES)
        self.prec = DEFAULT_PREC
        self.a = None          # explicit triple or None for sampling
        self.c = None          # explicit fiber or None for sampling
        self.samples = 10
        self.seed = 0
        self.out = None
        self.checks = list(ALL_CHECKS)
        self.perturb = False

    def to_dict(self):
        return {"p": self.primes, "prec": self.prec, "a": self.a,
                "c": self.c, "samples": self.samples, "seed": self.seed,
                "checks": self.checks, "perturb": self.perturb}


def parse_config(text):
    """key=value lines; '#' starts a comment."""
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("line %d: expected key=value" % lineno)
        key, val = [s.strip() for s in line.split("=", 1)]
        _apply_option(cfg, key, val)
    return cfg


def _apply_option(cfg, key, val):
    if key == "p":
        primes = sorted({int(v) for v in val.split(",") if v.strip()})
        for p in primes:
            if p == 2 or not _is_prime(p):
                raise ConfigError("p must be odd primes, got %d" % p)
        cfg.primes = primes
    elif key == "prec":
        cfg.prec = int(val)
        if cfg.prec < 1:
            raise ConfigError("prec must be >= 1")
    elif key == "a":
        cfg.a = [int(v) for v in val.split(",")]
        if len(cfg.a) != 3:
            raise ConfigError("a needs three entries")
    elif key == "c":
        cfg.c = [int(v) for v in val.split(",")]
        if len(cfg.c) != 2:
            raise ConfigError("c needs two entries")
    elif key == "samples":
        cfg.samples = int(val)
    elif key == "seed":
        cfg.seed = int(val)
    elif key == "out":
        cfg.out = val
    elif key == "checks":
        names = [v.strip() for v in val.split(",") if v.strip()]
        for n in names:
            if n not in ALL_CHECKS:
                raise ConfigError("unknown check %r" % n)
        cfg.checks = sorted(set(names), key=ALL_CHECKS.index)
    elif key == "perturb":
        cfg.perturb = val.lower() in ("1", "true", "yes")
    else:
        raise ConfigError("unknown key %r" % key)


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def check_rng(master_seed, check_id):
    h = hashlib.sha256(("%d:%s" % (master_seed, check_id)).encode()).hexdigest()
    return random.Random(int(h[:16], 16))


# ---------------------------------------------------------------------------
# individual checks; each returns (status, witness-or-None)

def _check_padic(cfg, rng):
    for p in cfg.primes:
        N = cfg.prec + 1
        for _ in range(max(cfg.samples, 20)):
            av = rng.randrange(p ** N)
            bv = rng.randrange(p ** N)
            a = TruncatedPadic(p, N, av)
            b = TruncatedPadic(p, N, bv)
            lhs = delta_base(a * b)
            rhs = (a.frobenius() * delta_base(b) + b.frobenius() * delta_base(a)
                   + delta_base(a) * delta_base(b) * p)
            if not lhs == rhs:
                return "fail", "product rule at p=%d a=%d b=%d" % (p, av, bv)
            t = teichmuller(p, av % p, N)
            if not t.frobenius() == t:
                return "fail", "teichmuller not fixed at p=%d r=%d" % (p, av % p)
    return "pass", None


def _check_classical(cfg, rng):
    chart = Chart(("x1", "x2", "x3"), (), ZZ())
    a = tuple(MultiPoly.var(n) for n in ("a1", "a2", "a3"))
    flow = eu.classical_euler_flow(chart, a)
    H1, H2 = eu.euler_h_polys(a)
    for H, name in ((H1, "H1"), (H2, "H2")):
        r = check_prime_integral(flow, H)
        if not r.is_zero():
            return "fail", "delta %s = %s" % (name, r)
    # symplectic side over a random F_p instance
    p = cfg.primes[0]
    gf = Zp(p, 1)
    av = _distinct_triple(rng, p)
    c2 = gf.from_int(rng.randrange(1, p))
    schart = Chart(("x1", "x2", "x3"),
                   (MultiPoly.var("x1", gf.from_int(1)),
                    MultiPoly.var("x2", gf.from_int(1)),
                    MultiPoly.var("x3", gf.from_int(1))), gf)
    ab = tuple(gf.from_int(v) for v in av)
    sflow = eu.classical_euler_flow(schart, ab)
    frame = FiberFrame(schart, ab)
    eta3 = DiffForm(schart, 2, {(0, 1): schart.one().div_factor(2)})
    nf = SphereNF(schart, c2)
    lied = lie_derivative(sflow, eta3)
    if not nf.is_zero(frame.contract_2form(lied)):
        return "fail", "Lie derivative of the area form does not restrict to 0"
    return "pass", None


def _distinct_triple(rng, p):
    while True:
        av = [rng.randrange(p) for _ in range(3)]
        if len({v % p for v in av}) == 3:
            return av


def _check_poisson(cfg, rng):
    p = cfg.primes[0]
    gf = Zp(p, 1)
    chart = Chart(("x1", "x2", "x3"), (), gf)
    struct = PoissonStructure.lie_poisson(chart, {
        ("x1", "x2"): {"x3": 1}, ("x2", "x3"): {"x1": 1},
        ("x3", "x1"): {"x2": 1}})
    x = [chart.var(n) for n in ("x1", "x2", "x3")]
    d = struct.jacobi_defect(x[0], x[1], x[2])
    if not d.is_zero():
        return "fail", "Jacobi defect %s" % d
    _, H2 = eu.euler_h_polys((gf.from_int(1),) * 3, gf.from_int(1))
    for xi in x:
        r = struct.bracket(chart.elem(H2), xi)
        if not r.is_zero():
            return "fail", "H2 is not a Casimir: %s" % r
    return "pass", None


def _check_lax_classical(cfg, rng):
    n = 2
    names = ["x%d%d" % (i + 1, j + 1) for i in range(n) for j in range(n)]
    chart = Chart(tuple(names), (), ZZ())
    M = [[chart.elem(MultiPoly.var("m%d%d" % (i + 1, j + 1)))
          for j in range(n)] for i in range(n)]
    flow = lax_flow(chart, M, n)
    X = generic_matrix(chart, n)
    for j, Pj in enumerate(char_poly_coeffs(X), start=1):
        r = flow.apply_elem(Pj)
        if not r.is_zero():
            return "fail", "delta P_%d = %s" % (j, r)
    return "pass", None


def _check_euler(cfg, rng):
    for p in cfg.primes:
        av = cfg.a if cfg.a is not None else _distinct_triple(rng, p)
        try:
            sysm = eu.EulerSystem(p, cfg.prec, av)
        except ValueError as e:
            return "fail", "p=%d a=%s: %s" % (p, av, e)
        flow = eu.build_flow(sysm)
        flow = eu.gauge_adjust(flow, sysm)
        if cfg.perturb:
            from .flows import ArithmeticFlow
            x3img = flow.images["x3"] + sysm.chart.var("x3")
            flow = ArithmeticFlow(sysm.chart, dict(flow.images, x3=x3img))
            r = check_prime_integral(flow, sysm.H1)
            if not r.is_zero():
                witness = str(r)
                if len(witness) > 200:
                    witness = witness[:200] + "..."
                return "fail", "p=%d perturbed flow: phi(H1) - H1^p = %s" % (
                    p, witness)
        elif not flow._builder.residuals_zero():
            return "fail", "p=%d: prime integral residual nonzero" % p
        bad = []
        for k in range(max(3, cfg.samples // 2)):
            if cfg.c is not None:
                fiber = eu.AdmissibleFiber(sysm, cfg.c[0], cfg.c[1])
            else:
                fiber = eu.sample_admissible_fiber(sysm, rng)
            r = eu.verify_linearization(flow, sysm, fiber)
            if not r.is_zero():
                bad.append("p=%d c=(%d,%d): %s"
                           % (p, fiber.c1.val % p, fiber.c2.val % p, r))
            r2 = eu.derive_new2_form(flow, sysm, fiber)
            if not r2.is_zero():
                bad.append("p=%d c=(%d,%d) pulled form: %s"
                           % (p, fiber.c1.val % p, fiber.c2.val % p, r2))
        for k in range(3):
            fiber = eu.sample_admissible_fiber(sysm, rng, need_c2_unit=True)
            r = eu.verify_new1(flow, sysm, fiber.c2)
            if not r.is_zero():
                bad.append("p=%d c2=%d sphere form: %s"
                           % (p, fiber.c2.val % p, r))
        if bad:
            return "fail", "; ".join(bad)
    return "pass", None


def _check_ap(cfg, rng):
    done = 0
    while done < max(cfg.samples, 20):
        p = rng.choice([q for q in range(3, 102) if _is_prime(q)])
        av = _distinct_triple(rng, p)
        c = (rng.randrange(p), rng.randrange(p))
        try:
            count, ap = eu.count_points_and_ap(p, av, c)
        except ValueError:
            continue
        hv = eu.hasse_value(p, av, c)
        if (ap - hv) % p != 0:
            return "fail", "p=%d a=%s c=%s: a_p=%d vs A=%d" % (p, av, c, ap, hv)
        if ap * ap > 4 * p:
            return "fail", "p=%d a=%s c=%s: |a_p|=%d beats the bound" % (
                p, av, c, abs(ap))
        done += 1
    return "pass", None


def _rand_pmatrix(rng, n, p, prec):
    return lx.PMatrix([[TruncatedPadic(p, prec, rng.randrange(p ** prec))
                        for _ in range(n)] for _ in range(n)])


def _check_lax(cfg, rng):
    for p in cfg.primes[:2]:
        for n in (2, 3):
            done = 0
            while done < max(cfg.samples, 10):
                ts = rng.sample(range(p), n)
                h = lx.PMatrix.diagonal(
                    [TruncatedPadic(p, cfg.prec,
                                    t + p * rng.randrange(p ** (cfg.prec - 1)))
                     for t in ts])
                g = _rand_pmatrix(rng, n, p, cfg.prec)
                if not g.det().is_unit():
                    continue
                x = lx.conj(h, g)
                lhs = lx.frobenius_star(x)
                rhs = lx.conj(lx.phi0_entrywise(h), lx.phi0_entrywise(g))
                if not lhs == rhs:
                    return "fail", "eigenvalue-lift diagram at p=%d n=%d" % (p, n)
                y = lx.frobenius_star_star(x, rng)
                P = lx.char_poly(x)
                Py = lx.char_poly(y)
                if not all(Py[j] == P[j].frobenius() for j in range(n)):
                    return "fail", "char-poly-lift diagram at p=%d n=%d" % (p, n)
                done += 1
    return "pass", None


def _check_spectrum(cfg, rng):
    p = cfg.primes[0]
    done = 0
    while done < max(cfg.samples, 10):
        n = 2
        ts = rng.sample(range(1, p), n)
        h = lx.PMatrix.diagonal([teichmuller(p, t, cfg.prec) for t in ts])
        g = _rand_pmatrix(rng, n, p, cfg.prec).map_entries(
            lambda e: teichmuller(p, e.val % p, cfg.prec))
        if not g.det().is_unit():
            continue
        x = lx.conj(h, g)
        if not lx.frobenius_star(x) == x:
            return "fail", "constructed matrix is not a fixed point"
        if not lx.spectrum_delta_constant_check(x):
            return "fail", "fixed point with non-Teichmuller spectrum"
        done += 1
    return "pass", None


CHECK_FUNCS = {
    "padic": _check_padic,
    "classical": _check_classical,
    "poisson": _check_poisson,
    "lax_classical": _check_lax_classical,
    "euler": _check_euler,
    "ap": _check_ap,
    "lax": _check_lax,
    "spectrum": _check_spectrum,
}


def run(cfg):
    checks = []
    for cid in cfg.checks:
        rng = check_rng(cfg.seed, cid)
        t0 = time.time()
        try:
            status, witness = CHECK_FUNCS[cid](cfg, rng)
        except Exception as e:  # internal failure, reported as such
            raise RuntimeError("internal error in check %r: %s" % (cid, e)) from e
        rec = {"check": cid, "params": {"p": cfg.primes, "prec": cfg.prec},
               "status": status, "elapsed": round(time.time() - t0, 3)}
        if witness:
            rec["residual"] = witness
        checks.append(rec)
    summary = {"pass": sum(1 for c in checks if c["status"] == "pass"),
               "fail": sum(1 for c in checks if c["status"] == "fail"),
               "skip": sum(1 for c in checks if c["status"] == "skip")}
    return {"version": VERSION, "config": cfg.to_dict(),
            "checks": checks, "summary": summary}


def _emit(report, cfg):
    text = json.dumps(report, indent=2, sort_keys=True)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    for c in report["checks"]:
        line = "%-14s %s" % (c["check"], c["status"].upper())
        print(line, file=sys.stderr)
    return 1 if report["summary"]["fail"] else 0


def _build_config(args):
    cfg = RunConfig()
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
    for key in ("p", "prec", "a", "c", "samples", "seed", "out", "checks"):
        val = getattr(args, key, None)
        if val is not None:
            _apply_option(cfg, key, str(val))
    if getattr(args, "perturb", False):
        cfg.perturb = True
    return cfg


def _add_common(sp):
    sp.add_argument("--config", help="key=value config file")
    sp.add_argument("--p", help="comma-separated odd primes")
    sp.add_argument("--prec", type=int, help="working precision (digits)")
    sp.add_argument("--a", help="Euler parameters a1,a2,a3")
    sp.add_argument("--c", help="fiber point c1,c2")
    sp.add_argument("--samples", type=int, help="samples per check")
    sp.add_argument("--seed", type=int, help="master RNG seed")
    sp.add_argument("--out", help="write the JSON report here")
    sp.add_argument("--checks", help="comma-separated check subset")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="arithflow",
        description="exact verification of classical and p-adic flows")
    sub = parser.add_subparsers(dest="command")

    sp = sub.add_parser("selftest", help="run every check suite")
    _add_common(sp)

    sp = sub.add_parser("euler", help="arithmetic Euler flow checks")
    sp.add_argument("mode", choices=["build", "verify"])
    sp.add_argument("--perturb", action="store_true",
                    help="perturb the flow to demonstrate a failing report")
    _add_common(sp)

    sp = sub.add_parser("hasse", help="print the Hasse invariant polynomial")
    sp.add_argument("--p", required=True)
    sp.add_argument("--a", required=True)

    sp = sub.add_parser("ap", help="point count and trace congruence")
    sp.add_argument("--p", required=True)
    sp.add_argument("--a", required=True)
    sp.add_argument("--c", required=True)

    sp = sub.add_parser("lax", help="arithmetic Lax checks")
    sp.add_argument("mode", choices=["verify"])
    _add_common(sp)

    sp = sub.add_parser("jet", help="jet prolongation")
    sp.add_argument("mode", choices=["prolong"])
    sp.add_argument("--f", required=True, help="relation polynomial")
    sp.add_argument("--order", type=int, default=1)
    sp.add_argument("--flavor", choices=["classical", "arithmetic"],
                    default="classical")
    sp.add_argument("--p", help="prime (arithmetic flavor)")

    sp = sub.add_parser("classical", help="classical flow checks")
    sp.add_argument("mode", choices=["verify"])
    _add_common(sp)

    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return _dispatch(args)
    except (ConfigError, ParseError, ValueError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except RuntimeError as e:
        print("internal error: %s" % e, file=sys.stderr)
        return 3


def _dispatch(args):
    if args.command == "selftest":
        cfg = _build_config(args)
        return _emit(run(cfg), cfg)
    if args.command == "euler":
        cfg = _build_config(args)
        cfg.checks = ["euler"]
        return _emit(run(cfg), cfg)
    if args.command == "hasse":
        p = int(args.p)
        if p == 2 or not _is_prime(p):
            raise ConfigError("p must be an odd prime")
        a = [int(v) for v in args.a.split(",")]
        if len(a) != 3:
            raise ConfigError("a needs three entries")
        print(eu.hasse_invariant(p, a))
        return 0
    if args.command == "ap":
        p = int(args.p)
        a = [int(v) for v in args.a.split(",")]
        c = [int(v) for v in args.c.split(",")]
        count, ap = eu.count_points_and_ap(p, a, c)
        hv = eu.hasse_value(p, a, c)
        out = {"p": p, "a": a, "c": c, "count": count, "a_p": ap,
               "hasse": hv, "congruent": (ap - hv) % p == 0}
        print(json.dumps(out, sort_keys=True))
        return 0 if out["congruent"] else 1
    if args.command == "lax":
        cfg = _build_config(args)
        cfg.checks = ["lax", "spectrum"]
        return _emit(run(cfg), cfg)
    if args.command == "jet":
        f = parse_poly(args.f)
        p = int(args.p) if args.p else None
        pres = jets.prolong(f, args.order, args.flavor, p)
        for k, rel in enumerate(pres.relations):
            print("delta^%d: %s" % (k, rel))
        return 0
    if args.command == "classical":
        cfg = _build_config(args)
        cfg.checks = ["classical", "poisson", "lax_classical"]
        return _emit(run(cfg), cfg)
    raise ConfigError("unknown command %r" % args.command)


if __name__ == "__main__":
    sys.exit(main())
