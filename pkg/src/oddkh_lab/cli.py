"""Command-line front end: ``oddkh-lab {invariants|oddkh|specseq|orient-test|selftest}``.

Exit codes: 0 success, 2 input/parse error, 3 computation error,
4 self-test failure.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .corpus import corpus, get_link
from .diagram import PlanarDiagram, crossing_signs, parse_pd
from .errors import DiagramError, DisconnectedDiagram, OddKhLabError
from .goeritz import branched_h1, determinant, jones, signature_nullity

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_COMPUTE = 3
EXIT_SELFTEST = 4


class InputError(Exception):
    """Bad command-line input (unknown link, unreadable file, bad page range)."""


@dataclass
class RunConfig:
    command: str
    pd: str | None = None
    file: str | None = None
    link: str | None = None
    characteristic: int = 0
    pages: str | None = None
    json: bool = False
    threads: int = 1
    seed: int = 0
    cases: int = 200

    def label(self) -> str:
        if self.link:
            return self.link
        if self.file:
            return Path(self.file).name
        return self.pd or ""


def _default_threads() -> int:
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:  # pragma: no cover - non-Linux
        return os.cpu_count() or 1


def load_diagram(cfg: RunConfig) -> PlanarDiagram:
    sources = [x is not None for x in (cfg.pd, cfg.file, cfg.link)]
    if sum(sources) != 1:
        raise InputError("give exactly one of --pd, --file or --link")
    if cfg.link is not None:
        try:
            return get_link(cfg.link)
        except KeyError as exc:
            raise InputError(exc.args[0]) from None
    if cfg.file is not None:
        try:
            text = Path(cfg.file).read_text()
        except OSError as exc:
            raise InputError("cannot read %s: %s" % (cfg.file, exc)) from None
        return parse_pd(text)
    return parse_pd(cfg.pd)


def _emit(cfg: RunConfig, payload: dict, lines: list[str]) -> None:
    if cfg.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print("\n".join(lines))


def _h1_str(h1: tuple[int, ...]) -> str:
    if not h1:
        return "0"
    return " + ".join("Z" if n == 0 else "Z/%d" % n for n in h1)


def cmd_invariants(cfg: RunConfig) -> int:
    d = load_diagram(cfg)
    n_plus, n_minus = crossing_signs(d)
    sigma, nu = signature_nullity(d)
    det = determinant(d)
    h1 = branched_h1(d)
    poly = jones(d)
    payload = {
        "link": cfg.label() or d.to_pd(),
        "components": d.components,
        "crossings": d.m,
        "n_plus": n_plus,
        "n_minus": n_minus,
        "sigma": sigma,
        "nu": nu,
        "det": det,
        "h1": list(h1),
        "jones": poly.to_json(),
    }
    lines = [
        "link        %s" % payload["link"],
        "components  %d   crossings %d (n+ = %d, n- = %d)" % (d.components, d.m, n_plus, n_minus),
        "sigma       %+d" % sigma,
        "nu          %d" % nu,
        "det         %d" % det,
        "H1(cover)   %s" % _h1_str(h1),
        "Jones       %s" % poly,
    ]
    _emit(cfg, payload, lines)
    return EXIT_OK


def cmd_oddkh(cfg: RunConfig) -> int:
    from .oddkh import reduced_odd_khovanov, table_to_json

    d = load_diagram(cfg)
    table = reduced_odd_khovanov(d, characteristic=cfg.characteristic, threads=cfg.threads)
    payload = table_to_json(d, table, link=cfg.label() or None, jones_poly=jones(d))
    ring = "Z" if cfg.characteristic == 0 else "F_%d" % cfg.characteristic
    lines = ["reduced odd Khovanov homology over %s of %s" % (ring, payload["link"]),
             "  %4s %5s %5s  %-12s %s" % ("t", "q", "free", "torsion", "delta#")]
    for row in payload["table"]:
        tors = ",".join("Z/%d" % n for n in row["torsion"]) or "-"
        ds = "-" if row["delta_sharp"] is None else str(row["delta_sharp"])
        lines.append("  %4d %5d %5d  %-12s %s" % (row["t"], row["q"], row["free"], tors, ds))
    lines.append("total rank %d" % table.total_rank())
    if table.sigma is not None:
        ranks = table.delta_sharp_ranks()
        payload["delta_sharp_ranks"] = list(ranks)
        lines.append("sigma %+d, nu %d; delta# ranks (j=0..3): %s" % (table.sigma, table.nu, ranks))
    _emit(cfg, payload, lines)
    return EXIT_OK


def _parse_pages(spec: str | None, top: int) -> list[int]:
    if spec is None:
        return list(range(1, min(top, 3) + 1))
    try:
        if "-" in spec or ".." in spec:
            lo, hi = spec.replace("..", "-").split("-", 1)
            pages = list(range(int(lo), int(hi) + 1))
        else:
            pages = [int(spec)]
    except ValueError:
        raise InputError("--pages expects R or LO-HI, got %r" % spec) from None
    if not pages or min(pages) < 1 or max(pages) > top:
        raise InputError("page range must lie within 1..%d" % top)
    return pages


def _load_filtered(cfg: RunConfig):
    """A filtered complex from a JSON file, or None if the input is a diagram."""
    from .specseq import FilteredComplex

    if cfg.file is None:
        return None
    text = Path(cfg.file).read_text()
    try:
        data = json.loads(text)
    except ValueError:
        return None
    try:
        entries = {(int(r), int(c)): int(v) for r, c, v in data.get("entries", [])}
        return FilteredComplex.from_entries(data["degrees"], data["levels"], entries,
                                            characteristic=cfg.characteristic)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("malformed filtered complex file: %s" % exc) from None


def cmd_specseq(cfg: RunConfig) -> int:
    from .oddkh import build_complex
    from .specseq import converged, page

    try:
        fc = _load_filtered(cfg)
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (cfg.file, exc)) from None
    if fc is None:
        d = load_diagram(cfg)
        fc = build_complex(d).filtered(cfg.characteristic)
        label = cfg.label() or d.to_pd()
    else:
        label = cfg.label()
    lo, hi = fc.level_range
    top = hi - lo + 1
    pages = _parse_pages(cfg.pages, top)
    payload = {"input": label, "characteristic": cfg.characteristic, "pages": []}
    lines = ["spectral sequence of the filtered complex for %s (levels %d..%d)" % (label, lo, hi)]
    for r in pages:
        pg = page(fc, r)
        payload["pages"].append({
            "r": r,
            "total": pg.total_dim(),
            "dims": [[p, deg, n] for (p, deg), n in sorted(pg.dims.items())],
        })
        lines.append("E^%d  total %d  by level %s  by degree %s"
                     % (r, pg.total_dim(), pg.dims_by_level(), pg.dims_by_degree()))
    inf = converged(fc)
    payload["converged"] = {"total": inf.total_dim(),
                            "dims": [[p, deg, n] for (p, deg), n in sorted(inf.dims.items())]}
    lines.append("E^inf total %d  by degree %s" % (inf.total_dim(), inf.dims_by_degree()))
    _emit(cfg, payload, lines)
    return EXIT_OK


def run_orientation_suite(seed: int, cases: int, splittings: int = 10) -> dict:
    """Seeded associativity, unit-law and splitting-independence checks."""
    from .orientcalc import check_associativity, check_unit_law, compose, random_gluing, random_triple

    rng = random.Random(seed)
    failures = {"associativity": 0, "unit": 0, "splitting": 0}
    for _ in range(cases):
        t1, t2, t3 = (random_triple(rng) for _ in range(3))
        f12 = random_gluing(rng, t1.b, t2.b, t2.a)
        f23 = random_gluing(rng, t2.b, t3.b, t3.a)
        if not check_associativity(t1, t2, t3, f12, f23).ok:
            failures["associativity"] += 1
        p = [[rng.randint(-2, 2) for _ in range(t1.a)] for _ in range(t1.b)]
        if not check_unit_law(t1, p, "right"):
            failures["unit"] += 1
        a = rng.randint(0, 3)
        p = [[rng.randint(-2, 2) for _ in range(a)] for _ in range(t1.b)]
        if not check_unit_law(t1, p, "left"):
            failures["unit"] += 1
        base = compose(t1, t2, f12).triple
        for _ in range(splittings):
            if compose(t1, t2, f12, random.Random(rng.getrandbits(32))).triple != base:
                failures["splitting"] += 1
    return {"seed": seed, "cases": cases, "failures": failures,
            "passed": not any(failures.values())}


def cmd_orient_test(cfg: RunConfig) -> int:
    result = run_orientation_suite(cfg.seed, cfg.cases)
    lines = ["orientation calculus, seed %d, %d cases" % (cfg.seed, cfg.cases)]
    for k, v in result["failures"].items():
        lines.append("  %-14s %s" % (k, "ok" if v == 0 else "%d failures" % v))
    _emit(cfg, result, lines)
    return EXIT_OK if result["passed"] else EXIT_SELFTEST


def _selftest_corpus() -> list[str]:
    from .oddkh import graded_euler, reduced_odd_khovanov

    problems = []
    for name, pd in corpus().items():
        d = parse_pd(pd)
        if d.m > 8:
            continue
        table = reduced_odd_khovanov(d)
        poly = jones(d)
        if graded_euler(table) != poly:
            problems.append("%s: graded Euler characteristic differs from Jones" % name)
        if poly(1) != 2 ** (d.components - 1):
            problems.append("%s: J(1) != 2^(components-1)" % name)
        det = determinant(d)
        order = 1
        for n in branched_h1(d):
            order *= n
        if poly.abs_at_t_minus_one() != det or order != det:
            problems.append("%s: |J(t=-1)|, det and |H1| disagree" % name)
    return problems


def _selftest_snf(seed: int, cases: int) -> list[str]:
    from .linalg import IntChainComplex, IntMatrix, homology, invariant_factors, smith_normal_form

    rng = random.Random(seed)
    problems = []
    for k in range(cases):
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        m = IntMatrix.from_dense([[rng.randint(-3, 3) for _ in range(c)] for _ in range(r)])
        snf = smith_normal_form(m, with_transforms=True)
        diag = snf.U @ m @ snf.V
        if any(i != j for (i, j), _ in diag.items()):
            problems.append("case %d: transformed matrix is not diagonal" % k)
        if invariant_factors(x for (i, j), x in diag.items()) != snf.factors:
            problems.append("case %d: diagonal does not match the invariant factors" % k)
        if smith_normal_form(m).factors != snf.factors:
            problems.append("case %d: sparse and dense eliminations disagree" % k)
        # chain complex d2 d1 = 0 built from a product of random matrices
        a = IntMatrix.from_dense([[rng.randint(-2, 2) for _ in range(3)] for _ in range(4)])
        cx = IntChainComplex({0: 4, 1: 3}, {1: a}, step=-1)
        if homology(cx, method="rank").groups != homology(cx, method="kernel").groups:
            problems.append("case %d: homology methods disagree" % k)
    return problems


def cmd_selftest(cfg: RunConfig) -> int:
    report = {}
    report["corpus"] = _selftest_corpus()
    orient = run_orientation_suite(cfg.seed, min(cfg.cases, 200))
    report["orientation"] = [] if orient["passed"] else ["%s: %d" % kv for kv in orient["failures"].items() if kv[1]]
    report["snf"] = _selftest_snf(cfg.seed, 100)
    ok = not any(report.values())
    lines = []
    for k, v in report.items():
        lines.append("%-12s %s" % (k, "pass" if not v else "FAIL"))
        lines.extend("    " + p for p in v)
    _emit(cfg, {"passed": ok, "suites": report}, lines)
    return EXIT_OK if ok else EXIT_SELFTEST


COMMANDS = {
    "invariants": cmd_invariants,
    "oddkh": cmd_oddkh,
    "specseq": cmd_specseq,
    "orient-test": cmd_orient_test,
    "selftest": cmd_selftest,
}


def _characteristic(text: str) -> int:
    from .linalg import is_prime

    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("characteristic must be an integer") from None
    if p != 0 and not is_prime(p):
        raise argparse.ArgumentTypeError("characteristic must be 0 or a prime")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oddkh-lab",
        description="Odd Khovanov homology, branched-cover invariants and spectral sequence tools.",
    )
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    parser.add_argument("command", choices=sorted(COMMANDS))
    src = parser.add_mutually_exclusive_group()
    src.add_argument("--pd", help="PD code, e.g. 'X[1,4,2,3] X[3,2,4,1]'")
    src.add_argument("--file", help="file holding a PD code (or a JSON filtered complex for specseq)")
    src.add_argument("--link", help="named link from the built-in corpus (%s)" % ", ".join(corpus()))
    parser.add_argument("--char", dest="characteristic", type=_characteristic, default=0,
                        help="coefficient characteristic: 0 or a prime (default 0)")
    parser.add_argument("--pages", help="page R or range LO-HI for specseq")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker processes for homology (default: available CPUs)")
    parser.add_argument("--seed", type=int, default=0, help="seed for orient-test and selftest")
    parser.add_argument("--cases", type=int, default=200, help="random cases for orient-test")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = args.threads if args.threads is not None else _default_threads()
    if threads < 1:
        parser.error("--threads must be positive")
    cfg = RunConfig(args.command, args.pd, args.file, args.link, args.characteristic,
                    args.pages, args.json, threads, args.seed, args.cases)
    if cfg.command in ("invariants", "oddkh") and not any((cfg.pd is not None, cfg.file, cfg.link)):
        parser.error("%s needs --pd, --file or --link" % cfg.command)
    try:
        return COMMANDS[cfg.command](cfg)
    except DisconnectedDiagram as exc:
        print("oddkh-lab: computation error: %s" % exc, file=sys.stderr)
        return EXIT_COMPUTE
    except (DiagramError, InputError) as exc:
        print("oddkh-lab: input error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE
    except (OddKhLabError, ArithmeticError, ValueError) as exc:
        print("oddkh-lab: computation error: %s" % exc, file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
