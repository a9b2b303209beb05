"""Command-line front end: verification sweeps and small computations.

Reports are deterministic for a fixed argv and seed: the only line that may
differ between runs is the timestamp header, sweeps draw their randomness
from a seeded splitmix64 stream, and parallel runs pre-generate their case
list and sort results by case index before printing.

Exit codes: 0 all checks passed, 1 at least one verification failed,
2 bad input (unparseable file, bad flag, violated precondition).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import dilation as dl
from . import ktheory as kt
from . import uhf_cuntz as uc
from .core_endo import CoreEndo
from .exel_path import DepthFunction, transfer_L, transfer_identity_check
from .graph import Graph, load_graph
from .hilbert_module import (
    GraphFrameSystem,
    ModuleElement,
    UhfFrameSystem,
    beta_crosscheck,
    build_U,
    canonical_frame,
    gram_psd_check,
    reconstruct_check,
    u_isometry_report,
)
from .graph import bouquet
from .scalar import ONE
from .star_algebra import StarElement, matrix_unit, op_norm, parse_element
from .util import CheckReport, SplitMix64


class CliError(Exception):
    """Bad input; maps to exit code 2."""


class RunReport:
    """Collects check sections and computed output for one invocation."""

    def __init__(self, command: str, seed: int):
        self.command = command
        self.seed = seed
        self.sections: list[CheckReport] = []
        self.data: list[str] = []

    def add(self, section: CheckReport) -> None:
        self.sections.append(section)

    def say(self, line: str) -> None:
        self.data.append(line)

    @property
    def checks(self) -> int:
        return sum(s.checks for s in self.sections)

    @property
    def failed(self) -> int:
        return sum(len(s.failures) for s in self.sections)

    def body_lines(self) -> list[str]:
        out = ["command: %s" % self.command, "seed: %d" % self.seed]
        out.extend(self.data)
        for s in self.sections:
            out.extend(s.lines())
        out.append("checks: %d  passed: %d  failed: %d"
                   % (self.checks, self.checks - self.failed, self.failed))
        out.append("result: %s" % ("PASS" if self.failed == 0 else "FAIL"))
        return out

    def text(self) -> str:
        stamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        return "\n".join(["# run %s" % stamp] + self.body_lines()) + "\n"

    def json_text(self) -> str:
        doc = {
            "command": self.command,
            "seed": self.seed,
            "output": self.data,
            "sections": [{"name": s.name, "checks": s.checks, "failures": s.failures}
                         for s in self.sections],
            "checks": self.checks,
            "failed": self.failed,
            "result": "PASS" if self.failed == 0 else "FAIL",
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def exit_code(self) -> int:
        return 0 if self.failed == 0 else 1


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError("cannot read %s: %s" % (path, exc))


def _load_graph(path: str) -> Graph:
    try:
        return load_graph(_read(path))
    except ValueError as exc:
        raise CliError("bad graph file %s: %s" % (path, exc))


def _load_element(g: Graph, path: str) -> StarElement:
    try:
        return parse_element(g, _read(path))
    except ValueError as exc:
        raise CliError("bad element file %s: %s" % (path, exc))


def parse_int_matrix(text: str) -> list[list[int]]:
    try:
        rows = [[int(x) for x in row.split(",")] for row in text.split(";") if row.strip()]
    except ValueError as exc:
        raise CliError("bad matrix %r: %s" % (text, exc))
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise CliError("bad matrix %r: ragged or empty" % text)
    return rows


def parse_points(text: str) -> list[tuple[int, ...]]:
    try:
        return [tuple(int(x) for x in row.split(",")) for row in text.split(";") if row.strip()]
    except ValueError as exc:
        raise CliError("bad point list %r: %s" % (text, exc))


def _run_cases(cases, worker, parallel: bool) -> list[CheckReport]:
    """Evaluate worker over an already-generated case list, order-stable."""
    if not parallel:
        return [worker(c) for c in cases]
    with ThreadPoolExecutor() as pool:
        indexed = list(pool.map(lambda pair: (pair[0], worker(pair[1])),
                                list(enumerate(cases))))
    indexed.sort(key=lambda pair: pair[0])
    return [rep for _, rep in indexed]


# -- graph ------------------------------------------------------------------------


def cmd_graph_info(args, report: RunReport) -> None:
    g = _load_graph(args.file)
    info = g.classify_vertices()
    report.say("vertices: %d" % len(g.vertices))
    report.say("edges: %d" % len(g.edge_names))
    for v in g.vertices:
        report.say("vertex %s: out %d, in %d" % (v, len(g.out_edges(v)), len(g.in_edges(v))))
    singular = [v for v, item in info.items() if item.singular]
    regular = [v for v in info if v not in singular]
    report.say("regular: %s" % (",".join(sorted(regular)) if regular else "-"))
    report.say("singular: %s" % (",".join(sorted(singular)) if singular else "-"))
    report.say("beta_admissible: %s" % str(g.beta_admissible).lower())
    report.say("path_space_admissible: %s" % str(g.path_space_admissible).lower())
    report.say("all_regular: %s" % str(g.all_regular).lower())


# -- core -------------------------------------------------------------------------


def cmd_core_mul(args, report: RunReport) -> None:
    g = _load_graph(args.graph)
    a = _load_element(g, args.a)
    b = _load_element(g, args.b)
    report.say("product:")
    report.data.extend((a * b).text().rstrip("\n").split("\n"))


def cmd_core_beta(args, report: RunReport) -> None:
    g = _load_graph(args.graph)
    a = _load_element(g, args.a)
    try:
        image = CoreEndo(g).beta(a)
    except ValueError as exc:
        raise CliError(str(exc))
    report.say("shift image:")
    report.data.extend(image.text().rstrip("\n").split("\n"))


def cmd_core_iexpand(args, report: RunReport) -> None:
    g = _load_graph(args.graph)
    a = _load_element(g, args.a)
    try:
        parts = a.i_expand(args.level)
    except ValueError as exc:
        raise CliError(str(exc))
    total = StarElement.zero(g)
    for i, part in enumerate(parts):
        report.say("component %d:" % i)
        report.data.extend(part.text().rstrip("\n").split("\n"))
        total = total + part
    sec = CheckReport("expansion recombines")
    sec.count()
    if not total.equal(a):
        sec.fail("sum of components differs from the input")
    report.add(sec)


def cmd_core_norm(args, report: RunReport) -> None:
    g = _load_graph(args.graph)
    a = _load_element(g, args.a)
    try:
        res = op_norm(a)
    except ValueError as exc:
        raise CliError(str(exc))
    report.say("norm: %.12g" % res.value)
    report.say("error_bound: %.3e" % res.error_bound)


def _random_core(g: Graph, rng: SplitMix64, depth: int) -> StarElement:
    level = 1 + rng.below(depth)
    paths = g.paths(level)
    x = StarElement.zero(g)
    for _ in range(1 + rng.below(3)):
        mu = rng.choice(paths)
        nu = rng.choice([p for p in paths if p.src == mu.src])
        x = x + StarElement.word(g, rng.fraction(), mu, nu)
    return x


def cmd_core_verify_beta(args, report: RunReport) -> None:
    g = _load_graph(args.graph)
    try:
        endo = CoreEndo(g)
        w = endo.build_W()
    except ValueError as exc:
        raise CliError(str(exc))
    rng = SplitMix64(args.seed)

    gauge = CheckReport("W is a covariance isometry")
    gauge.count()
    total = StarElement.zero(g)
    for v in g.vertices:
        total = total + matrix_unit(g, g.empty_path(v), g.empty_path(v))
    if not (w.adjoint() * w).equal(total):
        gauge.fail("W*W differs from the unit")
    report.add(gauge)

    units = []
    for level in range(1, args.depth + 1):
        paths = g.paths(level)
        units.extend(matrix_unit(g, mu, nu)
                     for mu in paths for nu in paths if mu.src == nu.src)
    pairs = [(x, y) for x in units for y in units]
    for _ in range(args.trials):
        pairs.append((_random_core(g, rng, args.depth), _random_core(g, rng, args.depth)))

    def check_pair(case) -> CheckReport:
        x, y = case
        rep = CheckReport("pair")
        bx, by = endo.beta(x), endo.beta(y)
        rep.count()
        if not endo.beta(x * y).equal(bx * by):
            rep.fail("multiplicativity fails for x=\n%sy=\n%s" % (x.text(), y.text()))
        rep.count()
        if not endo.beta(x.adjoint()).equal(bx.adjoint()):
            rep.fail("adjoint fails for x=\n%s" % x.text())
        rep.count()
        if not bx.equal(w * x * w.adjoint()):
            rep.fail("covariance fails for x=\n%s" % x.text())
        return rep

    sweep = CheckReport("shift homomorphism sweep, %d exhaustive pairs, %d random"
                        % (len(pairs) - args.trials, args.trials))
    for rep in _run_cases(pairs, check_pair, args.parallel):
        sweep.checks += rep.checks
        sweep.failures.extend(rep.failures)
    report.add(sweep)


# -- exel -------------------------------------------------------------------------


def _random_depth_function(g: Graph, rng: SplitMix64, depth: int) -> DepthFunction:
    k = 1 + rng.below(depth)
    vals = {}
    for p in g.paths(k):
        if rng.below(2):
            vals[p] = rng.fraction()
    return DepthFunction(g, k, vals)


def cmd_exel_verify_transfer(args, report: RunReport) -> None:
    g = _load_graph(args.graph)
    if not g.path_space_admissible:
        raise CliError("graph must have no sinks and no singular vertices")
    rng = SplitMix64(args.seed)

    basic = CheckReport("unit and section identities")
    one = DepthFunction.constant(g, 1)
    basic.count()
    if not transfer_L(one).equal(one):
        basic.fail("L(1) differs from 1")
    for k in range(1, args.depth + 1):
        for p in g.paths(k):
            f = DepthFunction.indicator(g, p)
            basic.count()
            from .exel_path import alpha_shift
            if not transfer_L(alpha_shift(f)).equal(f):
                basic.fail("L(alpha(f)) differs from f at f=\n%s" % f.text())
    report.add(basic)

    cases = []
    for k in range(1, args.depth + 1):
        for p in g.paths(k):
            for q in g.paths(k):
                cases.append((DepthFunction.indicator(g, p), DepthFunction.indicator(g, q)))
    for _ in range(args.trials):
        cases.append((_random_depth_function(g, rng, args.depth),
                      _random_depth_function(g, rng, args.depth)))

    sweep = CheckReport("transfer identity sweep, %d exhaustive pairs, %d random"
                        % (len(cases) - args.trials, args.trials))
    for rep in _run_cases(cases, lambda ab: transfer_identity_check(*ab), args.parallel):
        sweep.checks += rep.checks
        sweep.failures.extend(rep.failures)
    report.add(sweep)


# -- module -----------------------------------------------------------------------


def _frame_system(args):
    if args.graph_file:
        g = _load_graph(args.graph_file)
        try:
            return GraphFrameSystem(g)
        except ValueError as exc:
            raise CliError(str(exc))
    if args.n is None or args.N is None:
        raise CliError("give a graph file, or both --n and --N")
    try:
        return UhfFrameSystem(uc.UhfSystem(args.n, args.N))
    except ValueError as exc:
        raise CliError(str(exc))


def cmd_module_verify_frames(args, report: RunReport) -> None:
    system = _frame_system(args)
    _, rep = canonical_frame(system)
    report.add(rep)
    elements = [ModuleElement.basis_word(system, (i,)) for i in system.indices]
    elements += [ModuleElement.from_algebra(system, a) for a in system.basis(1)]
    for m in elements:
        report.add(reconstruct_check(m))
    report.add(gram_psd_check(system, elements))


def cmd_module_verify_u(args, report: RunReport) -> None:
    system = _frame_system(args)
    try:
        _, rep = build_U(system, args.depth)
    except ValueError as exc:
        raise CliError(str(exc))
    report.add(rep)
    for degree in range(1, min(args.depth, 2) + 1):
        report.add(u_isometry_report(system, degree))


def cmd_module_crosscheck(args, report: RunReport) -> None:
    g = _load_graph(args.graph)
    if not g.path_space_admissible:
        raise CliError("graph must have no sinks and no singular vertices")
    paths = g.paths(args.level)
    cases = [(mu, nu) for mu in paths for nu in paths]
    sweep = CheckReport("two-route shift comparison, level %d, %d pairs"
                        % (args.level, len(cases)))
    for rep in _run_cases(cases, lambda mn: beta_crosscheck(g, *mn), args.parallel):
        sweep.checks += rep.checks
        sweep.failures.extend(rep.failures)
    report.add(sweep)


# -- uhf --------------------------------------------------------------------------


def cmd_uhf_demo(args, report: RunReport) -> None:
    try:
        sys_ = uc.UhfSystem(args.n, args.N)
    except ValueError as exc:
        raise CliError(str(exc))
    n, cap = args.n, args.N
    report.say("system: n=%d, N=%d" % (n, cap))

    proj = CheckReport("corner projection")
    p = sys_.p_tensor()
    proj.count()
    if not (p * p).equal(p):
        proj.fail("p is not idempotent")
    proj.count()
    if p.trace() != ONE * cap:
        proj.fail("p has trace %s, expected %d" % (p.trace().text(), cap))
    report.add(proj)

    g, family = uc.canonical_cuntz_family(sys_)
    uc.verify_cuntz_family(family)
    report.say("isometry family: %d generators on one vertex" % len(family))

    a = uc.TensorElement.unit_entry(n, (1,) * args.depth, (min(2, n),) * args.depth)
    report.add(uc.pi_T_report(sys_, family, a))
    report.add(uc.prefix_rep_sweep(sys_, a, args.depth + 1))
    report.add(uc.iso_generators_check(sys_))

    diag = uc.TensorElement(n, 0)
    for i in range(1, cap + 1):
        diag = diag + uc.TensorElement.unit_entry(n, (i,), (i,))
    rsys, _, rrep = uc.rank_rescale(n, 1, diag)
    report.add(rrep)
    report.say("rank data reproduces n=%d, N=%d" % (rsys.n, rsys.N))

    res = kt.paschke_sequence([[n * cap]], True)
    gr = kt.graph_k_theory(bouquet(n * cap))
    agree = CheckReport("six-term corner against the bouquet model")
    agree.count()
    if res.k0 != gr.k0 or res.k1 != gr.k1:
        agree.fail("corner mismatch: %s/%s vs %s/%s"
                   % (res.k0.text(), res.k1.text(), gr.k0.text(), gr.k1.text()))
    report.add(agree)
    report.say("K_0 = %s, K_1 = %s" % (res.k0.text(), res.k1.text()))


# -- dilation ---------------------------------------------------------------------


def cmd_dilation_verify(args, report: RunReport) -> None:
    b = parse_int_matrix(args.matrix)
    try:
        system = dl.LatticeSystem(b)
    except ValueError as exc:
        raise CliError(str(exc))
    report.say("dimension: %d, |det| = %d" % (system.d, system.det_abs))
    report.say("transversal: %s" % "; ".join(",".join(str(x) for x in p)
                                             for p in system.Sigma))
    if args.sigma:
        pts = parse_points(args.sigma)
        if any(len(p) != system.d for p in pts):
            raise CliError("sigma points must have dimension %d" % system.d)
        rep = dl.transversal_check(system, pts, power=1)
        rep.name = "supplied transversal"
        report.add(rep)
        if rep.passed:
            system = dl.LatticeSystem(b, sigma=pts)

    report.add(dl.lattice_rep_check(system, args.box))
    for i in range(1, args.level + 1):
        pts = dl.sigma_i(system, i, verify=False)
        report.add(dl.transversal_check(system, pts, power=i))
    rewrites = CheckReport("one-step rewrites over the transversal")
    for m in system.Sigma:
        for nn in system.Sigma:
            for power in (0, 1):
                _, rep = dl.dilation_beta(system, (m, power, nn),
                                          radius=min(args.box, 4))
                rewrites.checks += rep.checks
                rewrites.failures.extend(rep.failures)
    report.add(rewrites)


# -- ktheory ----------------------------------------------------------------------


def cmd_ktheory_graph(args, report: RunReport) -> None:
    g = _load_graph(args.file)
    try:
        res = kt.graph_k_theory(g)
    except ValueError as exc:
        raise CliError(str(exc))
    except kt.StabilizationError as exc:
        failed = CheckReport("stabilization")
        failed.count()
        failed.fail(str(exc))
        report.add(failed)
        return
    report.add(res.report)
    verts, a = kt.vertex_matrix(g)
    n = len(verts)
    classic = [[a[j][i] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
    k0c, kerc = kt.coker_ker(classic)
    agree = CheckReport("agreement with the transposed-matrix model")
    agree.count()
    if (k0c, kerc) != (res.k0, res.k1.free_rank):
        agree.fail("stagewise %s/%s vs classic %s/Z^%d"
                   % (res.k0.text(), res.k1.text(), k0c.text(), kerc))
    report.add(agree)
    report.say("K_0 = %s" % res.k0.text())
    report.say("K_1 = %s" % res.k1.text())


def cmd_ktheory_paschke(args, report: RunReport) -> None:
    m = parse_int_matrix(args.matrix)
    try:
        res = kt.paschke_sequence(m, args.af)
    except ValueError as exc:
        raise CliError(str(exc))
    report.data.extend(res.diagram.split("\n"))
    if res.k0 is not None:
        report.say("K_0 = %s" % res.k0.text())
        report.say("K_1 = %s" % res.k1.text())


# -- wiring -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--parallel", action="store_true")

    top = argparse.ArgumentParser(prog="corealg")
    sub = top.add_subparsers(dest="group", required=True)

    def leaf(group, name):
        return group.add_parser(name, parents=[common])

    g = sub.add_parser("graph").add_subparsers(dest="action", required=True)
    p = leaf(g, "info")
    p.add_argument("file")
    p.set_defaults(func=cmd_graph_info)

    c = sub.add_parser("core").add_subparsers(dest="action", required=True)
    p = leaf(c, "mul")
    p.add_argument("graph")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_core_mul)
    p = leaf(c, "beta")
    p.add_argument("graph")
    p.add_argument("a")
    p.set_defaults(func=cmd_core_beta)
    p = leaf(c, "iexpand")
    p.add_argument("graph")
    p.add_argument("a")
    p.add_argument("--level", type=int, default=1)
    p.set_defaults(func=cmd_core_iexpand)
    p = leaf(c, "norm")
    p.add_argument("graph")
    p.add_argument("a")
    p.set_defaults(func=cmd_core_norm)
    p = leaf(c, "verify-beta")
    p.add_argument("graph")
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--trials", type=int, default=25)
    p.set_defaults(func=cmd_core_verify_beta)

    e = sub.add_parser("exel").add_subparsers(dest="action", required=True)
    p = leaf(e, "verify-transfer")
    p.add_argument("graph")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--trials", type=int, default=25)
    p.set_defaults(func=cmd_exel_verify_transfer)

    m = sub.add_parser("module").add_subparsers(dest="action", required=True)
    p = leaf(m, "verify-frames")
    p.add_argument("graph_file", nargs="?")
    p.add_argument("--n", type=int)
    p.add_argument("--N", type=int)
    p.set_defaults(func=cmd_module_verify_frames)
    p = leaf(m, "verify-u")
    p.add_argument("graph_file", nargs="?")
    p.add_argument("--n", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--depth", type=int, default=2)
    p.set_defaults(func=cmd_module_verify_u)
    p = leaf(m, "crosscheck")
    p.add_argument("graph")
    p.add_argument("--level", type=int, default=1)
    p.set_defaults(func=cmd_module_crosscheck)

    u = sub.add_parser("uhf").add_subparsers(dest="action", required=True)
    p = leaf(u, "demo")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--depth", type=int, default=2)
    p.set_defaults(func=cmd_uhf_demo)

    d = sub.add_parser("dilation").add_subparsers(dest="action", required=True)
    p = leaf(d, "verify")
    p.add_argument("--matrix", required=True)
    p.add_argument("--box", type=int, default=4)
    p.add_argument("--sigma")
    p.add_argument("--level", type=int, default=2)
    p.set_defaults(func=cmd_dilation_verify)

    k = sub.add_parser("ktheory").add_subparsers(dest="action", required=True)
    p = leaf(k, "graph")
    p.add_argument("file")
    p.set_defaults(func=cmd_ktheory_graph)
    p = leaf(k, "paschke")
    p.add_argument("--matrix", required=True)
    p.add_argument("--af", action="store_true")
    p.set_defaults(func=cmd_ktheory_paschke)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = " ".join(argv if argv is not None else sys.argv[1:])
    report = RunReport(command, args.seed)
    try:
        args.func(args, report)
    except CliError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    except RuntimeError as exc:
        sys.stderr.write("verification raised: %s\n" % exc)
        return 1
    sys.stdout.write(report.json_text() if args.json else report.text())
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
