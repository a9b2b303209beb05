"""The shift endomorphism beta of the balanced subalgebra and its isometry.

For a finite graph in which every vertex emits at least one edge, beta sends
t_mu t_nu^* to the average of t_{e mu} t_{f nu}^* over the edges e, f that
extend mu, nu at their ranges, with coefficient
(|s^-1(r(mu))| |s^-1(r(nu))|)^(-1/2).  The isometry W = sum_e |s^-1(s(e))|^(-1/2) t_e
implements it: beta(x) = W x W^*.  Both routes are coded independently so one
can check the other.
"""

from __future__ import annotations

from fractions import Fraction

from .graph import Graph, Path
from .scalar import ONE, Radical
from .star_algebra import StarElement, matrix_unit, unit
from .util import CheckReport


class CoreEndo:
    """Graph-indexed beta with cached out-degree counts."""

    def __init__(self, graph: Graph):
        if not graph.beta_admissible:
            bad = next(v for v in graph.vertices if not graph.out_edges(v))
            raise ValueError("vertex %r emits no edge; beta is undefined" % bad)
        self.graph = graph
        self._out_count = {v: len(graph.out_edges(v)) for v in graph.vertices}

    def beta(self, x: StarElement) -> StarElement:
        if x.graph is not self.graph:
            raise ValueError("element lives over a different graph")
        if not x.is_core():
            raise ValueError("beta needs a balanced element (|mu| = |nu| termwise)")
        g = self.graph
        out: dict[tuple[Path, Path], Radical] = {}
        for (mu, nu), c in x.items():
            scale = c * Radical.inv_sqrt(self._out_count[mu.rng] * self._out_count[nu.rng])
            for e in g.out_edges(mu.rng):
                for f in g.out_edges(nu.rng):
                    key = (g.prepend_edge(e, mu), g.prepend_edge(f, nu))
                    s = out.get(key)
                    t = scale if s is None else s + scale
                    if t:
                        out[key] = t
                    elif s is not None:
                        del out[key]
        return StarElement(g, out)

    def matrix_unit_images(self, i: int, v: str) -> tuple[dict, CheckReport]:
        """beta images of the level-i words with source v, with an exhaustive
        verification that they still multiply as matrix units."""
        g = self.graph
        family = {}
        for mu in g.paths(i):
            if mu.src != v:
                continue
            for nu in g.paths(i):
                if nu.src != v:
                    continue
                family[(mu, nu)] = self.beta(matrix_unit(g, mu, nu))
        report = CheckReport("matrix unit images (level %d, vertex %s)" % (i, v))
        for (mu, nu), x in family.items():
            report.count()
            if not x.adjoint().equal(family[(nu, mu)]):
                report.fail("adjoint mismatch at (%s, %s)" % (mu.text(), nu.text()))
            for (kappa, lam), y in family.items():
                prod = x * y
                expected = family[(mu, lam)] if nu == kappa else StarElement.zero(g)
                report.count()
                if not prod.equal(expected):
                    report.fail("product rule fails at (%s,%s)(%s,%s):\n%s"
                                % (mu.text(), nu.text(), kappa.text(), lam.text(),
                                   prod.text()))
        return family, report

    def build_W(self) -> StarElement:
        g = self.graph
        W = StarElement.zero(g)
        for e in g.edge_names:
            mu = g.path([e])
            W = W + StarElement.word(g, Radical.inv_sqrt(self._out_count[mu.src]),
                                     mu, g.empty_path(mu.src))
        if not (W.adjoint() * W).equal(unit(g)):
            raise RuntimeError("W*W differs from the unit; with positive"
                               " out-degrees this cannot happen")
        return W

    def covariance_check(self, x: StarElement) -> CheckReport:
        report = CheckReport("covariance beta(x) = WxW*")
        W = self.build_W()
        lhs = self.beta(x)
        rhs = W * x * W.adjoint()
        report.count()
        if not lhs.equal(rhs):
            report.fail("beta(x) != WxW* for x=\n%sbeta(x)=\n%sWxW*=\n%s"
                        % (x.text(), lhs.text(), rhs.text()))
        return report


def tensor_beta_compare(n: int, x) -> CheckReport:
    """Check the bouquet-of-n-loops form of beta on a tensor element.

    The dictionary e_{mu nu} (x) 1 -> s_mu s_nu^* carries x into the balanced
    subalgebra; there beta(x) must match p (x) x with p the rank-one averaging
    projection (1/n) sum_{ij} e_ij.  A unitary u with first column the
    normalized all-ones vector conjugates e_11 to p, so the same check runs
    once more through Ad(u (x) 1) of e_11 (x) x.
    """
    from . import uhf_cuntz

    report = CheckReport("tensor form of beta on the %d-loop bouquet" % n)
    if x.n != n:
        raise ValueError("tensor element is over M_%d, expected M_%d" % (x.n, n))
    g, loops = uhf_cuntz.bouquet_edges(n)
    endo = CoreEndo(g)

    p_entries = {((i,), (j,)): Radical.from_rational(Fraction(1, n))
                 for i in range(1, n + 1) for j in range(1, n + 1)}
    p = uhf_cuntz.TensorElement(n, 1, p_entries)

    report.count()
    if not (p * p).equal(p):
        report.fail("averaging projection is not idempotent")
    report.count()
    if not p.trace() == 1:
        report.fail("averaging projection has trace %s, expected 1" % (p.trace(),))

    lhs = endo.beta(uhf_cuntz.to_core_element(g, loops, x))
    rhs = uhf_cuntz.to_core_element(g, loops, uhf_cuntz.tensor_prepend(p, x))
    report.count()
    if not lhs.equal(rhs):
        report.fail("beta(x) != p (x) x for x=\n%s" % x.text())

    u = uhf_cuntz.averaging_unitary(n)
    e11 = uhf_cuntz.TensorElement(n, 1, {((1,), (1,)): ONE})
    report.count()
    if not uhf_cuntz.conjugate(u, e11).equal(p):
        report.fail("u e_11 u* != p")
    conj = uhf_cuntz.first_slot_conjugate(u, uhf_cuntz.tensor_prepend(e11, x))
    report.count()
    if not conj.equal(uhf_cuntz.tensor_prepend(p, x)):
        report.fail("Ad(u (x) 1)(e_11 (x) x) != p (x) x for x=\n%s" % x.text())
    return report
