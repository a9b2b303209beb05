"""Frame coordinates for the transfer-operator module and its tensor powers.

Everything here is exact.  A module element of degree i is a finite tuple of
coefficient-algebra entries indexed by i-letter words in the frame indices;
inner products, left actions, the shift isometries U and U_i, and the rank-one
operator calculus are all expressed through two primitives per system:

    gram1(i, j)   = <F_i, F_j>
    act1(i, b, j) = <F_i, b F_j>

with the degree-i pairing peeling one letter at a time.  Coordinate vectors
represent the same element exactly when the Gram matrix maps their difference
to zero, so equality tests go through Gram-projected (canonical) coordinates.

Two systems are provided: the path system of a finite regular graph, whose
coefficient algebra is the locally constant functions with exact radical
values, and the matrix-tower system, whose coefficient algebra is the tensor
elements of uhf_cuntz.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core_endo import CoreEndo
from .graph import Graph, Path
from .scalar import ONE, Radical
from .star_algebra import StarElement, matrix_unit, unit
from .uhf_cuntz import TensorElement, UhfSystem, uhf_L, uhf_alpha
from .uhf_cuntz import words as tensor_words
from .util import CheckReport


class TruncationDepthError(ValueError):
    """The requested truncation cannot hold the shifted unit."""


# -- coefficient algebra for the graph system ------------------------------------


class RadicalFunc:
    """Locally constant function on the path space with radical values."""

    __slots__ = ("graph", "depth", "values")

    def __init__(self, graph: Graph, depth: int, values: dict[Path, Radical] | None = None):
        self.graph = graph
        self.depth = depth
        self.values = {}
        if values:
            for p, x in values.items():
                if len(p) != depth:
                    raise ValueError("path %s has length %d, expected %d"
                                     % (p.text(), len(p), depth))
                if x:
                    self.values[p] = x

    @classmethod
    def indicator(cls, graph: Graph, mu: Path, coeff: Radical = ONE) -> "RadicalFunc":
        return cls(graph, len(mu), {mu: coeff})

    @classmethod
    def constant(cls, graph: Graph, coeff: Radical) -> "RadicalFunc":
        return cls(graph, 0, {graph.empty_path(v): coeff for v in graph.vertices})

    def value(self, p: Path) -> Radical:
        if len(p) < self.depth:
            raise ValueError("path %s shorter than depth %d" % (p.text(), self.depth))
        if len(p) == self.depth:
            return self.values.get(p, Radical())
        return self.values.get(self.graph.prefix(p, self.depth), Radical())

    def lift(self, depth: int) -> "RadicalFunc":
        if depth < self.depth:
            raise ValueError("cannot lower depth %d to %d" % (self.depth, depth))
        if depth == self.depth:
            return self
        out = {}
        for p in self.graph.paths(depth):
            x = self.value(p)
            if x:
                out[p] = x
        return RadicalFunc(self.graph, depth, out)

    def _common(self, other: "RadicalFunc"):
        k = max(self.depth, other.depth)
        return self.lift(k), other.lift(k)

    def __add__(self, other):
        a, b = self._common(other)
        out = dict(a.values)
        for p, x in b.values.items():
            s = out.get(p)
            t = x if s is None else s + x
            if t:
                out[p] = t
            elif s is not None:
                del out[p]
        return RadicalFunc(self.graph, a.depth, out)

    def __sub__(self, other):
        return self + other.scalar(Radical.from_rational(-1))

    def __mul__(self, other):
        a, b = self._common(other)
        out = {}
        for p, x in a.values.items():
            y = b.values.get(p)
            if y:
                out[p] = x * y
        return RadicalFunc(self.graph, a.depth, out)

    def scalar(self, c) -> "RadicalFunc":
        return RadicalFunc(self.graph, self.depth,
                           {p: x * c for p, x in self.values.items()})

    def equal(self, other: "RadicalFunc") -> bool:
        a, b = self._common(other)
        return a.values == b.values

    def is_zero(self) -> bool:
        return not self.values

    def text(self) -> str:
        lines = ["F %s %s" % (p.text(), x.text())
                 for p, x in sorted(self.values.items(), key=lambda kv: kv[0].text())]
        return "\n".join(lines) + "\n" if lines else "0\n"

    def __repr__(self):
        return "RadicalFunc(depth=%d, %d nonzero)" % (self.depth, len(self.values))


def radical_func_from_depth_function(f) -> RadicalFunc:
    return RadicalFunc(f.graph, f.depth,
                       {p: Radical.from_rational(x) for p, x in f.values.items()})


# -- the two frame systems ---------------------------------------------------------


class GraphFrameSystem:
    """Frame indexed by edges; F_e is the scaled cylinder indicator with
    scaling the square root of the out-degree at s(e)."""

    kind = "graph"

    def __init__(self, graph: Graph):
        if not graph.path_space_admissible:
            raise ValueError("graph must have no sinks and no singular vertices")
        self.graph = graph
        self.indices = graph.edge_names
        self._count = {v: len(graph.out_edges(v)) for v in graph.vertices}

    def unit(self) -> RadicalFunc:
        return RadicalFunc.constant(self.graph, ONE)

    def zero(self) -> RadicalFunc:
        return RadicalFunc(self.graph, 0)

    def mul(self, a, b):
        return a * b

    def add(self, a, b):
        return a + b

    def adjoint(self, a):
        return a

    def scalar(self, a, c):
        return a.scalar(c)

    def is_zero(self, a) -> bool:
        return a.is_zero()

    def equal(self, a, b) -> bool:
        return a.equal(b)

    def a_text(self, a) -> str:
        return a.text()

    def alpha(self, a: RadicalFunc) -> RadicalFunc:
        g = self.graph
        out = {}
        for p in g.paths(a.depth + 1):
            x = a.value(g.drop_first(p))
            if x:
                out[p] = x
        return RadicalFunc(g, a.depth + 1, out)

    def L(self, a: RadicalFunc) -> RadicalFunc:
        g = self.graph
        if a.depth == 0:
            a = a.lift(1)
        k = max(a.depth - 1, 1)
        out = {}
        for p in g.paths(k):
            exts = g.out_edges(p.rng)
            total = Radical()
            for e in exts:
                total = total + a.value(g.prepend_edge(e, p))
            total = total * Fraction(1, len(exts))
            if total:
                out[p] = total
        return RadicalFunc(g, k, out)

    def restrict_edge(self, b: RadicalFunc, e: str) -> RadicalFunc:
        """The function rho -> b(e.rho) on the cylinder reaching s(e)."""
        g = self.graph
        v = g.src(e)
        depth = max(b.depth - 1, 0)
        out = {}
        for p in g.paths(depth):
            if p.rng != v:
                continue
            x = b.value(g.prepend_edge(e, p))
            if x:
                out[p] = x
        return RadicalFunc(g, depth, out)

    def act1(self, e: str, b: RadicalFunc, f: str) -> RadicalFunc:
        if e != f:
            return self.zero()
        return self.restrict_edge(b, e)

    def qcoord(self, e: str, a: RadicalFunc) -> RadicalFunc:
        return self.restrict_edge(a, e).scalar(Radical.inv_sqrt(self._count[self.graph.src(e)]))

    def frame_rep(self, e: str) -> RadicalFunc:
        mu = self.graph.path([e])
        return RadicalFunc.indicator(self.graph, mu,
                                     Radical.sqrt(self._count[self.graph.src(e)]))

    def basis(self, depth: int) -> list:
        return [RadicalFunc.indicator(self.graph, mu) for mu in self.graph.paths(depth)]

    def psd_blocks(self, entries: list[list[RadicalFunc]]):
        depth = max((entry.depth for row in entries for entry in row), default=0)
        blocks = []
        for lam in self.graph.paths(depth):
            blocks.append(np.array([[entry.value(lam).evalf() for entry in row]
                                    for row in entries]))
        return blocks


class UhfFrameSystem:
    """Frame indexed by the pairs (i, j); the basis is orthonormal."""

    kind = "uhf"

    def __init__(self, sys: UhfSystem):
        self.sys = sys
        self.indices = tuple(sys.indices())

    def unit(self) -> TensorElement:
        return TensorElement.identity(self.sys.n, 0)

    def zero(self) -> TensorElement:
        return TensorElement(self.sys.n, 0)

    def mul(self, a, b):
        return a * b

    def add(self, a, b):
        return a + b

    def adjoint(self, a):
        return a.adjoint()

    def scalar(self, a, c):
        return a * c

    def is_zero(self, a) -> bool:
        return a.is_zero()

    def equal(self, a, b) -> bool:
        return a.equal(b)

    def a_text(self, a) -> str:
        return a.text()

    def alpha(self, a):
        return uhf_alpha(self.sys, a)

    def L(self, a):
        return uhf_L(self.sys, a)

    def act1(self, ij, b, kl):
        i, j = ij
        k, l = kl
        prod = self.sys.matrix_unit(j, i) * b * self.sys.matrix_unit(k, l)
        return uhf_L(self.sys, prod) * self.sys.N

    def qcoord(self, ij, a):
        i, j = ij
        return uhf_L(self.sys, self.sys.matrix_unit(j, i) * a) * Radical.sqrt(self.sys.N)

    def frame_rep(self, ij):
        i, j = ij
        return TensorElement.unit_entry(self.sys.n, (i,), (j,), Radical.sqrt(self.sys.N))

    def basis(self, depth: int) -> list:
        ws = tensor_words(self.sys.n, depth)
        return [TensorElement.unit_entry(self.sys.n, mu, nu)
                for mu in ws for nu in ws]

    def psd_blocks(self, entries):
        depth = max((entry.k for row in entries for entry in row), default=0)
        lifted = [[entry.lift(depth) for entry in row] for row in entries]
        blocks = [[cell.to_numeric() for cell in row] for row in lifted]
        return [np.block(blocks)]


# -- pairing and module elements -----------------------------------------------------


def pair(system, w: tuple, b, wp: tuple):
    """<F_w, b F_wp> by peeling the leading letters."""
    if len(w) != len(wp):
        raise ValueError("words of unequal degree")
    while w:
        if system.is_zero(b):
            return b
        b = system.act1(w[0], b, wp[0])
        w = w[1:]
        wp = wp[1:]
    return b


def _left_act_word(system, b, w: tuple) -> dict:
    """Coordinates of b . F_w, by frame reconstruction one letter at a time."""
    if not w:
        return {(): b}
    out: dict[tuple, object] = {}
    for i in system.indices:
        b1 = system.act1(i, b, w[0])
        if system.is_zero(b1):
            continue
        for v, d in _left_act_word(system, b1, w[1:]).items():
            key = (i,) + v
            s = out.get(key)
            out[key] = d if s is None else system.add(s, d)
    return out


class ModuleElement:
    """Degree-i element in frame coordinates: a finite map from i-letter
    index words to coefficient-algebra entries."""

    __slots__ = ("system", "degree", "coords", "source")

    def __init__(self, system, degree: int, coords: dict | None = None, source=None):
        self.system = system
        self.degree = degree
        self.coords = {}
        if coords:
            for w, c in coords.items():
                if len(w) != degree:
                    raise ValueError("word %r has length != degree %d" % (w, degree))
                if not system.is_zero(c):
                    self.coords[w] = c
        self.source = source

    @classmethod
    def zero(cls, system, degree: int = 1) -> "ModuleElement":
        return cls(system, degree)

    @classmethod
    def basis_word(cls, system, word: tuple) -> "ModuleElement":
        return cls(system, len(word), {tuple(word): system.unit()})

    @classmethod
    def from_algebra(cls, system, a) -> "ModuleElement":
        """q(a) in frame coordinates; remembers a for reconstruction checks."""
        coords = {}
        for j in system.indices:
            c = system.qcoord(j, a)
            if not system.is_zero(c):
                coords[(j,)] = c
        return cls(system, 1, coords, source=a)

    def __add__(self, other):
        if other.degree != self.degree or other.system is not self.system:
            raise ValueError("degree or system mismatch")
        out = dict(self.coords)
        for w, c in other.coords.items():
            s = out.get(w)
            t = c if s is None else self.system.add(s, c)
            if self.system.is_zero(t):
                out.pop(w, None)
            else:
                out[w] = t
        return ModuleElement(self.system, self.degree, out)

    def __sub__(self, other):
        return self + other.scale(Radical.from_rational(-1))

    def scale(self, c: Radical) -> "ModuleElement":
        return ModuleElement(self.system, self.degree,
                             {w: self.system.scalar(x, c) for w, x in self.coords.items()})

    def right_mul(self, b) -> "ModuleElement":
        return ModuleElement(self.system, self.degree,
                             {w: self.system.mul(c, b) for w, c in self.coords.items()})

    def inner(self, other: "ModuleElement"):
        """<self, other> in the coefficient algebra."""
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        sys = self.system
        total = sys.zero()
        for w, c in self.coords.items():
            cw = sys.adjoint(c)
            for v, d in other.coords.items():
                gv = pair(sys, w, sys.unit(), v)
                if sys.is_zero(gv):
                    continue
                total = sys.add(total, sys.mul(sys.mul(cw, gv), d))
        return total

    def canonical_coords(self) -> dict:
        """Gram-projected coordinates; equal vectors mean equal elements."""
        sys = self.system
        out: dict[tuple, object] = {}
        for v, c in self.coords.items():
            for w, d in _left_act_word(sys, sys.unit(), v).items():
                add = sys.mul(d, c)
                if sys.is_zero(add):
                    continue
                s = out.get(w)
                t = add if s is None else sys.add(s, add)
                if sys.is_zero(t):
                    out.pop(w, None)
                else:
                    out[w] = t
        return out

    def equal(self, other: "ModuleElement") -> bool:
        if other.degree != self.degree:
            return False
        a = self.canonical_coords()
        b = other.canonical_coords()
        if set(a) != set(b):
            return False
        return all(self.system.equal(a[w], b[w]) for w in a)

    def is_null(self) -> bool:
        return not self.canonical_coords()

    def text(self) -> str:
        sys = self.system
        lines = []
        for w, c in sorted(self.coords.items(), key=lambda kv: repr(kv[0])):
            lines.append("%r:\n%s" % (w, sys.a_text(c)))
        return "\n".join(lines) + "\n" if lines else "0\n"

    def __repr__(self):
        return "ModuleElement(degree=%d, %d words)" % (self.degree, len(self.coords))


def left_act(system, b, m: ModuleElement) -> ModuleElement:
    """The left action of the coefficient algebra through the frame."""
    if m.degree == 0:
        c = m.coords.get((), system.zero())
        return ModuleElement(system, 0, {(): system.mul(b, c)})
    out: dict[tuple, object] = {}
    for w, c in m.coords.items():
        for v, d in _left_act_word(system, b, w).items():
            add = system.mul(d, c)
            if system.is_zero(add):
                continue
            s = out.get(v)
            t = add if s is None else system.add(s, add)
            if system.is_zero(t):
                out.pop(v, None)
            else:
                out[v] = t
    return ModuleElement(system, m.degree, out)


def tensor(m1: ModuleElement, m2: ModuleElement) -> ModuleElement:
    """m1 (x) m2 over the coefficient algebra: inner coefficients move right."""
    sys = m1.system
    out: dict[tuple, object] = {}
    for v, c in m1.coords.items():
        moved = left_act(sys, c, m2)
        for w, d in moved.coords.items():
            key = v + w
            s = out.get(key)
            t = d if s is None else sys.add(s, d)
            if sys.is_zero(t):
                out.pop(key, None)
            else:
                out[key] = t
    return ModuleElement(sys, m1.degree + m2.degree, out)


# -- frames ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Frame:
    system: object
    indices: tuple

    def gram(self, i, j):
        return self.system.act1(i, self.system.unit(), j)


def canonical_frame(system) -> tuple[Frame, CheckReport]:
    """The standard frame of the system, with its Gram identities verified."""
    frame = Frame(system, tuple(system.indices))
    report = CheckReport("frame Gram identities")
    for i in frame.indices:
        for j in frame.indices:
            got = frame.gram(i, j)
            if system.kind == "graph":
                if i == j:
                    v = system.graph.src(i)
                    expected = RadicalFunc(system.graph, 0,
                                           {system.graph.empty_path(v): ONE})
                else:
                    expected = system.zero()
            else:
                expected = system.unit() if i == j else system.zero()
            report.count()
            if not system.equal(got, expected):
                report.fail("gram(%s, %s) = %s" % (i, j, system.a_text(got)))
    for i in frame.indices:
        sub = reconstruct_check(ModuleElement.basis_word(system, (i,)))
        report.merge(sub)
    return frame, report


def reconstruct_check(m: ModuleElement) -> CheckReport:
    """Parseval identity for m; q-images also get the representative test
    through the transfer-operator null criterion."""
    sys = m.system
    report = CheckReport("frame reconstruction")
    recon = ModuleElement(sys, m.degree, m.canonical_coords())
    report.count()
    if not recon.equal(m):
        report.fail("sum F_w <F_w, m> differs from m for m=\n%s" % m.text())
    if m.source is not None:
        a = m.source
        rep = sys.zero()
        for j in sys.indices:
            h = sys.zero()
            for v, c in m.coords.items():
                gv = pair(sys, (j,), sys.unit(), v)
                if not sys.is_zero(gv):
                    h = sys.add(h, sys.mul(gv, c))
            rep = sys.add(rep, sys.mul(sys.frame_rep(j), sys.alpha(h)))
        diff = sys.add(rep, sys.scalar(a, Radical.from_rational(-1)))
        gap = sys.L(sys.mul(sys.adjoint(diff), diff))
        report.count()
        if not sys.is_zero(gap):
            report.fail("representative differs from a by a non-null vector: %s"
                        % sys.a_text(gap))
    return report


# -- the isometries U and U_i -----------------------------------------------------------


def u_element(system) -> ModuleElement:
    """q(alpha(1)), the degree-1 element implementing U."""
    return ModuleElement.from_algebra(system, system.alpha(system.unit()))


def U_map(system, m: ModuleElement) -> ModuleElement:
    """U_i m = q(alpha(1)) (x) m, raising the degree by one."""
    return tensor(u_element(system), m)


def U_star_map(system, m: ModuleElement) -> ModuleElement:
    """The adjoint: F_j (x) rest maps to L(f_j) . rest."""
    if m.degree < 1:
        raise ValueError("U* lowers degree; need degree >= 1")
    sys = system
    lf = {j: sys.L(sys.frame_rep(j)) for j in sys.indices}
    out: dict[tuple, object] = {}
    for w, d in m.coords.items():
        j, rest = w[0], w[1:]
        b = lf[j]
        if sys.is_zero(b):
            continue
        for v, e in _left_act_word(sys, b, rest).items():
            add = sys.mul(e, d)
            if sys.is_zero(add):
                continue
            s = out.get(v)
            t = add if s is None else sys.add(s, add)
            if sys.is_zero(t):
                out.pop(v, None)
            else:
                out[v] = t
    return ModuleElement(sys, m.degree - 1, out)


def build_U(system, depth: int) -> tuple[ModuleElement, CheckReport]:
    """The coordinate column of U with the isometry and transfer identities
    verified over the depth-truncated coefficient basis."""
    if depth < 1:
        raise TruncationDepthError("depth %d cannot hold the shifted unit" % depth)
    u = u_element(system)
    report = CheckReport("U isometry at truncation depth %d" % depth)
    for a in system.basis(depth):
        ua = u.right_mul(a)
        back = U_star_map(system, ua)
        report.count()
        if not (len(back.coords) <= 1 and
                system.equal(back.coords.get((), system.zero()), a)):
            report.fail("U*U differs from the identity at a=\n%s" % system.a_text(a))
        qa = ModuleElement.from_algebra(system, a)
        la = U_star_map(system, qa).coords.get((), system.zero())
        report.count()
        if not system.equal(la, system.L(a)):
            report.fail("U*(q(a)) differs from L(a) at a=\n%s" % system.a_text(a))
    return u, report


def u_isometry_report(system, degree: int, with_module_identities: bool = True) -> CheckReport:
    """U_i* U_i = 1 on the degree-i coordinate basis, plus the two module
    identities tying U_i to alpha and L on degree-1 generators."""
    report = CheckReport("U_%d isometry" % degree)
    basis_words = _index_words(system, degree)
    for w in basis_words:
        m = ModuleElement.basis_word(system, w)
        report.count()
        if not U_star_map(system, U_map(system, m)).equal(m):
            report.fail("U*U fails on the basis word %r" % (w,))
    if with_module_identities:
        for a in system.basis(1):
            for w in basis_words:
                m = ModuleElement.basis_word(system, w)
                lhs = U_map(system, left_act(system, a, m))
                rhs = tensor(ModuleElement.from_algebra(system, system.alpha(a)), m)
                report.count()
                if not lhs.equal(rhs):
                    report.fail("U(a.m) differs from q(alpha(a)) (x) m at %r" % (w,))
                qa = ModuleElement.from_algebra(system, a)
                lhs2 = U_star_map(system, tensor(qa, m))
                rhs2 = left_act(system, system.L(a), m)
                report.count()
                if not lhs2.equal(rhs2):
                    report.fail("U*(q(a) (x) m) differs from L(a).m at %r" % (w,))
    return report


def _index_words(system, degree: int) -> list[tuple]:
    out = [()]
    for _ in range(degree):
        out = [w + (i,) for w in out for i in system.indices]
    return out


# -- compact operators -------------------------------------------------------------------


class CompactOp:
    """Finite matrix over the coefficient algebra acting on degree-i coordinates."""

    __slots__ = ("system", "degree", "entries")

    def __init__(self, system, degree: int, entries: dict | None = None):
        self.system = system
        self.degree = degree
        self.entries = {}
        if entries:
            for (w, v), c in entries.items():
                if len(w) != degree or len(v) != degree:
                    raise ValueError("entry (%r, %r) has wrong degree" % (w, v))
                if not system.is_zero(c):
                    self.entries[(w, v)] = c

    @classmethod
    def from_theta(cls, m: ModuleElement, n: ModuleElement) -> "CompactOp":
        """The rank-one operator x -> m <n, x>."""
        if m.degree != n.degree:
            raise ValueError("theta needs equal degrees")
        sys = m.system
        entries = {}
        for v in _index_words(sys, n.degree):
            h = sys.zero()
            for u, d in n.coords.items():
                gv = pair(sys, u, sys.unit(), v)
                if not sys.is_zero(gv):
                    h = sys.add(h, sys.mul(sys.adjoint(d), gv))
            if sys.is_zero(h):
                continue
            for w, c in m.coords.items():
                val = sys.mul(c, h)
                if not sys.is_zero(val):
                    entries[(w, v)] = val
        return cls(sys, m.degree, entries)

    def apply(self, m: ModuleElement) -> ModuleElement:
        sys = self.system
        out: dict[tuple, object] = {}
        for (w, v), c in self.entries.items():
            d = m.coords.get(v)
            if d is None:
                continue
            add = sys.mul(c, d)
            if sys.is_zero(add):
                continue
            s = out.get(w)
            t = add if s is None else sys.add(s, add)
            if sys.is_zero(t):
                out.pop(w, None)
            else:
                out[w] = t
        return ModuleElement(sys, self.degree, out)

    def compose(self, other: "CompactOp") -> "CompactOp":
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        sys = self.system
        by_row: dict[tuple, list] = {}
        for (u, v), c in other.entries.items():
            by_row.setdefault(u, []).append((v, c))
        out: dict[tuple, object] = {}
        for (w, u), c in self.entries.items():
            for v, d in by_row.get(u, ()):
                key = (w, v)
                add = sys.mul(c, d)
                if sys.is_zero(add):
                    continue
                s = out.get(key)
                t = add if s is None else sys.add(s, add)
                if sys.is_zero(t):
                    out.pop(key, None)
                else:
                    out[key] = t
        return CompactOp(sys, self.degree, out)

    def add(self, other: "CompactOp") -> "CompactOp":
        sys = self.system
        out = dict(self.entries)
        for key, c in other.entries.items():
            s = out.get(key)
            t = c if s is None else sys.add(s, c)
            if sys.is_zero(t):
                out.pop(key, None)
            else:
                out[key] = t
        return CompactOp(sys, self.degree, out)

    def adjoint(self) -> "CompactOp":
        sys = self.system
        return CompactOp(sys, self.degree,
                         {(v, w): sys.adjoint(c) for (w, v), c in self.entries.items()})

    def canonical_entries(self) -> dict:
        """Left-multiply by the Gram matrix; equal results mean equal operators."""
        sys = self.system
        out: dict[tuple, object] = {}
        for (w, v), c in self.entries.items():
            for u, d in _left_act_word(sys, sys.unit(), w).items():
                add = sys.mul(d, c)
                if sys.is_zero(add):
                    continue
                key = (u, v)
                s = out.get(key)
                t = add if s is None else sys.add(s, add)
                if sys.is_zero(t):
                    out.pop(key, None)
                else:
                    out[key] = t
        return out

    def equal(self, other: "CompactOp") -> bool:
        if other.degree != self.degree:
            return False
        a = self.canonical_entries()
        b = other.canonical_entries()
        if set(a) != set(b):
            return False
        return all(self.system.equal(a[k], b[k]) for k in a)

    def is_null(self) -> bool:
        return not self.canonical_entries()

    def __repr__(self):
        return "CompactOp(degree=%d, %d entries)" % (self.degree, len(self.entries))


def conj_beta(T: CompactOp) -> CompactOp:
    """U_i T U_i*, one degree up.  The compatibility of consecutive V's
    (U at degree i+1 restricting to U at degree i on simple tensors) is
    verified on the coordinate basis before conjugating."""
    sys = T.system
    for w in _index_words(sys, T.degree):
        m = ModuleElement.basis_word(sys, w)
        for j in sys.indices:
            lhs = U_map(sys, tensor(m, ModuleElement.basis_word(sys, (j,))))
            rhs = tensor(U_map(sys, m), ModuleElement.basis_word(sys, (j,)))
            if not lhs.equal(rhs):
                raise RuntimeError("U at degree %d does not restrict from degree %d"
                                   % (T.degree + 1, T.degree))
    entries: dict[tuple, object] = {}
    for v in _index_words(sys, T.degree + 1):
        col = U_map(sys, T.apply(U_star_map(sys, ModuleElement.basis_word(sys, v))))
        for w, c in col.coords.items():
            entries[(w, v)] = c
    return CompactOp(sys, T.degree + 1, entries)


def compact_to_star(T: CompactOp) -> StarElement:
    """The dictionary into the graph algebra: the (w, v) entry contributes
    t_w pi(entry) t_v^*, with pi sending an indicator to its diagonal word sum."""
    sys = T.system
    if sys.kind != "graph":
        raise ValueError("the star dictionary applies to the graph system")
    g = sys.graph
    out = StarElement.zero(g)
    for (w, v), b in T.entries.items():
        tw = _word_isometry(g, w)
        if tw is None:
            continue
        tv = _word_isometry(g, v)
        if tv is None:
            continue
        mid = StarElement.zero(g)
        for lam in g.paths(b.depth):
            c = b.values.get(lam)
            if c:
                mid = mid + matrix_unit(g, lam, lam) * c
        out = out + tw * mid * tv.adjoint()
    return out


def _word_isometry(g: Graph, w: tuple):
    try:
        p = g.path(list(w))
    except ValueError:
        return None
    return matrix_unit(g, p, g.empty_path(p.src))


def beta_crosscheck(g: Graph, mu: Path, nu: Path) -> CheckReport:
    """Conjugation by U on the rank-one operator of (m_mu, m_nu) must match
    the direct shift of t_mu t_nu^* after translation into the graph algebra."""
    if len(mu) != len(nu):
        raise ValueError("paths must have equal length")
    if len(mu) < 1:
        raise ValueError("need paths of length at least 1")
    report = CheckReport("two-route shift comparison at (%s, %s)" % (mu.text(), nu.text()))
    sys = GraphFrameSystem(g)
    m_mu = ModuleElement.basis_word(sys, tuple(mu.edges))
    m_nu = ModuleElement.basis_word(sys, tuple(nu.edges))
    theta = CompactOp.from_theta(m_mu, m_nu)

    if mu.src == nu.src:
        word = matrix_unit(g, mu, nu)
    else:
        word = StarElement.zero(g)

    report.count()
    if not compact_to_star(theta).equal(word):
        report.fail("dictionary image of the rank-one operator differs from the word")

    endo = CoreEndo(g)
    lhs = compact_to_star(conj_beta(theta))
    rhs = endo.beta(word)
    report.count()
    if not lhs.equal(rhs):
        report.fail("conjugation route:\n%sdirect route:\n%s" % (lhs.text(), rhs.text()))
    return report


# -- frame-induced representation -----------------------------------------------------


def frame_rep_psi(system, family: dict, pi, gens=None, elements=None):
    """psi(m) = sum_i S_i pi(<F_i, m>) for degree-1 m, with the covariance
    package verified on the supplied generators.

    family maps each frame index to an isometry in a target word algebra and
    pi is a unital homomorphism from the coefficient algebra to that algebra.
    Returns (psi, report).
    """
    indices = tuple(system.indices)
    some = next(iter(family.values()))
    g_t = some.graph
    one = unit(g_t)
    if gens is None:
        gens = [system.unit()] + system.basis(1)
    if elements is None:
        elements = [ModuleElement.basis_word(system, (i,)) for i in indices]
        elements += [ModuleElement.from_algebra(system, b) for b in gens[1:3]]

    def psi(m: ModuleElement) -> StarElement:
        if m.degree != 1:
            raise ValueError("psi is defined on degree-1 elements")
        out = StarElement.zero(g_t)
        canon = m.canonical_coords()
        for (i,), c in canon.items():
            out = out + family[i] * pi(c)
        return out

    report = CheckReport("frame representation")
    for i in indices:
        for j in indices:
            for b in gens:
                lhs = family[i].adjoint() * pi(b) * family[j]
                rhs = pi(system.act1(i, b, j))
                report.count()
                if not lhs.equal(rhs):
                    report.fail("S_%s* pi(b) S_%s differs from pi(<F,bF>) at b=\n%s"
                                % (i, j, system.a_text(b)))
    total = StarElement.zero(g_t)
    for i in indices:
        total = total + family[i] * family[i].adjoint()
    report.count()
    if not total.equal(one):
        report.fail("range projections of the family do not sum to 1")

    for i in indices:
        report.count()
        if not psi(ModuleElement.basis_word(system, (i,))).equal(family[i]):
            report.fail("psi(F_%s) differs from S_%s" % (i, i))

    for m in elements:
        pm = psi(m)
        for b in gens:
            report.count()
            if not psi(m.right_mul(b)).equal(pm * pi(b)):
                report.fail("psi(m.b) != psi(m)pi(b) at b=\n%s" % system.a_text(b))
            report.count()
            if not psi(left_act(system, b, m)).equal(pi(b) * pm):
                report.fail("psi(b.m) != pi(b)psi(m) at b=\n%s" % system.a_text(b))
        for n in elements:
            report.count()
            if not (pm.adjoint() * psi(n)).equal(pi(m.inner(n))):
                report.fail("psi(m)*psi(n) differs from pi(<m, n>)")

    for b in gens:
        cov = StarElement.zero(g_t)
        for i in indices:
            fb = left_act(system, b, ModuleElement.basis_word(system, (i,)))
            cov = cov + psi(fb) * psi(ModuleElement.basis_word(system, (i,))).adjoint()
        report.count()
        if not cov.equal(pi(b)):
            report.fail("covariance sum differs from pi(b) at b=\n%s" % system.a_text(b))
    return psi, report


# -- numeric positivity ------------------------------------------------------------------


def gram_psd_check(system, elements: list, tol: float = 1e-9) -> CheckReport:
    """Assemble the Gram matrix of the elements exactly, then check every
    numeric evaluation is positive semidefinite within tol."""
    report = CheckReport("Gram positivity")
    entries = [[mi.inner(mj) for mj in elements] for mi in elements]
    for block in system.psd_blocks(entries):
        sym = 0.5 * (block + block.T)
        lo = float(np.linalg.eigvalsh(sym).min()) if block.size else 0.0
        report.count()
        if lo < -tol:
            report.fail("least eigenvalue %.3e below -%g" % (lo, tol))
    return report
