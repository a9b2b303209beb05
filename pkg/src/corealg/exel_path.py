"""Locally constant functions on the infinite path space of a graph.

A function of depth k sees only the first k edges of an infinite path.  The
module provides the one-sided shift endomorphism alpha (precompose with the
shift), the averaging transfer operator L, and the identity L(alpha(a)b) =
a L(b) that makes (functions, alpha, L) an Exel system.  All values are
rational; square-root scalings enter only at the module layer elsewhere.
"""

from __future__ import annotations

from fractions import Fraction

from .graph import Graph, Path
from .util import CheckReport


class DepthFunctionFormatError(ValueError):
    pass


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError("values must be rational, got %r" % (x,))


class DepthFunction:
    """Rational-valued function determined by length-k path prefixes."""

    __slots__ = ("graph", "depth", "values")

    def __init__(self, graph: Graph, depth: int, values: dict[Path, Fraction] | None = None):
        if not graph.path_space_admissible:
            raise ValueError("graph must have no sinks and no singular vertices")
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        self.graph = graph
        self.depth = depth
        self.values = {}
        if values:
            for p, x in values.items():
                if len(p) != depth:
                    raise ValueError("path %s has length %d, expected %d"
                                     % (p.text(), len(p), depth))
                x = _as_fraction(x)
                if x:
                    self.values[p] = x

    @classmethod
    def constant(cls, graph: Graph, value, depth: int = 0) -> "DepthFunction":
        value = _as_fraction(value)
        return cls(graph, depth, {p: value for p in graph.paths(depth)})

    @classmethod
    def indicator(cls, graph: Graph, mu: Path) -> "DepthFunction":
        return cls(graph, len(mu), {mu: Fraction(1)})

    def value(self, p: Path) -> Fraction:
        """Value on any path at least depth long (only the prefix matters)."""
        if len(p) < self.depth:
            raise ValueError("path %s is shorter than depth %d" % (p.text(), self.depth))
        if len(p) == self.depth:
            return self.values.get(p, Fraction(0))
        return self.values.get(self.graph.prefix(p, self.depth), Fraction(0))

    def lift(self, depth: int) -> "DepthFunction":
        if depth < self.depth:
            raise ValueError("cannot lower depth %d to %d" % (self.depth, depth))
        if depth == self.depth:
            return self
        out = {}
        for p in self.graph.paths(depth):
            x = self.value(p)
            if x:
                out[p] = x
        return DepthFunction(self.graph, depth, out)

    def _common(self, other: "DepthFunction") -> tuple["DepthFunction", "DepthFunction"]:
        if other.graph is not self.graph:
            raise ValueError("functions live over different graphs")
        k = max(self.depth, other.depth)
        return self.lift(k), other.lift(k)

    def __add__(self, other):
        if not isinstance(other, DepthFunction):
            return NotImplemented
        a, b = self._common(other)
        out = dict(a.values)
        for p, x in b.values.items():
            s = out.get(p, Fraction(0)) + x
            if s:
                out[p] = s
            elif p in out:
                del out[p]
        return DepthFunction(self.graph, a.depth, out)

    def __neg__(self):
        return DepthFunction(self.graph, self.depth, {p: -x for p, x in self.values.items()})

    def __sub__(self, other):
        if not isinstance(other, DepthFunction):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, DepthFunction):
            a, b = self._common(other)
            out = {}
            for p, x in a.values.items():
                y = b.values.get(p)
                if y:
                    out[p] = x * y
            return DepthFunction(self.graph, a.depth, out)
        return DepthFunction(self.graph, self.depth,
                             {p: x * _as_fraction(other) for p, x in self.values.items()})

    def __rmul__(self, other):
        return self * other

    def equal(self, other: "DepthFunction") -> bool:
        a, b = self._common(other)
        return a.values == b.values

    def is_zero(self) -> bool:
        return not self.values

    def nonneg(self) -> bool:
        return all(x >= 0 for x in self.values.values())

    def __repr__(self):
        return "DepthFunction(depth=%d, %d nonzero)" % (self.depth, len(self.values))

    def text(self) -> str:
        lines = []
        for p in self.graph.paths(self.depth):
            x = self.values.get(p)
            if x:
                lines.append("F %s %s" % (p.text(), x))
        return "\n".join(lines) + "\n" if lines else ""


def alpha_shift(f: DepthFunction) -> DepthFunction:
    """Precompose with the shift that drops the first edge; depth rises by 1."""
    g = f.graph
    out = {}
    for p in g.paths(f.depth + 1):
        x = f.value(g.drop_first(p))
        if x:
            out[p] = x
    return DepthFunction(g, f.depth + 1, out)


def transfer_L(f: DepthFunction) -> DepthFunction:
    """Average over the shift preimages: L(f)(eta) is the mean of f(e.eta)
    over the edges e that can extend eta at its range."""
    g = f.graph
    if f.depth == 0:
        f = f.lift(1)
    k = max(f.depth - 1, 1)
    out = {}
    for p in g.paths(k):
        exts = g.out_edges(p.rng)
        total = Fraction(0)
        for e in exts:
            total += f.value(g.prepend_edge(e, p))
        total /= len(exts)
        if total:
            out[p] = total
    return DepthFunction(g, k, out)


def ml_inner(a: DepthFunction, b: DepthFunction) -> DepthFunction:
    """The pairing L(a*b); with real values the adjoint is the identity."""
    return transfer_L(a * b)


def transfer_identity_check(a: DepthFunction, b: DepthFunction) -> CheckReport:
    report = CheckReport("transfer identity")
    lhs = transfer_L(alpha_shift(a) * b)
    rhs = a * transfer_L(b)
    report.count()
    if not lhs.equal(rhs):
        report.fail("L(alpha(a)b) != aL(b) for a=\n%sb=\n%slhs=\n%srhs=\n%s"
                    % (a.text(), b.text(), lhs.text(), rhs.text()))
    return report


def load_depth_function(g: Graph, text: str) -> tuple[DepthFunction, list[str]]:
    """Parse lines `F <path> <rational>`.  All listed paths must have one
    length; length-k paths not listed default to 0 and produce a warning."""
    entries: dict[Path, Fraction] = {}
    depth = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 3 or tokens[0] != "F":
            raise DepthFunctionFormatError("line %d: expected F <path> <rational>" % lineno)
        try:
            p = g.parse_path(tokens[1])
            x = Fraction(tokens[2])
        except (ValueError, KeyError, ZeroDivisionError) as exc:
            raise DepthFunctionFormatError("line %d: %s" % (lineno, exc)) from exc
        if depth is None:
            depth = len(p)
        elif len(p) != depth:
            raise DepthFunctionFormatError(
                "line %d: path length %d does not match earlier length %d"
                % (lineno, len(p), depth))
        if p in entries:
            raise DepthFunctionFormatError("line %d: duplicate path %s" % (lineno, tokens[1]))
        entries[p] = x
    if depth is None:
        raise DepthFunctionFormatError("no F lines found")
    warnings = []
    for p in g.paths(depth):
        if p not in entries:
            warnings.append("path %s not listed, defaulting to 0" % p.text())
    return DepthFunction(g, depth, entries), warnings
