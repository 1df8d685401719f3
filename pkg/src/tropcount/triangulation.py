"""Triangulated polygons and the cross-ratio conditions they define.

Conventions: polygon edges carry the markings ``1..n`` clockwise and vertex
``i`` is the common endpoint of edges ``i`` and ``i+1`` (indices mod ``n``,
written in ``1..n``).  A diagonal ``{k, l}`` therefore touches the four edges
``k, k+1, l, l+1``, and the three ways to pair them up are

* dual:         ``(k, l+1 | k+1, l)``
* neighboring:  ``(k, k+1 | l, l+1)``
* intersecting: ``(k, l | k+1, l+1)``
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from tropcount.crossratio import CrossRatio, CrossRatioSet
from tropcount.errors import InvalidInput
from tropcount.exactmath import parse_rational

DUAL = "dual"
NEIGHBORING = "neighboring"
INTERSECTING = "intersecting"
INTERPRETATIONS = (DUAL, NEIGHBORING, INTERSECTING)

INNER, OUTER, BORDER = "inner", "outer", "border"


def _pair(d) -> tuple[int, int]:
    a, b = (int(x) for x in d)
    return (a, b) if a < b else (b, a)


def _crossing(d: tuple[int, int], e: tuple[int, int]) -> bool:
    a, b = d
    c, f = e
    return a < c < b < f or c < a < f < b


@dataclass(frozen=True)
class Triangulation:
    """A triangulated ``n``-gon with a positive length on every diagonal.

    Pieces cut out of a bigger polygon remember where they came from:
    ``vertices[i-1]`` is the original vertex behind local vertex ``i`` and
    ``markings[i-1]`` the original marking carried by local edge ``i``.
    """

    n: int
    diagonals: tuple[tuple[int, int], ...]
    lengths: tuple[Fraction, ...] | None = None
    vertices: tuple[int, ...] | None = None
    markings: tuple[int, ...] | None = None
    _sides: frozenset = field(default=frozenset(), init=False, repr=False, compare=False)

    def __post_init__(self):
        n = int(self.n)
        if n < 4:
            raise InvalidInput(f"a triangulated polygon needs n >= 4, got {n}")
        diags = tuple(_pair(d) for d in self.diagonals)
        if len(diags) != n - 3:
            raise InvalidInput(f"a triangulation of a {n}-gon has {n - 3} diagonals, got {len(diags)}")
        if len(set(diags)) != len(diags):
            raise InvalidInput("repeated diagonal")
        for a, b in diags:
            if not (1 <= a < b <= n):
                raise InvalidInput(f"diagonal {a}-{b} has a vertex outside 1..{n}")
            if b - a == 1 or (a == 1 and b == n):
                raise InvalidInput(f"{a}-{b} is a polygon edge, not a diagonal")
        for d, e in combinations(diags, 2):
            if _crossing(d, e):
                raise InvalidInput(f"diagonals {d[0]}-{d[1]} and {e[0]}-{e[1]} cross")
        lengths = self.lengths
        if lengths is None:
            lengths = (Fraction(1),) * len(diags)
        lengths = tuple(parse_rational(v) if isinstance(v, str) else Fraction(v) for v in lengths)
        if len(lengths) != len(diags):
            raise InvalidInput("need one length per diagonal")
        if any(v <= 0 for v in lengths):
            raise InvalidInput("diagonal lengths must be positive")
        vertices = tuple(self.vertices) if self.vertices is not None else tuple(range(1, n + 1))
        markings = tuple(self.markings) if self.markings is not None else tuple(range(1, n + 1))
        if len(vertices) != n or len(markings) != n or len(set(markings)) != n:
            raise InvalidInput("vertex and marking maps must have n distinct entries")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "diagonals", diags)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "markings", markings)
        sides = {(i, i + 1) for i in range(1, n)} | {(1, n)}
        object.__setattr__(self, "_sides", frozenset(sides))

    # -- indexing helpers ------------------------------------------------
    def wrap(self, i: int) -> int:
        return (i - 1) % self.n + 1

    def marking(self, edge: int) -> int:
        """Original marking of local edge ``edge`` (taken mod n)."""
        return self.markings[self.wrap(edge) - 1]

    def is_side(self, u: int, v: int) -> bool:
        return _pair((u, v)) in self._sides

    def side_label(self, u: int, v: int) -> int:
        """Local label of the polygon edge between adjacent vertices u and v."""
        a, b = _pair((u, v))
        if (a, b) == (1, self.n):
            return 1
        return b

    @property
    def key(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.diagonals))

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(sorted(self.markings))

    def length_of(self, diagonal) -> Fraction:
        d = _pair(diagonal)
        try:
            return self.lengths[self.diagonals.index(d)]
        except ValueError:
            raise InvalidInput(f"{d[0]}-{d[1]} is not a diagonal") from None

    def with_lengths(self, lengths: Sequence) -> "Triangulation":
        return Triangulation(self.n, self.diagonals, tuple(lengths), self.vertices, self.markings)

    def diagonal_markings(self, diagonal) -> frozenset:
        k, l = _pair(diagonal)
        return frozenset(self.marking(e) for e in (k, k + 1, l, l + 1))

    def original_diagonal(self, diagonal) -> tuple[int, int]:
        a, b = _pair(diagonal)
        return _pair((self.vertices[a - 1], self.vertices[b - 1]))

    def triangles(self) -> list[tuple[int, int, int]]:
        edges = set(self._sides) | set(self.diagonals)
        adj: dict[int, set] = {v: set() for v in range(1, self.n + 1)}
        for a, b in edges:
            adj[a].add(b)
            adj[b].add(a)
        out = []
        for a, b in sorted(edges):
            for c in sorted(adj[a] & adj[b]):
                if c > b:
                    out.append((a, b, c))
        return out

    @property
    def d(self) -> int:
        """Number of inner triangles."""
        return sum(1 for tc in classify_triangles(self) if tc.kind == INNER)

    def __str__(self) -> str:
        parts = ",".join(f"{a}-{b}" for a, b in self.diagonals)
        return f"{self.n}-gon[{parts}]"


@dataclass(frozen=True)
class TriangleClass:
    triangle: tuple[int, int, int]
    kind: str


def classify_triangles(t: Triangulation) -> list[TriangleClass]:
    out = []
    for tri in t.triangles():
        a, b, c = tri
        sides = sum(t.is_side(u, v) for u, v in ((a, b), (b, c), (a, c)))
        out.append(TriangleClass(tri, (INNER, OUTER, BORDER)[sides]))
    return out


def inner_triangles(t: Triangulation) -> list[tuple[int, int, int]]:
    return [tc.triangle for tc in classify_triangles(t) if tc.kind == INNER]


def triangle_inequalities(t: Triangulation, inner: Iterable[int]) -> bool:
    """Is each diagonal of the inner triangle shorter than the other two together?"""
    a, b, c = sorted(inner)
    if (a, b, c) not in inner_triangles(t):
        raise InvalidInput(f"({a},{b},{c}) is not an inner triangle")
    x, y, z = (t.length_of(s) for s in ((a, b), (b, c), (a, c)))
    return x < y + z and y < x + z and z < x + y


# -- enumeration ---------------------------------------------------------
def _triangulate(poly: tuple[int, ...]) -> list[frozenset]:
    if len(poly) < 3:
        return [frozenset()]
    first, last = poly[0], poly[-1]
    out = []
    for k in range(1, len(poly) - 1):
        apex = poly[k]
        new = set()
        if k > 1:
            new.add((first, apex))
        if k < len(poly) - 2:
            new.add((apex, last))
        for left in _triangulate(poly[: k + 1]):
            for right in _triangulate(poly[k:]):
                out.append(frozenset(new) | left | right)
    return out


def enumerate_triangulations(n: int) -> list[Triangulation]:
    """All ``Catalan(n-2)`` triangulations of the ``n``-gon, unit lengths."""
    if n < 4:
        raise InvalidInput(f"n must be at least 4, got {n}")
    keys = {tuple(sorted(s)) for s in _triangulate(tuple(range(1, n + 1)))}
    return [Triangulation(n, k) for k in sorted(keys)]


# -- cross-ratio conditions ----------------------------------------------
def resolve_interp(t: Triangulation, interp) -> tuple[str, ...]:
    """Interpretation of every diagonal, aligned with ``t.diagonals``.

    ``interp`` is one name for all diagonals, a sequence aligned with the
    diagonals, or a mapping keyed by diagonals.  Pieces of a split polygon
    also accept keys in the original vertex numbering.
    """
    if isinstance(interp, str):
        names = [interp] * len(t.diagonals)
    elif isinstance(interp, Mapping):
        norm = {_pair(k): v for k, v in interp.items()}
        names = []
        for d in t.diagonals:
            if t.original_diagonal(d) in norm:
                names.append(norm[t.original_diagonal(d)])
            elif d in norm:
                names.append(norm[d])
            else:
                raise InvalidInput(f"no interpretation given for diagonal {d[0]}-{d[1]}")
    else:
        names = list(interp)
        if len(names) != len(t.diagonals):
            raise InvalidInput("need one interpretation per diagonal")
    for name in names:
        if name not in INTERPRETATIONS:
            raise InvalidInput(f"unknown interpretation {name!r}; use one of {', '.join(INTERPRETATIONS)}")
    return tuple(names)


def pairing_for(t: Triangulation, diagonal, interp: str) -> tuple[tuple[int, int], tuple[int, int]]:
    k, l = _pair(diagonal)
    m = t.marking
    if interp == DUAL:
        return (m(k), m(l + 1)), (m(k + 1), m(l))
    if interp == NEIGHBORING:
        return (m(k), m(k + 1)), (m(l), m(l + 1))
    if interp == INTERSECTING:
        return (m(k), m(l)), (m(k + 1), m(l + 1))
    raise InvalidInput(f"unknown interpretation {interp!r}")


def derive_crossratios(t: Triangulation, interp) -> CrossRatioSet:
    names = resolve_interp(t, interp)
    items = [CrossRatio(*pairing_for(t, d, name), v)
             for d, name, v in zip(t.diagonals, names, t.lengths)]
    return CrossRatioSet(items, labels=t.markings)


# -- splitting along outer triangles -------------------------------------
@dataclass(frozen=True)
class Decomposition:
    """Binary tree of polygon pieces.

    A leaf holds a piece without outer triangles.  An inner node holds two
    halves whose marking sets meet in exactly the three markings ``shared``.
    """

    piece: Triangulation | None = None
    parts: tuple["Decomposition", ...] = ()
    shared: tuple[int, ...] = ()

    def leaves(self) -> list[Triangulation]:
        if self.piece is not None:
            return [self.piece]
        return [p for part in self.parts for p in part.leaves()]


def _subpolygon(t: Triangulation, cycle: list[int], closing_marking: int) -> Triangulation:
    """The polygon on ``cycle`` (clockwise, local vertices of ``t``).

    The one side of the cycle that is not a side of ``t`` gets
    ``closing_marking``.
    """
    start = cycle.index(min(cycle))
    cycle = cycle[start:] + cycle[:start]
    m = len(cycle)
    index = {v: i + 1 for i, v in enumerate(cycle)}
    markings = []
    for s in range(1, m + 1):
        u, v = cycle[s - 2], cycle[s - 1]
        if t.is_side(u, v):
            markings.append(t.marking(t.side_label(u, v)))
        else:
            markings.append(closing_marking)
    diags, lengths = [], []
    for (a, b), lam in zip(t.diagonals, t.lengths):
        if a in index and b in index:
            pa, pb = _pair((index[a], index[b]))
            if pb - pa == 1 or (pa == 1 and pb == m):
                continue
            diags.append((pa, pb))
            lengths.append(lam)
    return Triangulation(m, diags, lengths,
                         tuple(t.vertices[v - 1] for v in cycle), tuple(markings))


def decompose(t: Triangulation) -> Decomposition:
    """Cut along the first outer triangle, recursively, until none is left."""
    for tc in classify_triangles(t):
        if tc.kind != OUTER:
            continue
        a, b, c = tc.triangle
        for p, q, w in ((a, b, c), (b, c, a), (a, c, b)):
            if t.is_side(p, q):
                break
        if t.wrap(p + 1) != q:
            p, q = q, p
        # Polygon edge p -> p+1 and apex w.
        first = [t.wrap(p + i) for i in range((w - p) % t.n + 1)]          # p .. w
        second = [t.wrap(w + i) for i in range((p + 1 - w) % t.n + 1)]     # w .. p+1
        half_a = _subpolygon(t, first, t.marking(w + 1))
        half_b = _subpolygon(t, second, t.marking(w))
        shared = tuple(sorted((t.marking(p + 1), t.marking(w), t.marking(w + 1))))
        return Decomposition(parts=(decompose(half_a), decompose(half_b)), shared=shared)
    return Decomposition(piece=t)


def split_at_outer(t: Triangulation) -> list[Triangulation]:
    return decompose(t).leaves()


# -- command-line syntax --------------------------------------------------
def parse_diagonals(text: str) -> list[tuple[int, int]]:
    """``"2-4,4-6,2-6"`` -> ``[(2, 4), (4, 6), (2, 6)]``."""
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        a, sep, b = chunk.partition("-")
        try:
            if not sep:
                raise ValueError
            out.append(_pair((int(a), int(b))))
        except ValueError:
            raise InvalidInput(f"bad diagonal {chunk!r}; expected i-j") from None
    return out


def parse_lengths(text: str) -> list[Fraction]:
    return [parse_rational(x) for x in text.split(",") if x.strip()]
