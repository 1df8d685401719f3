"""Explicit preimage curves for conditions coming from a triangulated polygon.

The curves are assembled from small pieces instead of being searched for:

* :func:`dual_curve` is the tree dual to the triangulation;
* :func:`totally_inverted_curve` is the dual tree after swapping the two
  markings at every vertex where a diagonal ends;
* :func:`partially_inverted_curves` mixes the two, one inner triangle at a
  time;
* :func:`preimage_by_construction` handles every interpretation: cut the
  polygon at outer triangles, solve the six-marking problem of each inner
  triangle, and :func:`glue` the local curves back together.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence

from tropcount.crossratio import CrossRatio, CrossRatioSet, multiplicity
from tropcount.degree import PreimageCurve, compute_degree
from tropcount.errors import InvalidInput, NonGeneric
from tropcount.trees import MarkedTree, Split, forgetful, from_clusters
from tropcount.triangulation import (
    NEIGHBORING, OUTER, Decomposition, Triangulation, classify_triangles, decompose,
    derive_crossratios, inner_triangles, resolve_interp, triangle_inequalities,
)

DUAL_LOCAL = "dual"
INVERTED_LOCAL = "inverted"


def _sides(tri) -> list[tuple[int, int]]:
    a, b, c = sorted(tri)
    return [(a, b), (b, c), (a, c)]


def _require_no_outer(t: Triangulation):
    if any(tc.kind == OUTER for tc in classify_triangles(t)):
        raise InvalidInput("this construction needs a triangulation without outer triangles")


# -- dual and inverted curves ----------------------------------------------
def _dual_with(t: Triangulation, mark) -> MarkedTree:
    splits, lengths = [], []
    for (i, j), lam in zip(t.diagonals, t.lengths):
        splits.append([mark(e) for e in range(i + 1, j + 1)])
        lengths.append(lam)
    labels = t.markings
    return MarkedTree(labels, [Split.of(s, labels) for s in splits], lengths)


def dual_curve(t: Triangulation) -> MarkedTree:
    """One vertex per triangle, one bounded edge of length lambda per diagonal."""
    return _dual_with(t, t.marking)


def inversion(t: Triangulation) -> dict[int, int]:
    """Local edge -> local edge after swapping the two edges at every diagonal end."""
    _require_no_outer(t)
    swap = {e: e for e in range(1, t.n + 1)}
    ends = {v for d in t.diagonals for v in d}
    for v in ends:
        a, b = v, t.wrap(v + 1)
        swap[a], swap[b] = b, a
    return swap


def totally_inverted_curve(t: Triangulation) -> MarkedTree:
    swap = inversion(t)
    return _dual_with(t, lambda e: t.marking(swap[t.wrap(e)]))


@dataclass(frozen=True)
class Orientation:
    """Which local solution each inner triangle uses."""

    choices: tuple[tuple[tuple[int, int, int], str], ...]

    def __getitem__(self, triangle) -> str:
        return dict(self.choices)[tuple(sorted(triangle))]

    def to_json(self) -> dict:
        return {"-".join(map(str, tri)): c for tri, c in self.choices}


def _inner_order(t: Triangulation) -> list[tuple[tuple[int, int, int], tuple[int, int] | None]]:
    """Inner triangles in breadth-first order of the dual tree.

    Each entry carries the diagonal it shares with an earlier entry.
    """
    inner = inner_triangles(t)
    if not inner:
        return []
    seen = {inner[0]}
    order = [(inner[0], None)]
    queue = deque([inner[0]])
    while queue:
        cur = queue.popleft()
        for tri in inner:
            if tri in seen:
                continue
            common = set(_sides(cur)) & set(_sides(tri))
            if common:
                seen.add(tri)
                order.append((tri, common.pop()))
                queue.append(tri)
    if len(order) != len(inner):
        raise AssertionError("inner triangles of a piece are not connected")
    return order


def triangle_markings(t: Triangulation, tri) -> frozenset:
    """The six markings on edges at the corners of a triangle."""
    return frozenset(t.marking(e) for v in tri for e in (v, v + 1))


def _glue_along(t: Triangulation, order, local: Sequence[MarkedTree]) -> MarkedTree:
    curve = local[0]
    for (tri, _), piece in zip(order[1:], local[1:]):
        shared = curve.label_set & piece.label_set
        curve = glue(curve, piece, shared)
    if curve.label_set != frozenset(t.markings):
        raise AssertionError("local curves do not cover every marking")
    return curve


def partially_inverted_curves(t: Triangulation) -> list[tuple[Orientation, MarkedTree]]:
    """All ``2^d`` mixtures of dual and inverted local curves (dual pairings)."""
    _require_no_outer(t)
    order = _inner_order(t)
    if not order:
        return [(Orientation(()), dual_curve(t))]
    whole = {DUAL_LOCAL: dual_curve(t), INVERTED_LOCAL: totally_inverted_curve(t)}
    local = {(tri, kind): forgetful(tree, triangle_markings(t, tri))
             for tri, _ in order for kind, tree in whole.items()}
    out = []
    for kinds in product((DUAL_LOCAL, INVERTED_LOCAL), repeat=len(order)):
        tris = [tri for tri, _ in order]
        curve = _glue_along(t, order, [local[tri, k] for tri, k in zip(tris, kinds)])
        orient = Orientation(tuple(sorted(zip(tris, kinds))))
        out.append((orient, curve))
    return out


# -- gluing ----------------------------------------------------------------
def _rooted(tree: MarkedTree, root: int) -> dict[frozenset, Fraction | None]:
    """Every edge as the label set on its far side from ``root``."""
    labs = tree.label_set
    out: dict[frozenset, Fraction | None] = {frozenset((x,)): None for x in tree.labels if x != root}
    out[labs - {root}] = None
    lens = tree.length_vector or (None,) * len(tree.splits)
    for s, v in zip(tree.splits, lens):
        side = frozenset(s.part)
        out[labs - side if root in side else side] = v
    return out


def _hangings(clusters, shared: frozenset, source: int):
    """Subtrees hanging off the paths between shared ends.

    Returns, per path (keyed by its shared labels), the lowest edge, the path
    length and a list of ``(position, source, labels)``.  Positions count from
    the lower end, except on the path of a single shared end where they count
    from the upper end.
    """
    chains = defaultdict(list)
    for c in clusters:
        if c & shared:
            chains[c & shared].append(c)
    out = {}
    for key, chain in chains.items():
        chain.sort(key=len)
        lens = [clusters[c] for c in chain]
        hangs = []
        for i in range(len(chain) - 1):
            extra = chain[i + 1] - chain[i]
            if len(key) == 1:
                pos = sum(lens[i + 1:])
            else:
                pos = sum(lens[: i + 1])
            hangs.append((pos, source, extra))
        total = None if None in lens else sum(lens)
        out[key] = (chain[0], total, hangs)
    return out


def glue(curve_x: MarkedTree, curve_y: MarkedTree, shared) -> MarkedTree:
    """The curve whose forgetful images are ``curve_x`` and ``curve_y``.

    ``shared`` must be the whole intersection of the two label sets (three or
    more labels).  Both curves restrict to the same curve on ``shared``; the
    glued curve lays the subtrees of both inputs along that common part,
    ordered by their attachment distances.
    """
    shared = frozenset(shared)
    if len(shared) < 3:
        raise InvalidInput("gluing needs at least three shared markings")
    if curve_x.label_set & curve_y.label_set != shared:
        raise InvalidInput("the curves must share exactly the given markings")
    if not (curve_x.has_lengths and curve_y.has_lengths):
        raise InvalidInput("gluing needs curves with lengths")
    if forgetful(curve_x, shared) != forgetful(curve_y, shared):
        raise InvalidInput("the two curves disagree on the shared markings")
    root = min(shared)
    labels = curve_x.label_set | curve_y.label_set
    cx, cy = _rooted(curve_x, root), _rooted(curve_y, root)
    hx, hy = _hangings(cx, shared, 0), _hangings(cy, shared, 1)
    out: dict[frozenset, Fraction | None] = {}
    for c, v in list(cx.items()) + list(cy.items()):
        if not c & shared:
            out[c] = v
    for key in hx:
        bottom_x, total, hangs_x = hx[key]
        bottom_y, _, hangs_y = hy[key]
        if len(key) == 1:
            hangs = sorted(hangs_x + hangs_y, key=lambda h: -h[0])
        else:
            hangs = sorted(hangs_x + hangs_y, key=lambda h: h[0])
        for a, b in zip(hangs, hangs[1:]):
            if a[0] == b[0]:
                raise NonGeneric("two subtrees attach at the same point")
        if len(key) == 1:
            cur = key
            out[cur] = None
            for i, (q, _, extra) in enumerate(hangs):
                cur = cur | extra
                nxt = hangs[i + 1][0] if i + 1 < len(hangs) else 0
                out[cur] = q - nxt
        else:
            cur = bottom_x | bottom_y
            prev = 0
            for p, _, extra in hangs:
                out[cur] = p - prev
                cur = cur | extra
                prev = p
            out[cur] = None if total is None else total - prev
    glued = from_clusters(labels, out)
    if forgetful(glued, curve_x.label_set) != curve_x or forgetful(glued, curve_y.label_set) != curve_y:
        raise AssertionError("glued curve does not restrict to its inputs")
    return glued


# -- local six-marking problems and full assembly ------------------------
def local_hexagon_solutions(c1: CrossRatio, c2: CrossRatio, c3: CrossRatio) -> list[PreimageCurve]:
    """Solve the three conditions of one inner triangle on its six markings."""
    labels = c1.markings | c2.markings | c3.markings
    if len(labels) != 6:
        raise InvalidInput("the three conditions of an inner triangle use six markings")
    crs = CrossRatioSet((c1, c2, c3), labels=labels)
    return list(compute_degree(crs).curves)


@dataclass(frozen=True)
class ConstructionResult:
    curves: tuple[PreimageCurve, ...]
    d: int
    k: int

    @property
    def expected_count(self) -> int:
        return 2 ** (self.d - self.k)

    @property
    def expected_multiplicity(self) -> int:
        return 2 ** self.k

    @property
    def degree(self) -> int:
        return sum(c.multiplicity for c in self.curves)

    @property
    def multiset(self) -> list[tuple]:
        return sorted((c.tree.key, c.tree.length_vector, c.multiplicity) for c in self.curves)

    def __iter__(self) -> Iterator[PreimageCurve]:
        return iter(self.curves)

    def __len__(self) -> int:
        return len(self.curves)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "curves": [c.to_json() for c in self.curves],
            "d": self.d,
            "k": self.k,
            "expected_count": self.expected_count,
            "expected_multiplicity": self.expected_multiplicity,
        }


def _piece_curves(piece: Triangulation, interp) -> list[tuple[MarkedTree, int]]:
    crs = derive_crossratios(piece, interp)
    by_diag = dict(zip(piece.diagonals, crs))
    order = _inner_order(piece)
    if not order:
        (cr,) = crs
        tree = MarkedTree(cr.markings, [Split.of(cr.first, cr.markings)], [cr.length])
        return [(tree, 1)]
    options = []
    for tri, _ in order:
        conds = [by_diag[s] for s in _sides(tri)]
        options.append(local_hexagon_solutions(*conds))
    out = []
    for pick in product(*options):
        mult = 1
        for c in pick:
            mult *= c.multiplicity
        out.append((_glue_along(piece, order, [c.tree for c in pick]), mult))
    return out


def _assemble(node: Decomposition, interp) -> list[tuple[MarkedTree, int]]:
    if node.piece is not None:
        return _piece_curves(node.piece, interp)
    left, right = (_assemble(part, interp) for part in node.parts)
    return [(glue(a, b, node.shared), ma * mb) for a, ma in left for b, mb in right]


def count_k(t: Triangulation, interp) -> int:
    """Inner triangles with all sides neighboring and strict triangle inequalities."""
    names = dict(zip(t.diagonals, resolve_interp(t, interp)))
    return sum(1 for tri in inner_triangles(t)
               if all(names[s] == NEIGHBORING for s in _sides(tri)) and triangle_inequalities(t, tri))


def preimage_by_construction(t: Triangulation, interp, lengths: Sequence | None = None) -> ConstructionResult:
    """Every preimage curve of the triangulation's conditions, built piece by piece."""
    if lengths is not None:
        t = t.with_lengths(lengths)
    names = resolve_interp(t, interp)
    interp_map = dict(zip(t.diagonals, names))
    pairs = _assemble(decompose(t), interp_map)
    crs = derive_crossratios(t, interp_map)
    curves = []
    for tree, mult in pairs:
        if multiplicity(tree, crs) != mult:
            raise AssertionError("glued multiplicity differs from the product of local ones")
        curves.append(PreimageCurve(tree, mult))
    curves.sort(key=lambda c: c.tree.sort_key())
    return ConstructionResult(tuple(curves), t.d, count_k(t, interp_map))
