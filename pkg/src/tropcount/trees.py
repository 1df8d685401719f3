"""Combinatorial types of marked rational tropical curves.

A curve is stored through its bounded-edge splits: deleting a bounded edge
cuts the label set in two, and we keep the side that does not contain the
smallest label.  The sorted tuple of these sides is the canonical key, so
equality and hashing are structural.  Optional positive rational lengths are
attached per split.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

from tropcount.errors import InvalidInput
from tropcount.exactmath import format_rational, parse_rational


@dataclass(frozen=True, order=True)
class Split:
    """One side of a bounded edge; the side excluding the minimal label."""

    part: tuple[int, ...]

    @classmethod
    def of(cls, side: Iterable[int], labels: Iterable[int]) -> "Split":
        labels = frozenset(labels)
        side = frozenset(side)
        if not side <= labels:
            raise InvalidInput(f"split side {sorted(side)} not within labels {sorted(labels)}")
        if min(labels) in side:
            side = labels - side
        return cls(tuple(sorted(side)))

    def __contains__(self, label: int) -> bool:
        return label in self.part

    def __len__(self) -> int:
        return len(self.part)

    def separates(self, first: Iterable[int], second: Iterable[int]) -> bool:
        """True iff ``first`` lies wholly on one side and ``second`` on the other."""
        p = set(self.part)
        f = [x in p for x in first]
        s = [x in p for x in second]
        return (all(f) and not any(s)) or (all(s) and not any(f))

    def __str__(self) -> str:
        return ",".join(map(str, self.part))


def compatible(a: frozenset, b: frozenset, labels: frozenset) -> bool:
    """Two splits are compatible iff one of the four side intersections is empty."""
    ac, bc = labels - a, labels - b
    return not (a & b) or not (a & bc) or not (ac & b) or not (ac & bc)


class MarkedTree:
    """Leaf-labelled tree without 2-valent vertices, optionally metric.

    Immutable.  ``lengths`` maps each bounded edge (a :class:`Split`) to a
    positive :class:`Fraction`, or is ``None`` for a bare combinatorial type.
    """

    __slots__ = ("labels", "splits", "_lengths", "__dict__")

    def __init__(self, labels: Iterable[int], splits: Iterable[Split | Iterable[int]] = (),
                 lengths: Mapping[Split, Fraction] | Sequence[Fraction] | None = None,
                 *, check: bool = True):
        labs = tuple(sorted(set(int(x) for x in labels)))
        if check and len(labs) < 3:
            raise InvalidInput(f"a marked tree needs at least 3 labels, got {len(labs)}")
        label_set = frozenset(labs)
        raw = [s if isinstance(s, Split) else Split.of(s, label_set) for s in splits]
        if isinstance(lengths, Mapping):
            given = {(s if isinstance(s, Split) else Split.of(s, label_set)): Fraction(v)
                     for s, v in lengths.items()}
        elif lengths is not None:
            given = dict(zip(raw, (Fraction(v) for v in lengths)))
            if len(given) != len(raw) or len(list(lengths)) != len(raw):
                raise InvalidInput("length sequence does not match splits")
        else:
            given = None
        order = sorted(set(raw))
        if check:
            n = len(labs)
            if len(order) != len(raw):
                raise InvalidInput("duplicate split")
            for s in order:
                if not (2 <= len(s) <= n - 2) or not set(s.part) <= label_set or labs[0] in s:
                    raise InvalidInput(f"invalid bounded-edge split {s.part}")
            sets = [frozenset(s.part) for s in order]
            for a, b in combinations(sets, 2):
                if not compatible(a, b, label_set):
                    raise InvalidInput(f"incompatible splits {sorted(a)} and {sorted(b)}")
            if given is not None:
                if set(given) != set(order):
                    raise InvalidInput("lengths must be given for exactly the bounded edges")
                if any(v <= 0 for v in given.values()):
                    raise InvalidInput("bounded-edge lengths must be positive")
        self.labels = labs
        self.splits = tuple(order)
        self._lengths = None if given is None else tuple(given[s] for s in order)

    # -- basic accessors ---------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def label_set(self) -> frozenset:
        return frozenset(self.labels)

    @property
    def bounded_edges(self) -> tuple[Split, ...]:
        return self.splits

    @property
    def lengths(self) -> dict[Split, Fraction] | None:
        if self._lengths is None:
            return None
        return dict(zip(self.splits, self._lengths))

    @property
    def length_vector(self) -> tuple[Fraction, ...] | None:
        return self._lengths

    @property
    def has_lengths(self) -> bool:
        return self._lengths is not None

    def length(self, edge: Split) -> Fraction:
        if self._lengths is None:
            raise InvalidInput("tree carries no lengths")
        return self._lengths[self.splits.index(edge)]

    @property
    def is_trivalent(self) -> bool:
        return len(self.splits) == self.n - 3

    @property
    def key(self) -> tuple[tuple[int, ...], ...]:
        return tuple(s.part for s in self.splits)

    def topology(self) -> "MarkedTree":
        """The combinatorial type (lengths dropped)."""
        return MarkedTree(self.labels, self.splits, check=False)

    def with_lengths(self, lengths: Mapping[Split, Fraction] | Sequence[Fraction]) -> "MarkedTree":
        return MarkedTree(self.labels, self.splits, lengths)

    def _ident(self):
        return (self.labels, self.key, self._lengths)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MarkedTree):
            return NotImplemented
        return self._ident() == other._ident()

    def __hash__(self) -> int:
        return hash(self._ident())

    def __lt__(self, other: "MarkedTree") -> bool:
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (self.labels, self.key, self._lengths or ())

    def __repr__(self) -> str:
        return f"MarkedTree({serialize(self)!r})"

    # -- derived structure -------------------------------------------------
    @cached_property
    def clusters(self) -> dict[frozenset, Fraction | None]:
        """Edges as clusters when rooted at the minimal label.

        Every edge, pendant or bounded, is keyed by the label set on its far
        side from the root.  Bounded clusters carry their length (``None`` if
        the tree has no lengths); pendant clusters map to ``None``.
        """
        root = self.labels[0]
        out: dict[frozenset, Fraction | None] = {}
        for x in self.labels[1:]:
            out[frozenset((x,))] = None
        out[frozenset(self.labels) - {root}] = None
        lens = self._lengths or (None,) * len(self.splits)
        for s, v in zip(self.splits, lens):
            out[frozenset(s.part)] = v
        return out


# -- serialization ---------------------------------------------------------
_TEXT = re.compile(r"^\{([0-9,\s]*)\}\[([0-9,;\s]*)\](?:lengths\{([0-9,;=/\s-]*)\})?$")


def serialize(tree: MarkedTree) -> str:
    """Newline-free text form ``{labels}[split;split;...]lengths{split=p/q;...}``."""
    text = "{" + ",".join(map(str, tree.labels)) + "}[" + ";".join(map(str, tree.splits)) + "]"
    if tree.has_lengths:
        text += "lengths{" + ";".join(
            f"{s}={format_rational(v)}" for s, v in zip(tree.splits, tree.length_vector)) + "}"
    return text


def parse(text: str) -> MarkedTree:
    m = _TEXT.match(text.strip())
    if not m:
        raise InvalidInput(f"malformed tree text: {text!r}")
    labels = [int(x) for x in m.group(1).split(",") if x.strip()]

    def _split(chunk: str) -> tuple[int, ...]:
        return tuple(int(x) for x in chunk.split(",") if x.strip())

    splits = [_split(c) for c in m.group(2).split(";") if c.strip()]
    lengths = None
    if m.group(3) is not None:
        lengths = {}
        for item in m.group(3).split(";"):
            if not item.strip():
                continue
            side, _, value = item.partition("=")
            lengths[Split.of(_split(side), labels)] = parse_rational(value)
    return MarkedTree(labels, splits, lengths)


# -- enumeration -----------------------------------------------------------
def double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def count_trivalent_trees(n: int) -> int:
    """(2n-5)!! trivalent types on n labels."""
    return double_factorial(2 * n - 5)


def _check_labels(labels: Iterable[int]) -> tuple[int, ...]:
    labs = tuple(sorted(set(labels)))
    if len(labs) < 3:
        raise InvalidInput(f"need at least 3 labels, got {len(labs)}")
    return labs


def _insert(clusters: list[frozenset], at: frozenset, x: int) -> list[frozenset]:
    """Subdivide the edge with cluster ``at`` and hang a new end ``x`` there."""
    out = []
    for c in clusters:
        if c == at:
            out.append(c)
            out.append(c | {x})
        elif at < c:
            out.append(c | {x})
        else:
            out.append(c)
    out.append(frozenset((x,)))
    return out


def _cluster_order(c: frozenset):
    return (len(c), sorted(c))


def _tree_from_clusters(labs: tuple[int, ...], clusters: Iterable[frozenset]) -> MarkedTree:
    n = len(labs)
    return MarkedTree(labs, [tuple(sorted(c)) for c in clusters if 2 <= len(c) <= n - 2],
                      check=False)


def tree_from_rank(labels: Iterable[int], rank: int) -> MarkedTree:
    """Decode a mixed-radix insertion rank into a trivalent tree.

    Labels are inserted in increasing order; the k-th inserted label
    (k = 4..n) picks one of the 2k-5 edges present at that moment.
    """
    labs = _check_labels(labels)
    total = count_trivalent_trees(len(labs))
    if not 0 <= rank < total:
        raise InvalidInput(f"rank {rank} outside [0, {total})")
    clusters = [frozenset((labs[1],)), frozenset((labs[2],)), frozenset(labs[1:3])]
    digits = []
    for k in range(len(labs), 3, -1):
        radix = 2 * k - 5
        digits.append(rank % radix)
        rank //= radix
    digits.reverse()
    for x, d in zip(labs[3:], digits):
        ordered = sorted(clusters, key=_cluster_order)
        clusters = _insert(ordered, ordered[d], x)
    return _tree_from_clusters(labs, clusters)


def iter_trivalent_trees(labels: Iterable[int], start: int = 0) -> Iterator[MarkedTree]:
    """Stream all trivalent types in insertion-rank order, beginning at ``start``."""
    labs = _check_labels(labels)
    total = count_trivalent_trees(len(labs))
    if start >= total:
        return
    for rank in range(start, total):
        yield tree_from_rank(labs, rank)


def enumerate_trivalent_trees(labels: Iterable[int]) -> list[MarkedTree]:
    """Every trivalent combinatorial type on ``labels`` once, in canonical-key order."""
    labs = _check_labels(labels)
    level = [[frozenset((labs[1],)), frozenset((labs[2],)), frozenset(labs[1:3])]]
    for x in labs[3:]:
        level = [_insert(cl, at, x) for cl in level for at in cl]
    trees = [_tree_from_clusters(labs, cl) for cl in level]
    trees.sort(key=lambda t: t.key)
    return trees


# -- edges and forgetful maps ----------------------------------------------
def edge_split(tree: MarkedTree, edge: Split | Iterable[int]) -> Split:
    """The canonical bipartition induced by deleting a bounded edge."""
    s = edge if isinstance(edge, Split) else Split.of(edge, tree.labels)
    if not set(s.part) <= tree.label_set:
        raise InvalidInput(f"edge {s.part} not within labels of tree")
    if len(s) < 2 or len(s) > tree.n - 2:
        raise InvalidInput(f"edge {s.part} is a leaf edge, not a bounded edge")
    if s not in tree.splits:
        raise InvalidInput(f"edge {s.part} is not an edge of the tree")
    return s


def forgetful(tree: MarkedTree, keep: Iterable[int]) -> MarkedTree:
    """Forget every end outside ``keep`` and stabilize.

    Bounded edges restricting to the same split of ``keep`` form one path
    after stabilization and their lengths add up; edges whose restriction is
    trivial disappear (they merged into an end or were removed).
    """
    keep = frozenset(keep)
    if len(keep) < 3:
        raise InvalidInput(f"forgetful map needs at least 3 kept labels, got {len(keep)}")
    if not keep <= tree.label_set:
        raise InvalidInput(f"kept labels {sorted(keep - tree.label_set)} not in tree")
    k = len(keep)
    merged: dict[Split, Fraction | None] = {}
    lens = tree.length_vector
    for i, s in enumerate(tree.splits):
        side = keep.intersection(s.part)
        if 2 <= len(side) <= k - 2:
            r = Split.of(side, keep)
            if lens is None:
                merged[r] = None
            else:
                merged[r] = merged.get(r, 0) + lens[i]
    if lens is None:
        return MarkedTree(keep, merged.keys(), check=False)
    return MarkedTree(keep, merged.keys(), merged, check=False)


def star(labels: Iterable[int]) -> MarkedTree:
    """The tree with a single inner vertex (no bounded edges)."""
    return MarkedTree(labels, (), {})


def from_clusters(labels: Iterable[int], clusters: Mapping[Iterable[int], Fraction | int | None],
                  ) -> MarkedTree:
    """Build a tree from clusters rooted anywhere (trivial ones are ignored)."""
    labs = tuple(sorted(set(labels)))
    n = len(labs)
    lengths = {}
    bare = False
    for c, v in clusters.items():
        c = frozenset(c)
        if 2 <= len(c) <= n - 2:
            s = Split.of(c, labs)
            if v is None:
                bare = True
            lengths[s] = Fraction(v) if v is not None else None
    if bare:
        return MarkedTree(labs, lengths.keys())
    return MarkedTree(labs, lengths.keys(), lengths)
