"""Tropical cross-ratio conditions and multiplicities of curves."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

from tropcount.errors import InvalidInput
from tropcount.exactmath import IntMatrix, determinant, format_rational, parse_rational
from tropcount.trees import MarkedTree, Split, edge_split


@dataclass(frozen=True)
class CrossRatio:
    """A condition ``(length, (a b | c d))``.

    The eight symmetric writings collapse to one: each pair is sorted and the
    pair holding the smallest marking comes first.
    """

    first: tuple[int, int]
    second: tuple[int, int]
    length: Fraction = Fraction(0)

    def __post_init__(self):
        p = tuple(sorted(int(x) for x in self.first))
        q = tuple(sorted(int(x) for x in self.second))
        if len(p) != 2 or len(q) != 2:
            raise InvalidInput("a cross-ratio pairs two markings with two markings")
        if len({*p, *q}) != 4:
            raise InvalidInput(f"cross-ratio markings must be distinct: {p}|{q}")
        if q[0] < p[0]:
            p, q = q, p
        length = parse_rational(self.length) if isinstance(self.length, str) else Fraction(self.length)
        if length < 0:
            raise InvalidInput("cross-ratio length must be nonnegative")
        object.__setattr__(self, "first", p)
        object.__setattr__(self, "second", q)
        object.__setattr__(self, "length", length)

    @property
    def markings(self) -> frozenset:
        return frozenset(self.first + self.second)

    @property
    def pairing(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.first, self.second)

    def with_length(self, length) -> "CrossRatio":
        return CrossRatio(self.first, self.second, length)

    def relabel(self, mapping) -> "CrossRatio":
        f = mapping.__getitem__
        return CrossRatio(tuple(map(f, self.first)), tuple(map(f, self.second)), self.length)

    def to_json(self) -> dict:
        return {"pairs": [list(self.first), list(self.second)],
                "length": format_rational(self.length)}

    @classmethod
    def from_json(cls, obj: dict) -> "CrossRatio":
        try:
            (a, b), (c, d) = obj["pairs"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed cross-ratio {obj!r}") from exc
        return cls((a, b), (c, d), parse_rational(obj.get("length", "0")))

    def __str__(self) -> str:
        a, b = self.first
        c, d = self.second
        return f"({format_rational(self.length)},({a}{b}|{c}{d}))"


def all_pairings(markings: Iterable[int]) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """The three ways to split four markings into two pairs."""
    a, b, c, d = sorted(markings)
    return [((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c))]


class CrossRatioSet:
    """The conditions ``C_1, ..., C_{n-3}`` over a label set of size ``n``.

    Labels default to ``1..n``.  ``square=False`` relaxes the count ``n - 3``,
    which only restricted sub-problems need.
    """

    def __init__(self, items: Iterable[CrossRatio], n: int | None = None,
                 labels: Iterable[int] | None = None, *, square: bool = True):
        items = tuple(items)
        if labels is None:
            if n is None:
                raise InvalidInput("give n or labels")
            labels = range(1, n + 1)
        labs = tuple(sorted(set(int(x) for x in labels)))
        if n is not None and n != len(labs):
            raise InvalidInput(f"n = {n} does not match {len(labs)} labels")
        for cr in items:
            if not isinstance(cr, CrossRatio):
                raise InvalidInput(f"not a cross-ratio: {cr!r}")
            if not cr.markings <= set(labs):
                raise InvalidInput(f"cross-ratio {cr} uses markings outside {list(labs)}")
        if square and len(items) != len(labs) - 3:
            raise InvalidInput(f"{len(items)} cross-ratios for n = {len(labs)}; need {len(labs) - 3}")
        self.labels = labs
        self.items = items

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def marking_sets(self) -> tuple[frozenset, ...]:
        return tuple(cr.markings for cr in self.items)

    @property
    def lengths(self) -> tuple[Fraction, ...]:
        return tuple(cr.length for cr in self.items)

    @property
    def is_square(self) -> bool:
        return len(self.items) == self.n - 3

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CrossRatioSet):
            return NotImplemented
        return self.labels == other.labels and self.items == other.items

    def __hash__(self) -> int:
        return hash((self.labels, self.items))

    def __repr__(self) -> str:
        return f"CrossRatioSet(labels={list(self.labels)}, [{', '.join(map(str, self.items))}])"

    def with_lengths(self, lengths: Sequence) -> "CrossRatioSet":
        if len(lengths) != len(self.items):
            raise InvalidInput("length vector does not match cross-ratio count")
        return CrossRatioSet((cr.with_length(v) for cr, v in zip(self.items, lengths)),
                             labels=self.labels, square=self.is_square)

    def with_pairings(self, pairings: Sequence) -> "CrossRatioSet":
        return CrossRatioSet((CrossRatio(p, q, cr.length) for cr, (p, q) in zip(self.items, pairings)),
                             labels=self.labels, square=self.is_square)

    @classmethod
    def from_marking_sets(cls, sets: Iterable[Iterable[int]], n: int | None = None,
                          lengths: Sequence | None = None, labels: Iterable[int] | None = None,
                          ) -> "CrossRatioSet":
        """Conditions with the pairing ``(ab|cd)`` for sorted ``a<b<c<d``."""
        sets = [tuple(sorted(s)) for s in sets]
        if lengths is None:
            lengths = [0] * len(sets)
        items = [CrossRatio(s[:2], s[2:], v) for s, v in zip(sets, lengths)]
        return cls(items, n=n, labels=labels)

    def to_json(self) -> dict:
        out: dict[str, Any] = {"n": self.n, "crossratios": [cr.to_json() for cr in self.items]}
        if self.labels != tuple(range(1, self.n + 1)):
            out["labels"] = list(self.labels)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "CrossRatioSet":
        if not isinstance(obj, dict) or "crossratios" not in obj:
            raise InvalidInput("expected an object with 'n' and 'crossratios'")
        items = [CrossRatio.from_json(c) for c in obj["crossratios"]]
        return cls(items, n=obj.get("n"), labels=obj.get("labels"))


def _check_markings(tree: MarkedTree, cr: CrossRatio):
    missing = cr.markings - tree.label_set
    if missing:
        raise InvalidInput(f"markings {sorted(missing)} are not labels of the tree")


def contributes(tree: MarkedTree, edge: Split | Iterable[int], cr: CrossRatio) -> bool:
    """Does the bounded edge lie on the common part of the paths a->c and b->d?"""
    _check_markings(tree, cr)
    return edge_split(tree, edge).separates(cr.first, cr.second)


def contributing_edges(tree: MarkedTree, cr: CrossRatio) -> list[Split]:
    _check_markings(tree, cr)
    return [s for s in tree.splits if s.separates(cr.first, cr.second)]


def multiplicity_matrix(tree: MarkedTree, crs: CrossRatioSet) -> IntMatrix:
    """0/1 matrix: rows follow ``crs``, columns the canonical bounded-edge order."""
    if not tree.is_trivalent:
        raise InvalidInput("multiplicity needs a trivalent tree (interior of a maximal cone)")
    if not crs.is_square:
        raise InvalidInput("multiplicity needs exactly n-3 cross-ratios")
    if tuple(tree.labels) != crs.labels:
        raise InvalidInput("tree labels differ from cross-ratio labels")
    for cr in crs:
        _check_markings(tree, cr)
    return IntMatrix(tuple(tuple(int(s.separates(cr.first, cr.second)) for s in tree.splits)
                           for cr in crs))


def multiplicity(tree: MarkedTree, crs: CrossRatioSet) -> int:
    return abs(determinant(multiplicity_matrix(tree, crs)))


def fulfills(tree: MarkedTree, cr: CrossRatio) -> bool:
    """Do the paths a->c and b->d share edges of total length exactly ``cr.length``?"""
    _check_markings(tree, cr)
    if not tree.has_lengths:
        raise InvalidInput("fulfills needs a tree with lengths")
    total = sum((v for s, v in zip(tree.splits, tree.length_vector)
                 if s.separates(cr.first, cr.second)), Fraction(0))
    return total == cr.length


def fulfills_all(tree: MarkedTree, crs: Iterable[CrossRatio]) -> bool:
    return all(fulfills(tree, cr) for cr in crs)
