"""Decorated genus-0 stable trees and the boundary-strata calculus.

A tree records per-vertex curve degrees, labeled tails, and optional
decoration tokens (opaque cohomology-class markers used by the boundary
presentations).  This module is purely combinatorial: it enumerates
boundary strata, computes automorphism orders through canonical forms,
pushes and pulls trees along the forgetful map with the correct
automorphism-ratio coefficients, and writes down the boundary
presentations of psi powers and kappa classes.  Pairing a tree sum with
actual cohomology classes is the correlator engine's job.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .target import TargetModel, check_degree


@dataclass(frozen=True)
class Decoration:
    """Opaque class token on a vertex.

    kind "class": data = (name,), a generic cohomology class;
    kind "kappa": data = (a, alpha), the class kappa_{a,alpha} on the vertex;
    kind "ev":    data = (tail_label, alpha), ev_i^*(e_alpha);
    kind "psi":   data = (tail_label, power), psi_i^power.
    """

    kind: str
    data: tuple
    degree: int
    pushable: bool = False

    def pushed(self) -> "Decoration":
        if not self.pushable:
            raise ValueError(f"decoration {self} is not push-forwardable")
        return Decoration("class", (f"pi_*({self.data[0]})",), self.degree - 2, False)


@dataclass(frozen=True, eq=False)
class DecoratedTree:
    betas: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    tails: tuple[tuple[int, int], ...]  # (label, vertex)
    decorations: tuple[tuple[int, Decoration], ...] = ()  # (vertex, token)

    def __post_init__(self):
        nv = len(self.betas)
        for b in self.betas:
            check_degree(b)
        edges = tuple(sorted(tuple(sorted(e)) for e in self.edges))
        tails = tuple(sorted(self.tails))
        decorations = tuple(
            sorted(self.decorations, key=lambda vd: (vd[0], repr(vd[1])))
        )
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "tails", tails)
        object.__setattr__(self, "decorations", decorations)
        for u, v in edges:
            if not (0 <= u < nv and 0 <= v < nv) or u == v:
                raise ValueError(f"bad edge ({u},{v})")
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate edge")
        labels = [lab for lab, _ in tails]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate tail label")
        for _, v in tails:
            if not 0 <= v < nv:
                raise ValueError("tail attached to a missing vertex")
        for v, _ in decorations:
            if not 0 <= v < nv:
                raise ValueError("decoration on a missing vertex")
        if len(edges) != nv - 1:
            raise ValueError("a tree needs exactly |V| - 1 edges")
        if self._component(0) != set(range(nv)):
            raise ValueError("tree is not connected")
        for v in range(nv):
            if self.betas[v] == 0 and self.valence(v) < 3:
                raise ValueError(
                    f"vertex {v} is unstable: degree 0 with {self.valence(v)} half-edges"
                )
        object.__setattr__(self, "_ckey", _canonical_key(self))

    # -- structure ------------------------------------------------------------

    def _component(self, start: int) -> set[int]:
        seen = {start}
        frontier = [start]
        while frontier:
            u = frontier.pop()
            for x, y in self.edges:
                for a, b in ((x, y), (y, x)):
                    if a == u and b not in seen:
                        seen.add(b)
                        frontier.append(b)
        return seen

    @property
    def n_vertices(self) -> int:
        return len(self.betas)

    @property
    def total_degree(self) -> int:
        return sum(self.betas)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(lab for lab, _ in self.tails)

    def neighbors(self, v: int) -> list[int]:
        out = []
        for x, y in self.edges:
            if x == v:
                out.append(y)
            elif y == v:
                out.append(x)
        return out

    def tails_at(self, v: int) -> tuple[int, ...]:
        return tuple(lab for lab, w in self.tails if w == v)

    def decorations_at(self, v: int) -> tuple[Decoration, ...]:
        return tuple(tok for w, tok in self.decorations if w == v)

    def valence(self, v: int) -> int:
        """Number of half-edges at v (edge ends plus tails)."""
        return len(self.neighbors(v)) + len(self.tails_at(v))

    def tail_vertex(self, label: int) -> int:
        for lab, v in self.tails:
            if lab == label:
                return v
        raise ValueError(f"no tail labeled {label}")

    # -- identity is isomorphism ------------------------------------------------

    @property
    def canonical_key(self):
        return self._ckey

    def __eq__(self, other) -> bool:
        return isinstance(other, DecoratedTree) and self._ckey == other._ckey

    def __hash__(self) -> int:
        return hash(self._ckey)

    # -- serialization ----------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "vertices": [
                {
                    "beta": self.betas[v],
                    "decor": [
                        [tok.kind, list(tok.data), tok.degree]
                        for tok in self.decorations_at(v)
                    ],
                }
                for v in range(self.n_vertices)
            ],
            "edges": [list(e) for e in self.edges],
            "tails": [{"label": lab, "vertex": v} for lab, v in self.tails],
        }


def _vertex_color(t: DecoratedTree, v: int):
    decor = tuple(
        sorted(
            (tok.kind, tok.data, tok.degree, tok.pushable)
            for tok in t.decorations_at(v)
        )
    )
    return (t.betas[v], t.tails_at(v), decor)


def _rooted_code(t: DecoratedTree, v: int, parent: int):
    child_codes = sorted(
        _rooted_code(t, w, v) for w in t.neighbors(v) if w != parent
    )
    return (_vertex_color(t, v), tuple(child_codes))


def _centers(t: DecoratedTree) -> list[int]:
    n = t.n_vertices
    if n == 1:
        return [0]
    deg = {v: len(t.neighbors(v)) for v in range(n)}
    layer = [v for v in range(n) if deg[v] <= 1]
    removed = len(layer)
    current = layer
    while removed < n:
        nxt = []
        for u in current:
            deg[u] = 0
            for w in t.neighbors(u):
                if deg[w] > 0:
                    deg[w] -= 1
                    if deg[w] == 1:
                        nxt.append(w)
        removed += len(nxt)
        if nxt:
            current = nxt
    return current


def _canonical_key(t: DecoratedTree):
    centers = _centers(t)
    if len(centers) == 1:
        return ("vertex", _rooted_code(t, centers[0], -1))
    u, v = centers
    return ("edge", tuple(sorted((_rooted_code(t, u, v), _rooted_code(t, v, u)))))


def _rooted_aut(t: DecoratedTree, v: int, parent: int) -> int:
    groups: dict[tuple, list[int]] = {}
    for w in t.neighbors(v):
        if w == parent:
            continue
        groups.setdefault(_rooted_code(t, w, v), []).append(w)
    count = 1
    for code, members in groups.items():
        for w in members:
            count *= _rooted_aut(t, w, v)
        k = len(members)
        for i in range(2, k + 1):
            count *= i
    return count


def aut_order(t: DecoratedTree) -> int:
    """Order of the decoration- and tail-preserving automorphism group."""
    centers = _centers(t)
    if len(centers) == 1:
        return _rooted_aut(t, centers[0], -1)
    u, v = centers
    count = _rooted_aut(t, u, v) * _rooted_aut(t, v, u)
    if _rooted_code(t, u, v) == _rooted_code(t, v, u):
        count *= 2
    return count


class TreeSum:
    """Formal rational combination of trees, indexed by isomorphism class."""

    def __init__(self, terms: Mapping[DecoratedTree, Fraction] | None = None):
        self._terms: dict[DecoratedTree, Fraction] = {}
        for tree, coeff in (terms or {}).items():
            if coeff:
                self._terms[tree] = Fraction(coeff)

    def items(self) -> Iterator[tuple[DecoratedTree, Fraction]]:
        return iter(sorted(self._terms.items(), key=lambda tc: repr(tc[0].canonical_key)))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, tree: DecoratedTree) -> Fraction:
        return self._terms.get(tree, Fraction(0))

    def add_term(self, tree: DecoratedTree, coeff) -> None:
        new = self._terms.get(tree, Fraction(0)) + coeff
        if new:
            self._terms[tree] = new
        else:
            self._terms.pop(tree, None)

    def __add__(self, other: "TreeSum") -> "TreeSum":
        out = TreeSum(self._terms)
        for tree, coeff in other._terms.items():
            out.add_term(tree, coeff)
        return out

    def __mul__(self, scalar) -> "TreeSum":
        return TreeSum({t: c * Fraction(scalar) for t, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, TreeSum) and self._terms == other._terms

    def __repr__(self) -> str:
        return f"TreeSum({len(self._terms)} terms)"


def single_vertex_tree(n: int, d: int, decorations=()) -> DecoratedTree:
    return DecoratedTree(
        betas=(d,),
        edges=(),
        tails=tuple((i, 0) for i in range(1, n + 1)),
        decorations=tuple((0, tok) for tok in decorations),
    )


def _two_vertex_splits(
    n: int,
    d: int,
    pin_first: Iterable[int] = (),
    pin_second: Iterable[int] = (),
    second_side_exact: bool = False,
):
    """Yield (first_tails, second_tails, b1, b2) for all stable splits."""
    pin_first = tuple(sorted(pin_first))
    pin_second = tuple(sorted(pin_second))
    labels = list(range(1, n + 1))
    for lab in (*pin_first, *pin_second):
        if lab not in labels:
            raise ValueError(f"pinned tail {lab} outside 1..{n}")
    free = [lab for lab in labels if lab not in pin_first + pin_second]
    subsets = [()] if second_side_exact else _subsets(free)
    for extra in subsets:
        second = tuple(sorted(pin_second + extra))
        first = tuple(sorted(lab for lab in labels if lab not in second))
        for b2 in range(d + 1):
            b1 = d - b2
            if b1 == 0 and len(first) + 1 < 3:
                continue
            if b2 == 0 and len(second) + 1 < 3:
                continue
            yield first, second, b1, b2


def _subsets(items: list[int]) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = [()]
    for x in items:
        out += [s + (x,) for s in out]
    return out


def two_vertex_tree(
    first_tails, second_tails, b1: int, b2: int, second_decorations=()
) -> DecoratedTree:
    return DecoratedTree(
        betas=(b1, b2),
        edges=((0, 1),),
        tails=tuple((lab, 0) for lab in first_tails)
        + tuple((lab, 1) for lab in second_tails),
        decorations=tuple((1, tok) for tok in second_decorations),
    )


def enumerate_two_vertex_divisors(
    n: int,
    d: int,
    pin_first: Iterable[int] = (),
    pin_second: Iterable[int] = (),
    second_side_exact: bool = False,
) -> list[DecoratedTree]:
    """All stable one-edge boundary strata, one tree per isomorphism class."""
    check_degree(d)
    seen: dict[DecoratedTree, None] = {}
    for first, second, b1, b2 in _two_vertex_splits(
        n, d, pin_first, pin_second, second_side_exact
    ):
        seen.setdefault(two_vertex_tree(first, second, b1, b2))
    return sorted(seen, key=lambda t: repr(t.canonical_key))


# -- forgetful map -------------------------------------------------------------


def forgetful_pullback(t: DecoratedTree, label: int) -> TreeSum:
    """Pull back along the map forgetting a fresh tail.

    One term per vertex, the new tail attached there, with coefficient
    |Aut new| / |Aut old|.
    """
    if label in t.labels:
        raise ValueError(f"tail label {label} already present")
    base_aut = aut_order(t)
    out = TreeSum()
    for v in range(t.n_vertices):
        lifted = DecoratedTree(
            betas=t.betas,
            edges=t.edges,
            tails=t.tails + ((label, v),),
            decorations=t.decorations,
        )
        out.add_term(lifted, Fraction(aut_order(lifted), base_aut))
    return out


def forgetful_pushforward(t: DecoratedTree, label: int) -> TreeSum:
    """Push forward along the map forgetting the tail ``label``.

    Stable case: zero unless the losing vertex carries a push-forwardable
    token, which is then replaced by its fiberwise image, with coefficient
    |Aut pushed| / |Aut original|.  Destabilizing case: zero for a
    positive-degree token at the dying vertex; for no token (or a unit)
    the tree stabilizes, with the same automorphism-ratio coefficient.
    """
    v = t.tail_vertex(label)
    n_total = len(t.tails)
    if t.total_degree == 0 and n_total - 1 < 3:
        raise ValueError("cannot forget a tail below stability of the total space")
    base_aut = aut_order(t)
    remaining = tuple(tv for tv in t.tails if tv[0] != label)
    destabilizes = t.betas[v] == 0 and t.valence(v) == 3

    if not destabilizes:
        tokens = t.decorations_at(v)
        pushables = [tok for tok in tokens if tok.pushable]
        if len(pushables) != 1 or len(tokens) != 1:
            return TreeSum()  # fiberwise pushforward of a pulled-back class
        new_decor = tuple(
            (w, tok.pushed() if w == v else tok) for w, tok in t.decorations
        )
        pushed = DecoratedTree(t.betas, t.edges, remaining, new_decor)
        return TreeSum({pushed: Fraction(aut_order(pushed), base_aut)})

    # dying vertex: only degree-0 decorations survive the contraction
    for tok in t.decorations_at(v):
        if tok.degree > 0:
            return TreeSum()
    half_tails = [lab for lab, w in remaining if w == v]
    nbrs = t.neighbors(v)
    keep = [w for w in range(t.n_vertices) if w != v]
    relabel = {w: i for i, w in enumerate(keep)}
    new_edges = [
        (relabel[x], relabel[y]) for x, y in t.edges if v not in (x, y)
    ]
    if len(nbrs) == 2:
        new_edges.append((relabel[nbrs[0]], relabel[nbrs[1]]))
        if half_tails:
            raise AssertionError("valence bookkeeping broke")
        new_tails = tuple((lab, relabel[w]) for lab, w in remaining)
    elif len(nbrs) == 1:
        new_tails = tuple(
            (lab, relabel[nbrs[0]] if w == v else relabel[w]) for lab, w in remaining
        )
    else:
        raise ValueError("cannot stabilize an isolated vertex")
    new_decor = tuple(
        (relabel[w], tok) for w, tok in t.decorations if w != v
    )
    stabilized = DecoratedTree(
        tuple(t.betas[w] for w in keep), tuple(new_edges), new_tails, new_decor
    )
    return TreeSum({stabilized: Fraction(aut_order(stabilized), base_aut)})


# -- boundary presentations ------------------------------------------------------


def psi_boundary_presentation(n: int, d: int, a: int) -> TreeSum:
    """Boundary presentation of psi_1^a on the n-pointed degree-d space.

    Tail 1 rides one vertex, the reference tails 2 and 3 the other, the
    remaining tails and the degree split in all stable ways.  For a >= 2
    the tail-1 vertex carries the leftover psi power as a token.
    """
    if a < 1:
        raise ValueError("psi presentation needs a >= 1")
    if n < 3:
        raise ValueError("psi presentation needs the two reference tails")
    check_degree(d)
    decor = (Decoration("psi", (1, a - 1), 2 * (a - 1)),) if a > 1 else ()
    out = TreeSum()
    for first, second, b1, b2 in _two_vertex_splits(
        n, d, pin_first=(2, 3), pin_second=(1,)
    ):
        out.add_term(two_vertex_tree(first, second, b1, b2, decor), Fraction(1))
    return out


def kappa_boundary_presentation(
    target: TargetModel, n: int, d: int, a: int, alpha: int
) -> TreeSum:
    """Boundary presentation of kappa_{a,alpha} on the n-pointed space.

    The splitting sum demotes the class to kappa_{a-1,alpha} on the vertex
    away from the reference tails 1 and 2; for a = 0 the destabilizing
    strata contribute the extra evaluation-class terms, one per
    non-reference tail.
    """
    if a < 0:
        raise ValueError("kappa presentation needs a >= 0")
    if n < 2:
        raise ValueError("kappa presentation needs the two reference tails")
    check_degree(d)
    grade = target.gradings[alpha]
    token = Decoration("kappa", (a - 1, alpha), 2 * (a - 1) + grade)
    out = TreeSum()
    for first, second, b1, b2 in _two_vertex_splits(
        n, d, pin_first=(1, 2), pin_second=()
    ):
        out.add_term(
            two_vertex_tree(first, second, b1, b2, (token,)), Fraction(1)
        )
    if a == 0:
        for i in range(3, n + 1):
            tok = Decoration("ev", (i, alpha), grade)
            out.add_term(single_vertex_tree(n, d, (tok,)), Fraction(1))
    return out
