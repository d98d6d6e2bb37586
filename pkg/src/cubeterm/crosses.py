"""Crosses, their compatibility with operations, and the matching arguments around them.

``Cross(U_0, ..., U_{d-1})`` is the set of tuples in ``A^d`` having some
coordinate ``i`` with value in ``U_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from typing import Sequence

import numpy as np

from .absorption import Blocker, absorbs, is_absorbing, make_blocker
from .algebra import FiniteAlgebra, Homomorphism, Subset, all_tuples, signature_stats
from .errors import BudgetExceeded, ImproperBase, NoSuchIndex, PreconditionArity

DEFAULT_ORACLE_BUDGET = 5_000_000


@dataclass(frozen=True)
class Cross:
    bases: tuple[Subset, ...]

    def __post_init__(self):
        object.__setattr__(self, "bases", tuple(self.bases))
        if not self.bases:
            raise ImproperBase("a cross needs at least one base")
        size = self.bases[0].size
        for i, U in enumerate(self.bases):
            if U.size != size:
                raise ImproperBase("bases are over different universes")
            if not U.is_proper():
                raise ImproperBase(f"base {i} = {U!r} is not a nonempty proper subset")

    @classmethod
    def of(cls, size: int, *bases: Sequence[int]) -> "Cross":
        return cls(tuple(Subset.of(size, b) for b in bases))

    @classmethod
    def symmetric(cls, base: Subset, arity: int) -> "Cross":
        return cls((base,) * arity)

    @property
    def arity(self) -> int:
        return len(self.bases)

    @property
    def universe_size(self) -> int:
        return self.bases[0].size

    @property
    def is_symmetric(self) -> bool:
        return len(set(self.bases)) == 1

    @property
    def is_thin(self) -> bool:
        return all(len(U) == 1 for U in self.bases)

    def __contains__(self, tup) -> bool:
        return len(tup) == self.arity and any(a in U for a, U in zip(tup, self.bases))

    def members(self) -> np.ndarray:
        """All member tuples, lexicographically ordered."""
        tuples = all_tuples(self.universe_size, self.arity)
        return tuples[self.member_mask(tuples)]

    def member_mask(self, rows: np.ndarray) -> np.ndarray:
        hit = np.zeros(len(rows), dtype=bool)
        for i, U in enumerate(self.bases):
            hit |= U.mask()[rows[:, i]]
        return hit

    def to_list(self) -> list[list[int]]:
        return [list(U) for U in self.bases]


# ---------------------------------------------------------------------------
# Compatibility
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CrossCertificate:
    """A matrix whose columns lie in the cross while its image does not.

    ``matrix[i][j]`` is row ``i`` (cross coordinate), column ``j`` (argument).
    """

    symbol: str
    map: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...]
    output: tuple[int, ...]

    def columns(self) -> list[tuple[int, ...]]:
        return [tuple(row[j] for row in self.matrix) for j in range(len(self.map))]

    def to_dict(self) -> dict:
        return {"symbol": self.symbol, "map": list(self.map),
                "matrix": [list(r) for r in self.matrix], "output": list(self.output)}


@dataclass(frozen=True)
class CrossCheck:
    compatible: bool
    certificate: CrossCertificate | None = None

    def __bool__(self) -> bool:
        return self.compatible


def _symbol_passes(algebra: FiniteAlgebra, s: int, cross: Cross):
    """Return None if the operation satisfies the map criterion, else the first failing map."""
    n, d = algebra.arities[s], cross.arity
    for m in iproduct(range(d), repeat=n):
        for i in sorted(set(m)):
            fiber = [j for j in range(n) if m[j] == i]
            if absorbs(algebra, s, fiber, cross.bases[i]):
                break
        else:
            return m
    return None


def _certificate(algebra: FiniteAlgebra, s: int, cross: Cross, m) -> CrossCertificate:
    k, n = algebra.size, algebra.arities[s]
    tuples = all_tuples(k, n)
    table = algebra.tables[s]
    rows = []
    for i, U in enumerate(cross.bases):
        umask = U.mask()
        fiber = [j for j in range(n) if m[j] == i]
        if fiber:
            ok = umask[tuples[:, fiber]].all(axis=1) & ~umask[table]
            rows.append(tuple(tuples[int(np.flatnonzero(ok)[0])].tolist()))
        else:
            outside = min(set(range(k)) - set(U))
            rows.append((outside,) * n)
    output = tuple(algebra.apply(s, *row) for row in rows)
    return CrossCertificate(algebra.names[s], tuple(m), tuple(rows), output)


def is_compatible_cross(algebra: FiniteAlgebra, cross: Cross) -> CrossCheck:
    """Decide compatibility with every operation via the map criterion.

    For each operation of arity ``n`` and each map ``m: n -> d`` some ``i`` in the
    image of ``m`` must make the operation land in ``U_i`` whenever the
    arguments in the fiber ``m^-1(i)`` are in ``U_i``. On failure the
    certificate holds the offending argument matrix.
    """
    _same_universe(algebra, cross)
    for s in range(len(algebra.arities)):
        m = _symbol_passes(algebra, s, cross)
        if m is not None:
            return CrossCheck(False, _certificate(algebra, s, cross, m))
    return CrossCheck(True)


def is_compatible_cross_oracle(algebra: FiniteAlgebra, cross: Cross,
                               budget: int = DEFAULT_ORACLE_BUDGET) -> bool:
    """Brute-force check that the cross is closed under every operation."""
    _same_universe(algebra, cross)
    members = cross.members()
    M, d, k = len(members), cross.arity, algebra.size
    for s, n in enumerate(algebra.arities):
        total = M ** n
        if total > budget:
            raise BudgetExceeded(f"{total} argument selections exceed the budget {budget}")
        step = max(1, (1 << 20) // max(1, d))
        for c0 in range(0, total, step):
            sel = np.stack(np.unravel_index(np.arange(c0, min(total, c0 + step)), (M,) * n),
                           axis=1)
            idx = np.zeros((len(sel), d), dtype=np.int64)
            for j in range(n):
                idx = idx * k + members[sel[:, j]]
            out = algebra.tables[s][idx]
            if not cross.member_mask(out).all():
                return False
    return True


def _same_universe(algebra: FiniteAlgebra, cross: Cross) -> None:
    if cross.universe_size != algebra.size:
        raise ValueError(f"cross is over a universe of size {cross.universe_size}, "
                         f"algebra has size {algebra.size}")


# ---------------------------------------------------------------------------
# Absorption structure and matchings
# ---------------------------------------------------------------------------

def absorption_deficiency(algebra: FiniteAlgebra, cross: Cross) -> dict[str, frozenset[int]]:
    """Per operation, the base indices ``j`` where no variable is ``U_j``-absorbing."""
    _same_universe(algebra, cross)
    out = {}
    for s, name in enumerate(algebra.names):
        out[name] = frozenset(
            j for j, U in enumerate(cross.bases)
            if not any(is_absorbing(algebra, s, i, U) for i in range(algebra.arities[s])))
    return out


@dataclass(frozen=True)
class AbsorptionGraph:
    """Bipartite graph: variables on the left, base indices on the right.

    ``(i, j)`` is an edge iff the operation is NOT ``U_j``-absorbing in variable ``i``.
    """

    left: int
    right: int
    edges: frozenset[tuple[int, int]]

    def neighbors(self, i: int) -> list[int]:
        return sorted(j for (a, j) in self.edges if a == i)


def absorption_graph(algebra: FiniteAlgebra, symbol, cross: Cross) -> AbsorptionGraph:
    s = algebra.op_index(symbol)
    n = algebra.arities[s]
    edges = frozenset((i, j) for i in range(n) for j, U in enumerate(cross.bases)
                      if not is_absorbing(algebra, s, i, U))
    return AbsorptionGraph(n, cross.arity, edges)


@dataclass(frozen=True)
class Matching:
    pairs: dict  # left vertex -> right vertex


@dataclass(frozen=True)
class DeficientSet:
    """Left vertices ``Y`` whose joint neighbourhood ``K`` is smaller than ``Y``."""

    Y: frozenset[int]
    K: frozenset[int]


def hall_matching(graph: AbsorptionGraph) -> Matching | DeficientSet:
    """Left-saturating matching via augmenting paths, or a Hall violator."""
    adj = [graph.neighbors(i) for i in range(graph.left)]
    match_right: dict[int, int] = {}

    def augment(u: int, seen: set[int]) -> bool:
        for v in adj[u]:
            if v in seen:
                continue
            seen.add(v)
            if v not in match_right or augment(match_right[v], seen):
                match_right[v] = u
                return True
        return False

    for u in range(graph.left):
        augment(u, set())
    match_left = {u: v for v, u in match_right.items()}
    if len(match_left) == graph.left:
        return Matching(dict(sorted(match_left.items())))
    # alternating reachability from the unmatched left vertices
    Y = {u for u in range(graph.left) if u not in match_left}
    K: set[int] = set()
    stack = list(Y)
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in K:
                K.add(v)
                w = match_right[v]  # every reached right vertex is matched
                if w not in Y:
                    Y.add(w)
                    stack.append(w)
    return DeficientSet(frozenset(Y), frozenset(K))


# ---------------------------------------------------------------------------
# Symmetrization and pullbacks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Symmetrization:
    index: int
    base: Subset
    blocker: Blocker


def symmetrize_cross(algebra: FiniteAlgebra, cross: Cross) -> Symmetrization:
    """Turn a compatible cross of arity at least ``1 + sum(arity - 1)`` into a blocker ``(U_j, A)``.

    Each operation's Hall violator ``(Y, K)`` rules out at most ``arity - 1``
    base indices; the least index left over has an absorbing variable in
    every operation.
    """
    _same_universe(algebra, cross)
    _, bound = signature_stats(algebra.signature)
    if cross.arity < bound:
        raise PreconditionArity(f"cross arity {cross.arity} is below {bound}")
    excluded: set[int] = set()
    for s, name in enumerate(algebra.names):
        res = hall_matching(absorption_graph(algebra, s, cross))
        if isinstance(res, Matching):
            raise NoSuchIndex(f"{name} admits a matching, so the cross is not compatible")
        excluded |= res.K
    free = [j for j in range(cross.arity) if j not in excluded]
    if not free:
        raise NoSuchIndex("every base index is excluded; the cross is not compatible")
    j = free[0]
    U = cross.bases[j]
    blocker = make_blocker(algebra, U, Subset.full(algebra.size))
    return Symmetrization(j, U, blocker)


def symmetric_cross_blocker(algebra: FiniteAlgebra, base: Subset, arity: int) -> Blocker:
    """Blocker ``(U, A)`` from a compatible symmetric cross of arity at least the max arity."""
    max_arity, _ = signature_stats(algebra.signature)
    if arity < max_arity:
        raise PreconditionArity(f"symmetric cross arity {arity} is below {max_arity}")
    cross = Cross.symmetric(base, arity)
    if not is_compatible_cross(algebra, cross):
        raise NoSuchIndex("the symmetric cross is not compatible")
    return make_blocker(algebra, base, Subset.full(algebra.size))


def pullback_cross(hom: Homomorphism, cross: Cross, verify: bool = True) -> Cross:
    """The inverse image of a cross of the target, which is a cross of the source."""
    if cross.universe_size != hom.target.size:
        raise ValueError("cross is not over the homomorphism's target")
    bases = []
    for i, U in enumerate(cross.bases):
        pre = hom.preimage(U)
        if not pre.is_proper():
            raise ImproperBase(f"preimage of base {i} is {'empty' if not len(pre) else 'everything'}")
        bases.append(pre)
    out = Cross(tuple(bases))
    if verify and is_compatible_cross(hom.target, cross) and not is_compatible_cross(hom.source, out):
        raise AssertionError("pullback of a compatible cross is incompatible")
    return out
