"""Cube term decisions with explicit witnesses.

A ``d``-cube term is looked for as a member of the subpower of
``A^(d * |A|^2)`` generated by the columns ``z`` in ``{x, y}^d - {y...y}``:
coordinate ``(i, (a, b))`` of the generator for ``z`` is ``a`` when
``z_i = x`` and ``b`` otherwise, and the target is the all-``b`` tuple.
Columns that repeat (or are constant and already agree with the target)
are merged before closing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Sequence

import numpy as np

from .absorption import Blocker, absorbs
from .algebra import (
    DEFAULT_SUBUNIVERSE_CAP,
    FiniteAlgebra,
    Subset,
    all_subuniverses,
    all_tuples,
    generate_subuniverse,
    signature_stats,
)
from .blockers import find_blocker
from .crosses import Cross, is_compatible_cross
from .errors import CapExceeded, HasCubeTerm, SearchCapExceeded
from .subpower import (
    DEFAULT_CAP,
    ClosureResult,
    FoundTarget,
    TermWitness,
    close,
    evaluate_witness,
    free_algebra_on_two,
)

PRECHECK_NODE_BUDGET = 200_000
BFS_PROBE_WORK = 20_000_000


class CubeStatus(str, enum.Enum):
    HAS_CUBE_TERM = "has_cube_term"
    NO_CUBE_TERM = "no_cube_term"
    UNDECIDED = "undecided"


@dataclass
class CubeVerdict:
    dimension: int
    status: CubeStatus
    witness: TermWitness | None = None
    certificate: Blocker | Cross | None = None
    certificate_over: str | None = None  # "algebra" or "free_algebra"
    reason: str = ""
    columns: tuple[str, ...] = ()
    explored: int = 0

    @property
    def has_cube_term(self) -> bool:
        return self.status is CubeStatus.HAS_CUBE_TERM

    def identities(self) -> list[str]:
        return cube_identities(self.columns) if self.columns else []

    def to_dict(self, algebra: FiniteAlgebra | None = None) -> dict:
        out: dict = {"dimension": self.dimension, "status": self.status.value,
                     "reason": self.reason}
        if self.witness is not None:
            out["witness"] = {"term": self.witness.to_text(), "variables": list(self.columns),
                              "depth": self.witness.depth(), "dag": self.witness.to_dag()}
            out["identities"] = self.identities()
        if isinstance(self.certificate, Blocker):
            out["blocker"] = self.certificate.to_dict(algebra)
        elif isinstance(self.certificate, Cross):
            out["cross"] = {"over": self.certificate_over, "bases": self.certificate.to_list()}
        return out


def cube_columns(d: int) -> tuple[str, ...]:
    """The generator columns ``{x,y}^d - {y...y}`` in lexicographic order (``x < y``)."""
    return tuple("".join(z) for z in iproduct("xy", repeat=d) if set(z) != {"y"})


def cube_identities(columns: Sequence[str]) -> list[str]:
    d = len(columns[0])
    return [f"c({','.join(z[i] for z in columns)}) = y" for i in range(d)]


def _collapse(gens: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge coordinates whose generator column and target value coincide."""
    if gens.shape[1] == 0:
        return gens, target
    const = (gens == gens[:1]).all(axis=0) & (gens[0] == target)
    keep = ~const
    g, t = gens[:, keep], target[keep]
    if g.shape[1] == 0:
        return g, t
    stacked = np.vstack([g, t[None, :]]).T
    _, first = np.unique(stacked, axis=0, return_index=True)
    first = np.sort(first)
    return g[:, first], t[first]


def cube_generators(k: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Generators and target in ``A^(d * k^2)`` before collapsing."""
    pairs = all_tuples(k, 2)
    xs, ys = pairs[:, 0], pairs[:, 1]
    gens = np.array([np.concatenate([xs if c == "x" else ys for c in z])
                     for z in cube_columns(d)])
    return gens, np.concatenate([ys] * d)


def verify_cube_term(algebra: FiniteAlgebra, witness: TermWitness,
                     columns: Sequence[str]) -> bool:
    """Check every cube identity for every pair ``(a, b)``."""
    pairs = all_tuples(algebra.size, 2)
    a, b = pairs[:, 0], pairs[:, 1]
    for i in range(len(columns[0])):
        args = [a if z[i] == "x" else b for z in columns]
        if not np.array_equal(evaluate_witness(witness, algebra, args), b):
            return False
    return True


def has_cube_term(algebra: FiniteAlgebra, d: int, cap: int = DEFAULT_CAP,
                  threads: int | None = None, precheck: bool | str = True,
                  subuniverse_cap: int = DEFAULT_SUBUNIVERSE_CAP,
                  max_work: int | None = None, order: str = "auto") -> CubeVerdict:
    """Decide whether ``algebra`` has a ``d``-cube term.

    ``precheck`` first looks for cheap certificates of absence: a blocker
    (``True``), a compatible ``d``-ary cross of the algebra (``True`` or
    ``"cross"``), or neither (``False``). The closure is authoritative;
    hitting ``cap`` or ``max_work`` gives an undecided verdict.

    ``order`` is ``"bfs"``, ``"guided"`` or ``"auto"``: a breadth-first probe
    of at most ``BFS_PROBE_WORK`` lookups (shallowest witnesses), then the
    target-guided order.
    """
    if d < 2:
        raise ValueError("cube dimension must be at least 2")
    columns = cube_columns(d)
    if precheck and algebra.size <= subuniverse_cap:
        if precheck is True:
            blocker = find_blocker(algebra, subuniverse_cap)
            if blocker is not None:
                return CubeVerdict(d, CubeStatus.NO_CUBE_TERM, certificate=blocker,
                                   certificate_over="algebra", columns=columns,
                                   reason="blocker")
        try:
            cross = find_compatible_cross(algebra, d, subuniverse_cap,
                                          max_nodes=PRECHECK_NODE_BUDGET)
        except SearchCapExceeded:
            cross = None
        if cross is not None:
            return CubeVerdict(d, CubeStatus.NO_CUBE_TERM, certificate=cross,
                               certificate_over="algebra", columns=columns,
                               reason="compatible cross")

    gens, target = _collapse(*cube_generators(algebra.size, d))
    try:
        res = _search(algebra, gens, target, cap, threads, columns, max_work, order)
    except CapExceeded as exc:
        return CubeVerdict(d, CubeStatus.UNDECIDED, columns=columns, reason=str(exc))
    if isinstance(res, FoundTarget):
        if not verify_cube_term(algebra, res.witness, columns):
            raise AssertionError("extracted term fails the cube identities")
        return CubeVerdict(d, CubeStatus.HAS_CUBE_TERM, witness=res.witness, columns=columns,
                           reason="closure reached the target", explored=res.explored)

    verdict = CubeVerdict(d, CubeStatus.NO_CUBE_TERM, columns=columns, explored=len(res),
                          reason="closure exhausted without the target")
    try:
        free = free_algebra_on_two(algebra, cap=cap, threads=threads)
        if len(free) <= subuniverse_cap:
            cross = find_compatible_cross(free.as_algebra(), d, subuniverse_cap)
            if cross is not None:
                verdict.certificate, verdict.certificate_over = cross, "free_algebra"
    except CapExceeded:
        pass
    return verdict


def _search(algebra, gens, target, cap, threads, columns, max_work, order):
    if order == "auto":
        probe = BFS_PROBE_WORK if max_work is None else min(max_work, BFS_PROBE_WORK)
        try:
            return close(algebra, gens, target=target, cap=cap, threads=threads,
                         variables=columns, max_work=probe)
        except CapExceeded:
            order = "guided"
    return close(algebra, gens, target=target, cap=cap, threads=threads, variables=columns,
                 max_work=max_work, order=order)


@dataclass
class MinCubeDimension:
    """``dimension`` is None when there is no cube term of any dimension."""

    status: str  # "finite", "infinite" or "undecided"
    dimension: int | None
    witness: TermWitness | None = None
    blocker: Blocker | None = None
    verdicts: list[CubeVerdict] = field(default_factory=list)
    reason: str = ""

    def to_dict(self, algebra: FiniteAlgebra | None = None) -> dict:
        out: dict = {"status": self.status,
                     "dimension": "infinity" if self.status == "infinite" else self.dimension,
                     "reason": self.reason,
                     "verdicts": [v.to_dict(algebra) for v in self.verdicts]}
        if self.blocker is not None:
            out["blocker"] = self.blocker.to_dict(algebra)
        return out


def min_cube_dimension(algebra: FiniteAlgebra, cap: int = DEFAULT_CAP,
                       threads: int | None = None, max_d: int | None = None,
                       subuniverse_cap: int = DEFAULT_SUBUNIVERSE_CAP,
                       max_work: int | None = None, order: str = "auto") -> MinCubeDimension:
    """Least ``d`` with a ``d``-cube term; only ``2 <= d <= 1 + sum(arity - 1)`` needs checking."""
    _, bound = signature_stats(algebra.signature)
    searched = algebra.size <= subuniverse_cap
    if searched:
        blocker = find_blocker(algebra, subuniverse_cap)
        if blocker is not None:
            return MinCubeDimension("infinite", None, blocker=blocker, reason="blocker")
    top = bound if max_d is None else min(bound, max_d)
    verdicts: list[CubeVerdict] = []
    for d in range(2, top + 1):
        v = has_cube_term(algebra, d, cap, threads, precheck="cross" if searched else False,
                          subuniverse_cap=subuniverse_cap, max_work=max_work, order=order)
        verdicts.append(v)
        if v.status is CubeStatus.HAS_CUBE_TERM:
            return MinCubeDimension("finite", d, witness=v.witness, verdicts=verdicts,
                                    reason="witness")
        if v.status is CubeStatus.UNDECIDED:
            if d == bound and searched:
                # no blocker, so some cube term exists and one of dimension `bound` does
                return MinCubeDimension("finite", d, verdicts=verdicts,
                                        reason="no blocker and all smaller dimensions refuted")
            return MinCubeDimension("undecided", None, verdicts=verdicts, reason=v.reason)
    if top < bound:
        return MinCubeDimension("undecided", None, verdicts=verdicts,
                                reason=f"no cube term up to max-d {top}")
    return MinCubeDimension("infinite", None, verdicts=verdicts,
                            reason=f"no {bound}-cube term, hence none at all")


def find_compatible_cross(algebra: FiniteAlgebra, d: int,
                          cap: int = DEFAULT_SUBUNIVERSE_CAP,
                          max_nodes: int | None = None) -> Cross | None:
    """First compatible ``d``-ary cross whose bases are proper subuniverses.

    Compatibility is invariant under permuting bases, so only non-decreasing
    base sequences (in subuniverse order) are tried. Prefixes must themselves
    be compatible, and a prefix in which an operation of arity ``n <= d``
    lacks absorbing variables for ``n`` or more bases is abandoned.
    Returns None when no such cross exists; raises :class:`SearchCapExceeded`
    once more than ``max_nodes`` search nodes are visited.
    """
    if d < 1:
        raise ValueError("cross arity must be positive")
    subs = [U for U in all_subuniverses(algebra, cap) if U.is_proper()]
    arities = algebra.arities
    deficient = [[not any(absorbs(algebra, s, [i], U) for i in range(n))
                  for s, n in enumerate(arities)] for U in subs]
    limits = [n - 1 if n <= d else None for n in arities]
    nodes = 0

    def search(prefix: list[int], counts: list[int]) -> Cross | None:
        nonlocal nodes
        if len(prefix) == d:
            return Cross(tuple(subs[u] for u in prefix))
        start = prefix[-1] if prefix else 0
        for u in range(start, len(subs)):
            nodes += 1
            if max_nodes is not None and nodes > max_nodes:
                raise SearchCapExceeded(nodes, max_nodes, "cross search nodes")
            new_counts = [c + deficient[u][s] for s, c in enumerate(counts)]
            if any(lim is not None and c > lim for c, lim in zip(new_counts, limits)):
                continue
            cand = prefix + [u]
            if len(cand) > 1 and not is_compatible_cross(
                    algebra, Cross(tuple(subs[v] for v in cand))):
                continue
            found = search(cand, new_counts)
            if found is not None:
                return found
        return None

    return search([], [0] * len(arities))


# ---------------------------------------------------------------------------
# Greedy cross sequences over the free algebra
# ---------------------------------------------------------------------------

@dataclass
class CrossSequenceWitness:
    free: ClosureResult
    free_algebra: FiniteAlgebra
    bases: list[Subset]

    @property
    def cross(self) -> Cross:
        return Cross(tuple(self.bases))


def _generates_constant_y(algebra: FiniteAlgebra, free: ClosureResult, bases: Sequence[Subset],
                          x: int, y: int, cap: int, threads: int | None) -> bool:
    """Is ``(y, ..., y)`` in the subpower of ``F^k`` generated by ``Cross(bases)``?

    Uses the generating set ``{x,y}^j x U_j x {x,y}^(k-j-1)`` of each block.
    """
    k = len(bases)
    tuples = set()
    for j, U in enumerate(bases):
        for head in iproduct((x, y), repeat=j):
            for tail in iproduct((x, y), repeat=k - j - 1):
                for u in U:
                    tuples.add(head + (u,) + tail)
    ordered = sorted(tuples)
    rows = free.elements.astype(np.int64)
    gens = np.array([np.concatenate([rows[e] for e in t]) for t in ordered])
    target = np.concatenate([rows[y]] * k)
    gens, target = _collapse(gens, target)
    res = close(algebra, gens, target=target, cap=cap, threads=threads)
    return isinstance(res, FoundTarget)


def build_cross_sequence_witness(algebra: FiniteAlgebra, d: int, cap: int = DEFAULT_CAP,
                                 threads: int | None = None) -> CrossSequenceWitness:
    """Grow subuniverses ``U_0, ..., U_{d-1}`` of the free algebra greedily from ``{x}``.

    ``U_i`` takes the least element whose addition keeps ``(y, ..., y)`` out of
    the subpowers generated by ``Cross(U_0, ..., U_i, {x}, ..., {x})`` of
    every arity ``k`` with ``i < k <= d``; the result is a compatible cross.
    """
    verdict = has_cube_term(algebra, d, cap, threads)
    if verdict.status is CubeStatus.HAS_CUBE_TERM:
        raise HasCubeTerm(f"the algebra has a {d}-cube term: {verdict.witness}")
    if verdict.status is CubeStatus.UNDECIDED:
        raise CapExceeded(cap)
    free = free_algebra_on_two(algebra, cap=cap, threads=threads)
    F = free.as_algebra()
    x, y = 0, 1
    xs = Subset.of(F.size, [x])
    bases: list[Subset] = []
    for i in range(d):
        U = xs
        for p in range(F.size):
            if p in U:
                continue
            grown = generate_subuniverse(F, U | Subset.of(F.size, [p]))
            if y in grown:
                continue
            ok = all(
                not _generates_constant_y(algebra, free, bases + [grown] + [xs] * (kk - i - 1),
                                          x, y, cap, threads)
                for kk in range(i + 1, d + 1))
            if ok:
                U = grown
        bases.append(U)
    witness = CrossSequenceWitness(free, F, bases)
    if not is_compatible_cross(F, witness.cross):
        raise AssertionError("greedy cross sequence is not compatible")
    return witness
