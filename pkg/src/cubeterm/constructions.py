"""Fixture algebras: the sharpness examples, small classics, and enumerators.

Coordinates of ``{0,1}^n`` are exposed 0-based. Coordinate ``c`` of an
element ``e`` is bit ``n-1-c`` of ``e``, so ``e`` read in binary lists the
coordinates left to right, and the coordinate numbered ``c+1`` in 1-based
accounts is coordinate ``c`` here. Symbols are named ``f1, ..., fm``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from typing import Iterator, Sequence

import numpy as np

from .algebra import FiniteAlgebra, Signature, Subset, all_tuples
from .crosses import Cross
from .errors import DegenerateSignature, LeadingArityTooSmall


def _boolean_op(arity: int, rule: str) -> list[int]:
    """``rule`` is ``join`` (any 1), ``nu`` (two 1s; meet when binary), ``meet`` or ``proj``."""
    args = all_tuples(2, arity)
    ones = args.sum(axis=1)
    if rule == "join":
        out = ones >= 1
    elif rule == "nu":
        out = ones >= 2
    elif rule == "meet":
        out = ones == arity
    elif rule == "proj":
        out = args[:, 0] == 1
    else:
        raise ValueError(rule)
    return out.astype(int).tolist()


def meet_semilattice() -> FiniteAlgebra:
    return FiniteAlgebra(2, Signature.of(("meet", 2)), [_boolean_op(2, "meet")])


def majority() -> FiniteAlgebra:
    return FiniteAlgebra(2, Signature.of(("maj", 3)), [_boolean_op(3, "nu")])


def z3_groupoid() -> FiniteAlgebra:
    """``Z_3`` with ``f(x, y) = 2x + 2y``."""
    return FiniteAlgebra(3, Signature.of(("f", 2)),
                         [[(2 * a + 2 * b) % 3 for a in range(3) for b in range(3)]])


def two_element_semilattice(d: int) -> FiniteAlgebra:
    """``{0,1}`` with the ``d``-ary operation that is 1 only on the all-ones tuple."""
    if d < 2:
        raise ValueError("arity must be at least 2")
    return FiniteAlgebra(2, Signature.of(("w", d)), [_boolean_op(d, "meet")])


def chain_semilattice(k: int) -> FiniteAlgebra:
    """Meet (minimum) on the chain ``0 < 1 < ... < k-1``."""
    return FiniteAlgebra(k, Signature.of(("meet", 2)),
                         [[min(a, b) for a in range(k) for b in range(k)]])


@dataclass(frozen=True)
class Example51:
    algebra: FiniteAlgebra
    arities: tuple[int, ...]
    cells: tuple[tuple[int, ...], ...]   # coordinates owned by each symbol
    bases: tuple[Subset, ...]            # bases[c]: tuples with 1 in coordinate c

    @property
    def n(self) -> int:
        return len(self.bases)

    @property
    def cross(self) -> Cross:
        return Cross(self.bases)

    def owner(self, coordinate: int) -> int:
        return next(i for i, cell in enumerate(self.cells) if coordinate in cell)

    def coordinate_factor(self, coordinate: int) -> FiniteAlgebra:
        """The 2-element algebra acting in one coordinate."""
        owner = self.owner(coordinate)
        tables = [_boolean_op(a, "nu" if i == owner else "join")
                  for i, a in enumerate(self.arities)]
        return FiniteAlgebra(2, self.algebra.signature, tables)


def example_51(arities: Sequence[int]) -> Example51:
    """Algebra on ``{0,1}^n``, ``n = sum(arity - 1)``, with a cube term only in dimensions ``>= n + 1``.

    Symbol ``i`` owns ``arity_i - 1`` consecutive coordinates; there it acts
    as the canonical near-unanimity operation (at least two arguments are 1),
    elsewhere as join.
    """
    arities = tuple(int(a) for a in arities)
    if any(a < 2 for a in arities):
        raise ValueError("arities must be at least 2")
    n = sum(a - 1 for a in arities)
    if 1 + n <= 2:
        raise DegenerateSignature("needs 1 + sum(arity - 1) > 2; use z3_groupoid() instead")
    cells, start = [], 0
    for a in arities:
        cells.append(tuple(range(start, start + a - 1)))
        start += a - 1
    size = 2 ** n
    tables = []
    for i, a in enumerate(arities):
        args = all_tuples(size, a)
        out = np.zeros(len(args), dtype=np.int64)
        for c in range(n):
            ones = ((args >> (n - 1 - c)) & 1).sum(axis=1)
            bit = ones >= (2 if c in cells[i] else 1)
            out |= bit.astype(np.int64) << (n - 1 - c)
        tables.append(out)
    sig = Signature.of(*((f"f{i + 1}", a) for i, a in enumerate(arities)))
    algebra = FiniteAlgebra(size, sig, tables)
    bases = tuple(Subset.of(size, (e for e in range(size) if e >> (n - 1 - c) & 1))
                  for c in range(n))
    return Example51(algebra, arities, tuple(cells), bases)


@dataclass(frozen=True)
class Example52:
    algebra: FiniteAlgebra
    symmetric_arity: int  # arity of the largest compatible symmetric cross expected on F


def example_52(arities: Sequence[int]) -> Example52:
    """``{0,1}`` with ``f1`` the canonical near-unanimity operation and the rest first projections."""
    arities = tuple(int(a) for a in arities)
    if list(arities) != sorted(arities, reverse=True):
        raise ValueError("arities must be sorted in descending order")
    if arities[0] < 3:
        raise LeadingArityTooSmall("leading arity must be at least 3; use example_52_maltsev()")
    tables = [_boolean_op(arities[0], "nu")] + [_boolean_op(a, "proj") for a in arities[1:]]
    sig = Signature.of(*((f"f{i + 1}", a) for i, a in enumerate(arities)))
    return Example52(FiniteAlgebra(2, sig, tables), arities[0] - 1)


def example_52_maltsev(arities: Sequence[int]) -> Example52:
    """All-binary signatures: ``Z_3`` with ``f1 = 2x + 2y`` and the rest first projections."""
    arities = tuple(int(a) for a in arities)
    if any(a != 2 for a in arities):
        raise ValueError("this variant is for binary signatures")
    f1 = [(2 * a + 2 * b) % 3 for a in range(3) for b in range(3)]
    proj = [a for a in range(3) for _ in range(3)]
    sig = Signature.of(*((f"f{i + 1}", 2) for i in range(len(arities))))
    return Example52(FiniteAlgebra(3, sig, [f1] + [proj] * (len(arities) - 1)), 1)


# ---------------------------------------------------------------------------
# Enumerators and random algebras
# ---------------------------------------------------------------------------

def idempotent_groupoids(k: int) -> Iterator[FiniteAlgebra]:
    """Every idempotent binary operation on ``k`` elements, off-diagonal entries in lexicographic order."""
    off = [(a, b) for a in range(k) for b in range(k) if a != b]
    sig = Signature.of(("f", 2))
    for values in iproduct(range(k), repeat=len(off)):
        table = [a for a in range(k) for _ in range(k)]
        for (a, b), v in zip(off, values):
            table[a * k + b] = v
        for a in range(k):
            table[a * k + a] = a
        yield FiniteAlgebra(k, sig, [table], check=False)


def random_idempotent_algebra(rng: np.random.Generator, size: int,
                              arities: Sequence[int]) -> FiniteAlgebra:
    tables = []
    for a in arities:
        t = rng.integers(0, size, size ** a)
        t[np.arange(size) * sum(size ** j for j in range(a))] = np.arange(size)
        tables.append(t)
    sig = Signature.of(*((f"f{i + 1}", a) for i, a in enumerate(arities)))
    return FiniteAlgebra(size, sig, tables)


def random_cyclic_algebra(rng: np.random.Generator, size: int, arity: int) -> FiniteAlgebra:
    """One random idempotent operation invariant under cyclic shifts of its arguments."""
    args = all_tuples(size, arity)
    place = size ** np.arange(arity - 1, -1, -1)
    table = np.full(len(args), -1, dtype=np.int64)
    for idx, row in enumerate(args):
        if table[idx] >= 0:
            continue
        value = row[0] if (row == row[0]).all() else int(rng.integers(0, size))
        for r in range(arity):
            table[int(np.roll(row, r) @ place)] = value
    return FiniteAlgebra(size, Signature.of(("w", arity)), [table])
