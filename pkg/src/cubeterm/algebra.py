"""Finite idempotent algebras given by operation tables.

Universes are ``{0, ..., k-1}``. An ``n``-ary table is stored flat and
row-major with the first argument as the most significant base-``k`` digit,
so ``f(a0, ..., a_{n-1})`` lives at index ``sum(a_i * k**(n-1-i))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import (
    AlgebraError,
    NotIdempotent,
    SearchCapExceeded,
    SignatureMismatch,
    TableOutOfRange,
)

DEFAULT_SUBUNIVERSE_CAP = 12


@lru_cache(maxsize=None)
def all_tuples(k: int, n: int) -> np.ndarray:
    """All ``n``-tuples over ``range(k)`` in row-major order, shape ``(k**n, n)``."""
    if n == 0:
        out = np.zeros((1, 0), dtype=np.int64)
    else:
        out = np.indices((k,) * n, dtype=np.int64).reshape(n, -1).T.copy()
    out.setflags(write=False)
    return out


def _place_values(k: int, n: int) -> np.ndarray:
    return k ** np.arange(n - 1, -1, -1, dtype=np.int64)


@dataclass(frozen=True)
class Signature:
    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [name for name, _ in self.symbols]
        if not self.symbols:
            raise AlgebraError("signature has no operation symbols")
        for name, arity in self.symbols:
            if not isinstance(name, str) or not name:
                raise AlgebraError(f"invalid operation name {name!r}")
            if int(arity) < 2:
                raise AlgebraError(f"operation {name!r} has arity {arity} < 2")
        if len(set(names)) != len(names):
            raise AlgebraError(f"duplicate operation names in {names}")

    @classmethod
    def of(cls, *symbols: tuple[str, int]) -> "Signature":
        return cls(tuple((str(n), int(a)) for n, a in symbols))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.symbols)

    @property
    def arities(self) -> tuple[int, ...]:
        return tuple(arity for _, arity in self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, name: str) -> int:
        return self.names.index(name)


def signature_stats(sig: Signature) -> tuple[int, int]:
    """Return ``(max arity, 1 + sum(arity - 1))``.

    The second number is the dimension beyond which cube terms cannot first
    appear; the first bounds the arity of interesting symmetric crosses.
    """
    arities = sig.arities
    return max(arities), 1 + sum(a - 1 for a in arities)


@dataclass(frozen=True, order=False)
class Subset:
    """A subset of ``{0, ..., size-1}`` stored as a bit-vector (bit ``i`` <-> element ``i``)."""

    size: int
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.size:
            raise ValueError(f"bits {self.bits:b} do not fit a universe of size {self.size}")

    @classmethod
    def of(cls, size: int, elements: Iterable[int]) -> "Subset":
        bits = 0
        for e in elements:
            e = int(e)
            if not 0 <= e < size:
                raise ValueError(f"element {e} outside universe of size {size}")
            bits |= 1 << e
        return cls(size, bits)

    @classmethod
    def full(cls, size: int) -> "Subset":
        return cls(size, (1 << size) - 1)

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "Subset":
        return cls.of(len(mask), np.flatnonzero(mask).tolist())

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, e) -> bool:
        return 0 <= e < self.size and bool(self.bits >> int(e) & 1)

    def __iter__(self) -> Iterator[int]:
        bits, i = self.bits, 0
        while bits:
            if bits & 1:
                yield i
            bits >>= 1
            i += 1

    @property
    def elements(self) -> tuple[int, ...]:
        return tuple(self)

    def mask(self) -> np.ndarray:
        out = np.zeros(self.size, dtype=bool)
        out[list(self)] = True
        return out

    def indices(self) -> np.ndarray:
        return np.fromiter(self, dtype=np.int64, count=len(self))

    def _check(self, other: "Subset") -> None:
        if other.size != self.size:
            raise ValueError("subsets of different universes")

    def __or__(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset(self.size, self.bits | other.bits)

    def __and__(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset(self.size, self.bits & other.bits)

    def __sub__(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset(self.size, self.bits & ~other.bits)

    def complement(self) -> "Subset":
        return Subset(self.size, ((1 << self.size) - 1) & ~self.bits)

    def issubset(self, other: "Subset") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def is_proper(self) -> bool:
        """Nonempty and not the whole universe."""
        return 0 < len(self) < self.size

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return len(self), self.elements

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self)) + "}"


class FiniteAlgebra:
    """An idempotent algebra on ``{0, ..., size-1}``.

    Tables are validated on construction and immutable afterwards.
    """

    def __init__(self, size: int, signature: Signature, tables: Sequence[Sequence[int]],
                 *, check: bool = True):
        if int(size) < 1:
            raise AlgebraError(f"universe size must be positive, got {size}")
        if len(tables) != len(signature):
            raise AlgebraError(f"{len(signature)} symbols but {len(tables)} tables")
        self.size = int(size)
        self.signature = signature
        flat = []
        for (name, arity), table in zip(signature.symbols, tables):
            arr = np.asarray(table, dtype=np.int64).ravel()
            if arr.shape != (self.size ** arity,):
                raise AlgebraError(
                    f"operation {name!r}: table has {arr.size} entries, "
                    f"expected {self.size}**{arity} = {self.size ** arity}"
                )
            arr = arr.copy()
            arr.setflags(write=False)
            flat.append(arr)
        self.tables: tuple[np.ndarray, ...] = tuple(flat)
        self._cache: dict = {}
        if check:
            validate(self)

    # -- accessors ---------------------------------------------------------
    @property
    def arities(self) -> tuple[int, ...]:
        return self.signature.arities

    @property
    def names(self) -> tuple[str, ...]:
        return self.signature.names

    def op_index(self, symbol: int | str) -> int:
        if isinstance(symbol, str):
            return self.signature.index(symbol)
        return int(symbol)

    def table_nd(self, symbol: int | str) -> np.ndarray:
        s = self.op_index(symbol)
        return self.tables[s].reshape((self.size,) * self.arities[s])

    def apply(self, symbol: int | str, *args):
        """Apply an operation. Arguments may be ints or equal-shape integer arrays."""
        s = self.op_index(symbol)
        arity = self.arities[s]
        if len(args) != arity:
            raise AlgebraError(f"{self.names[s]} takes {arity} arguments, got {len(args)}")
        idx = 0
        for a in args:
            idx = idx * self.size + (np.asarray(a, dtype=np.int64) if not isinstance(a, int) else a)
        out = self.tables[s][idx]
        return int(out) if np.ndim(out) == 0 else out

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteAlgebra):
            return NotImplemented
        return (self.size == other.size and self.signature == other.signature
                and all(np.array_equal(a, b) for a, b in zip(self.tables, other.tables)))

    def __hash__(self) -> int:
        return hash((self.size, self.signature, tuple(t.tobytes() for t in self.tables)))

    def __repr__(self) -> str:
        ops = ", ".join(f"{n}/{a}" for n, a in self.signature.symbols)
        return f"FiniteAlgebra(size={self.size}, ops=[{ops}])"

    # -- derived algebras --------------------------------------------------
    def is_closed(self, subset: Subset) -> bool:
        idx = subset.indices()
        mask = subset.mask()
        for s in range(len(self.tables)):
            sub = self.table_nd(s)[np.ix_(*([idx] * self.arities[s]))]
            if not mask[sub].all():
                return False
        return True

    def subalgebra(self, subset: Subset) -> tuple["FiniteAlgebra", tuple[int, ...]]:
        """Materialize the subalgebra on ``subset``, renumbered ``0..|subset|-1``.

        Returns the algebra and the tuple mapping new indices to old elements.
        """
        if subset.size != self.size:
            raise ValueError("subset of a different universe")
        if not self.is_closed(subset):
            raise AlgebraError(f"{subset!r} is not a subuniverse")
        old = subset.indices()
        renumber = np.full(self.size, -1, dtype=np.int64)
        renumber[old] = np.arange(len(old))
        tables = [renumber[self.table_nd(s)[np.ix_(*([old] * a))]].ravel()
                  for s, a in enumerate(self.arities)]
        return FiniteAlgebra(len(old), self.signature, tables, check=False), tuple(old.tolist())


def validate(algebra: FiniteAlgebra) -> None:
    """Raise unless every table lies in the universe and every operation is idempotent."""
    k = algebra.size
    for (name, arity), table in zip(algebra.signature.symbols, algebra.tables):
        bad = np.flatnonzero((table < 0) | (table >= k))
        if bad.size:
            i = int(bad[0])
            raise TableOutOfRange(name, i, int(table[i]))
        diag = np.arange(k) * int(sum(k ** j for j in range(arity)))
        wrong = np.flatnonzero(table[diag] != np.arange(k))
        if wrong.size:
            a = int(wrong[0])
            raise NotIdempotent(name, (a,) * arity, int(table[diag[a]]))


@dataclass(frozen=True)
class Homomorphism:
    source: FiniteAlgebra
    target: FiniteAlgebra
    map: tuple[int, ...]
    checked: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(int(v) for v in self.map))
        if len(self.map) != self.source.size:
            raise AlgebraError("homomorphism map has the wrong length")
        if any(not 0 <= v < self.target.size for v in self.map):
            raise AlgebraError("homomorphism map leaves the target universe")
        if self.source.signature != self.target.signature:
            raise SignatureMismatch("source and target signatures differ")
        if self.checked:
            bad = self.first_violation()
            if bad is not None:
                raise AlgebraError(f"map does not commute with {bad[0]!r} at {bad[1]}")

    def first_violation(self) -> tuple[str, tuple[int, ...]] | None:
        phi = np.asarray(self.map, dtype=np.int64)
        for s, (name, arity) in enumerate(self.source.signature.symbols):
            args = all_tuples(self.source.size, arity)
            lhs = phi[self.source.tables[s]]
            rhs = self.target.tables[s][phi[args] @ _place_values(self.target.size, arity)]
            wrong = np.flatnonzero(lhs != rhs)
            if wrong.size:
                return name, tuple(args[wrong[0]].tolist())
        return None

    def __call__(self, a: int) -> int:
        return self.map[a]

    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.target.size

    def preimage(self, subset: Subset) -> Subset:
        return Subset.of(self.source.size, (a for a, v in enumerate(self.map) if v in subset))

    def image(self, subset: Subset) -> Subset:
        return Subset.of(self.target.size, (self.map[a] for a in subset))

    @classmethod
    def identity(cls, algebra: FiniteAlgebra) -> "Homomorphism":
        return cls(algebra, algebra, tuple(range(algebra.size)), checked=False)


class Product(NamedTuple):
    """A binary product with its coordinate projections.

    Element ``(a, c)`` is encoded as ``a * second.size + c``.
    """

    algebra: FiniteAlgebra
    first: Homomorphism
    second: Homomorphism

    def pair(self, element: int) -> tuple[int, int]:
        return divmod(element, self.second.target.size)

    def encode(self, a: int, c: int) -> int:
        return a * self.second.target.size + c


def product(a: FiniteAlgebra, b: FiniteAlgebra) -> Product:
    if a.signature != b.signature:
        raise SignatureMismatch("factors have different signatures")
    ka, kb = a.size, b.size
    k = ka * kb
    tables = []
    for s, arity in enumerate(a.arities):
        args = all_tuples(k, arity)
        left, right = args // kb, args % kb
        va = a.tables[s][left @ _place_values(ka, arity)]
        vb = b.tables[s][right @ _place_values(kb, arity)]
        tables.append(va * kb + vb)
    prod = FiniteAlgebra(k, a.signature, tables, check=False)
    first = Homomorphism(prod, a, tuple(e // kb for e in range(k)))
    second = Homomorphism(prod, b, tuple(e % kb for e in range(k)))
    return Product(prod, first, second)


def generate_subuniverse(algebra: FiniteAlgebra, seed: Subset) -> Subset:
    """Smallest subuniverse containing ``seed``."""
    if seed.size != algebra.size:
        raise ValueError("seed is over a different universe")
    if len(seed) == 0:
        raise ValueError("seed must be nonempty")
    mask = seed.mask()
    old = np.zeros(algebra.size, dtype=bool)
    while True:
        members = np.flatnonzero(mask)
        fresh = np.flatnonzero(mask & ~old)
        if fresh.size == 0:
            break
        old = mask.copy()
        grown = mask.copy()
        for s, arity in enumerate(algebra.arities):
            nd = algebra.table_nd(s)
            # semi-naive: some argument must come from the last round
            for p in range(arity):
                axes = [members] * arity
                axes[p] = fresh
                grown[nd[np.ix_(*axes)].ravel()] = True
        mask = grown
    return Subset.from_mask(mask)


def all_subuniverses(algebra: FiniteAlgebra,
                     cap: int = DEFAULT_SUBUNIVERSE_CAP) -> list[Subset]:
    """Every nonempty subuniverse, sorted by ``(size, elements)``."""
    if algebra.size > cap:
        raise SearchCapExceeded(algebra.size, cap)
    key = ("subuniverses",)
    if key in algebra._cache:
        return list(algebra._cache[key])
    k = algebra.size
    found = {Subset.of(k, [a]) for a in range(k)}
    frontier = list(found)
    while frontier:
        nxt = []
        for sub in frontier:
            for a in range(k):
                if a in sub:
                    continue
                bigger = generate_subuniverse(algebra, sub | Subset.of(k, [a]))
                if bigger not in found:
                    found.add(bigger)
                    nxt.append(bigger)
        frontier = nxt
    out = sorted(found, key=Subset.sort_key)
    algebra._cache[key] = tuple(out)
    return out
