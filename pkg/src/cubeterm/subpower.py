"""Generated subalgebras of finite powers ``A^N`` with term witnesses.

By default closure is breadth-first: layer 0 is the (deduplicated) generator
list and layer ``L+1`` holds every new tuple obtained by one operation
application whose arguments come from layers ``<= L`` with at least one from
layer ``L``. Each element remembers the application that first produced it,
so the element table doubles as a hash-consed term DAG and every
breadth-first witness has minimal composition depth. A target-guided order
expands the elements nearest the target first; it explores the same
subalgebra but usually reaches a far-away target with much less work.

Candidates inside a layer are enumerated in a fixed order (symbol, position
of the first newest-layer argument, flat argument index), so results do not
depend on how the work is split across threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

import numpy as np

from .algebra import FiniteAlgebra, Homomorphism, all_tuples
from .errors import ArityMismatch, CapExceeded, LengthMismatch, WorkCapExceeded

DEFAULT_CAP = 10_000_000
_CHUNK_CELLS = 1 << 22  # int64 cells materialized per chunk


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("CUBETERM_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Term witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    generator: int


@dataclass(frozen=True)
class Apply:
    symbol: int
    children: tuple[int, ...]


Node = Union[Leaf, Apply]


@dataclass(frozen=True)
class TermWitness:
    """A term as a DAG; children always precede their parents in ``nodes``.

    ``arity`` is the number of variables (generators of the closure the
    term was extracted from); leaf ``i`` reads argument ``i``.
    """

    nodes: tuple[Node, ...]
    root: int
    arity: int
    symbols: tuple[str, ...]
    symbol_arities: tuple[int, ...]
    variables: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.variables:
            object.__setattr__(self, "variables", tuple(f"x{i}" for i in range(self.arity)))
        if len(self.variables) != self.arity:
            raise ValueError("one variable name per generator is required")
        if not 0 <= self.root < len(self.nodes):
            raise ValueError("root outside the node list")
        for i, node in enumerate(self.nodes):
            if isinstance(node, Leaf):
                if not 0 <= node.generator < self.arity:
                    raise ValueError(f"node {i}: leaf for missing generator {node.generator}")
            else:
                if len(node.children) != self.symbol_arities[node.symbol]:
                    raise ValueError(f"node {i}: {self.symbols[node.symbol]} applied to "
                                     f"{len(node.children)} arguments")
                if any(not 0 <= c < i for c in node.children):
                    raise ValueError(f"node {i}: children must precede their parent")

    @classmethod
    def leaf(cls, generator: int, arity: int, symbols=(), symbol_arities=(), variables=()):
        return cls((Leaf(generator),), 0, arity, tuple(symbols), tuple(symbol_arities),
                   tuple(variables))

    def depth(self) -> int:
        d: list[int] = []
        for node in self.nodes:
            d.append(0 if isinstance(node, Leaf) else 1 + max(d[c] for c in node.children))
        return d[self.root]

    def leaves(self) -> set[int]:
        return {n.generator for n in self.nodes if isinstance(n, Leaf)}

    def to_text(self) -> str:
        memo: dict[int, str] = {}
        for i, node in enumerate(self.nodes):
            if isinstance(node, Leaf):
                memo[i] = self.variables[node.generator]
            else:
                args = ",".join(memo[c] for c in node.children)
                memo[i] = f"{self.symbols[node.symbol]}({args})"
        return memo[self.root]

    def to_dag(self) -> list[dict]:
        out = []
        for i, node in enumerate(self.nodes):
            if isinstance(node, Leaf):
                out.append({"id": i, "leaf": self.variables[node.generator]})
            else:
                out.append({"id": i, "op": self.symbols[node.symbol],
                            "args": list(node.children)})
        return out

    def __str__(self) -> str:
        return self.to_text()


def evaluate_witness(witness: TermWitness, algebra: FiniteAlgebra, arguments: Sequence):
    """Evaluate bottom-up. Arguments may be ints or equal-shape integer arrays."""
    if len(arguments) != witness.arity:
        raise ArityMismatch(f"term has {witness.arity} variables, got {len(arguments)} arguments")
    values: list = []
    for node in witness.nodes:
        if isinstance(node, Leaf):
            values.append(arguments[node.generator])
        else:
            values.append(algebra.apply(node.symbol, *(values[c] for c in node.children)))
    return values[witness.root]


# ---------------------------------------------------------------------------
# Tuple keys
# ---------------------------------------------------------------------------

class _KeyCodec:
    """Packs rows into sortable keys: one int64 when ``k**N`` fits, raw bytes otherwise."""

    def __init__(self, k: int, length: int, dtype):
        self.length = length
        self.dtype = np.dtype(dtype)
        self.packed = length == 0 or length * math.log2(max(k, 2)) < 62.5
        if self.packed:
            self.powers = (np.int64(k) ** np.arange(length - 1, -1, -1, dtype=np.int64)
                           if length else np.zeros(0, dtype=np.int64))
        else:
            self.void = np.dtype((np.void, length * self.dtype.itemsize))

    def __call__(self, rows: np.ndarray) -> np.ndarray:
        if self.packed:
            if self.length == 0:
                return np.zeros(len(rows), dtype=np.int64)
            return rows.astype(np.int64) @ self.powers
        rows = np.ascontiguousarray(rows, dtype=self.dtype)
        return rows.view(self.void).ravel()


class _SortedIndex:
    def __init__(self, keys: np.ndarray, ids: np.ndarray):
        order = np.argsort(keys, kind="stable")
        self.keys = keys[order]
        self.ids = ids[order]

    def lookup(self, keys: np.ndarray) -> np.ndarray:
        """Element id for each key, or -1."""
        if len(self.keys) == 0:
            return np.full(len(keys), -1, dtype=np.int64)
        pos = np.searchsorted(self.keys, keys)
        pos_c = np.minimum(pos, len(self.keys) - 1)
        hit = self.keys[pos_c] == keys
        return np.where(hit, self.ids[pos_c], -1)

    def merged(self, keys: np.ndarray, ids: np.ndarray) -> "_SortedIndex":
        return _SortedIndex(np.concatenate([self.keys, keys]), np.concatenate([self.ids, ids]))


# ---------------------------------------------------------------------------
# Closure
# ---------------------------------------------------------------------------

@dataclass
class ClosureResult:
    """A subalgebra of ``A^N`` together with one witness term per element."""

    algebra: FiniteAlgebra
    generators: np.ndarray          # (m, N) as supplied
    elements: np.ndarray            # (E, N) in discovery order
    layer_starts: tuple[int, ...]   # element id where each round's output starts
    variables: tuple[str, ...]
    _op: np.ndarray = field(repr=False)
    _args: np.ndarray = field(repr=False)
    _gen: np.ndarray = field(repr=False)
    _index: _SortedIndex = field(repr=False)
    _codec: _KeyCodec = field(repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return (tuple(row) for row in self.elements.tolist())

    def __contains__(self, item) -> bool:
        return self.index_of(item) is not None

    @property
    def length(self) -> int:
        return self.elements.shape[1]

    def index_of(self, item) -> int | None:
        row = np.asarray(item, dtype=self.elements.dtype).reshape(1, -1)
        if row.shape[1] != self.length:
            return None
        i = int(self._index.lookup(self._codec(row))[0])
        return None if i < 0 else i

    def element_set(self) -> set[tuple[int, ...]]:
        return set(self)

    def witness(self, element: int) -> TermWitness:
        return _extract(self.algebra, self._op, self._args, self._gen, element,
                        len(self.generators), self.variables)

    def layer_of(self, element: int) -> int:
        return int(np.searchsorted(self.layer_starts, element, side="right")) - 1

    def as_algebra(self) -> FiniteAlgebra:
        """The closure as an algebra in its own right; element ``i`` is ``elements[i]``."""
        alg = self.algebra
        E = len(self)
        k = alg.size
        tables = []
        for s, arity in enumerate(alg.arities):
            args = all_tuples(E, arity) if E ** arity <= 1 << 24 else None
            if args is None:
                raise CapExceeded(1 << 24)
            out = np.empty(len(args), dtype=np.int64)
            step = max(1, _CHUNK_CELLS // max(1, self.length))
            for c0 in range(0, len(args), step):
                part = args[c0:c0 + step]
                idx = np.zeros((len(part), self.length), dtype=np.int64)
                for j in range(arity):
                    idx = idx * k + self.elements[part[:, j]]
                ids = self._index.lookup(self._codec(alg.tables[s][idx]))
                if (ids < 0).any():
                    raise AssertionError("closure is not closed under " + alg.names[s])
                out[c0:c0 + len(part)] = ids
            tables.append(out)
        return FiniteAlgebra(E, alg.signature, tables)


@dataclass(frozen=True)
class FoundTarget:
    element: tuple[int, ...]
    witness: TermWitness
    layer: int
    explored: int  # elements discovered before the target


def _extract(algebra, op, args, gen, root, arity, variables) -> TermWitness:
    seen = {int(root)}
    stack = [int(root)]
    while stack:
        i = stack.pop()
        if op[i] >= 0:
            for c in args[i, :algebra.arities[op[i]]]:
                c = int(c)
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
    ordered = sorted(seen)  # children always have smaller ids
    pos = {e: n for n, e in enumerate(ordered)}
    nodes: list[Node] = []
    for e in ordered:
        if op[e] < 0:
            nodes.append(Leaf(int(gen[e])))
        else:
            s = int(op[e])
            nodes.append(Apply(s, tuple(pos[int(c)] for c in args[e, :algebra.arities[s]])))
    return TermWitness(tuple(nodes), pos[int(root)], arity, algebra.names, algebra.arities,
                       tuple(variables))


def _storage_dtype(k: int):
    return np.uint8 if k <= 256 else np.uint16 if k <= 65536 else np.int64


def close(algebra: FiniteAlgebra, generators, target=None, cap: int = DEFAULT_CAP,
          threads: int | None = None, variables: Sequence[str] | None = None,
          max_work: int | None = None, order: str = "bfs",
          batch: int = 16) -> ClosureResult | FoundTarget:
    """Closure of ``generators`` in ``algebra**N``.

    Returns :class:`FoundTarget` as soon as ``target`` is generated, otherwise
    the full :class:`ClosureResult`. Raises :class:`CapExceeded` when more than
    ``cap`` elements would be needed, and :class:`WorkCapExceeded` before
    starting a round that would push the number of table lookups (argument
    tuples times ``N``) past ``max_work``.

    ``order="bfs"`` expands whole layers, so witnesses have minimal depth.
    ``order="guided"`` expands, each round, the unexpanded elements closest to
    ``target`` in Hamming distance (ties by discovery order), at least
    ``batch`` of them and at least an eighth of those already expanded. Both
    orders are exhaustive: if the target is never produced the result is the
    whole subalgebra.
    """
    if cap <= 0:
        raise ValueError("cap must be positive")
    if order not in ("bfs", "guided"):
        raise ValueError(f"unknown order {order!r}")
    k = algebra.size
    dtype = _storage_dtype(k)
    try:
        gens = np.array(generators, dtype=np.int64)
    except ValueError as exc:
        raise LengthMismatch("generators must all have the same length") from exc
    if gens.ndim == 1 and len(gens) == 0:
        raise ValueError("at least one generator is required")
    if gens.ndim != 2:
        raise LengthMismatch("generators must all have the same length")
    m, N = gens.shape
    if m == 0:
        raise ValueError("at least one generator is required")
    if ((gens < 0) | (gens >= k)).any():
        raise ValueError("generator entry outside the universe")
    if variables is None:
        variables = tuple(f"x{i}" for i in range(m))
    if len(variables) != m:
        raise ValueError("one variable name per generator is required")
    if order == "guided" and target is None:
        raise ValueError("guided closure needs a target")
    threads = default_threads() if threads is None else max(1, int(threads))
    codec = _KeyCodec(k, N, dtype)
    gens = gens.astype(dtype)

    target_key = target_row = None
    if target is not None:
        t = np.asarray(target, dtype=np.int64).reshape(1, -1)
        if t.shape[1] != N:
            raise LengthMismatch(f"target has length {t.shape[1]}, generators have {N}")
        target_row = t.astype(dtype)
        target_key = codec(target_row)[0]

    gkeys = codec(gens)
    _, first = np.unique(gkeys, return_index=True)
    first = np.sort(first)
    elements = gens[first]
    gen_of = first.astype(np.int64)
    maxar = max(algebra.arities)
    op = np.full(len(first), -1, dtype=np.int64)
    args = np.full((len(first), maxar), -1, dtype=np.int64)
    index = _SortedIndex(gkeys[first], np.arange(len(first), dtype=np.int64))
    dist = (elements != target_row).sum(axis=1) if order == "guided" else None

    def found(element_id, layer):
        w = _extract(algebra, op, args, gen_of, element_id, m, variables)
        return FoundTarget(tuple(int(v) for v in elements[element_id]), w, layer, int(element_id))

    if target_key is not None:
        hit = int(index.lookup(np.array([target_key]))[0])
        if hit >= 0:
            return found(hit, 0)
    if len(elements) > cap:
        raise CapExceeded(cap)

    layer_starts = [0]
    expanded = np.zeros(0, dtype=np.int64)  # ids in expansion order
    is_expanded = np.zeros(len(elements), dtype=bool)
    work = 0
    step = max(1, _CHUNK_CELLS // max(1, N))
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        while not is_expanded.all():
            fresh_ids = np.flatnonzero(~is_expanded)
            if order == "guided":
                size = max(batch, len(expanded) // 8)
                rank = np.lexsort((fresh_ids, dist[fresh_ids]))
                fresh_ids = np.sort(fresh_ids[rank[:size]])
            combined = np.concatenate([expanded, fresh_ids])
            lo, hi = len(expanded), len(combined)
            blocks = [(s, p, (lo,) * p + (hi - lo,) + (hi,) * (arity - p - 1))
                      for s, arity in enumerate(algebra.arities) for p in range(arity)]
            work += sum(math.prod(shape) for _, _, shape in blocks) * N
            if max_work is not None and work > max_work:
                raise WorkCapExceeded(work, max_work)
            tasks = [(s, p, shape, c0, min(math.prod(shape), c0 + step))
                     for s, p, shape in blocks for c0 in range(0, math.prod(shape), step)]

            def run(task, elements=elements, index=index, lo=lo, combined=combined):
                s, p, shape, c0, c1 = task
                multi = np.unravel_index(np.arange(c0, c1, dtype=np.int64), shape)
                a = np.stack(multi, axis=1).astype(np.int64)
                a[:, p] += lo
                a = combined[a]
                idx = np.zeros((c1 - c0, N), dtype=np.int64)
                for j in range(a.shape[1]):
                    idx = idx * k + elements[a[:, j]]
                rows = algebra.tables[s][idx].astype(dtype)
                keys = codec(rows)
                fresh = index.lookup(keys) < 0
                if not fresh.any():
                    return None
                pos = np.flatnonzero(fresh)
                _, firsts = np.unique(keys[pos], return_index=True)
                pos = pos[np.sort(firsts)]
                return s, rows[pos], keys[pos], a[pos]

            pending: list[tuple] = []
            pending_count = 0
            group_size = max(1, threads * 2)
            for b0 in range(0, len(tasks), group_size):
                group = tasks[b0:b0 + group_size]
                results = pool.map(run, group) if pool else map(run, group)
                for res in results:
                    if res is None:
                        continue
                    s, rows, keys, a = res
                    if target_key is not None:
                        hit = np.flatnonzero(keys == target_key)
                        if hit.size:
                            # earlier pending candidates stay unnumbered; the
                            # witness only needs ids of expanded elements
                            h = int(hit[0])
                            e = len(elements)
                            elements = np.concatenate([elements, rows[h:h + 1]])
                            op = np.concatenate([op, [s]])
                            row_args = np.full((1, maxar), -1, dtype=np.int64)
                            row_args[0, :a.shape[1]] = a[h]
                            args = np.concatenate([args, row_args])
                            gen_of = np.concatenate([gen_of, [-1]])
                            return found(e, len(layer_starts))
                    pending.append((s, rows, keys, a))
                    pending_count += len(keys)
                if pending_count + len(elements) > cap:
                    pending = [_dedupe(pending, maxar)]
                    pending_count = len(pending[0][2])
                    if pending_count + len(elements) > cap:
                        raise CapExceeded(cap)
            expanded = combined
            is_expanded[fresh_ids] = True
            if not pending:
                continue
            s_arr, rows, keys, a = _dedupe(pending, maxar)
            n_new, E = len(keys), len(elements)
            if E + n_new > cap:
                raise CapExceeded(cap)
            ids = np.arange(E, E + n_new, dtype=np.int64)
            elements = np.concatenate([elements, rows])
            op = np.concatenate([op, s_arr])
            args = np.concatenate([args, a])
            gen_of = np.concatenate([gen_of, np.full(n_new, -1, dtype=np.int64)])
            is_expanded = np.concatenate([is_expanded, np.zeros(n_new, dtype=bool)])
            if dist is not None:
                dist = np.concatenate([dist, (rows != target_row).sum(axis=1)])
            index = index.merged(keys, ids)
            layer_starts.append(E)
    finally:
        if pool:
            pool.shutdown()

    return ClosureResult(algebra, gens, elements, tuple(layer_starts), tuple(variables),
                         op, args, gen_of, index, codec)


def _dedupe(pending, maxar):
    """Concatenate candidate batches keeping the first occurrence of each key."""
    if len(pending) == 1 and len(pending[0]) == 4 and np.ndim(pending[0][0]) == 1:
        return pending[0]
    ops, rows, keys, args = [], [], [], []
    for s, r, kk, a in pending:
        n = len(kk)
        ops.append(s if np.ndim(s) == 1 else np.full(n, s, dtype=np.int64))
        rows.append(r)
        keys.append(kk)
        padded = np.full((n, maxar), -1, dtype=np.int64)
        padded[:, :a.shape[1]] = a
        args.append(padded)
    ops_a = np.concatenate(ops)
    rows_a = np.concatenate(rows)
    keys_a = np.concatenate(keys)
    args_a = np.concatenate(args)
    _, first = np.unique(keys_a, return_index=True)
    first = np.sort(first)
    return ops_a[first], rows_a[first], keys_a[first], args_a[first]


# ---------------------------------------------------------------------------
# Free algebra on two generators
# ---------------------------------------------------------------------------

def projection_generators(k: int) -> np.ndarray:
    """``x`` and ``y`` as tuples indexed by ``(a, b)`` in ``A^2`` (``a`` major)."""
    pairs = all_tuples(k, 2)
    return np.stack([pairs[:, 0], pairs[:, 1]])


def free_algebra_on_two(algebra: FiniteAlgebra, cap: int = DEFAULT_CAP,
                        threads: int | None = None) -> ClosureResult:
    """The binary term operations of ``algebra`` as a subalgebra of ``A^(A^2)``."""
    res = close(algebra, projection_generators(algebra.size), cap=cap, threads=threads,
                variables=("x", "y"))
    assert isinstance(res, ClosureResult)
    return res


def evaluation_map(free: ClosureResult, free_algebra: FiniteAlgebra,
                   algebra: FiniteAlgebra, x_to: int, y_to: int) -> Homomorphism:
    """The homomorphism sending ``x -> x_to`` and ``y -> y_to``.

    A binary term operation is sent to its value at ``(x_to, y_to)``.
    """
    coord = x_to * algebra.size + y_to
    return Homomorphism(free_algebra, algebra, tuple(int(v) for v in free.elements[:, coord]))
