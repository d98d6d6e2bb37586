"""Cube term blocker search, transfers along H/S/P, and semilattice sections."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .absorption import Blocker, absorbs, blocker_certificate, make_blocker, verify_blocker
from .algebra import (
    DEFAULT_SUBUNIVERSE_CAP,
    FiniteAlgebra,
    Homomorphism,
    Product,
    Subset,
    all_subuniverses,
    all_tuples,
)
from .errors import AlgebraError, InvalidBlocker, NotFullyAbsorbing

__all__ = [
    "Blocker", "find_blocker", "blocker_preimage", "blocker_of_subalgebra",
    "blocker_of_factor", "FactorBlocker", "semilattice_section", "Section",
    "verify_blocker",
]


def find_blocker(algebra: FiniteAlgebra, cap: int = DEFAULT_SUBUNIVERSE_CAP) -> Blocker | None:
    """First blocker in ``(|B|, |U|, elements)`` order, or None when there is none."""
    subs = all_subuniverses(algebra, cap)
    for B in subs:
        if len(B) < 2:
            continue
        for U in subs:
            if len(U) >= len(B):
                break
            if not U.issubset(B):
                continue
            cert = blocker_certificate(algebra, U, B)
            if cert is not None:
                blocker = Blocker(U, B, cert)
                verify_blocker(algebra, blocker)
                return blocker
    return None


def blocker_preimage(hom: Homomorphism, blocker: Blocker) -> Blocker:
    """Pull a blocker of the target back along a surjective homomorphism."""
    if not hom.is_surjective():
        raise AlgebraError("blocker preimages need a surjective homomorphism")
    verify_blocker(hom.target, blocker)
    return make_blocker(hom.source, hom.preimage(blocker.U), hom.preimage(blocker.B))


def blocker_of_subalgebra(embedding: Homomorphism, blocker: Blocker) -> Blocker:
    """A blocker of a subalgebra is a blocker of the algebra it embeds into."""
    if len(set(embedding.map)) != len(embedding.map):
        raise AlgebraError("the map is not an embedding")
    verify_blocker(embedding.source, blocker)
    return make_blocker(embedding.target, embedding.image(blocker.U), embedding.image(blocker.B))


@dataclass(frozen=True)
class FactorBlocker:
    factor: int  # 0 for the first factor, 1 for the second
    blocker: Blocker
    case: int  # 1: first projections differ; 2: restricted to a fibre {a} x C


def blocker_of_factor(prod: Product, blocker: Blocker) -> FactorBlocker:
    """Find a blocker of one factor from a blocker of the product.

    Pick the least ``(a, c)`` in ``B - U``. If the first projections of ``U``
    and ``B`` differ they form a blocker of the first factor; otherwise
    intersect with the fibre ``{a} x C`` and project to the second factor.
    """
    alg = prod.algebra
    verify_blocker(alg, blocker)
    U, B = blocker.U, blocker.B
    a, c = prod.pair(min(B - U))
    pi_a, pi_c = prod.first, prod.second
    if pi_a.image(U) != pi_a.image(B):
        return FactorBlocker(0, make_blocker(pi_a.target, pi_a.image(U), pi_a.image(B)), 1)
    V = Subset.of(alg.size, (prod.encode(a, z) for z in range(pi_c.target.size)))
    UV, BV = U & V, B & V
    # some (a, d) lies in U because a is in pi_a(U) = pi_a(B)
    assert len(UV) and UV != BV
    return FactorBlocker(1, make_blocker(pi_c.target, pi_c.image(UV), pi_c.image(BV)), 2)


@dataclass(frozen=True)
class Section:
    """A 2-element semilattice obtained as ``S / theta`` for ``S = U + {t}``.

    ``to_quotient`` maps each element of ``S`` to 0 (the ``U`` class) or 1 (``t``).
    """

    algebra: FiniteAlgebra
    subuniverse: Subset
    top: int
    to_quotient: dict[int, int]


def _semilattice_table(arity: int) -> np.ndarray:
    out = np.zeros(2 ** arity, dtype=np.int64)
    out[-1] = 1
    return out


def semilattice_section(algebra: FiniteAlgebra, blocker: Blocker) -> Section:
    """Collapse ``U`` inside ``U + {t}`` (least ``t`` in ``B - U``) to get a 2-element semilattice.

    Requires every operation restricted to ``B`` to be ``U``-absorbing in every variable.
    """
    verify_blocker(algebra, blocker)
    U, B = blocker.U, blocker.B
    for s, name in enumerate(algebra.names):
        for i in range(algebra.arities[s]):
            if not absorbs(algebra, s, [i], U, B):
                raise NotFullyAbsorbing(name, i)
    t = min(B - U)
    S = U | Subset.of(algebra.size, [t])
    if not algebra.is_closed(S):
        raise AlgebraError(f"{S!r} is not a subuniverse")
    s_elems = S.indices()
    cls = np.zeros(algebra.size, dtype=np.int64)
    cls[t] = 1
    tables = []
    for s, n in enumerate(algebra.arities):
        # every element of S^n must land in the class predicted by the quotient table
        values = algebra.table_nd(s)[np.ix_(*([s_elems] * n))].ravel()
        classes = all_tuples(len(s_elems), n)
        arg_cls = cls[s_elems][classes]
        quotient_index = arg_cls @ (2 ** np.arange(n - 1, -1, -1))
        table = np.full(2 ** n, -1, dtype=np.int64)
        got = cls[values]
        for qi, v in zip(quotient_index.tolist(), got.tolist()):
            if table[qi] == -1:
                table[qi] = v
            elif table[qi] != v:
                raise AlgebraError("collapsing U is not compatible with the operations")
        if not np.array_equal(table, _semilattice_table(n)):
            raise InvalidBlocker(f"{algebra.names[s]} does not induce a semilattice operation")
        tables.append(table)
    quotient = FiniteAlgebra(2, algebra.signature, tables)
    return Section(quotient, S, t, {int(e): int(cls[e]) for e in s_elems})
