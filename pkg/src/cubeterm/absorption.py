"""Absorption checks and the cube term blocker type."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .algebra import FiniteAlgebra, Subset
from .errors import InvalidBlocker


def _var_mask(variables: Iterable[int] | int) -> int:
    if isinstance(variables, int):
        return 1 << variables
    mask = 0
    for v in variables:
        mask |= 1 << v
    return mask


def absorbs(algebra: FiniteAlgebra, symbol, variables, U: Subset,
            within: Subset | None = None) -> bool:
    """True iff the operation lands in ``U`` whenever every listed variable is in ``U``.

    Other arguments range over ``within`` (the whole universe by default).
    Results are memoized on the algebra.
    """
    s = algebra.op_index(symbol)
    vmask = _var_mask(variables)
    within_bits = within.bits if within is not None else (1 << algebra.size) - 1
    key = ("absorbs", s, vmask, U.bits, within_bits)
    cache = algebra._cache
    if key in cache:
        return cache[key]
    if len(U) == 0:
        raise ValueError("absorption is only defined for nonempty subsets")
    u_idx = U.indices()
    w_idx = within.indices() if within is not None else np.arange(algebra.size)
    arity = algebra.arities[s]
    axes = [u_idx if vmask >> j & 1 else w_idx for j in range(arity)]
    values = algebra.table_nd(s)[np.ix_(*axes)]
    result = bool(U.mask()[values].all())
    cache[key] = result
    return result


def is_absorbing(algebra: FiniteAlgebra, symbol, variable: int, U: Subset,
                 within: Subset | None = None) -> bool:
    """Is the operation ``U``-absorbing in the given variable?"""
    return absorbs(algebra, symbol, [variable], U, within)


def absorbing_variables(algebra: FiniteAlgebra, symbol, U: Subset,
                        within: Subset | None = None) -> list[int]:
    s = algebra.op_index(symbol)
    return [i for i in range(algebra.arities[s]) if absorbs(algebra, s, [i], U, within)]


@dataclass(frozen=True)
class Blocker:
    """A pair ``U < B`` of subuniverses where every operation on ``B`` has a ``U``-absorbing variable.

    ``certificate[s]`` names such a variable for operation ``s``.
    """

    U: Subset
    B: Subset
    certificate: tuple[int, ...]

    def to_dict(self, algebra: FiniteAlgebra | None = None) -> dict:
        out = {"U": list(self.U), "B": list(self.B)}
        if algebra is not None:
            out["absorbing_variable"] = {
                name: v for name, v in zip(algebra.names, self.certificate)}
        else:
            out["absorbing_variable"] = list(self.certificate)
        return out


def blocker_certificate(algebra: FiniteAlgebra, U: Subset, B: Subset) -> tuple[int, ...] | None:
    """Least absorbing variable per operation restricted to ``B``, or None if one is missing."""
    cert = []
    for s in range(len(algebra.arities)):
        for i in range(algebra.arities[s]):
            if absorbs(algebra, s, [i], U, B):
                cert.append(i)
                break
        else:
            return None
    return tuple(cert)


def verify_blocker(algebra: FiniteAlgebra, blocker: Blocker) -> None:
    """Raise :class:`InvalidBlocker` unless every blocker invariant holds."""
    U, B = blocker.U, blocker.B
    if U.size != algebra.size or B.size != algebra.size:
        raise InvalidBlocker("blocker sets are over a different universe")
    if len(U) == 0 or not U.issubset(B) or U == B:
        raise InvalidBlocker(f"need nonempty U properly inside B, got U={U!r}, B={B!r}")
    if not algebra.is_closed(U) or not algebra.is_closed(B):
        raise InvalidBlocker("U and B must be subuniverses")
    if len(blocker.certificate) != len(algebra.arities):
        raise InvalidBlocker("certificate needs one variable per operation")
    for s, v in enumerate(blocker.certificate):
        if not 0 <= v < algebra.arities[s] or not absorbs(algebra, s, [v], U, B):
            raise InvalidBlocker(
                f"{algebra.names[s]} restricted to B is not U-absorbing in variable {v}")


def make_blocker(algebra: FiniteAlgebra, U: Subset, B: Subset) -> Blocker:
    cert = blocker_certificate(algebra, U, B)
    if cert is None:
        raise InvalidBlocker(f"({U!r}, {B!r}) lacks an absorbing variable for some operation")
    blocker = Blocker(U, B, cert)
    verify_blocker(algebra, blocker)
    return blocker
