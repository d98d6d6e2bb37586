
import numpy as np
import pytest
from hypothesis import given

from cubeterm.absorption import Blocker, make_blocker, verify_blocker
from cubeterm.algebra import FiniteAlgebra, Homomorphism, Subset, all_tuples, product
from cubeterm.blockers import (
    blocker_of_factor,
    blocker_of_subalgebra,
    blocker_preimage,
    find_blocker,
    semilattice_section,
)
from cubeterm.constructions import (
    chain_semilattice,
    example_51,
    majority,
    meet_semilattice,
    random_cyclic_algebra,
    two_element_semilattice,
    z3_groupoid,
)
from cubeterm.crosses import Cross, is_compatible_cross
from cubeterm.errors import AlgebraError, InvalidBlocker, NotFullyAbsorbing

from conftest import idempotent_algebras


def S(size, *elems):
    return Subset.of(size, elems)


class TestFindBlocker:
    def test_meet(self):
        b = find_blocker(meet_semilattice())
        assert (b.U, b.B) == (S(2, 0), S(2, 0, 1))
        assert b.to_dict(meet_semilattice()) == {"U": [0], "B": [0, 1],
                                                 "absorbing_variable": {"meet": 0}}

    @pytest.mark.parametrize("alg", [majority(), z3_groupoid(), example_51((2, 2)).algebra])
    def test_none(self, alg):
        assert find_blocker(alg) is None

    @given(idempotent_algebras(max_size=4))
    def test_found_blockers_verify_and_give_crosses(self, alg):
        b = find_blocker(alg)
        if b is None:
            return
        verify_blocker(alg, b)
        sub, old = alg.subalgebra(b.B)
        U = Subset.of(sub.size, (old.index(e) for e in b.U))
        for d in range(1, 6):
            assert is_compatible_cross(sub, Cross.symmetric(U, d))

    def test_verify_rejects(self):
        m = majority()
        with pytest.raises(InvalidBlocker):
            verify_blocker(m, Blocker(S(2, 1), S(2, 0, 1), (0,)))
        with pytest.raises(InvalidBlocker):
            make_blocker(m, S(2, 0, 1), S(2, 0, 1))


class TestPreimage:
    def test_identity(self):
        m = meet_semilattice()
        b = find_blocker(m)
        assert blocker_preimage(Homomorphism.identity(m), b) == b

    def test_quotient_of_square(self):
        m = meet_semilattice()
        p = product(m, m)
        q = Homomorphism(p.algebra, m, tuple(min(p.pair(e)) for e in range(4)))
        b = blocker_preimage(q, find_blocker(m))
        assert b.U == Subset.of(4, [p.encode(0, 0), p.encode(0, 1), p.encode(1, 0)])
        assert b.B == Subset.full(4)

    def test_projection_gives_cylinder(self):
        m = meet_semilattice()
        p = product(m, FiniteAlgebra(2, m.signature, [[0, 1, 0, 1]]))  # second projection
        b = blocker_preimage(p.first, find_blocker(m))
        assert b.U == Subset.of(4, [p.encode(0, 0), p.encode(0, 1)])

    def test_needs_surjection(self):
        m = meet_semilattice()
        with pytest.raises(AlgebraError):
            blocker_preimage(Homomorphism(m, m, (0, 0)), find_blocker(m))


class TestFactor:
    def setup_method(self):
        self.m = meet_semilattice()
        self.p = product(self.m, self.m)

    def enc(self, *pairs):
        return Subset.of(4, [self.p.encode(a, c) for a, c in pairs])

    def test_case_one(self):
        b = make_blocker(self.p.algebra, self.enc((0, 0), (0, 1)), Subset.full(4))
        fb = blocker_of_factor(self.p, b)
        assert (fb.factor, fb.case) == (0, 1)
        assert (fb.blocker.U, fb.blocker.B) == (S(2, 0), S(2, 0, 1))

    def test_case_two(self):
        b = make_blocker(self.p.algebra, self.enc((0, 0), (1, 0)), Subset.full(4))
        fb = blocker_of_factor(self.p, b)
        assert (fb.factor, fb.case) == (1, 2)
        assert (fb.blocker.U, fb.blocker.B) == (S(2, 0), S(2, 0, 1))

    def test_diagonal(self):
        b = make_blocker(self.p.algebra, self.enc((0, 0)), Subset.full(4))
        fb = blocker_of_factor(self.p, b)
        assert (fb.blocker.U, fb.blocker.B) == (S(2, 0), S(2, 0, 1))


def test_subalgebra_transfer():
    chain = chain_semilattice(3)
    sub, old = chain.subalgebra(S(3, 1, 2))
    emb = Homomorphism(sub, chain, old)
    b = blocker_of_subalgebra(emb, find_blocker(sub))
    assert (b.U, b.B) == (S(3, 1), S(3, 1, 2))


class TestSections:
    def test_meet_is_its_own_section(self):
        m = meet_semilattice()
        sec = semilattice_section(m, find_blocker(m))
        assert sec.algebra == m and sec.top == 1

    def test_chain(self):
        chain = chain_semilattice(3)
        sec = semilattice_section(chain, make_blocker(chain, S(3, 0, 1), S(3, 0, 1, 2)))
        assert sec.top == 2
        assert sec.to_quotient == {0: 0, 1: 0, 2: 1}
        assert list(sec.algebra.tables[0]) == [0, 0, 0, 1]

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_two_element_semilattices(self, d):
        w = two_element_semilattice(d)
        sec = semilattice_section(w, find_blocker(w))
        expected = (all_tuples(2, d).sum(axis=1) == d).astype(int)
        assert list(sec.algebra.tables[0]) == list(expected)

    def test_requires_full_absorption(self):
        # first projection: {0} absorbs variable 0 only
        proj = FiniteAlgebra(2, meet_semilattice().signature, [[0, 0, 1, 1]])
        with pytest.raises(NotFullyAbsorbing):
            semilattice_section(proj, find_blocker(proj))

    def test_cyclic_samples(self, rng):
        done = 0
        while done < 5:
            alg = random_cyclic_algebra(rng, 3, int(rng.integers(2, 4)))
            b = find_blocker(alg)
            if b is None:
                continue
            sec = semilattice_section(alg, b)
            n = alg.arities[0]
            expected = (all_tuples(2, n).sum(axis=1) == n).astype(int)
            assert np.array_equal(sec.algebra.tables[0], expected)
            done += 1
