import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubeterm.algebra import (
    FiniteAlgebra,
    Homomorphism,
    Signature,
    Subset,
    all_subuniverses,
    generate_subuniverse,
    product,
    signature_stats,
    validate,
)
from cubeterm.constructions import example_51, meet_semilattice, z3_groupoid
from cubeterm.errors import (
    AlgebraError,
    NotIdempotent,
    SearchCapExceeded,
    SignatureMismatch,
    TableOutOfRange,
)

from conftest import brute_subuniverses, idempotent_algebras


def subsets(alg, *groups):
    return [Subset.of(alg.size, g) for g in groups]


class TestValidation:
    def test_meet_is_valid(self):
        validate(meet_semilattice())

    def test_diagonal_violation(self):
        with pytest.raises(NotIdempotent) as info:
            FiniteAlgebra(2, Signature.of(("f", 2)), [[1, 0, 0, 1]])
        assert info.value.witness == (0, 0)
        assert info.value.value == 1

    def test_z3_is_idempotent(self):
        validate(z3_groupoid())

    def test_out_of_range(self):
        with pytest.raises(TableOutOfRange):
            FiniteAlgebra(2, Signature.of(("f", 2)), [[0, 2, 0, 1]])

    def test_wrong_table_length(self):
        with pytest.raises(AlgebraError):
            FiniteAlgebra(2, Signature.of(("f", 2)), [[0, 0, 1]])

    def test_signature_rules(self):
        with pytest.raises(AlgebraError):
            Signature.of(("f", 1))
        with pytest.raises(AlgebraError):
            Signature.of(("f", 2), ("f", 3))
        with pytest.raises(AlgebraError):
            Signature.of(("", 2))


class TestSubset:
    def test_popcount_and_iteration(self):
        S = Subset.of(5, [4, 1, 1])
        assert len(S) == 2 and list(S) == [1, 4]
        assert repr(S) == "{1,4}"

    def test_set_algebra(self):
        A, B = Subset.of(4, [0, 1]), Subset.of(4, [1, 2])
        assert list(A | B) == [0, 1, 2]
        assert list(A & B) == [1]
        assert list(A - B) == [0]
        assert list(A.complement()) == [2, 3]
        assert (A & B).issubset(A)
        assert A.is_proper() and not Subset.full(4).is_proper()

    def test_out_of_universe(self):
        with pytest.raises(ValueError):
            Subset.of(3, [3])


class TestSubuniverses:
    def test_singletons_are_closed(self):
        alg = meet_semilattice()
        assert generate_subuniverse(alg, Subset.of(2, [1])) == Subset.of(2, [1])

    def test_z3_pair_generates_everything(self):
        alg = z3_groupoid()
        assert generate_subuniverse(alg, Subset.of(3, [0, 1])) == Subset.full(3)

    def test_example_51_singleton(self):
        alg = example_51((2, 2)).algebra
        assert generate_subuniverse(alg, Subset.of(4, [3])) == Subset.of(4, [3])

    def test_meet_list(self):
        alg = meet_semilattice()
        assert all_subuniverses(alg) == subsets(alg, [0], [1], [0, 1])

    def test_z3_list(self):
        alg = z3_groupoid()
        assert all_subuniverses(alg) == subsets(alg, [0], [1], [2], [0, 1, 2])

    def test_trivial_algebra(self):
        alg = FiniteAlgebra(1, Signature.of(("f", 2)), [[0]])
        assert all_subuniverses(alg) == [Subset.full(1)]

    def test_cap(self):
        alg = FiniteAlgebra(13, Signature.of(("f", 2)),
                            [[a for a in range(13) for _ in range(13)]])
        with pytest.raises(SearchCapExceeded):
            all_subuniverses(alg)

    @given(idempotent_algebras(max_size=5), st.data())
    def test_closure_operator(self, alg, data):
        bits = data.draw(st.integers(1, (1 << alg.size) - 1))
        more = data.draw(st.integers(0, (1 << alg.size) - 1))
        S = Subset(alg.size, bits)
        T = Subset(alg.size, bits | more)
        cS = generate_subuniverse(alg, S)
        assert S.issubset(cS)                                   # extensive
        assert cS.issubset(generate_subuniverse(alg, T))        # monotone
        assert generate_subuniverse(alg, cS) == cS              # idempotent
        assert alg.is_closed(cS)

    @given(idempotent_algebras(max_size=5))
    def test_enumeration_matches_brute_force(self, alg):
        assert all_subuniverses(alg) == brute_subuniverses(alg)


class TestProducts:
    def test_meet_squared(self):
        m = meet_semilattice()
        p = product(m, m)
        assert p.algebra.size == 4
        for a in range(4):
            for b in range(4):
                (a1, a2), (b1, b2) = p.pair(a), p.pair(b)
                assert p.pair(p.algebra.apply("meet", a, b)) == (min(a1, b1), min(a2, b2))

    def test_projections_are_homomorphisms(self):
        m = meet_semilattice()
        p = product(m, m)
        assert p.first.first_violation() is None
        assert p.second.first_violation() is None

    def test_example_51_is_product_of_factors(self):
        e = example_51((2, 2))
        p = product(e.coordinate_factor(0), e.coordinate_factor(1))
        # element (a, c) of the product is the bit string a c
        assert p.algebra == e.algebra

    def test_signature_mismatch(self):
        with pytest.raises(SignatureMismatch):
            product(meet_semilattice(), z3_groupoid())

    @given(idempotent_algebras(max_size=3, max_ops=1, max_arity=2),
           idempotent_algebras(max_size=3, max_ops=1, max_arity=2))
    def test_projections_jointly_injective(self, a, b):
        if a.signature != b.signature:
            return
        p = product(a, b)
        pairs = {(p.first(e), p.second(e)) for e in range(p.algebra.size)}
        assert len(pairs) == p.algebra.size
        assert p.first.first_violation() is None and p.second.first_violation() is None


class TestHomomorphisms:
    def test_rejects_non_homomorphism(self):
        m = meet_semilattice()
        with pytest.raises(AlgebraError):
            Homomorphism(m, m, (1, 0))

    def test_identity(self):
        z = z3_groupoid()
        h = Homomorphism.identity(z)
        assert h.is_surjective()
        assert h.preimage(Subset.of(3, [1])) == Subset.of(3, [1])


class TestSignatureStats:
    @pytest.mark.parametrize("arities, expected", [((2, 2), (2, 3)), ((2,), (2, 2)),
                                                   ((3, 2), (3, 4))])
    def test_values(self, arities, expected):
        sig = Signature.of(*((f"f{i}", a) for i, a in enumerate(arities)))
        assert signature_stats(sig) == expected

    @given(st.lists(st.integers(2, 6), min_size=1, max_size=5))
    def test_bounds(self, arities):
        sig = Signature.of(*((f"f{i}", a) for i, a in enumerate(arities)))
        max_arity, bound = signature_stats(sig)
        assert bound >= max_arity >= 2
        assert (bound == max_arity) == (len(arities) == 1)


def test_apply_vectorized():
    z = z3_groupoid()
    a = np.array([0, 1, 2])
    assert list(z.apply("f", a, a[::-1])) == [(2 * x + 2 * y) % 3 for x, y in zip(a, a[::-1])]
