import numpy as np
import pytest

from helpers import all_partitions, random_mix, random_partition
from simplexcert.core import Alphabet, Partition
from simplexcert.errors import DomainError, IllConditionedError, InvalidArgument
from simplexcert.subalgebra import (
    FunctionSubspace,
    NotSubalgebraError,
    atoms_oracle,
    generic_element,
    indicator_via_lagrange,
    is_unital_subalgebra,
    lagrange_indicators,
    partition_from_subalgebra,
    set_class,
)


def test_bell_numbers():
    assert [sum(1 for _ in all_partitions(n)) for n in range(1, 7)] == [1, 2, 5, 15, 52, 203]


class TestFunctionSubspace:
    def test_dependent_basis_rejected(self):
        with pytest.raises(InvalidArgument):
            FunctionSubspace(Alphabet(3), [[1, 1, 1], [2, 2, 2]])

    def test_span_drops_dependencies(self):
        assert FunctionSubspace.span([[1, 1, 1], [2, 2, 2], [0, 1, 0]]).dim == 2

    def test_same_span_ignores_basis(self):
        P = Partition(Alphabet(4), [(0, 1), (2,), (3,)])
        mixed = FunctionSubspace.of_partition(P, random_mix(np.random.default_rng(1), 3))
        assert mixed.same_span(FunctionSubspace.of_partition(P))


class TestIsUnitalSubalgebra:
    def test_partition_indicators(self):
        P = Partition(Alphabet(3), [(0,), (1, 2)])
        assert is_unital_subalgebra(FunctionSubspace.of_partition(P)).verdict

    def test_quadratic_witness(self):
        v = is_unital_subalgebra(FunctionSubspace(Alphabet(3), [[1, 1, 1], [0, 1, 2]]))
        assert not v.verdict
        np.testing.assert_array_equal(v.witness[0], [0, 1, 2])
        np.testing.assert_array_equal(v.witness[1], [0, 1, 2])
        assert v.max_product_residual > 0.1

    def test_full_space(self):
        assert is_unital_subalgebra(FunctionSubspace(Alphabet(4), np.eye(4))).verdict

    def test_missing_constant(self):
        v = is_unital_subalgebra(FunctionSubspace(Alphabet(3), [[1, 0, 0]]))
        assert not v.verdict and v.witness is None
        assert v.constant_residual == pytest.approx(np.sqrt(2))


class TestPartitionFromSubalgebra:
    def test_two_blocks(self):
        V = FunctionSubspace(Alphabet(4), [[1, 1, 1, 1], [1, 1, 0, 0]])
        assert partition_from_subalgebra(V).blocks == ((0, 1), (2, 3))

    def test_constants(self):
        V = FunctionSubspace(Alphabet(3), [[1, 1, 1]])
        assert partition_from_subalgebra(V).blocks == ((0, 1, 2),)

    def test_full_space(self):
        V = FunctionSubspace(Alphabet(3), np.eye(3))
        assert partition_from_subalgebra(V).blocks == ((0,), (1,), (2,))

    def test_precondition(self):
        with pytest.raises(NotSubalgebraError):
            partition_from_subalgebra(FunctionSubspace(Alphabet(3), [[1, 1, 1], [0, 1, 2]]))

    @pytest.mark.parametrize("n", range(1, 7))
    def test_exhaustive_agreement_with_oracle(self, n):
        rng = np.random.default_rng(n)
        for P in all_partitions(n):
            V = FunctionSubspace.of_partition(P, random_mix(rng, len(P)))
            got = partition_from_subalgebra(V)
            assert got == atoms_oracle(V) == P.canonical()

    def test_sigma_algebra_closure(self):
        P = Partition(Alphabet(5), [(0, 3), (1,), (2, 4)])
        V = FunctionSubspace.of_partition(P, random_mix(np.random.default_rng(0), 3))
        sets = [frozenset(b) for b in set_class(V)]
        assert len(sets) == 2 ** len(P)
        full = frozenset(range(5))
        for a in sets:
            assert full - a in sets
            for b in sets:
                assert a & b in sets and a | b in sets


class TestLagrange:
    def test_two_factor(self):
        np.testing.assert_allclose(indicator_via_lagrange([2, 3, 3, 5], 3), [0, 1, 1, 0], atol=1e-15)

    def test_constant(self):
        np.testing.assert_array_equal(indicator_via_lagrange([4.0, 4.0, 4.0], 4.0), [1, 1, 1])

    def test_single_factor(self):
        np.testing.assert_array_equal(indicator_via_lagrange([0.0, 1.0], 0.0), [1, 0])

    def test_value_not_attained(self):
        with pytest.raises(DomainError):
            indicator_via_lagrange([0.0, 1.0], 0.5)

    def test_clustered_values(self):
        with pytest.raises(IllConditionedError):
            indicator_via_lagrange([0.0, 1.5e-7, 1.0], 1.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_atom_indicators(self, seed):
        rng = np.random.default_rng(seed)
        P = random_partition(rng, 7, 4)
        V = FunctionSubspace.of_partition(P, random_mix(rng, 4))
        Q, ind = lagrange_indicators(V, seed)
        assert Q == P
        assert np.max(np.abs(ind - P.indicators())) <= 1e-8

    def test_generic_element_is_reproducible(self):
        V = FunctionSubspace(Alphabet(4), [[1, 1, 1, 1], [1, 1, 0, 0]])
        np.testing.assert_array_equal(generic_element(V, 3)[0], generic_element(V, 3)[0])


class TestOracle:
    def test_constants(self):
        assert atoms_oracle(FunctionSubspace(Alphabet(3), [[1, 1, 1]])).blocks == ((0, 1, 2),)

    def test_full(self):
        assert atoms_oracle(FunctionSubspace(Alphabet(2), np.eye(2))).blocks == ((0,), (1,))

    @pytest.mark.parametrize("seed", range(10))
    def test_random_partitions(self, seed):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(2, 9))
        P = random_partition(rng, n, int(rng.integers(1, n + 1)))
        assert atoms_oracle(FunctionSubspace.of_partition(P)) == P

    def test_size_limit(self):
        with pytest.raises(InvalidArgument):
            atoms_oracle(FunctionSubspace(Alphabet(17), [np.ones(17)]))
