import numpy as np
import pytest

from helpers import GRID, SEGMENT_ENDS, TAUS, curve_model, curve_spec, partition_models, segment_model
from simplexcert.alpha import ExponentialSpec, SampledModel, l_alpha_map
from simplexcert.core import Alphabet, Channel, Dist, Partition, point_mass, subspace_contains
from simplexcert.equivalence import (
    Certificate,
    alpha_family_from_partition,
    certify_simplex_equivalence,
    run_theorem_battery,
    simplex_model,
    v_e_from_model,
)
from simplexcert.errors import CertificationError, DomainError, InvalidArgument
from simplexcert.subalgebra import FunctionSubspace

A3 = Alphabet(3)
Q_INTRO = [Dist(A3, [1, 0, 0]), Dist(A3, [0, 0.5, 0.5])]
M_INTRO = simplex_model(Q_INTRO)


class TestVE:
    def test_intro_spec(self):
        V = v_e_from_model(ExponentialSpec(A3, np.zeros(3), [[1.0, 0.0, 0.0]]))
        assert V.same_span(FunctionSubspace(A3, [[1, 1, 1], [1, 0, 0]]))

    def test_intro_samples(self):
        assert v_e_from_model(M_INTRO).same_span(FunctionSubspace(A3, [[1, 1, 1], [1, 0, 0]]))

    def test_full_simplex(self):
        A = Alphabet(4)
        M = simplex_model([point_mass(A, i) for i in range(4)])
        assert v_e_from_model(M).dim == 4

    def test_curve(self):
        target = FunctionSubspace(A3, [[1, 1, 1], [0, 1, 2]])
        assert v_e_from_model(curve_spec()).same_span(target)
        assert v_e_from_model(curve_model()).same_span(target)

    def test_not_exponential(self):
        with pytest.raises(CertificationError) as exc:
            v_e_from_model(segment_model())
        assert exc.value.stage == "not-e-family"


class TestCertify:
    def test_intro(self):
        cert = certify_simplex_equivalence(M_INTRO)
        assert cert.partition.blocks == ((0,), (1, 2))
        np.testing.assert_array_equal(cert.generators[0].weights, [1, 0, 0])
        np.testing.assert_array_equal(cert.generators[1].weights, [0, 0.5, 0.5])
        np.testing.assert_array_equal(cert.embedding.kernel, [[1, 0], [0, 0.5], [0, 0.5]])
        np.testing.assert_array_equal(cert.left_inverse.kernel, [[1, 0, 0], [0, 1, 1]])
        assert cert.residuals["wv_identity"] == 0.0
        assert cert.seed == 0

    def test_full_simplex_identity(self):
        A = Alphabet(4)
        cert = certify_simplex_equivalence(simplex_model([point_mass(A, i) for i in range(4)]))
        np.testing.assert_array_equal(cert.embedding.kernel, np.eye(4))
        np.testing.assert_array_equal(cert.left_inverse.kernel, np.eye(4))

    def test_curve_fails_at_m_family(self):
        with pytest.raises(CertificationError) as exc:
            certify_simplex_equivalence(curve_model())
        assert exc.value.stage == "not-m-family"

    def test_segment_fails_at_subalgebra_with_witness(self):
        with pytest.raises(CertificationError) as exc:
            certify_simplex_equivalence(segment_model())
        assert exc.value.stage == "not-subalgebra"
        f, g = exc.value.witness
        # candidate space: the mixture span divided by the base point
        M = segment_model()
        V = FunctionSubspace.span(np.vstack(SEGMENT_ENDS) / M.points[0])
        assert V.contains(f) and V.contains(g)
        assert V.residual(f * g) > 1e-3 * np.linalg.norm(f * g)

    def test_declared_specs_agree(self):
        e = ExponentialSpec(A3, np.zeros(3), [[1.0, 0.0, 0.0]])
        cert = certify_simplex_equivalence(M_INTRO, e_spec=e)
        assert cert.partition.blocks == ((0,), (1, 2))

    def test_declared_e_spec_mismatch(self):
        e = ExponentialSpec(A3, np.zeros(3), [[0.0, 1.0, 0.0]])
        with pytest.raises(CertificationError) as exc:
            certify_simplex_equivalence(M_INTRO, e_spec=e)
        assert exc.value.stage == "not-e-family"

    def test_seed_recorded(self):
        assert certify_simplex_equivalence(M_INTRO, seed=17).seed == 17

    def test_round_trip_recovers_generators(self):
        for P, qs, M in partition_models(7, 15):
            cert = certify_simplex_equivalence(M)
            assert cert.partition == P
            for q, r in zip(qs, cert.generators):
                assert np.max(np.abs(q.weights - r.weights)) <= 1e-9

    def test_simplex_coordinates(self):
        cert = certify_simplex_equivalence(M_INTRO)
        lam = cert.simplex_coordinates(Dist(A3, [0.3, 0.35, 0.35]))
        np.testing.assert_allclose(lam.weights, [0.3, 0.7], atol=1e-15)


class TestCertificateCheck:
    cert = certify_simplex_equivalence(M_INTRO)

    def test_model_samples(self):
        assert self.cert.check(M_INTRO.points)["roundtrip"] < 1e-15

    def test_non_model_point_rejected(self):
        with pytest.raises(CertificationError) as exc:
            self.cert.check([[0.2, 0.7, 0.1]])
        assert exc.value.stage == "roundtrip-failed"

    def test_tampered_left_inverse(self):
        c = self.cert
        bad = Certificate(c.partition, c.generators, c.embedding, Channel.from_matrix([[1, 0.5, 0], [0, 0.5, 1]]), c.base_point)
        with pytest.raises(CertificationError):
            bad.check()

    def test_support_mismatch(self):
        c = self.cert
        wrong = Certificate(
            Partition(A3, [(0, 1), (2,)]), c.generators, c.embedding, c.left_inverse, c.base_point
        )
        with pytest.raises(CertificationError):
            wrong.check()


class TestAlphaFamilyFromPartition:
    def test_alpha_one(self):
        Z = alpha_family_from_partition(1.0, Q_INTRO)
        assert Z.dim == 2
        for v in ([0, np.log(0.5), np.log(0.5)], [1, np.log(0.5), np.log(0.5)], [0, 1 + np.log(0.5), 1 + np.log(0.5)]):
            assert subspace_contains(Z, v)[0]
        # C lies in span{1_A}, so Z is in fact linear
        assert Z.is_linear
        assert not subspace_contains(Z, [0, 0, 1])[0]

    def test_alpha_minus_one(self):
        Z = alpha_family_from_partition(-1.0, Q_INTRO)
        assert Z.is_linear and Z.dim == 2
        for q in Q_INTRO:
            assert subspace_contains(Z, q.weights)[0]

    def test_alpha_zero(self):
        Z = alpha_family_from_partition(0.0, Q_INTRO)
        for v in ([1, 0, 0], [0, np.sqrt(0.5), np.sqrt(0.5)]):
            assert subspace_contains(Z, v)[0]
        assert Z.dim == 2

    @pytest.mark.parametrize("alpha", GRID)
    def test_contains_denormalized_images(self, alpha):
        for _, qs, M in partition_models(3, 5):
            Z = alpha_family_from_partition(alpha, qs)
            for t in TAUS:
                for p in M.points:
                    assert subspace_contains(Z, l_alpha_map(alpha, t * p))[0]

    def test_overlap(self):
        with pytest.raises(DomainError):
            alpha_family_from_partition(0.0, [Dist(A3, [0.5, 0.5, 0]), Dist(A3, [0, 0.5, 0.5])])

    def test_uncovered(self):
        with pytest.raises(DomainError):
            alpha_family_from_partition(0.0, [Dist(A3, [1, 0, 0]), Dist(A3, [0, 1, 0])])


class TestBattery:
    def test_intro(self):
        r = run_theorem_battery(M_INTRO, (-1, 0, 0.5, 1, 2))
        assert all(r.conditions.values()) and r.consistent
        assert r.certificate is not None and r.failure is None

    def test_curve(self):
        r = run_theorem_battery(curve_model(), (-1, 0, 0.5, 1, 2))
        assert r.passing_alphas == (1.0,)
        assert not any(r.conditions.values()) and r.consistent
        assert r.certificate is None and r.failure.stage == "not-m-family"

    def test_segment(self):
        r = run_theorem_battery(segment_model())
        assert r.passing_alphas == (-1.0,)
        assert r.consistent and r.failure.stage == "not-subalgebra"

    def test_random_partition_model(self):
        rng = np.random.default_rng(11)
        P = Partition(Alphabet(6), [(0, 3), (1, 4, 5), (2,)])
        qs = []
        for b in P.blocks:
            w = np.zeros(6)
            w[list(b)] = rng.uniform(0.2, 1, len(b))
            qs.append(Dist(P.alphabet, w / w.sum()))
        r = run_theorem_battery(simplex_model(qs))
        assert all(r.conditions.values()) and r.consistent

    def test_grid_requirements(self):
        with pytest.raises(InvalidArgument):
            run_theorem_battery(M_INTRO, (-1, 1))
        with pytest.raises(InvalidArgument):
            run_theorem_battery(M_INTRO, (0, 0.5, 1))

    def test_fault_is_reported(self):
        # an unattainable autoparallel tolerance contradicts the family verdicts
        r = run_theorem_battery(M_INTRO, autoparallel_tol=1e-300)
        assert not r.consistent
        assert all("autoparallel" in f for f in r.faults)

    def test_samples_only_model_skips_geometry(self):
        M = SampledModel(M_INTRO.alphabet, M_INTRO.dim, M_INTRO.points, M_INTRO.parameters)
        r = run_theorem_battery(M)
        assert r.autoparallel is None and r.consistent
