"""Tests for matrix gain/phase machinery."""

import math

import numpy as np
import pytest

from sectordisk import gainphase as gp
from sectordisk.benchmarks import ex1_matrix
from sectordisk.linalg import hermitian_part, singular_values


def _random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def _random_unitary(rng, n):
    q, r = np.linalg.qr(_random_complex(rng, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestSectorSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            gp.SectorSpec(0.0, -0.1, 0.1)
        with pytest.raises(ValueError):
            gp.SectorSpec(1.0, 0.2, 0.1)  # empty sector
        with pytest.raises(ValueError):
            gp.SectorSpec(1.0, -2.0, 2.0)  # width above pi
        with pytest.raises(ValueError):
            gp.SectorSpec(1.0, 3.0, 3.5)  # midpoint beyond pi

    def test_symmetric_accessor(self):
        assert gp.SectorSpec(1.0, -0.3, 0.3).symmetric
        assert not gp.SectorSpec(1.0, -0.3, 0.4).symmetric


class TestNrSupport:
    def test_identity(self):
        assert abs(gp.nr_support(np.eye(2), 0.0) - 1.0) <= 1e-12

    def test_two_point_spectrum(self):
        a = np.diag([1.0, 1.0j])
        assert abs(gp.nr_support(a, math.pi / 2) - 1.0) <= 1e-12

    def test_dominates_sampling(self):
        rng = np.random.default_rng(0)
        a = _random_complex(rng, 3)
        for theta in (0.0, 0.7, -2.1):
            val = gp.nr_support(a, theta)
            us = _random_complex(rng, 3) @ np.eye(3)  # placeholder shape
            us = rng.standard_normal((3, 10_000)) \
                + 1j * rng.standard_normal((3, 10_000))
            us /= np.linalg.norm(us, axis=0)
            sampled = np.real(np.exp(-1j * theta)
                              * np.einsum("ik,ij,jk->k", us.conj(), a, us))
            assert sampled.max() <= val + 1e-10
            # attainment: the support is nearly reached by dense sampling
            assert sampled.max() >= val - 0.2 * (abs(val) + 1)

    def test_periodicity(self):
        rng = np.random.default_rng(1)
        a = _random_complex(rng, 3)
        assert abs(gp.nr_support(a, 0.4) - gp.nr_support(a, 0.4 + 2 * math.pi)) \
            <= 1e-10

    def test_support_sum_nonnegative_when_zero_inside(self):
        # 0 in W(A) forces h(theta) + h(theta + pi) >= 0
        a = np.diag([1.0, np.exp(2j * math.pi / 3), np.exp(-2j * math.pi / 3)])
        for theta in np.linspace(0, 2 * math.pi, 17):
            assert gp.nr_support(a, theta) + gp.nr_support(a, theta + math.pi) \
                >= -1e-12


class TestClassification:
    def test_identity_sectorial(self):
        assert gp.classify_sectorial(np.eye(3)) is gp.Sectoriality.SECTORIAL

    def test_singular_projection_quasi(self):
        assert gp.classify_sectorial(np.diag([1.0, 0.0])) \
            is gp.Sectoriality.QUASI_SECTORIAL

    def test_spread_triangle_non_sectorial(self):
        a = np.diag([1.0, np.exp(2j * math.pi / 3), np.exp(-2j * math.pi / 3)])
        assert gp.classify_sectorial(a) is gp.Sectoriality.NON_SECTORIAL

    def test_indefinite_hermitian_is_semi(self):
        # degenerate numerical range (a segment through 0) has empty
        # planar interior: classified semi-sectorial by the letter of
        # the boundary definition
        assert gp.classify_sectorial(np.diag([1.0, -1.0])) \
            is gp.Sectoriality.SEMI_SECTORIAL

    def test_degenerate_block_is_semi(self):
        rng = np.random.default_rng(2)
        t = _random_complex(rng, 2)
        core = np.array([[1.0, 2.0], [0.0, 1.0]])
        assert gp.classify_sectorial(t.conj().T @ core @ t) \
            is gp.Sectoriality.SEMI_SECTORIAL

    def test_zero_matrix_quasi(self):
        assert gp.classify_sectorial(np.zeros((2, 2))) \
            is gp.Sectoriality.QUASI_SECTORIAL

    def test_detail_margin_sign(self):
        kind, margin, ambiguous = gp.classify_detail(np.eye(2))
        assert kind is gp.Sectoriality.SECTORIAL
        assert margin > 0.9 and not ambiguous


class TestMatrixPhases:
    def test_positive_definite_hermitian(self):
        a = np.array([[2.0, 0.5], [0.5, 1.0]])
        info = gp.matrix_phases(a)
        assert np.max(np.abs(info.phases)) <= 1e-10
        assert info.rank == 2

    def test_normal_diagonal(self):
        a = np.diag([np.exp(1j * math.pi / 4), np.exp(-1j * math.pi / 6)])
        info = gp.matrix_phases(a)
        assert np.allclose(info.phases, [math.pi / 4, -math.pi / 6],
                           atol=1e-10)
        assert abs(info.center - math.pi / 24) <= 1e-10

    def test_normal_phases_equal_eigenvalue_angles(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            u = _random_unitary(rng, 3)
            angles = rng.uniform(-1.2, 1.2, 3)
            radii = rng.uniform(0.2, 2.0, 3)
            a = u.conj().T @ np.diag(radii * np.exp(1j * angles)) @ u
            info = gp.matrix_phases(a)
            assert np.max(np.abs(info.phases - np.sort(angles)[::-1])) \
                <= 1e-10

    def test_congruence_construction_recovered(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            t = _random_complex(rng, 3)
            th = np.sort(rng.uniform(-math.pi / 3, math.pi / 3, 3))[::-1]
            b = t.conj().T @ np.diag(np.exp(1j * th)) @ t
            info = gp.matrix_phases(b)
            assert np.max(np.abs(info.phases - th)) <= 1e-8

    def test_rotation_choice_independence(self):
        # any rotation angle with a positive definite rotated Hermitian
        # part must reproduce the same phases
        rng = np.random.default_rng(5)
        t = _random_complex(rng, 3)
        th = np.array([0.8, 0.1, -0.5])
        b = t.conj().T @ np.diag(np.exp(1j * th)) @ t
        reference = gp.matrix_phases(b).phases
        for th0 in (0.0, 0.15, -0.2):
            rotated = np.exp(-1j * th0) * b
            h = hermitian_part(rotated)
            k = (rotated - rotated.conj().T) / 2j
            w, v = np.linalg.eigh(h)
            assert w[0] > 0
            inv_sqrt = v @ np.diag(w ** -0.5) @ v.conj().T
            s = inv_sqrt @ k @ inv_sqrt
            phases = np.sort(th0 + np.arctan(np.linalg.eigvalsh(
                (s + s.conj().T) / 2)))[::-1]
            assert np.max(np.abs(phases - reference)) <= 1e-8

    def test_unitary_similarity_invariance(self):
        rng = np.random.default_rng(6)
        t = _random_complex(rng, 3)
        b = t.conj().T @ np.diag(np.exp(1j * np.array([0.5, 0.0, -0.4]))) @ t
        u = _random_unitary(rng, 3)
        p1 = gp.matrix_phases(b).phases
        p2 = gp.matrix_phases(u.conj().T @ b @ u).phases
        assert np.max(np.abs(p1 - p2)) <= 1e-8

    def test_positive_scaling_invariance(self):
        rng = np.random.default_rng(7)
        t = _random_complex(rng, 3)
        b = t.conj().T @ np.diag(np.exp(1j * np.array([0.3, -0.2, 0.1]))) @ t
        p1 = gp.matrix_phases(b).phases
        p2 = gp.matrix_phases(7.5 * b).phases
        assert np.max(np.abs(p1 - p2)) <= 1e-10
        assert np.allclose(singular_values(7.5 * b),
                           7.5 * singular_values(b), rtol=1e-12)

    def test_rank_one_psd_rotated(self):
        rng = np.random.default_rng(8)
        u = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        u /= np.linalg.norm(u)
        beta = 0.7
        b = 2.0 * np.exp(1j * beta) * np.outer(u, u.conj())
        info = gp.matrix_phases(b)
        assert info.rank == 1
        assert abs(info.phases[0] - beta) <= 1e-9

    def test_semi_sectorial_raises_without_flag(self):
        with pytest.raises(gp.NotPhaseDefinedError):
            gp.matrix_phases(np.diag([1.0, -1.0]))

    def test_semi_sectorial_approximate_path(self):
        info = gp.matrix_phases(np.diag([1.0, -1.0]), allow_semi=True)
        assert info.approximate
        assert info.kind is gp.Sectoriality.SEMI_SECTORIAL

    def test_non_sectorial_raises(self):
        a = np.diag([1.0, np.exp(2j * math.pi / 3), np.exp(-2j * math.pi / 3)])
        with pytest.raises(gp.NotPhaseDefinedError):
            gp.matrix_phases(a)

    def test_phase_spread_below_pi(self):
        rng = np.random.default_rng(9)
        spec = gp.SectorSpec(1.0, -math.pi / 2, math.pi / 2)
        b = gp.sample_sectored_disk(spec, 3, 11)
        info = gp.matrix_phases(b)
        assert info.max_phase - info.min_phase < math.pi


class TestSectoredDiskMembership:
    def test_scaled_identity(self):
        spec = gp.SectorSpec.from_symmetric(2.0, 0.5)
        assert gp.in_sectored_disk(np.eye(2), spec)
        assert not gp.in_sectored_disk(4.0 * np.eye(2), spec)

    def test_boundary_rank_one(self):
        rng = np.random.default_rng(10)
        u = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        u /= np.linalg.norm(u)
        spec = gp.SectorSpec(1.5, -0.2, 0.9)
        b = spec.gamma * np.exp(1j * spec.beta) * np.outer(u, u.conj())
        assert gp.in_sectored_disk(b, spec)

    def test_sampler_membership(self):
        spec = gp.SectorSpec(1.0, -math.pi / 3, math.pi / 3)
        rng = np.random.default_rng(11)
        mats = gp.sample_sectored_disk_batch(spec, 3, 1000, rng)
        assert all(gp.in_sectored_disk(b, spec) for b in mats)

    def test_sampler_positive_real_sector(self):
        spec = gp.SectorSpec(1.0, -math.pi / 2, math.pi / 2)
        rng = np.random.default_rng(12)
        mats = gp.sample_sectored_disk_batch(spec, 2, 300, rng)
        for b in mats:
            assert np.linalg.eigvalsh(hermitian_part(b))[0] >= -1e-8

    def test_sampler_deterministic(self):
        spec = gp.SectorSpec(1.0, -0.5, 0.5)
        assert np.array_equal(gp.sample_sectored_disk(spec, 3, 42),
                              gp.sample_sectored_disk(spec, 3, 42))

    def test_scalar_case(self):
        spec = gp.SectorSpec(2.0, -0.4, 0.9)
        b = gp.sample_sectored_disk(spec, 1, 5)
        val = complex(b[0, 0])
        assert abs(val) <= spec.gamma * (1 + 1e-12)
        assert spec.alpha - 1e-12 <= np.angle(val) <= spec.beta + 1e-12

    def test_wraparound_sector(self):
        # sector centered near -pi: phases wrap across the branch cut
        spec = gp.SectorSpec(1.0, -3.3, -2.9)
        rng = np.random.default_rng(13)
        mats = gp.sample_sectored_disk_batch(spec, 2, 100, rng)
        assert all(gp.in_sectored_disk(b, spec) for b in mats)


class TestRotation:
    def test_explicit_case(self):
        spec = gp.SectorSpec(1.0, 0.0, math.pi / 2)
        b = np.exp(1j * math.pi / 4) * np.eye(2)
        b2, spec2 = gp.rotate_to_symmetric(b, spec)
        assert np.allclose(b2, np.eye(2), atol=1e-12)
        assert spec2.symmetric
        assert abs(spec2.beta - math.pi / 4) <= 1e-14

    def test_symmetric_identity(self):
        spec = gp.SectorSpec.from_symmetric(1.0, 0.6)
        b = np.eye(3) * (0.2 + 0.1j)
        b2, spec2 = gp.rotate_to_symmetric(b, spec)
        assert np.allclose(b2, b)
        assert spec2 == spec

    def test_membership_preserved(self):
        spec = gp.SectorSpec(1.3, -0.2, 1.1)
        rng = np.random.default_rng(14)
        mats = gp.sample_sectored_disk_batch(spec, 3, 500, rng)
        for b in mats:
            b2, spec2 = gp.rotate_to_symmetric(b, spec)
            assert gp.in_sectored_disk(b, spec) == \
                gp.in_sectored_disk(b2, spec2)


class TestLemma8Inequality:
    def test_sampled_members_satisfy_gain_phase_coupling(self):
        # B*B <= (gamma sec^2 a / 2)(B + B*) for members of the symmetric set
        for alpha, seed in ((math.pi / 3, 0), (math.pi / 4, 1), (1.2, 2)):
            spec = gp.SectorSpec.from_symmetric(1.0, alpha)
            rng = np.random.default_rng(seed)
            mats = gp.sample_sectored_disk_batch(spec, 3, 500, rng)
            sec2 = 1.0 / math.cos(alpha) ** 2
            rhs_scale = 0.5 * spec.gamma * sec2
            gap = rhs_scale * (mats + np.conj(np.transpose(mats, (0, 2, 1)))) \
                - np.conj(np.transpose(mats, (0, 2, 1))) @ mats
            eigs = np.linalg.eigvalsh(gap)
            assert eigs[:, 0].min() >= -1e-8


class TestScalarLemma:
    def test_zero_is_safe(self):
        assert gp.scalar_sectored_disk_ok(0.0, gp.SectorSpec(1.0, -1.0, 1.0))

    def test_explicit_violation(self):
        # -1/a = gamma lands exactly on the sector disk boundary
        spec = gp.SectorSpec(1.0, -math.pi / 2, math.pi / 2)
        assert not gp.scalar_sectored_disk_ok(-1.0, spec)

    def test_small_gain_clause(self):
        spec = gp.SectorSpec(0.5, -0.4, 0.4)
        assert gp.scalar_sectored_disk_ok(1.0, spec)  # |a| < 1/gamma

    def test_matches_exact_set_membership(self):
        rng = np.random.default_rng(15)
        for _ in range(500):
            a = 2.0 * (rng.standard_normal() + 1j * rng.standard_normal())
            gamma = rng.uniform(0.3, 3.0)
            width = rng.uniform(0.05, math.pi)
            center = rng.uniform(-math.pi, math.pi - 1e-9)
            spec = gp.SectorSpec(gamma, center - width / 2, center + width / 2)
            b = -1.0 / a
            inside = (abs(b) <= gamma
                      and (np.angle(b) - spec.alpha) % (2 * math.pi)
                      <= width)
            assert gp.scalar_sectored_disk_ok(a, spec) == (not inside)
