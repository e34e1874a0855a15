"""Tests for the LMI feasibility solver."""

import math

import numpy as np
import pytest

from sectordisk import lmi


def _hermitian(rng, n, scale=1.0):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (a + a.conj().T) / 2


def _scalar_problem(coeffs, constant=None):
    dim = coeffs[0].shape[0]
    p = lmi.LmiProblem(dim)
    if constant is not None:
        p.set_constant(constant)
    for c in coeffs:
        p.add_scalar(c)
    return p


class TestCoordinates:
    def test_round_trip(self):
        rng = np.random.default_rng(0)
        v = _hermitian(rng, 4)
        x = lmi.coords_from_hermitian(v)
        assert x.shape == (16,)
        assert np.allclose(lmi.hermitian_from_coords(x, 4), v, atol=1e-12)

    def test_pack_unpack(self):
        rng = np.random.default_rng(1)
        p = lmi.LmiProblem(3)
        p.add_scalar(np.eye(3))
        p.add_scalar(-np.eye(3))
        p.add_hermitian_var(2, lambda v: np.zeros((3, 3)), name="V")
        v = _hermitian(rng, 2)
        x = p.pack([1.5, 0.25], [v])
        scalars, mats = p.unpack(x)
        assert np.allclose(scalars, [1.5, 0.25])
        assert np.allclose(mats[0], v, atol=1e-12)


class TestSolveScalars:
    def test_constant_already_definite(self):
        p = _scalar_problem([np.zeros((2, 2))], constant=np.eye(2))
        res = lmi.solve(p)
        assert res.feasible
        assert abs(res.margin - 1.0) <= 1e-9

    def test_negative_ray_infeasible(self):
        p = _scalar_problem([-np.eye(2)])
        res = lmi.solve(p)
        assert not res.feasible
        assert res.best_margin <= 0
        assert res.upper_bound <= 1e-9

    def test_simple_feasible(self):
        p = _scalar_problem([np.diag([1.0, 2.0])])
        res = lmi.solve(p)
        assert res.feasible and res.margin > 0.5

    def test_needs_combination(self):
        # neither coefficient is definite alone, their sum is
        c1 = np.diag([1.0, -0.2])
        c2 = np.diag([-0.2, 1.0])
        res = lmi.solve(_scalar_problem([c1, c2]))
        assert res.feasible
        assert lmi.verify(_scalar_problem([c1, c2]), res.scalars) > 0

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            lmi.solve(_scalar_problem([np.eye(2)]), budget=0)


class TestVerify:
    def test_zero_candidate_gives_constant_margin(self):
        p = _scalar_problem([np.eye(2)], constant=np.diag([0.5, -0.25]))
        assert abs(lmi.verify(p, [0.0]) - (-0.25)) <= 1e-12

    def test_homogeneous_scaling_doubles_margin(self):
        rng = np.random.default_rng(2)
        c = _hermitian(rng, 3) + 3 * np.eye(3)
        p = _scalar_problem([c])
        m1 = lmi.verify(p, [1.0])
        m2 = lmi.verify(p, [2.0])
        assert abs(m2 - 2 * m1) <= 1e-9 * abs(m1)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            lmi.verify(_scalar_problem([np.eye(2)]), [1.0, 2.0])


class TestSolverProperties:
    def test_determinism(self):
        rng = np.random.default_rng(3)
        coeffs = [_hermitian(rng, 3) for _ in range(4)]
        coeffs.append(np.eye(3))
        r1 = lmi.solve(_scalar_problem(coeffs))
        r2 = lmi.solve(_scalar_problem(coeffs))
        assert r1.feasible == r2.feasible
        assert np.array_equal(r1.scalars, r2.scalars)
        assert r1.margin == r2.margin
        assert r1.iterations == r2.iterations

    def test_coefficient_scaling_scales_margin(self):
        rng = np.random.default_rng(4)
        coeffs = [_hermitian(rng, 3), np.eye(3) + _hermitian(rng, 3, 0.1)]
        r1 = lmi.solve(_scalar_problem(coeffs))
        r2 = lmi.solve(_scalar_problem([100.0 * c for c in coeffs]))
        assert r1.feasible and r2.feasible
        assert abs(r2.margin - 100.0 * r1.margin) <= 1e-6 * abs(r2.margin)

    def test_every_certificate_reverifies(self):
        rng = np.random.default_rng(5)
        n_feasible = 0
        for trial in range(40):
            coeffs = [_hermitian(rng, 3) for _ in range(3)]
            if trial % 2 == 0:
                coeffs[-1] = coeffs[-1] + 2.0 * np.eye(3)
            p = _scalar_problem(coeffs)
            res = lmi.solve(p)
            if res.feasible:
                n_feasible += 1
                again = lmi.verify(p, res.scalars, res.matrices)
                assert again > 0
                assert abs(again - res.margin) <= 1e-9 * (1 + abs(res.margin))
        assert n_feasible >= 3  # random Hermitians occasionally align

    def test_nonneg_constraint_respected(self):
        # only a negative multiple of the coefficient would work
        res = lmi.solve(_scalar_problem([-np.eye(2)]))
        assert not res.feasible
        # ... while a free scalar finds it
        p = lmi.LmiProblem(2)
        p.add_scalar(-np.eye(2), nonneg=False)
        res = lmi.solve(p)
        assert res.feasible
        assert res.scalars[0] < 0


class TestMatrixVariables:
    def test_lyapunov_feasibility(self):
        # A stable => exists P > 0 with -(A*P + PA) > 0
        a = np.array([[-1.0, 2.0], [0.0, -3.0]])

        def image(p):
            return -(a.T @ p + p @ a)

        prob = lmi.LmiProblem(2)
        prob.add_scalar(np.zeros((2, 2)))  # inert scalar, exercises mixing
        prob.add_hermitian_var(2, image, positive=True, name="P")
        res = lmi.solve(prob)
        assert res.feasible
        p_val = res.matrices[0]
        assert np.linalg.eigvalsh(p_val)[0] > 0
        assert np.linalg.eigvalsh(-(a.T @ p_val + p_val @ a))[0] > 0

    def test_unstable_lyapunov_infeasible(self):
        a = np.array([[1.0, 0.0], [0.0, -1.0]])

        def image(p):
            return -(a.T @ p + p @ a)

        prob = lmi.LmiProblem(2)
        prob.add_scalar(np.zeros((2, 2)))
        prob.add_hermitian_var(2, image, positive=True, name="P")
        res = lmi.solve(prob, budget=2000)
        assert not res.feasible

    def test_seeds_accepted(self):
        a = np.array([[-0.5]])
        prob = lmi.LmiProblem(1)
        prob.add_scalar(np.zeros((1, 1)))
        prob.add_hermitian_var(1, lambda p: -(a.T @ p + p @ a),
                               positive=True)
        seed = prob.pack([0.0], [np.array([[1.0]])])
        res = lmi.solve(prob, seeds=[seed])
        assert res.feasible

    def test_problem_json_dump(self):
        prob = lmi.LmiProblem(2)
        prob.add_scalar(np.eye(2))
        prob.add_hermitian_var(2, lambda v: v, positive=True)
        dump = prob.to_json()
        assert dump["dim"] == 2
        assert len(dump["matrix_vars"][0]["images"]) == 4


class TestInfeasibleDiagnostics:
    def test_history_and_bound(self):
        rng = np.random.default_rng(6)
        h = _hermitian(rng, 3)
        h -= (np.linalg.eigvalsh(h)[-1] + 0.5) * np.eye(3)  # strictly ND
        res = lmi.solve(_scalar_problem([h]), budget=500)
        assert not res.feasible
        assert res.upper_bound <= 1e-7 * np.linalg.norm(h, 2)
        assert res.to_json()["feasible"] is False

    def test_certificate_json(self):
        res = lmi.solve(_scalar_problem([np.eye(2)]))
        payload = res.to_json()
        assert payload["feasible"] is True
        assert math.isclose(payload["margin"], res.margin)
