"""Conjugate-directions master solver and its primitive operations."""

import numpy as np
import pytest

from sdqp import (DirectionSet, MasterState, SyntheticConfig, conjugate_against,
                  exact_line_min, generate_synthetic, max_feasible_step,
                  oracle_simplex_qp, simplex_kkt_residual, solve_master_acdm)

VALUE_TOL = 1e-9
CONJ_TOL = 1e-8


class SimplexQp:
    """Minimal master-model stand-in: 1/2 lam'H lam + h'lam over the simplex."""

    def __init__(self, h_mat, h_vec, lam0=None):
        self.h_mat = np.asarray(h_mat, dtype=float)
        self.h_vec = np.asarray(h_vec, dtype=float)
        k = self.h_vec.size
        self.lam = np.full(k, 1.0 / k) if lam0 is None else np.asarray(lam0)

    @property
    def k(self):
        return self.lam.size

    def value(self, lam=None):
        lam = self.lam if lam is None else lam
        return 0.5 * float(lam @ self.h_mat @ lam) + float(self.h_vec @ lam)

    def gradient(self, lam=None):
        lam = self.lam if lam is None else lam
        return self.h_mat @ lam + self.h_vec

    def drop(self, keep):
        keep = np.asarray(keep)
        self.h_mat = self.h_mat[np.ix_(keep, keep)]
        self.h_vec = self.h_vec[keep]
        lam = self.lam[keep]
        self.lam = lam / lam.sum()


def random_spd_master(rng, k, spread=3.0):
    a = rng.standard_normal((k, k))
    h = a @ a.T + spread * np.eye(k)
    return SimplexQp(h, rng.standard_normal(k))


def interior_master(rng, k):
    """Master whose simplex optimum is a comfortably interior point."""
    a = rng.standard_normal((k, k))
    h = a @ a.T + 2.0 * np.eye(k)
    lam_star = rng.uniform(0.8, 1.2, size=k)
    lam_star /= lam_star.sum()
    return SimplexQp(h, -h @ lam_star), lam_star


def test_conjugate_against_frozen_example():
    dirs = DirectionSet()
    dirs.add(np.array([1.0, -1.0]))
    d = conjugate_against(np.array([1.0, 0.0]), dirs, np.eye(2))
    np.testing.assert_allclose(d, [0.5, 0.5], atol=1e-14)


def test_conjugate_against_returns_none_when_spanned():
    dirs = DirectionSet()
    dirs.add(np.array([1.0, -1.0]))
    assert conjugate_against(np.array([2.0, -2.0]), dirs, np.eye(2)) is None


def test_conjugate_against_produces_conjugate_sets(rng):
    h = random_spd_master(rng, 6).h_mat
    dirs = DirectionSet()
    for _ in range(5):
        d = conjugate_against(rng.standard_normal(6), dirs, h)
        if d is None:
            continue
        dirs.add(d)
        assert dirs.conjugacy_error(h) <= CONJ_TOL


def test_max_feasible_step_frozen_example():
    alpha = max_feasible_step(np.array([0.5, 0.5]), np.array([0.75, 0.25]))
    assert alpha == pytest.approx(2.0, abs=1e-14)


def test_max_feasible_step_edge_cases():
    # a zero coordinate that would shrink blocks the step entirely
    assert max_feasible_step(np.array([1.0, 0.0]), np.array([1.5, -0.5])) == 0.0
    # growing everywhere: unbounded
    assert max_feasible_step(np.array([0.2, 0.2]), np.array([0.3, 0.4])) == np.inf
    # no movement: undefined
    assert max_feasible_step(np.array([0.5, 0.5]), np.array([0.5, 0.5])) is None


def test_exact_line_min_quadratic():
    # H = 2I, h = 0: from e1 toward e2 the minimum sits at the midpoint
    beta = exact_line_min(np.array([1.0, 0.0]), np.array([0.0, 1.0]),
                          2.0 * np.eye(2), np.zeros(2))
    assert beta == pytest.approx(0.5, abs=1e-14)


def test_exact_line_min_flat_segments():
    h0 = np.zeros((2, 2))
    up = np.array([1.0, 0.0])
    down = np.array([0.0, 1.0])
    lin = np.array([1.0, -1.0])  # decreasing toward the second coordinate
    assert exact_line_min(up, down, h0, lin) == 1.0
    assert exact_line_min(down, up, h0, lin) == 0.0


def test_exact_line_min_clamps_to_segment():
    # gp = -1.2, curv = 0.04: unconstrained minimum at beta = 30 clamps to 1
    beta = exact_line_min(np.array([1.0, 0.0]), np.array([0.9, 0.1]),
                          2.0 * np.eye(2), np.array([0.0, -10.0]))
    assert beta == 1.0


def test_simplex_kkt_residual_values():
    assert simplex_kkt_residual(np.array([1.0, 1.0]), np.array([0.5, 0.5])) == 0.0
    # vertex optimal: off-support gradient above the support value
    assert simplex_kkt_residual(np.array([1.0, 2.0]), np.array([1.0, 0.0])) == 0.0
    # vertex not optimal: residual = (nu - g_off) / (1 + max|g|) = 1/3
    res = simplex_kkt_residual(np.array([2.0, 1.0]), np.array([1.0, 0.0]))
    assert res == pytest.approx(1.0 / 3.0, abs=1e-14)


def test_solver_matches_face_enumeration(rng):
    for k in (2, 3, 5, 8):
        for _ in range(8):
            master = random_spd_master(rng, k)
            lam_ref = oracle_simplex_qp(master.h_mat, master.h_vec)
            f_ref = master.value(lam_ref)
            solve_master_acdm(master, DirectionSet())
            assert master.value() <= f_ref + VALUE_TOL * (1.0 + abs(f_ref))


def test_interior_optimum_within_k_conjugate_steps(rng):
    for k in (3, 5, 10, 20):
        master, lam_star = interior_master(rng, k)
        info = solve_master_acdm(master, DirectionSet())
        assert info.boundary_hits == 0
        assert info.conjugate_steps <= k
        np.testing.assert_allclose(master.lam, lam_star, atol=1e-7)


def test_boundary_hits_drop_vertices():
    # optimum on a face: the expensive third coordinate must vanish
    h = np.diag([1.0, 1.0, 50.0])
    master = SimplexQp(h, np.array([-1.0, -1.0, 10.0]))
    lam_ref = oracle_simplex_qp(master.h_mat, master.h_vec)
    assert lam_ref[2] == pytest.approx(0.0, abs=1e-12)
    f_ref = master.value(lam_ref)
    info = solve_master_acdm(master, DirectionSet())
    assert master.value() <= f_ref + VALUE_TOL
    # the coordinate carries no weight and is reported for the dropping rule
    assert master.lam[2] <= 1e-10
    assert 2 in info.dropped


def test_direction_set_pad_and_compact():
    dirs = DirectionSet()
    dirs.add(np.array([1.0, -1.0]))
    dirs.pad_coordinate()
    np.testing.assert_array_equal(dirs.directions[0], [1.0, -1.0, 0.0])
    # dropping the zero coordinate preserves the set
    dirs.compact(np.array([0, 1]))
    assert len(dirs) == 1
    np.testing.assert_array_equal(dirs.directions[0], [1.0, -1.0])
    # dropping a live coordinate resets it
    dirs.compact(np.array([0]))
    assert len(dirs) == 0


def test_solver_on_real_master_states(rng):
    inst, _ = generate_synthetic(SyntheticConfig(n=15, m=3, klass="S-b", seed=2))
    state = MasterState(inst)
    for _ in range(6):
        v = rng.uniform(0.0, 1.0, size=15)
        state.add_vertex(v / v.sum())
    state.lam = np.full(state.k, 1.0 / state.k)
    lam_ref = oracle_simplex_qp(state.h_mat, state.h_vec)
    f_ref = state.value(lam_ref)
    dirs = DirectionSet()
    solve_master_acdm(state, dirs, kkt_tol=1e-10)
    assert state.value() <= f_ref + VALUE_TOL * (1.0 + abs(f_ref))
    if len(dirs):
        assert dirs.conjugacy_error(state.h_mat) <= CONJ_TOL
