"""Pricing LPs: full solve, sifting, early stopping, shrinking cuts."""

import numpy as np
import pytest

from sdqp import (CutPool, LpProblem, PricingOptions, SyntheticConfig, early_eps,
                  eval_gradient, eval_objective, generate_synthetic, lp_solve,
                  price, sifting_solve, vertex_feasibility_error)

VALUE_TOL = 1e-8
FEAS_TOL = 1e-7


def make_inst(n=40, m=5, klass="S-b", seed=0):
    inst, _ = generate_synthetic(SyntheticConfig(n=n, m=m, klass=klass, seed=seed))
    return inst


def interior_point(inst, rng):
    """A strictly feasible-ish x_k to price from (any point works)."""
    x = rng.uniform(0.1, 0.9, size=inst.n)
    if inst.n_eq:  # scale onto e'x = 1 if a budget row is present
        x = x / x.sum()
    return x


def test_lp_solve_returns_feasible_vertex(rng):
    inst = make_inst()
    g = rng.standard_normal(inst.n)
    ans = lp_solve(LpProblem(inst, g))
    assert ans.status == "optimal"
    assert vertex_feasibility_error(inst, ans.vertex) <= FEAS_TOL
    assert ans.value == pytest.approx(float(g @ ans.vertex), abs=1e-10)


@pytest.mark.parametrize("klass", ["S", "S-b", "S-rb", "R", "R-b", "R-rb"])
def test_sifting_matches_full_solve(klass, rng):
    inst = make_inst(n=60, m=4, klass=klass, seed=3)
    for _ in range(5):
        g = rng.standard_normal(inst.n)
        p = LpProblem(inst, g)
        full = lp_solve(p)
        sif = sifting_solve(p)
        assert sif.status == "optimal"
        assert sif.value == pytest.approx(full.value, abs=VALUE_TOL)
        assert vertex_feasibility_error(inst, sif.vertex) <= FEAS_TOL
        # sifting should not have activated every column on these shapes
        assert sif.work_columns <= inst.n + inst.n_ineq


def test_sifting_warm_start_from_support(rng):
    inst = make_inst(n=80, m=5, klass="R", seed=1)
    g = rng.standard_normal(inst.n)
    p = LpProblem(inst, g)
    full = lp_solve(p)
    warm = sifting_solve(p, work_set_init=np.arange(10))
    assert warm.value == pytest.approx(full.value, abs=VALUE_TOL)


def test_price_value_is_relative(rng):
    inst = make_inst(n=30, m=3)
    x_k = interior_point(inst, rng)
    g = eval_gradient(inst, x_k)
    out = price(inst, x_k, g)
    assert out.status == "optimal"
    assert out.value == pytest.approx(float(g @ (out.vertex - x_k)), abs=1e-9)
    # the minimizer can never beat a feasible point by a positive margin
    assert out.value <= 1e-10


def test_price_early_stop_contract(rng):
    inst = make_inst(n=50, m=4, seed=7)
    opts = PricingOptions(early_stop=True)
    x_k = interior_point(inst, rng)
    f_k = eval_objective(inst, x_k)
    g = eval_gradient(inst, x_k)
    out = price(inst, x_k, g, opts=opts, f_k=f_k)
    eps = early_eps(opts, f_k)
    if out.status == "early_stopped":
        assert out.value <= -eps
    else:
        exact = price(inst, x_k, g)
        assert out.value == pytest.approx(exact.value, abs=VALUE_TOL)
    assert vertex_feasibility_error(inst, out.vertex) <= FEAS_TOL


def test_cut_pool_add_and_prune(rng):
    inst = make_inst(n=20, m=3)
    pool = CutPool(cap=2)
    x0 = interior_point(inst, rng)
    g0 = eval_gradient(inst, x0)
    assert pool.add_cut(x0, g0, 0)
    assert pool.add_cut(x0 * 0.9 + 0.01, g0 * 1.1, 1)
    assert not pool.add_cut(x0, g0, 2)  # past the cap
    assert len(pool.active_cuts()) == 2

    # a vertex with large slack on the first cut retires it
    cut = pool.cuts[0]
    slack_dir = -cut.a / np.linalg.norm(cut.a)
    far = x0 + 10.0 * slack_dir
    pool.prune_inactive(far)
    assert all(c.beta - c.a @ far <= 1e-7 for c in pool.cuts)


def test_cuts_restrict_the_pricing_region(rng):
    inst = make_inst(n=25, m=3, seed=5)
    x_k = interior_point(inst, rng)
    g = eval_gradient(inst, x_k)
    pool = CutPool()
    pool.add_cut(x_k, g, 0)
    opts = PricingOptions(use_cuts=True)
    cut_out = price(inst, x_k, g, pool=pool, opts=opts)
    # the cut region is a subset, so the cut optimum cannot be lower
    free_out = price(inst, x_k, g)
    assert cut_out.value >= free_out.value - 1e-9
    assert vertex_feasibility_error(inst, cut_out.vertex, pool.active_cuts()) <= FEAS_TOL


def test_price_with_equalities_keeps_them(rng):
    inst = make_inst(n=30, m=3, klass="R-b", seed=2)
    x_k = interior_point(inst, rng)
    out = price(inst, x_k, eval_gradient(inst, x_k))
    np.testing.assert_allclose(inst.A_eq @ out.vertex, inst.b_eq, atol=FEAS_TOL)
