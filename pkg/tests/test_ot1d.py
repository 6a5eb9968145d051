import numpy as np
import pytest
from scipy.stats import wasserstein_distance

from hilbert_ot.errors import InvalidInputError
from hilbert_ot.ot1d import (
    SortedLine,
    coupling_cost_1d,
    northwest_coupling,
    wasserstein_1d,
    wasserstein_1d_with_plan,
)
from oracles import lp_1d_value


def test_single_atoms():
    plan = northwest_coupling(np.array([1.0]), np.array([1.0]))
    assert plan.source.tolist() == [0]
    assert plan.target.tolist() == [0]
    np.testing.assert_allclose(plan.mass, [1.0])


def test_spec_two_by_two_plan():
    plan = northwest_coupling(np.array([0.5, 0.5]), np.array([0.3, 0.7]))
    assert list(zip(plan.source.tolist(), plan.target.tolist())) == [(0, 0), (0, 1), (1, 1)]
    np.testing.assert_allclose(plan.mass, [0.3, 0.2, 0.5], atol=1e-15)


def test_identical_uniform_weights_give_identity_matching():
    w = np.full(3, 1.0 / 3.0)
    plan = northwest_coupling(w, w)
    assert plan.source.tolist() == [0, 1, 2]
    assert plan.target.tolist() == [0, 1, 2]
    np.testing.assert_allclose(plan.mass, w)


def test_zero_weight_atoms_are_skipped():
    plan = northwest_coupling(np.array([0.5, 0.0, 0.5]), np.array([0.0, 1.0]))
    assert 1 not in plan.source.tolist()
    assert 0 not in plan.target.tolist()
    assert np.all(plan.mass > 0)
    np.testing.assert_allclose(plan.marginal_source(3), [0.5, 0.0, 0.5], atol=1e-12)


@pytest.mark.parametrize("m,n", [(1, 5), (5, 1), (7, 7), (13, 5), (4, 11)])
def test_marginals_random(m, n, backend):
    rng = np.random.default_rng(m * 100 + n)
    a = rng.dirichlet(np.ones(m))
    b = rng.dirichlet(np.ones(n))
    plan = northwest_coupling(a, b, backend=backend)
    assert len(plan) <= m + n - 1
    np.testing.assert_allclose(plan.marginal_source(m), a, atol=1e-9)
    np.testing.assert_allclose(plan.marginal_target(n), b, atol=1e-9)
    # north-west structure: target indices non-decreasing when sorted by source
    order = np.lexsort((plan.target, plan.source))
    assert np.all(np.diff(plan.target[order]) >= 0) or len(plan) == 1


def test_marginals_large(backend):
    rng = np.random.default_rng(99)
    n = 10**5
    a = rng.dirichlet(np.ones(n))
    b = rng.dirichlet(np.ones(n))
    plan = northwest_coupling(a, b, backend=backend)
    assert len(plan) <= 2 * n - 1
    assert np.all(plan.mass > 0)
    np.testing.assert_allclose(plan.marginal_source(n), a, atol=1e-9)
    np.testing.assert_allclose(plan.marginal_target(n), b, atol=1e-9)


def test_dyadic_weights_have_exact_marginals():
    a = np.full(8, 1.0 / 8.0)
    b = np.full(4, 1.0 / 4.0)
    plan = northwest_coupling(a, b)
    np.testing.assert_array_equal(plan.marginal_source(8), a)
    np.testing.assert_array_equal(plan.marginal_target(4), b)
    assert np.all(plan.mass > 0)


def test_wasserstein_basics():
    x = SortedLine.from_sample([0.0, 1.0])
    assert wasserstein_1d(x, x, p=2) == 0.0
    y = SortedLine.from_sample([1.0])
    z = SortedLine.from_sample([0.0])
    for p in (1.0, 2.0, 3.5):
        assert wasserstein_1d(z, y, p=p) == pytest.approx(1.0)
    # translation by 0.5
    x = SortedLine.from_sample([0.0, 1.0])
    y = SortedLine.from_sample([0.5, 1.5])
    assert wasserstein_1d(x, y, p=2) == pytest.approx(0.5)


def test_wasserstein_symmetry_bitexact():
    rng = np.random.default_rng(4)
    for _ in range(20):
        x = SortedLine.from_sample(rng.standard_normal(9), rng.dirichlet(np.ones(9)))
        y = SortedLine.from_sample(rng.standard_normal(13), rng.dirichlet(np.ones(13)))
        assert wasserstein_1d(x, y) == wasserstein_1d(y, x)


def test_against_lp_oracle():
    rng = np.random.default_rng(7)
    for _ in range(40):
        m = int(rng.integers(1, 9))
        n = int(rng.integers(1, 9))
        xv = rng.standard_normal(m)
        yv = rng.standard_normal(n)
        a = rng.dirichlet(np.ones(m))
        b = rng.dirichlet(np.ones(n))
        for p in (1.0, 2.0):
            ours = wasserstein_1d(SortedLine.from_sample(xv, a), SortedLine.from_sample(yv, b), p=p)
            lp = lp_1d_value(xv, a, yv, b, p=p)
            assert ours == pytest.approx(lp, abs=1e-9)


def test_against_scipy_p1():
    rng = np.random.default_rng(8)
    for _ in range(10):
        xv = rng.standard_normal(50)
        yv = rng.standard_normal(30)
        a = rng.dirichlet(np.ones(50))
        b = rng.dirichlet(np.ones(30))
        ours = wasserstein_1d(SortedLine.from_sample(xv, a), SortedLine.from_sample(yv, b), p=1)
        ref = wasserstein_distance(xv, yv, a, b)
        assert ours == pytest.approx(ref, abs=1e-9)


def test_plan_in_original_indices():
    xv = np.array([3.0, 1.0, 2.0])
    yv = np.array([2.5, 0.5])
    x = SortedLine.from_sample(xv)
    y = SortedLine.from_sample(yv, np.array([0.5, 0.5]))
    value, plan = wasserstein_1d_with_plan(x, y, p=2)
    dense = plan.to_dense(3, 2)
    np.testing.assert_allclose(dense.sum(axis=1), np.full(3, 1 / 3), atol=1e-12)
    np.testing.assert_allclose(dense.sum(axis=0), [0.5, 0.5], atol=1e-12)
    # smallest x value (index 1) must pair with smallest y value (index 1)
    assert dense[1, 1] > 0
    manual = sum(
        plan.mass[e] * (xv[plan.source[e]] - yv[plan.target[e]]) ** 2 for e in range(len(plan))
    )
    assert value == pytest.approx(np.sqrt(manual))


def test_input_validation():
    with pytest.raises(InvalidInputError):
        northwest_coupling(np.array([0.5, 0.6]), np.array([1.0]))
    with pytest.raises(InvalidInputError):
        northwest_coupling(np.array([1.5, -0.5]), np.array([1.0]))
    with pytest.raises(InvalidInputError):
        SortedLine.from_sample([np.inf])
    x = SortedLine.from_sample([0.0])
    with pytest.raises(InvalidInputError):
        wasserstein_1d(x, x, p=0.5)


def test_coupling_cost_orders():
    x = SortedLine.from_sample([0.0, 2.0])
    y = SortedLine.from_sample([1.0, 1.0])
    plan = northwest_coupling(x.weights, y.weights)
    assert coupling_cost_1d(x, y, plan, 1.0) == pytest.approx(1.0)
    assert coupling_cost_1d(x, y, plan, 2.0) == pytest.approx(1.0)
    assert coupling_cost_1d(x, y, plan, 3.0) == pytest.approx(1.0)
