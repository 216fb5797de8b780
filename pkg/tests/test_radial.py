import math

import numpy as np
import pytest

from quartic_duality import (
    Branch,
    BranchUnavailable,
    ExponentMismatch,
    Field,
    MaterialParams,
    NodeAtPole,
    NotDoubleWell,
    RadialGrid,
    RadialRegime,
    WrongRegime,
    solve_dual_equation,
)
from quartic_duality.radial import (
    a1_membership_probe,
    available_branches,
    beta_r,
    dual_residual,
    l4_distance,
    lp_norm,
    p_dual,
    p_dual_h_integrand,
    p_dual_integrand,
    p_hat,
    read_field_csv,
    regime_check,
    sample_dual_gaps,
    sample_primal_gaps,
    sigma_r,
    solve_pointwise,
    write_field_csv,
)

from conftest import CASE_A, CASE_B


def test_material_validation():
    with pytest.raises(ValueError):
        MaterialParams(2, 1, 1, 5, 2, 1)
    with pytest.raises(ValueError):
        MaterialParams(2, 1, 1, 5, 0, 1)
    with pytest.raises(ValueError):
        MaterialParams(2, 1, 1, -5, 1, 2)


def test_sigma_beta(case_a, case_b):
    assert sigma_r(case_a, 2.0) == 5.0
    assert beta_r(case_a, 1.0) == -18.0
    assert beta_r(case_b, 1.1) == pytest.approx(-0.05, abs=1e-14)
    assert beta_r(case_b, 1.0) == pytest.approx(2 - 2.05 * 1.21, abs=1e-14)


def test_regime_check(case_a, case_b):
    assert regime_check(case_a) is RadialRegime.CASE_A
    assert regime_check(case_b) is RadialRegime.CASE_B
    assert regime_check(MaterialParams(2, 1, 1, 2, 1, 2)) is RadialRegime.MIXED
    with pytest.raises(NotDoubleWell):
        regime_check(MaterialParams(1, 1, 1, 2, 1, 2))


def test_branch_availability(case_a, case_b):
    with pytest.raises(BranchUnavailable):
        solve_pointwise(case_a, case_a.grid(65), Branch.MIDDLE)
    mixed = MaterialParams(2, 1, 1, 2, 1, 2)
    with pytest.raises(WrongRegime):
        solve_pointwise(mixed, mixed.grid(65), Branch.UPPER)
    assert available_branches(RadialRegime.CASE_B) == (Branch.UPPER, Branch.MIDDLE, Branch.LOWER)


def test_case_a_upper_root_at_outer_radius(case_a):
    grid = case_a.grid(65)
    zeta, _ = solve_pointwise(case_a, grid, "Upper")
    z = zeta.values[-1]
    # (2 s + 4)(s + 1)**2 = beta(2)**2 = 9; f(0.35) = 8.566 < 9 < 9.408 = f(0.4)
    assert 0.35 < z < 0.4
    assert abs((2 * z + 4) * (z + 1) ** 2 - 9.0) <= 1e-12 * 9
    assert np.max(np.abs(dual_residual(case_a, grid, zeta))) <= 1e-12 * max(1.0, 18.0**2)


def test_case_b_orderings(case_b):
    grid = case_b.grid(257)
    z1, z2, z3 = (solve_pointwise(case_b, grid, b)[0].values for b in Branch)
    mu, rho = case_b.mu, case_b.rho
    assert np.all(z1 > -mu) and np.all(-mu > z2) and np.all(z2 > rho)
    assert np.all(rho > z3) and np.all(z3 > -2.0)


def test_pointwise_matches_scalar_solver(case_b):
    grid = case_b.grid(9)
    zeta, v = solve_pointwise(case_b, grid, "Middle")
    for r, z, vv in zip(grid.nodes, zeta.values, v.values):
        tau = -beta_r(case_b, r)
        root = solve_dual_equation(case_b.scalar(tau))[1]
        assert z == root.sigma
        assert vv == pytest.approx((case_b.alpha + tau / root.shift) / r, rel=1e-15)


def test_p_hat_zero_field(case_a):
    grid = case_a.grid()
    assert p_hat(case_a, grid, Field(np.zeros(len(grid)))).value == 0.0


def test_p_dual_closed_form(case_a):
    grid = case_a.grid()
    value, err = p_dual(case_a, grid, Field(np.zeros(len(grid))))
    assert value == pytest.approx(-150 * math.pi, rel=1e-8)
    assert abs(value + 150 * math.pi) <= 10 * err + 1e-12


def test_p_dual_pole(case_a):
    grid = case_a.grid(17)
    z = np.zeros(17)
    z[3] = -case_a.mu
    with pytest.raises(NodeAtPole):
        p_dual(case_a, grid, Field(z))


def test_dual_forms_agree(case_b):
    rng = np.random.default_rng(5)
    r = np.linspace(case_b.a, case_b.b, 101)
    for _ in range(20):
        z = rng.uniform(-5, 5, r.size)
        z = np.where(np.abs(z + case_b.mu) < 1e-2, 0.5, z)
        first, second = p_dual_integrand(case_b, r, z), p_dual_h_integrand(case_b, r, z)
        np.testing.assert_allclose(first, second, rtol=1e-10, atol=1e-10 * np.max(np.abs(first)))


@pytest.mark.parametrize("case, branches", [(CASE_A, ("Upper",)), (CASE_B, ("Upper", "Middle", "Lower"))])
@pytest.mark.parametrize("rule, n", [("CompositeSimpson", 2049), ("GaussLegendreComposite", 513)])
def test_radial_duality(case, branches, rule, n):
    mp = MaterialParams(**case)
    grid = mp.grid(n, rule)
    for b in branches:
        zeta, v = solve_pointwise(mp, grid, b)
        ph, pd = p_hat(mp, grid, v), p_dual(mp, grid, zeta)
        assert abs(ph.value - pd.value) <= 10 * ph.error


def test_case_b_energy_ordering(case_b):
    grid = case_b.grid()
    vals = [p_hat(case_b, grid, solve_pointwise(case_b, grid, b)[1]).value for b in Branch]
    assert vals[0] < vals[1] < vals[2]


def test_fields_continuous_under_refinement(case_b):
    jumps = []
    for n in (65, 129, 257):
        zeta, _ = solve_pointwise(case_b, case_b.grid(n), "Lower")
        jumps.append(np.max(np.abs(np.diff(zeta.values))))
    assert jumps[1] <= 0.55 * jumps[0] and jumps[2] <= 0.55 * jumps[1]


def test_lp_norms():
    grid = RadialGrid.uniform(1.0, 2.0, 65)
    one, zero = Field(np.ones(65)), Field(np.zeros(65))
    assert l4_distance(one, one, grid) == 0.0
    assert l4_distance(one, zero, grid) == pytest.approx(1.0, abs=1e-14)
    assert lp_norm(Field(np.full(65, 2.0), 2.0), grid) == pytest.approx(2.0, abs=1e-14)
    with pytest.raises(ExponentMismatch):
        l4_distance(Field(np.ones(65), 2.0), zero, grid)


def test_l4_of_indicator():
    eps, c = 0.125, 3.0
    # split grid so the indicator's jump sits on a node shared by two sub-grids
    left = RadialGrid.uniform(1.0, 1.0 + eps, 33)
    assert l4_distance(Field(np.full(33, c)), Field(np.zeros(33)), left) == pytest.approx(c * eps**0.25, rel=1e-14)


def test_field_validation():
    with pytest.raises(ValueError):
        Field(np.array([1.0, np.nan]))


def test_field_csv_round_trip(tmp_path, case_b):
    grid = case_b.grid(33)
    zeta, _ = solve_pointwise(case_b, grid, "Lower")
    path = tmp_path / "zeta.csv"
    write_field_csv(path, grid, zeta)
    raw = path.read_bytes()
    assert raw.startswith(b"r,value\n") and b"\r" not in raw
    grid2, zeta2 = read_field_csv(path)
    assert np.array_equal(grid2.nodes, grid.nodes)
    assert np.array_equal(zeta2.values, zeta.values)


def test_probe_bounded_field(case_a):
    res = a1_membership_probe(case_a, lambda r: np.zeros_like(r), levels=4)
    assert res.converges
    # integral of beta**2 / mu over [1, 2], beta = 2 - 20/r**2
    exact = 4 - 80 * 0.5 + 400 * (1 - 1 / 8) / 3
    assert res.limit == pytest.approx(exact, rel=1e-8)


def test_probe_detects_pole(case_a):
    c = 1.5
    rule = lambda r: np.where(r > c, -case_a.mu + (r - c), 1.0 - case_a.mu)  # noqa: E731
    res = a1_membership_probe(case_a, rule, levels=6, breakpoints=(c,))
    assert not res.converges and res.growing and res.trend > 0


def test_optimality_sampling(case_a):
    grid = case_a.grid()
    zeta, v = solve_pointwise(case_a, grid, "Upper")
    rng = np.random.default_rng(0)
    gaps, errs = sample_primal_gaps(case_a, grid, v, 20, rng)
    assert np.all(gaps >= -errs)
    gaps, errs = sample_dual_gaps(case_a, grid, zeta, 20, rng)
    assert np.all(gaps >= -errs)
