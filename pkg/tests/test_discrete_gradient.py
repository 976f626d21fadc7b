import numpy as np
import pytest

from nematicflow import (
    ElasticParams,
    Gonzalez,
    MeanValue,
    OseenFrank,
    dg_gonzalez,
    dg_mean_value,
    dg_oseen_frank,
    discrete_inner,
    energy,
    energy_difference_residual,
    lincomb,
    variational_derivative,
)
from nematicflow.discrete_gradient import evaluate, gauss_legendre, kind_from_name, midstep_fields
from nematicflow.fields import constant_field, field_from_fn, random_unit_pair
from nematicflow.manufactured import exact_field
from nematicflow.spectral import SpectralPlan

P234 = ElasticParams(2, 3, 4)


class TestGaussLegendre:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 8, 16])
    def test_matches_numpy(self, n):
        x, w = gauss_legendre(n)
        x_ref, w_ref = np.polynomial.legendre.leggauss(n)
        assert np.max(np.abs(x - x_ref)) <= 1e-14
        assert np.max(np.abs(w - w_ref)) <= 1e-14

    def test_polynomial_exactness(self):
        # n nodes integrate degree 2n-1 exactly
        x, w = gauss_legendre(3)
        for deg in range(6):
            exact = (1.0 - (-1.0) ** (deg + 1)) / (deg + 1)
            assert np.dot(w, x**deg) == pytest.approx(exact, abs=1e-14)

    def test_invalid_count(self):
        with pytest.raises(ValueError):
            gauss_legendre(0)


class TestMidstepFields:
    def test_twist_state(self, plan16, grid16):
        n = field_from_fn(grid16, lambda x, y, z: (np.cos(z), np.sin(z), 0 * x))
        ms = midstep_fields(plan16, n, n)
        assert np.max(np.abs(ms.twist + 1.0)) <= 1e-12
        assert np.max(np.abs(ms.bend)) <= 1e-12
        assert np.max(np.abs(ms.n_half.data - n.data)) == 0.0

    def test_uniform_state(self, plan16, grid16):
        n = constant_field(grid16, (0.0, 0.0, 1.0))
        ms = midstep_fields(plan16, n, n)
        assert np.max(np.abs(ms.twist)) <= 1e-14
        assert np.max(np.abs(ms.bend)) <= 1e-14

    def test_coincident_states_reduce_to_pointwise(self, plan16, grid16, rng):
        from nematicflow.energy import deformations
        from nematicflow.fields import random_unit_director

        n = random_unit_director(grid16, rng)
        ms = midstep_fields(plan16, n, n)
        d = deformations(plan16, n)
        assert np.allclose(ms.twist, d.twist)
        assert np.allclose(ms.bend, d.bend)


class TestConsistency:
    """All kinds reduce to the variational derivative at coincident states."""

    def test_oseen_frank(self, plan16, grid16, rng):
        nm, _ = random_unit_pair(grid16, rng)
        vd = variational_derivative(plan16, nm, P234)
        d = dg_oseen_frank(plan16, nm, nm, P234)
        assert np.max(np.abs(d.data - vd.data)) <= 1e-12

    @pytest.mark.parametrize("ng", [1, 2, 4])
    def test_mean_value(self, plan16, grid16, rng, ng):
        nm, _ = random_unit_pair(grid16, rng)
        vd = variational_derivative(plan16, nm, P234)
        d = dg_mean_value(plan16, nm, nm, P234, ng)
        assert np.max(np.abs(d.data - vd.data)) <= 1e-13 * max(1, np.max(np.abs(vd.data)))

    def test_gonzalez_coincident(self, plan16, grid16, rng):
        nm, _ = random_unit_pair(grid16, rng)
        vd = variational_derivative(plan16, nm, P234)
        d = dg_gonzalez(plan16, nm, nm, P234, eps0=1e-10)
        assert np.max(np.abs(d.data - vd.data)) == 0.0
        d0 = dg_gonzalez(plan16, nm, nm, P234, eps0=0.0)
        assert np.max(np.abs(d0.data - vd.data)) == 0.0


class TestEnergyDifferenceIdentity:
    """<D, n_new - n_old> must equal F[n_new] - F[n_old]."""

    def test_zero_for_coincident(self, plan16, grid16, rng):
        nm, _ = random_unit_pair(grid16, rng)
        assert energy_difference_residual(plan16, OseenFrank(), nm, nm, P234) == 0.0

    @pytest.mark.parametrize(
        "kind",
        [OseenFrank(), Gonzalez(eps0=0.0), MeanValue(2), MeanValue(4)],
        ids=["oseen-frank", "gonzalez0", "mv2", "mv4"],
    )
    def test_identity_random_pairs(self, plan16, grid16, kind):
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(20):
            nm, np1 = random_unit_pair(grid16, rng)
            worst = max(worst, energy_difference_residual(plan16, kind, nm, np1, P234))
        assert worst <= 1e-10

    def test_identity_on_larger_grid(self):
        from nematicflow import Grid

        grid = Grid((24, 24, 24), (2 * np.pi,) * 3)
        plan = SpectralPlan(grid)
        rng = np.random.default_rng(12)
        nm, np1 = random_unit_pair(grid, rng)
        for kind in (OseenFrank(), Gonzalez(eps0=0.0), MeanValue(2)):
            assert energy_difference_residual(plan, kind, nm, np1, P234) <= 1e-10

    def test_single_gauss_node_under_integrates(self, plan16, grid16):
        # the segment integrand is cubic; the midpoint rule must miss it
        rng = np.random.default_rng(13)
        nm, np1 = random_unit_pair(grid16, rng)
        res = energy_difference_residual(plan16, MeanValue(1), nm, np1, P234)
        assert res > 1e-6

    def test_gonzalez_eps0_residual_bound(self, plan16, grid16):
        # with regularizer eps0 the identity defect is exactly |coeff| * eps0
        rng = np.random.default_rng(14)
        nm, np1 = random_unit_pair(grid16, rng)
        eps0 = 1e-6
        g = variational_derivative(plan16, lincomb(0.5, nm, 0.5, np1), P234)
        dn = lincomb(1.0, np1, -1.0, nm)
        df = energy(plan16, np1, P234).total - energy(plan16, nm, P234).total
        coeff = (df - discrete_inner(g, dn)) / (discrete_inner(dn, dn) + eps0)
        d = dg_gonzalez(plan16, nm, np1, P234, eps0=eps0)
        defect = abs(discrete_inner(d, dn) - df)
        assert defect == pytest.approx(abs(coeff) * eps0, rel=1e-6, abs=1e-15)


class TestSymmetry:
    @pytest.mark.parametrize(
        "kind",
        [OseenFrank(), Gonzalez(eps0=0.0), MeanValue(3)],
        ids=["oseen-frank", "gonzalez0", "mv3"],
    )
    def test_swap_invariance(self, plan16, grid16, kind):
        rng = np.random.default_rng(15)
        nm, np1 = random_unit_pair(grid16, rng)
        d_fwd = evaluate(plan16, kind, nm, np1, P234)
        d_rev = evaluate(plan16, kind, np1, nm, P234)
        scale = max(1.0, np.max(np.abs(d_fwd.data)))
        assert np.max(np.abs(d_fwd.data - d_rev.data)) <= 1e-13 * scale


def test_second_order_midpoint_consistency():
    # against the smooth reference trajectory, D(n(t), n(t+tau)) approximates
    # the derivative at t + tau/2 with O(tau^2) error
    from nematicflow.manufactured import default_grid

    grid = default_grid(16)
    plan = SpectralPlan(grid)
    t0 = 0.3
    errs = []
    taus = [0.04, 0.02, 0.01]
    for tau in taus:
        nm = exact_field(grid, t0)
        np1 = exact_field(grid, t0 + tau)
        mid = exact_field(grid, t0 + 0.5 * tau)
        d = dg_oseen_frank(plan, nm, np1, P234)
        vd = variational_derivative(plan, mid, P234)
        errs.append(np.max(np.abs(d.data - vd.data)))
    assert 3.5 <= errs[0] / errs[1] <= 4.5
    assert 3.5 <= errs[1] / errs[2] <= 4.5


def test_kind_from_name():
    assert isinstance(kind_from_name("oseen-frank"), OseenFrank)
    assert kind_from_name("mean-value", num_gauss_points=2) == MeanValue(2)
    assert kind_from_name("gonzalez").eps0 is None
    with pytest.raises(ValueError):
        kind_from_name("upwind")
