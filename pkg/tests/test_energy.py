import numpy as np
import pytest

from nematicflow import (
    DirectorField,
    ElasticParams,
    constrained_rhs,
    discrete_inner,
    energy,
    variational_derivative,
)
from nematicflow.fields import constant_field, dot, field_from_fn, random_unit_director
from nematicflow.spectral import SpectralPlan

TWO_PI = 2.0 * np.pi
FOUR_PI3 = 4.0 * np.pi**3


def test_elastic_params_validation():
    with pytest.raises(ValueError):
        ElasticParams(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ElasticParams(1.0, np.inf, 1.0)


def test_uniform_field_zero_energy(plan16, grid16):
    n = constant_field(grid16, (0.0, 0.0, 1.0))
    eb = energy(plan16, n, ElasticParams(1, 1, 1))
    assert eb.splay == eb.twist == eb.bend == eb.total == 0.0


def test_twist_field_energy(plan16, grid16):
    # (cos x3, sin x3, 0): twist scalar is identically -1, splay/bend vanish
    n = field_from_fn(grid16, lambda x, y, z: (np.cos(z), np.sin(z), 0 * x))
    eb = energy(plan16, n, ElasticParams(1, 1, 1))
    assert eb.twist == pytest.approx(TWO_PI**3, rel=1e-13)
    assert abs(eb.splay) <= 1e-13 and abs(eb.bend) <= 1e-13
    assert eb.total == pytest.approx(0.5 * TWO_PI**3, rel=1e-13)


def test_splay_bend_field_energy(plan16, grid16):
    # (sin x1, 0, cos x1): div n = cos x1 and |n x curl n|^2 = sin^2 x1
    n = field_from_fn(grid16, lambda x, y, z: (np.sin(x), 0 * x, np.cos(x)))
    eb = energy(plan16, n, ElasticParams(1, 1, 1))
    assert eb.splay == pytest.approx(FOUR_PI3, rel=1e-13)
    assert eb.bend == pytest.approx(FOUR_PI3, rel=1e-13)
    assert abs(eb.twist) <= 1e-13
    assert eb.total == pytest.approx(FOUR_PI3, rel=1e-13)


def test_breakdown_weighting(plan16, grid16, rng):
    n = random_unit_director(grid16, rng)
    p = ElasticParams(0.3, 1.7, 2.5)
    eb = energy(plan16, n, p)
    assert eb.total == pytest.approx(
        0.5 * (p.k1 * eb.splay + p.k2 * eb.twist + p.k3 * eb.bend), rel=1e-14
    )
    assert min(eb.splay, eb.twist, eb.bend) >= -1e-12 * (1 + abs(eb.total))


def test_variational_derivative_uniform(plan16, grid16):
    n = constant_field(grid16, (0.0, 0.0, 1.0))
    g = variational_derivative(plan16, n, ElasticParams(1, 1, 1))
    assert np.max(np.abs(g.data)) <= 1e-14


def test_variational_derivative_twist(plan16, grid16):
    # pure-twist state with only the twist modulus: derivative is 2n
    n = field_from_fn(grid16, lambda x, y, z: (np.cos(z), np.sin(z), 0 * x))
    g = variational_derivative(plan16, n, ElasticParams(0, 1, 0))
    assert np.max(np.abs(g.data - 2.0 * n.data)) <= 1e-11


@pytest.mark.parametrize("seed", range(4))
def test_directional_derivative_oracle(grid16, seed):
    # centered finite difference of the energy along a random direction
    plan = SpectralPlan(grid16)
    rng = np.random.default_rng(100 + seed)
    p = ElasticParams(2, 3, 4)
    n = random_unit_director(grid16, rng)
    v = DirectorField(grid16, 0.5 * random_unit_director(grid16, rng).data)
    eps = 1e-5
    f_plus = energy(plan, DirectorField(grid16, n.data + eps * v.data), p).total
    f_minus = energy(plan, DirectorField(grid16, n.data - eps * v.data), p).total
    fd = (f_plus - f_minus) / (2 * eps)
    an = discrete_inner(variational_derivative(plan, n, p), v)
    assert an == pytest.approx(fd, rel=1e-6)


def test_directional_derivative_many_pairs(grid8):
    # the gradient-consistency property over 20 random pairs
    plan = SpectralPlan(grid8)
    rng = np.random.default_rng(7)
    p = ElasticParams(1, 2, 3)
    worst = 0.0
    for _ in range(20):
        n = random_unit_director(grid8, rng)
        v = DirectorField(grid8, 0.5 * random_unit_director(grid8, rng).data)
        eps = 1e-5
        f_plus = energy(plan, DirectorField(grid8, n.data + eps * v.data), p).total
        f_minus = energy(plan, DirectorField(grid8, n.data - eps * v.data), p).total
        fd = (f_plus - f_minus) / (2 * eps)
        an = discrete_inner(variational_derivative(plan, n, p), v)
        worst = max(worst, abs(an - fd) / max(1e-30, abs(fd)))
    assert worst <= 1e-6


def test_constrained_rhs_uniform(plan16, grid16):
    n = constant_field(grid16, (0.0, 0.0, 1.0))
    assert np.max(np.abs(constrained_rhs(plan16, n, ElasticParams(1, 1, 1)).data)) <= 1e-14


def test_twist_state_is_equilibrium(plan16, grid16):
    # derivative is parallel to n, so the projected flow vanishes
    n = field_from_fn(grid16, lambda x, y, z: (np.cos(z), np.sin(z), 0 * x))
    rhs = constrained_rhs(plan16, n, ElasticParams(0, 1, 0))
    assert np.max(np.abs(rhs.data)) <= 1e-11


def test_constrained_rhs_tangency(plan16, grid16, rng):
    n = random_unit_director(grid16, rng)
    rhs = constrained_rhs(plan16, n, ElasticParams(2, 3, 4))
    tang = dot(rhs, n)
    scale = max(1.0, np.max(np.abs(rhs.data)))
    assert np.max(np.abs(tang.data)) <= 1e-12 * scale


def test_dissipation_sign(plan16, grid16, rng):
    p = ElasticParams(2, 3, 4)
    n = random_unit_director(grid16, rng)
    g = variational_derivative(plan16, n, p)
    rhs = constrained_rhs(plan16, n, p)
    eb = energy(plan16, n, p)
    assert discrete_inner(g, rhs) <= 1e-12 * (1 + abs(eb.total))
