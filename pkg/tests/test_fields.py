import numpy as np
import pytest

from nematicflow import (
    DirectorField,
    Grid,
    cross,
    discrete_inner,
    dot,
    field_from_fn,
    lincomb,
    linf_length_error,
    scale_by_scalar_field,
)
from nematicflow.fields import (
    FieldConstructionError,
    GridMismatchError,
    constant_field,
    random_unit_director,
)

TWO_PI = 2.0 * np.pi


class TestGrid:
    def test_coords_exclude_right_endpoint(self):
        g = Grid((8, 4, 1), (TWO_PI, 2.0, 1.0), (0.0, -1.0, 0.0))
        x = g.axis_coords(0)
        assert x[0] == 0.0
        assert np.allclose(np.diff(x), TWO_PI / 8)
        assert x[-1] < TWO_PI
        y = g.axis_coords(1)
        assert y[0] == -1.0 and y[-1] == pytest.approx(1.0 - 0.5)

    def test_cell_volume(self):
        g = Grid((4, 4, 1), (2.0, 2.0, 1.0))
        assert g.cell_volume == pytest.approx(4.0 / 16.0)

    @pytest.mark.parametrize("dims", [(0, 4, 4), (-1, 4, 4)])
    def test_invalid_dims(self, dims):
        with pytest.raises(ValueError):
            Grid(dims, (1.0, 1.0, 1.0))

    def test_invalid_lengths(self):
        with pytest.raises(ValueError):
            Grid((4, 4, 4), (1.0, 0.0, 1.0))


class TestFieldFromFn:
    def test_constant_field(self):
        g = Grid((4, 4, 4), (TWO_PI,) * 3)
        n = field_from_fn(g, lambda x, y, z: (0.0 * x, 0.0 * x, 1.0 + 0.0 * x))
        assert np.all(n.data[2] == 1.0)
        assert np.all(n.data[0] == 0.0) and np.all(n.data[1] == 0.0)

    def test_polar_stripe_preset_at_origin(self):
        # angles (2 sin(pi x1), pi x2) at x1 = x2 = 0 give the north pole
        from nematicflow.config import IC_PRESETS

        g = Grid((4, 4, 1), (2.0, 2.0, 1.0))
        n = field_from_fn(g, IC_PRESETS["utest1"])
        assert n.data[0][0, 0, 0] == pytest.approx(0.0, abs=1e-15)
        assert n.data[1][0, 0, 0] == pytest.approx(0.0, abs=1e-15)
        assert n.data[2][0, 0, 0] == pytest.approx(1.0, abs=1e-15)

    def test_reference_trajectory_sample(self):
        # closed-form value at x = (pi/2, 0, pi/2), t = 0: angles are (1, 0)
        from nematicflow.manufactured import exact_solution

        g = Grid((4, 4, 4), (TWO_PI,) * 3)
        n = field_from_fn(g, lambda x, y, z: exact_solution(x, y, z, 0.0))
        assert n.data[0][1, 0, 1] == pytest.approx(0.841471, abs=1e-6)
        assert n.data[1][1, 0, 1] == pytest.approx(0.0, abs=1e-15)
        assert n.data[2][1, 0, 1] == pytest.approx(0.540302, abs=1e-6)

    def test_nonfinite_sample_names_index(self):
        g = Grid((4, 4, 4), (TWO_PI,) * 3)

        def bad(x, y, z):
            v = np.zeros_like(x)
            v[1, 2, 3] = np.inf
            return (v, 0.0 * x, 0.0 * x)

        with pytest.raises(FieldConstructionError, match=r"\(1, 2, 3\)"):
            field_from_fn(g, bad)


class TestDiscreteInner:
    def test_constant_integrand(self):
        g = Grid((8, 8, 8), (TWO_PI,) * 3)
        a = constant_field(g, (1.0, 0.0, 0.0))
        assert discrete_inner(a, a) == pytest.approx(TWO_PI**3, rel=1e-14)

    def test_sin_squared(self):
        # integral of sin^2(x1) over the box is (2 pi)^2 * pi
        g = Grid((16, 16, 16), (TWO_PI,) * 3)
        a = field_from_fn(g, lambda x, y, z: (np.sin(x), 0.0 * x, 0.0 * x))
        assert discrete_inner(a, a) == pytest.approx(TWO_PI**2 * np.pi, rel=1e-13)

    def test_pointwise_orthogonal(self):
        g = Grid((8, 8, 8), (TWO_PI,) * 3)
        a = constant_field(g, (1.0, 0.0, 0.0))
        b = constant_field(g, (0.0, 1.0, 0.0))
        assert discrete_inner(a, b) == 0.0

    def test_grid_mismatch(self):
        a = constant_field(Grid((8, 8, 8), (TWO_PI,) * 3), (1.0, 0.0, 0.0))
        b = constant_field(Grid((8, 8, 4), (TWO_PI,) * 3), (1.0, 0.0, 0.0))
        with pytest.raises(GridMismatchError):
            discrete_inner(a, b)

    def test_symmetric_bilinear(self, rng):
        g = Grid((12, 12, 12), (TWO_PI,) * 3)
        a = random_unit_director(g, rng)
        b = random_unit_director(g, rng)
        c = random_unit_director(g, rng)
        assert discrete_inner(a, b) == pytest.approx(discrete_inner(b, a), rel=1e-13)
        lhs = discrete_inner(lincomb(2.0, a, -3.0, b), c)
        rhs = 2.0 * discrete_inner(a, c) - 3.0 * discrete_inner(b, c)
        assert lhs == pytest.approx(rhs, rel=1e-13)


class TestLengthError:
    def test_unit_field(self):
        from nematicflow.config import IC_PRESETS

        g = Grid((16, 16, 1), (2.0, 2.0, 1.0), (-1.0, -1.0, 0.0))
        n = field_from_fn(g, IC_PRESETS["utest1"])
        assert linf_length_error(n) <= 1e-15

    def test_uniform_scaling(self):
        g = Grid((8, 8, 8), (TWO_PI,) * 3)
        n = constant_field(g, (1.001, 0.0, 0.0))
        assert linf_length_error(n) == pytest.approx(1e-3, rel=1e-10)

    def test_zero_field(self):
        g = Grid((4, 4, 4), (TWO_PI,) * 3)
        assert linf_length_error(constant_field(g, (0.0, 0.0, 0.0))) == 1.0


class TestPointwiseAlgebra:
    def test_basis_cross(self):
        g = Grid((4, 4, 4), (TWO_PI,) * 3)
        ex = constant_field(g, (1.0, 0.0, 0.0))
        ey = constant_field(g, (0.0, 1.0, 0.0))
        out = cross(ex, ey)
        assert np.allclose(out.data[2], 1.0) and np.allclose(out.data[:2], 0.0)

    def test_cross_self_is_zero(self, rng):
        g = Grid((8, 8, 8), (TWO_PI,) * 3)
        a = random_unit_director(g, rng)
        assert np.max(np.abs(cross(a, a).data)) == 0.0

    def test_double_cross_identity(self, rng):
        # (a x b) x a == |a|^2 b - (a.b) a pointwise
        g = Grid((8, 8, 8), (TWO_PI,) * 3)
        a = DirectorField(g, rng.standard_normal((3,) + g.dims))
        b = DirectorField(g, rng.standard_normal((3,) + g.dims))
        lhs = cross(cross(a, b), a).data
        a2 = np.sum(a.data**2, axis=0)
        ab = np.sum(a.data * b.data, axis=0)
        rhs = a2[None] * b.data - ab[None] * a.data
        assert np.max(np.abs(lhs - rhs)) <= 1e-14 * max(1.0, np.max(np.abs(rhs)))

    def test_triple_product_rotation(self, rng):
        # <a x b, c> == <c x a, b> in the discrete inner product
        g = Grid((8, 8, 8), (TWO_PI,) * 3)
        a = random_unit_director(g, rng)
        b = random_unit_director(g, rng)
        c = random_unit_director(g, rng)
        lhs = discrete_inner(cross(a, b), c)
        rhs = discrete_inner(cross(c, a), b)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_cross_orthogonal_to_factor(self, rng):
        g = Grid((8, 8, 8), (TWO_PI,) * 3)
        a = random_unit_director(g, rng)
        b = random_unit_director(g, rng)
        s = dot(cross(a, b), a)
        assert np.max(np.abs(s.data)) <= 1e-14

    def test_scale_by_scalar_field(self, rng):
        g = Grid((4, 4, 4), (TWO_PI,) * 3)
        a = random_unit_director(g, rng)
        s = dot(a, a)
        out = scale_by_scalar_field(s, a)
        assert np.allclose(out.data, a.data * s.data[None])

    def test_ravel_is_x1_fastest(self):
        g = Grid((3, 2, 2), (1.0, 1.0, 1.0))
        n = field_from_fn(g, lambda x, y, z: (x, y, z))
        flat = n.components[0].ravel()
        # first three entries walk x1 at fixed (x2, x3)
        assert np.allclose(flat[:3], g.axis_coords(0))
