import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qla_maxwell.lattice import LatticeGrid, QubitField
from qla_maxwell.media import (Cone, Cylinder, Homogeneous, MediumSpec, Raster, RefractiveField,
                               dyson_map, inverse_dyson, sample_medium, vacuum)


def grid(n=128):
    return LatticeGrid(n, n, 0.1)


def central(a):
    return (0.5 * (np.roll(a, -1, 1) - np.roll(a, 1, 1)), 0.5 * (np.roll(a, -1, 0) - np.roll(a, 1, 0)))


def test_homogeneous_and_vacuum():
    m = vacuum(grid(16))
    assert np.all(m.n == 1) and m.is_homogeneous()
    with pytest.raises(ValueError):
        Homogeneous(0.5)
    h = sample_medium(MediumSpec(Homogeneous(2.5)), grid(16))
    assert np.all(h.n == 2.5) and h.is_homogeneous()


def test_cylinder_profile_values():
    cyl = Cylinder((64, 64), 60, 3.0, 4.0)
    n, _, _ = cyl.evaluate(np.array([64.0, 64 + 30.0, 64 + 200.0]), np.array([64.0, 64.0, 64.0]))
    assert n[0] == pytest.approx(3.0, abs=1e-5)
    assert n[1] == pytest.approx(2.0)  # half height at r = R
    assert n[2] == pytest.approx(1.0, abs=1e-12)
    # 1.02 -> 2.98 transition spans 2 atanh(0.98) w
    span = 2 * np.arctanh(0.98) * 4.0
    lo, _, _ = cyl.evaluate(np.array([64 + 30 + span / 2]), np.array([64.0]))
    hi, _, _ = cyl.evaluate(np.array([64 + 30 - span / 2]), np.array([64.0]))
    assert lo[0] == pytest.approx(1.02) and hi[0] == pytest.approx(2.98)


def test_cone_profile_values():
    cone = Cone((64, 64), 80, 2.0)
    n, gx, _ = cone.evaluate(np.array([64.0, 84.0, 104.0, 120.0]), np.full(4, 64.0))
    assert np.allclose(n, [2.0, 1.5, 1.0, 1.0])
    assert gx[1] == pytest.approx(-1 / 40)
    rounded = Cone((64, 64), 80, 2.0, edge_rounding=3.0)
    n2, _, _ = rounded.evaluate(np.array([64.0, 124.0]), np.array([64.0, 64.0]))
    assert n2[0] == pytest.approx(2.0, abs=1e-6) and n2[1] == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("profile, curvature", [
    (Cylinder((64, 64), 50, 3.0, 5.0), 2.0 / 5.0**2),
    (Cone((64, 64), 60, 2.5, edge_rounding=4.0), 1.5 / 30 / 4.0),
])
def test_analytic_derivatives_match_central_differences(profile, curvature):
    m = sample_medium(MediumSpec(profile), grid())
    cx, cy = central(m.n[2])
    # central differences are O(h^2) with h = 1; bound by the profile's curvature scale
    interior = (slice(2, -2), slice(2, -2))
    tol = 10 * curvature
    assert np.max(np.abs(cx - m.dn_dx[2])[interior]) <= tol
    assert np.max(np.abs(cy - m.dn_dy[2])[interior]) <= tol


def test_raster_uses_periodic_central_differences():
    g = grid(32)
    x, y = g.coords()
    v = 1.5 + 0.2 * np.sin(2 * np.pi * x / 32)
    m = sample_medium(MediumSpec(Raster(v)), g)
    assert np.allclose(m.dn_dx[0], central(v)[0])
    assert np.allclose(m.dn_dy[0], 0)
    with pytest.raises(ValueError):
        sample_medium(MediumSpec(Raster(v[:, :10])), g)
    with pytest.raises(ValueError):
        sample_medium(MediumSpec(Raster(v - 1)), g)


def test_per_axis_overrides():
    spec = MediumSpec(Homogeneous(), {"z": Cylinder((64, 64), 40, 2.0, 3.0)})
    m = sample_medium(spec, grid())
    assert np.all(m.n_x == 1) and np.all(m.n_y == 1) and m.n_z.max() > 1.9
    with pytest.raises(ValueError):
        MediumSpec(Homogeneous(), {"w": Homogeneous()})


def test_scatterer_must_fit():
    with pytest.raises(ValueError):
        sample_medium(MediumSpec(Cylinder((10, 64), 50, 3.0, 5.0)), grid())


def test_refractive_field_validation_and_immutability():
    g = grid(8)
    ones = np.ones((3, 8, 8))
    with pytest.raises(ValueError):
        RefractiveField(g, 0.5 * ones, 0 * ones, 0 * ones)
    with pytest.raises(ValueError):
        RefractiveField(g, ones[:2], 0 * ones[:2], 0 * ones[:2])
    m = RefractiveField(g, ones, 0 * ones, 0 * ones)
    with pytest.raises(ValueError):
        m.n[0, 0, 0] = 2.0


def test_dyson_examples():
    g = grid(8)
    m = sample_medium(MediumSpec(Homogeneous(), {"z": Homogeneous(3.0)}), g)
    E = np.zeros(g.shape + (3,))
    H = np.zeros_like(E)
    f = dyson_map(E, H, m)
    assert f.norm() == 0
    q = np.zeros(g.shape + (6,))
    q[..., 2] = 6.0
    E2, _ = inverse_dyson(QubitField(g, q), m)
    assert np.all(E2[..., 2] == 2.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(1.0, 4.0))
def test_dyson_round_trip(seed, nmax):
    g = grid(16)
    m = sample_medium(MediumSpec(Cylinder((8, 8), 6, nmax, 1.0)), g)
    rng = np.random.default_rng(seed)
    E, H = rng.normal(size=(2,) + g.shape + (3,))
    E2, H2 = inverse_dyson(dyson_map(E, H, m), m)
    assert np.allclose(E2, E, rtol=1e-14, atol=1e-14)
    assert np.array_equal(H2, H)
    v = vacuum(g)
    f = dyson_map(E, H, v)
    assert np.array_equal(f.amplitudes[..., :3], E)
