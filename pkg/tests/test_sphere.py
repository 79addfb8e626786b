import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spheredpp.sphere import (
    PointPattern,
    SpherePoint,
    equal_area_project,
    geodesic_distance,
    sample_uniform,
    sample_uniform_angles,
    surface_measure,
)


class TestSurfaceMeasure:
    def test_circle(self):
        assert surface_measure(1) == pytest.approx(2 * math.pi, rel=1e-15)

    def test_sphere(self):
        assert surface_measure(2) == pytest.approx(4 * math.pi, rel=1e-15)

    def test_d3(self):
        # Gamma formula: 2 pi^2 for S^3
        assert surface_measure(3) == pytest.approx(2 * math.pi**2, rel=1e-14)

    def test_invalid(self):
        with pytest.raises(ValueError):
            surface_measure(0)


class TestGeodesic:
    def test_identity(self):
        p = SpherePoint.s2(1.0, 2.0)
        assert geodesic_distance(p, p) == 0.0

    def test_antipodal(self):
        p = SpherePoint.circle(0.3)
        q = SpherePoint.circle(0.3 + math.pi)
        assert geodesic_distance(p, q) == pytest.approx(math.pi, abs=1e-12)

    def test_pole_to_equator(self):
        pole = SpherePoint.s2(0.0, 0.0)
        eq = SpherePoint.s2(math.pi / 2, 1.3)
        assert geodesic_distance(pole, eq) == pytest.approx(math.pi / 2, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            geodesic_distance(SpherePoint.circle(0.0), SpherePoint.s2(0.0, 0.0))

    @given(
        st.lists(st.tuples(st.floats(0, math.pi), st.floats(0, 2 * math.pi)), min_size=3, max_size=3)
    )
    @settings(max_examples=200, deadline=None)
    def test_symmetry_and_triangle(self, angles):
        a, b, c = (SpherePoint.s2(t, p) for t, p in angles)
        sab = geodesic_distance(a, b)
        sba = geodesic_distance(b, a)
        assert sab == pytest.approx(sba, abs=1e-10)
        assert sab <= geodesic_distance(a, c) + geodesic_distance(c, b) + 1e-10


class TestUniformSampling:
    def test_unit_norm(self):
        rng = np.random.default_rng(1)
        for dim in (1, 2):
            p = sample_uniform(dim, rng)
            assert np.linalg.norm(p.vector) == pytest.approx(1.0, abs=1e-12)

    def test_determinism(self):
        a = [sample_uniform(2, np.random.default_rng(7)).angles for _ in range(1)]
        b = [sample_uniform(2, np.random.default_rng(7)).angles for _ in range(1)]
        assert a == b
        seq1 = [sample_uniform(1, np.random.default_rng(3)).theta for _ in range(5)]
        rng = np.random.default_rng(3)
        seq2 = [sample_uniform(1, rng).theta for _ in range(5)]
        assert seq1[0] == seq2[0]

    def test_mean_vector_small(self):
        rng = np.random.default_rng(42)
        angles = sample_uniform_angles(2, 100_000, rng)
        vecs = np.column_stack(
            [
                np.sin(angles[:, 0]) * np.cos(angles[:, 1]),
                np.sin(angles[:, 0]) * np.sin(angles[:, 1]),
                np.cos(angles[:, 0]),
            ]
        )
        assert np.linalg.norm(vecs.mean(axis=0)) < 0.02

    @pytest.mark.parametrize("p", [0.1, 0.5])
    def test_cap_fractions(self, p):
        # caps of measure p * 4pi around two different centers
        rng = np.random.default_rng(2024)
        n = 100_000
        angles = sample_uniform_angles(2, n, rng)
        vecs = np.column_stack(
            [
                np.sin(angles[:, 0]) * np.cos(angles[:, 1]),
                np.sin(angles[:, 0]) * np.sin(angles[:, 1]),
                np.cos(angles[:, 0]),
            ]
        )
        tol = 3 * math.sqrt(p * (1 - p) / n)
        for center in (np.array([0.0, 0.0, 1.0]), np.array([1.0, 1.0, 1.0]) / math.sqrt(3)):
            frac = np.mean(vecs @ center >= 1.0 - 2.0 * p)
            assert abs(frac - p) <= tol


class TestEqualAreaProjection:
    def test_north_pole_center(self):
        u, v = equal_area_project(SpherePoint.s2(0.0, 0.9))
        assert (u, v) == (0.0, 0.0)

    def test_equator(self):
        u, v = equal_area_project(SpherePoint.s2(math.pi / 2, 0.0))
        assert u == pytest.approx(math.sqrt(2.0), abs=1e-14)
        assert v == pytest.approx(0.0, abs=1e-14)

    def test_south_pole_boundary(self):
        u, v = equal_area_project(SpherePoint.s2(math.pi, 0.3))
        assert math.hypot(u, v) == pytest.approx(2.0, abs=1e-12)

    def test_wrong_dim(self):
        with pytest.raises(ValueError):
            equal_area_project(SpherePoint.circle(0.1))

    def test_area_preservation_monte_carlo(self):
        # uniform points on the sphere must project to uniform points in
        # the plane: the fraction inside a planar disc of radius r equals
        # area(pi r^2) / area(hemisphere 2 pi) = r^2 / 2
        rng = np.random.default_rng(5)
        n = 100_000
        angles = sample_uniform_angles(2, n, rng)
        north = angles[angles[:, 0] <= math.pi / 2]
        r_proj = 2.0 * np.sin(north[:, 0] / 2.0)
        for r in (0.5, 0.9, 1.2):
            frac_of_sphere = np.sum(r_proj <= r) / n
            assert abs(frac_of_sphere - r * r / 4.0) < 0.01  # of the full sphere

    def test_cap_image_is_disc(self):
        rng = np.random.default_rng(6)
        angles = sample_uniform_angles(2, 2000, rng)
        cap = angles[angles[:, 0] <= 0.7]
        radii = [
            math.hypot(*equal_area_project(SpherePoint.s2(t, p))) for t, p in cap
        ]
        assert max(radii) <= 2.0 * math.sin(0.35) + 1e-12


class TestPointPattern:
    def test_rejects_mixed_dims(self):
        with pytest.raises(ValueError):
            PointPattern(2, (SpherePoint.circle(0.0),))

    def test_rejects_duplicates(self):
        p = SpherePoint.s2(0.5, 0.5)
        with pytest.raises(ValueError):
            PointPattern(2, (p, SpherePoint.s2(0.5, 0.5)))

    def test_csv_roundtrip_s2(self):
        rng = np.random.default_rng(8)
        pts = tuple(sample_uniform(2, rng) for _ in range(5))
        pat = PointPattern(2, pts)
        buf = io.StringIO(pat.to_csv_text())
        back = PointPattern.from_csv(buf)
        np.testing.assert_allclose(back.angles(), pat.angles(), atol=1e-15)

    def test_csv_roundtrip_s1(self):
        pat = PointPattern(1, (SpherePoint.circle(0.1), SpherePoint.circle(2.2)))
        buf = io.StringIO(pat.to_csv_text())
        back = PointPattern.from_csv(buf)
        np.testing.assert_allclose(back.angles(), pat.angles(), atol=1e-16)

    def test_csv_header_and_digits(self):
        pat = PointPattern(2, (SpherePoint.s2(1.0, 2.0),))
        text = pat.to_csv_text()
        assert text.splitlines()[0] == "theta,phi,x,y,z"
        # 17 significant digits survive the round trip exactly
        assert float(text.splitlines()[1].split(",")[0]) == 1.0
