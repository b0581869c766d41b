import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hullspace.geometry import (
    DegenerateHullError,
    GridResolutionError,
    OffsetTable,
    box_barge,
    check_constraints,
    compute_moments,
    compute_principal_dimensions,
    parse_offsets,
    validate_geometry,
    write_offsets,
    PrincipalDimensions,
)


def wedge(length, beam, draft, nx, nz):
    """Triangular sections, constant along the length: a prism."""
    x = np.linspace(0, length, nx)
    z = np.linspace(0, draft, nz)
    y = np.broadcast_to(0.5 * beam * z / draft, (nx, nz)).copy()
    return OffsetTable(x, z, y)


class TestMoments:
    def test_box_barge_volume_and_centroid(self):
        m = compute_moments(box_barge(100.0, 20.0, 10.0))
        assert m.volume == pytest.approx(20000.0, rel=1e-12)
        assert m.centroid[0] == pytest.approx(50.0, rel=1e-12)
        assert m.centroid[1] == 0.0

    def test_mirrored_box_identical(self):
        table = box_barge(100.0, 20.0, 10.0)
        mirrored = OffsetTable(table.stations, table.waterlines,
                               table.half_breadths[::-1].copy())
        m1, m2 = compute_moments(table), compute_moments(mirrored)
        assert m1.volume == m2.volume
        assert abs(m1.centroid[0] - 50.0) == abs(m2.centroid[0] - 50.0)

    def test_wedge_matches_prism_formula(self):
        # volume of a prism with triangular section: L * (B/2 * T / 2) * 2 sides
        table = wedge(120.0, 18.0, 9.0, 200, 100)
        exact = 120.0 * 18.0 * 9.0 / 2.0
        assert compute_moments(table).volume == pytest.approx(exact, rel=1e-6)

    def test_quadrature_second_order_convergence(self):
        # smooth analytic hull: parabolic waterlines and sections
        def smooth(nx, nz):
            x = np.linspace(0, 100, nx)
            z = np.linspace(0, 10, nz)
            y = 10.0 * np.outer(1 - (2 * x / 100 - 1) ** 2, 1 - ((10 - z) / 10) ** 2)
            return OffsetTable(x, z, y)

        exact = 2.0 * 10.0 * 100 * (2 / 3) * 10 * (2 / 3)
        errors = [abs(compute_moments(smooth(n, n // 3)).volume - exact)
                  for n in (30, 60, 120)]
        rates = [errors[i] / errors[i + 1] for i in range(2)]
        assert all(r > 3.5 for r in rates)  # ~4x per doubling

    def test_station_reversal_maps_centroid(self):
        rng = np.random.default_rng(2)
        x = np.linspace(0, 80, 40)
        z = np.linspace(0, 8, 12)
        y = rng.uniform(0.5, 6.0, size=(40, 12))
        table = OffsetTable(x, z, y)
        mirrored = OffsetTable(x, z, y[::-1].copy())
        m1, m2 = compute_moments(table), compute_moments(mirrored)
        assert m2.volume == pytest.approx(m1.volume, rel=1e-12)
        assert m2.centroid[0] == pytest.approx((x[0] + x[-1]) - m1.centroid[0], rel=1e-9)

    def test_resolution_floor(self):
        with pytest.raises(GridResolutionError, match="10 stations x 5 waterlines"):
            compute_moments(box_barge(10, 2, 1, n_stations=8, n_waterlines=5))


class TestPrincipalDimensions:
    def test_box_barge(self):
        dims = compute_principal_dimensions(box_barge(100.0, 20.0, 10.0))
        assert dims.length_waterline == 100.0
        assert dims.beam_waterline == 20.0
        assert dims.draft == 10.0
        assert dims.displacement_volume == pytest.approx(20000.0, rel=1e-12)

    def test_bow_taper_measured_between_nonzero_stations(self):
        table = box_barge(100.0, 20.0, 10.0, n_stations=21)
        table.half_breadths[-1, :] = 0.0  # bow tapers to nothing on the last station
        dims = compute_principal_dimensions(table)
        assert dims.length_waterline == pytest.approx(95.0)

    def test_degenerate_top_waterline(self):
        table = box_barge(50.0, 8.0, 4.0)
        table.half_breadths[:, -1] = 0.0
        with pytest.raises(DegenerateHullError):
            compute_principal_dimensions(table)


class TestConstraints:
    def test_feasible_dims(self):
        report = check_constraints(PrincipalDimensions(230.0, 32.0, 10.8, 53000.0))
        assert report.all_satisfied
        assert all(c.satisfied for c in report.per_constraint)

    def test_draft_violation(self):
        report = check_constraints(PrincipalDimensions(230.0, 32.0, 12.0, 53000.0))
        assert not report.all_satisfied
        bad = {c.name: c.satisfied for c in report.per_constraint}
        assert bad["draft"] is False
        assert bad["length_waterline"] is True

    def test_closed_interval_boundary(self):
        report = check_constraints(PrincipalDimensions(220.9, 30.6, 10.3, 51120.5))
        assert report.all_satisfied

    def test_pure_function(self):
        dims = PrincipalDimensions(230.0, 32.0, 10.8, 53000.0)
        assert check_constraints(dims) == check_constraints(dims)

    @given(st.floats(10, 500), st.floats(1, 60), st.floats(0.5, 30),
           st.floats(100, 2e5))
    @settings(max_examples=50)
    def test_all_satisfied_iff_each(self, lwl, bwl, t, vol):
        report = check_constraints(PrincipalDimensions(lwl, bwl, t, vol))
        assert report.all_satisfied == all(c.satisfied for c in report.per_constraint)


class TestValidity:
    def test_box_valid(self):
        assert validate_geometry(box_barge(100, 20, 10)).valid

    def test_negative_breadth_flagged(self):
        table = box_barge(100, 20, 10)
        table.half_breadths[3, 2] = -0.1
        report = validate_geometry(table)
        assert not report.valid
        assert any("negative breadth at (3,2)" in f for f in report.failures)

    def test_non_monotone_axes(self):
        table = box_barge(100, 20, 10)
        stations = table.stations.copy()
        stations[5] = stations[4]
        report = validate_geometry(OffsetTable(stations, table.waterlines,
                                               table.half_breadths))
        assert not report.valid
        assert any("stations" in f for f in report.failures)

    def test_envelope_tolerance_boundary(self):
        # sweep a single fold-over perturbation across the tolerance
        tol = 0.05
        for magnitude, expect_valid in ((0.2 * tol, True), (0.9 * tol, True),
                                        (1.1 * tol, False), (3 * tol, False)):
            table = box_barge(100, 20, 10)
            table.half_breadths[7, 2] += magnitude
            report = validate_geometry(table, envelope_tolerance=tol)
            assert report.valid == expect_valid, magnitude


class TestOffsetTextFormat:
    def test_round_trip_exact(self):
        rng = np.random.default_rng(5)
        table = OffsetTable(np.linspace(0, 90, 15), np.linspace(0, 9, 7),
                            rng.uniform(0, 8, size=(15, 7)))
        back = parse_offsets(write_offsets(table))
        assert np.array_equal(back.stations, table.stations)
        assert np.array_equal(back.waterlines, table.waterlines)
        assert np.array_equal(back.half_breadths, table.half_breadths)

    def test_header_format(self):
        text = write_offsets(box_barge(10, 2, 1))
        assert text.splitlines()[0] == "stations 20 waterlines 10"

    def test_bad_header_rejected(self):
        with pytest.raises(ValueError, match="header"):
            parse_offsets("foo 3 bar 4\n")

    def test_row_count_mismatch_rejected(self):
        text = write_offsets(box_barge(10, 2, 1))
        truncated = "\n".join(text.splitlines()[:-2])
        with pytest.raises(ValueError):
            parse_offsets(truncated)
