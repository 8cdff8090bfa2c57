import numpy as np
import pytest
from hypothesis import given, strategies as st

from nonlocal_lab.errors import (
    ConfigParseError,
    ContainmentViolation,
    SeparationViolation,
    UnsupportedDimension,
)
from nonlocal_lab.geometry import (
    Ball,
    config_from_text,
    config_to_text,
    make_disconnected_config,
    mesh_over,
)


def corollary_config():
    return make_disconnected_config(n=1, x1=-2.0, x2=2.0, r=1.0, R=16.0)


class TestConfigValidation:
    def test_reference_two_interval_config(self):
        cfg = corollary_config()
        b1, b2 = cfg.ball1(), cfg.ball2()
        assert (b1.center[0] - b1.radius, b1.center[0] + b1.radius) == (-3.0, -1.0)
        assert (b2.center[0] - b2.radius, b2.center[0] + b2.radius) == (1.0, 3.0)
        assert cfg.checked

    def test_too_close_centers_rejected(self):
        with pytest.raises(SeparationViolation):
            make_disconnected_config(n=1, x1=0.0, x2=1.0, r=1.0, R=16.0)

    def test_two_dimensional_config_accepted(self):
        cfg = make_disconnected_config(n=2, x1=(-3.0, 0.0), x2=(3.0, 0.0), r=1.0, R=20.0)
        assert cfg.separation == pytest.approx(6.0)

    def test_separation_equality_accepted(self):
        # non-strict bounds: |x1 - x2| = 4r is fine
        cfg = make_disconnected_config(n=1, x1=0.0, x2=4.0, r=1.0, R=20.0)
        assert cfg.separation == pytest.approx(4.0)

    def test_containment_violation(self):
        with pytest.raises(ContainmentViolation):
            make_disconnected_config(n=1, x1=-5.0, x2=0.0, r=1.25, R=14.0)

    def test_unsafe_skips_checks_but_stamps(self):
        cfg = make_disconnected_config(n=1, x1=0.0, x2=1.0, r=1.0, R=16.0, unsafe=True)
        assert not cfg.checked
        assert cfg.as_dict()["unsafe"] is True

    def test_bad_radius_rejected(self):
        with pytest.raises(ConfigParseError):
            make_disconnected_config(n=1, x1=-2.0, x2=2.0, r=-1.0, R=16.0)


@given(
    x1=st.floats(-5, 5),
    r=st.floats(0.1, 2.0),
    sep_frac=st.floats(0, 1),
)
def test_valid_configs_have_disjoint_2r_balls(x1, r, sep_frac):
    sep = (4.0 + 4.0 * sep_frac) * r
    x2 = x1 + sep
    R = 4.0 * (max(abs(x1), abs(x2)) + 2.0 * r) + 1.0
    cfg = make_disconnected_config(n=1, x1=x1, x2=x2, r=r, R=R)
    b1, b2 = cfg.ball1(2.0), cfg.ball2(2.0)
    # open 2r-balls must not intersect (touching allowed)
    assert b1.center[0] + b1.radius <= b2.center[0] - b2.radius + 1e-12


class TestMesh:
    def test_reference_cells_n4(self):
        mesh = mesh_over(corollary_config(), N=4)
        assert np.allclose(mesh.centers, [-3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5])
        assert np.allclose(mesh.widths, 1.0)

    def test_minimum_resolution_enforced(self):
        with pytest.raises(ConfigParseError):
            mesh_over(corollary_config(), N=0)

    def test_cell_count_and_width(self):
        mesh = mesh_over(corollary_config(), N=512)
        assert mesh.ncells == 1024
        assert np.allclose(mesh.widths, 4.0 / 512.0)

    def test_widths_tile_intervals_exactly(self):
        mesh = mesh_over(corollary_config(), N=37)
        for k, (a, b) in enumerate(mesh.intervals):
            total = mesh.widths[mesh.interval_of == k].sum()
            assert total == pytest.approx(b - a, rel=1e-15)

    def test_dimension_guard(self):
        cfg = make_disconnected_config(n=2, x1=(-3.0, 0.0), x2=(3.0, 0.0), r=1.0, R=20.0)
        with pytest.raises(UnsupportedDimension):
            mesh_over(cfg, N=8)

    def test_cells_in_ball_uses_open_centers(self):
        mesh = mesh_over(corollary_config(), N=4)
        idx = mesh.cells_in(Ball(np.array([-2.0]), 1.0))
        assert np.allclose(mesh.centers[idx], [-2.5, -1.5])


class TestConfigSerialization:
    def test_round_trip(self):
        cfg = corollary_config()
        text = config_to_text(cfg, N=256)
        back, N = config_from_text(text)
        assert N == 256
        assert back.as_dict() == cfg.as_dict()

    def test_unsafe_round_trip(self):
        cfg = make_disconnected_config(n=1, x1=0.0, x2=1.0, r=1.0, R=16.0, unsafe=True)
        back, N = config_from_text(config_to_text(cfg))
        assert not back.checked
        assert N is None

    def test_comments_and_blank_lines_ignored(self):
        text = "# two intervals\nn = 1\nx1 = -2.0\n\nx2 = 2.0\nr = 1.0\nR = 16.0\n"
        cfg, N = config_from_text(text)
        assert cfg.separation == pytest.approx(4.0)

    def test_missing_key_reported(self):
        with pytest.raises(ConfigParseError, match="missing"):
            config_from_text("n = 1\nx1 = -2\n")

    def test_malformed_line_reported(self):
        with pytest.raises(ConfigParseError, match="line 2"):
            config_from_text("n = 1\nwhat even is this\n")
