import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from mimolink import antenna
from mimolink.antenna import (
    AntennaPattern,
    composite_gain,
    gain_cut,
    sample_pattern,
    wrap_angle,
    write_pattern_csv,
)


def test_defaults_anchor_points():
    p = AntennaPattern()
    assert abs(gain_cut(p, 0.0, p.theta_3db_h) - 18.0) <= 1e-12
    assert abs(gain_cut(p, 30.0, p.theta_3db_h) - 15.0) <= 1e-12
    assert abs(gain_cut(p, 180.0, p.theta_3db_h) - (-12.0)) <= 1e-12


def test_gain_cut_three_db_at_half_beamwidth():
    p = AntennaPattern(g_max=10.0, g_fb=25.0)
    for bw in (7.0, 60.0, 120.0):
        assert_allclose(gain_cut(p, bw / 2.0, bw), 10.0 - 3.0, rtol=1e-15)


def test_gain_cut_floors_at_front_to_back():
    p = AntennaPattern()
    assert gain_cut(p, 179.0, 60.0) == p.g_max - p.g_fb
    assert gain_cut(p, 120.0, 7.0) == p.g_max - p.g_fb


def test_wrap_angle_range():
    assert wrap_angle(180.0) == 180.0
    assert wrap_angle(-180.0) == 180.0
    assert wrap_angle(190.0) == -170.0
    assert wrap_angle(540.0) == 180.0
    assert wrap_angle(0.0) == 0.0


def test_gain_cut_symmetric_and_periodic():
    p = AntennaPattern()
    for theta in (10.0, 45.0, 133.0):
        assert gain_cut(p, theta, 60.0) == gain_cut(p, -theta, 60.0)
        assert gain_cut(p, theta, 60.0) == gain_cut(p, theta + 360.0, 60.0)


def test_validation_messages_name_the_field():
    with pytest.raises(ValueError, match="theta_3db_h"):
        AntennaPattern(theta_3db_h=0.0)
    with pytest.raises(ValueError, match="g_fb"):
        AntennaPattern(g_fb=-1.0)
    with pytest.raises(ValueError, match="sidelobe_suppression"):
        AntennaPattern(sidelobe_suppression=-2.0)


def test_composite_peak_at_tilted_boresight():
    p = AntennaPattern()
    assert_allclose(composite_gain(p, 0.0, p.downtilt), p.g_max, rtol=1e-15)
    # off-boresight in both planes loses both attenuations
    g = composite_gain(p, 30.0, p.downtilt + 3.5)
    assert_allclose(g, p.g_max - 3.0 - 3.0, rtol=1e-12)


def test_composite_bounded_by_front_to_back():
    p = AntennaPattern()
    for az in (0.0, 90.0, 180.0):
        for el in (-90.0, -30.0, 0.0, 45.0, 90.0):
            g = composite_gain(p, az, el)
            assert p.g_max - p.g_fb <= g <= p.g_max


def test_composite_rejects_bad_elevation():
    with pytest.raises(ValueError, match="elevation"):
        composite_gain(AntennaPattern(), 0.0, 91.0)


def test_upper_sidelobe_peak_location_and_level():
    p = AntennaPattern()
    el_sidelobe = p.downtilt - 2.0 * p.theta_3db_v  # two beamwidths above tilt
    g = composite_gain(p, 0.0, el_sidelobe)
    assert_allclose(g, p.sidelobe_level_dbi, rtol=1e-15)
    assert_allclose(el_sidelobe, -12.0, rtol=1e-15)


def test_sidelobe_raises_gain_above_main_lobe_rolloff():
    p = AntennaPattern()
    no_sl = AntennaPattern(sidelobe_suppression=math.inf)
    el = p.downtilt - 2.0 * p.theta_3db_v
    assert composite_gain(p, 0.0, el) > composite_gain(no_sl, 0.0, el)
    assert composite_gain(no_sl, 0.0, el) == p.g_max - p.g_fb


@settings(max_examples=50, deadline=None)
@given(
    az=st.floats(-360.0, 360.0, allow_nan=False),
    el=st.floats(-90.0, 90.0, allow_nan=False),
)
def test_composite_gain_bounds_property(az, el):
    p = AntennaPattern()
    g = composite_gain(p, az, el)
    assert p.g_max - p.g_fb - 1e-12 <= g <= p.g_max + 1e-12


def test_sample_pattern_grid():
    p = AntennaPattern()
    table = sample_pattern(p, "vertical", 1.0)
    assert table.shape == (360, 2)
    assert table[0, 0] == -179.0
    assert table[-1, 0] == 180.0
    assert np.all(np.diff(table[:, 0]) > 0)
    assert 0.0 in table[:, 0]


def test_sample_pattern_step_validation():
    p = AntennaPattern()
    with pytest.raises(ValueError, match="divide 180"):
        sample_pattern(p, "vertical", 7.0)
    with pytest.raises(ValueError, match=r"\(0, 90\]"):
        sample_pattern(p, "vertical", 120.0)
    with pytest.raises(ValueError, match="cut"):
        sample_pattern(p, "diagonal", 1.0)


def test_sample_pattern_coarse_step():
    p = AntennaPattern()
    table = sample_pattern(p, "horizontal", 90.0)
    assert list(table[:, 0]) == [-90.0, 0.0, 90.0, 180.0]


def test_horizontal_cut_peaks_at_zero():
    p = AntennaPattern()
    table = sample_pattern(p, "horizontal", 1.0)
    row = table[np.where(table[:, 0] == 0.0)[0][0]]
    assert_allclose(row[1], p.g_max, rtol=1e-15)
    back = table[np.where(table[:, 0] == 180.0)[0][0]]
    assert_allclose(back[1], p.g_max - p.g_fb, rtol=1e-15)


def test_vertical_cut_peaks_at_downtilt():
    p = AntennaPattern()
    table = sample_pattern(p, "vertical", 1.0)
    peak = table[np.argmax(table[:, 1])]
    assert peak[0] == p.downtilt
    assert_allclose(peak[1], p.g_max, rtol=1e-15)
    sidelobe_row = table[np.where(table[:, 0] == -12.0)[0][0]]
    assert_allclose(sidelobe_row[1], p.sidelobe_level_dbi, rtol=1e-15)


def test_write_pattern_csv_format(tmp_path):
    p = AntennaPattern()
    table = sample_pattern(p, "vertical", 45.0)
    path = tmp_path / "cut.csv"
    write_pattern_csv(table, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "angle_deg,gain_dbi"
    assert len(lines) == 9
    assert lines[-1].startswith("180.0000,")
    for line in lines[1:]:
        angle, gain = line.split(",")
        assert len(angle.split(".")[1]) == 4
        assert len(gain.split(".")[1]) == 4


def test_metadata_carried_through():
    p = AntennaPattern(metadata={"vswr": 1.5, "isolation_db": 30.0})
    assert p.metadata["vswr"] == 1.5
