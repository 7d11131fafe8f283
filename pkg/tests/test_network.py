import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mimolink import network
from mimolink.antenna import AntennaPattern
from mimolink.network import (
    PathLossModel,
    SiteLayout,
    assign_segments,
    bundled_layout,
    interference_profile,
    load_layout,
    path_loss,
    write_interference_csv,
)

COORD_TABLE = """site,x_km,y_km
a,0.0,0.0
b,3.0,0.0
c,0.0,4.0
"""

DISTANCE_TABLE = """site_a,site_b,distance_km
a,b,3.0
a,c,4.0
b,c,5.0
"""


def test_load_layout_from_coordinates():
    layout = load_layout(COORD_TABLE)
    assert layout.site_ids == ("a", "b", "c")
    assert_allclose(layout.position("c"), [0.0, 4.0])
    assert len(layout.sectors) == 9


def test_load_layout_synthesizes_from_distances():
    layout = load_layout(DISTANCE_TABLE)
    for a, b, d in [("a", "b", 3.0), ("a", "c", 4.0), ("b", "c", 5.0)]:
        realized = np.linalg.norm(layout.position(a) - layout.position(b))
        assert_allclose(realized, d, rtol=1e-9)
    # canonical pose: first site at origin, second on +x, third above
    assert_allclose(layout.position("a"), [0.0, 0.0], atol=1e-9)
    assert_allclose(layout.position("b")[1], 0.0, atol=1e-9)
    assert layout.position("c")[1] > 0.0


def test_load_layout_rejects_unknown_header():
    with pytest.raises(ValueError, match="header"):
        load_layout("foo,bar\n1,2\n")


def test_load_layout_rejects_disconnected_site():
    table = "site_a,site_b,distance_km\na,b,1.0\nc,d,1.0\n"
    with pytest.raises(ValueError, match="no distance connecting"):
        load_layout(table)


def test_load_layout_rejects_triangle_violation():
    table = "site_a,site_b,distance_km\na,b,10.0\na,c,1.0\nb,c,1.0\n"
    with pytest.raises(ValueError, match="triangle"):
        load_layout(table)


def test_layout_rejects_duplicate_sites():
    with pytest.raises(ValueError, match="unique"):
        SiteLayout(
            site_ids=("a", "a"),
            positions={"a": np.zeros(2)},
        )


def test_bundled_layout_distances_within_one_percent():
    layout = bundled_layout()
    assert len(layout.site_ids) == 11
    assert len(layout.distances) == 11
    for a, b, d in layout.distances:
        realized = np.linalg.norm(layout.position(a) - layout.position(b))
        assert abs(realized - d) <= 0.01 * d


def test_sector_lookup_and_name():
    layout = load_layout(COORD_TABLE)
    sec = layout.sector("a", 120.0)
    assert sec.name == "a:120"
    with pytest.raises(ValueError, match="unknown site"):
        layout.sector("z", 0.0)
    with pytest.raises(ValueError, match="azimuth"):
        layout.sector("a", 45.0)


def test_assignment_one_co_channel_sector_per_other_site():
    layout = bundled_layout()
    assignment = assign_segments(layout)
    serving = layout.sector("1", 0.0)
    co = assignment.co_channel(layout, serving)
    assert len(co) == 10
    assert all(s.azimuth_deg == 0.0 for s in co)
    assert len({s.site_id for s in co}) == 10
    assert all(s.site_id != "1" for s in co)


def test_assignment_segments_cover_all_sectors():
    layout = load_layout(COORD_TABLE)
    assignment = assign_segments(layout)
    segs = [assignment.segment(s) for s in layout.sectors]
    assert sorted(segs) == [0, 0, 0, 1, 1, 1, 2, 2, 2]


def test_path_loss_reference_and_slope():
    m = PathLossModel(reference_distance_km=0.1, reference_loss_db=100.0, exponent=3.5)
    assert path_loss(m, 0.1) == 100.0
    assert_allclose(path_loss(m, 1.0), 135.0, rtol=1e-12)
    assert_allclose(path_loss(m, 10.0) - path_loss(m, 1.0), 35.0, rtol=1e-12)
    # clamp below the reference distance
    assert path_loss(m, 0.01) == 100.0
    with pytest.raises(ValueError, match="> 0"):
        path_loss(m, 0.0)


def test_path_loss_model_validation():
    with pytest.raises(ValueError, match="exponent"):
        PathLossModel(exponent=1.0)
    with pytest.raises(ValueError, match="reference_distance_km"):
        PathLossModel(reference_distance_km=0.0)


def test_interference_profile_sorted_and_consistent():
    layout = bundled_layout()
    assignment = assign_segments(layout)
    serving = layout.sector("1", 0.0)
    entries = interference_profile(
        layout,
        assignment,
        AntennaPattern(),
        PathLossModel(),
        serving,
        (0.5, 0.0),
        43.0,
    )
    assert len(entries) == 10
    inrs = [e.inr for e in entries]
    assert inrs == sorted(inrs, reverse=True)
    for e in entries:
        assert_allclose(e.rx_dbm, 43.0 + e.gain_dbi - e.path_loss_db, rtol=1e-12)
        assert_allclose(e.inr_db, e.rx_dbm - (-104.0), rtol=1e-12)


def test_interference_profile_rejects_remote_mobile():
    layout = bundled_layout()
    assignment = assign_segments(layout)
    serving = layout.sector("1", 0.0)
    with pytest.raises(ValueError, match="bounding box"):
        interference_profile(
            layout,
            assignment,
            AntennaPattern(),
            PathLossModel(),
            serving,
            (1e4, 1e4),
            43.0,
        )


def test_interference_entry_geometry():
    # Single interferer due east of the mobile, boresight pointing at it.
    layout = load_layout("site,x_km,y_km\ns,0.0,0.0\ni,2.0,0.0\n")
    assignment = assign_segments(layout)
    serving = layout.sector("s", 0.0)
    entries = interference_profile(
        layout,
        assignment,
        AntennaPattern(downtilt=0.0),
        PathLossModel(),
        serving,
        (1.0, 0.0),
        40.0,
        bs_height_m=30.0,
        ms_height_m=1.5,
    )
    assert len(entries) == 1
    e = entries[0]
    assert e.sector.site_id == "i"
    assert_allclose(e.distance_km, 1.0, rtol=1e-12)
    # mobile sits due west of the interferer: 180 degrees off boresight
    el = math.degrees(math.atan2(0.0285, 1.0))
    expected_gain = 18.0 - min(30.0, 30.0 + 12.0 * (el / 7.0) ** 2)
    assert_allclose(e.gain_dbi, expected_gain, rtol=1e-9)


def test_write_interference_csv_schema(tmp_path):
    layout = bundled_layout()
    assignment = assign_segments(layout)
    serving = layout.sector("1", 0.0)
    entries = interference_profile(
        layout, assignment, AntennaPattern(), PathLossModel(), serving, (0.5, 0.0), 43.0
    )
    path = tmp_path / "interference.csv"
    write_interference_csv(entries, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "sector,distance_km,gain_dbi,path_loss_db,rx_dbm,inr_db"
    assert len(lines) == 11
    first = lines[1].split(",")
    assert len(first) == 6
    assert first[0] == entries[0].sector.name
