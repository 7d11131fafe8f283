"""Site layout, trisector frequency reuse and interference budgets.

Sites come either as coordinates or as a (possibly incomplete) list of
pairwise distances; in the latter case planar positions are synthesized by
nonlinear least squares so every listed distance is reproduced within 1%.
Each site carries three sectors at azimuths 0/120/240 degrees, and the
reuse scheme assigns the three subchannel segments to them in azimuth
order, so exactly one sector per site shares any given segment.

Received interference power at a mobile combines the sector antenna gain
toward the mobile with a log-distance path loss, and is reported both in
dBm and as a linear interference-to-noise ratio against a configurable
noise floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.optimize import least_squares

from .antenna import AntennaPattern, composite_gain, wrap_angle

SECTOR_AZIMUTHS = (0.0, 120.0, 240.0)
DISTANCE_RTOL = 0.01
DEFAULT_NOISE_FLOOR_DBM = -104.0
DEFAULT_BS_HEIGHT_M = 30.0
DEFAULT_MS_HEIGHT_M = 1.5


@dataclass(frozen=True)
class Sector:
    site_id: str
    azimuth_deg: float

    @property
    def name(self) -> str:
        return f"{self.site_id}:{self.azimuth_deg:g}"


@dataclass(frozen=True)
class SiteLayout:
    """Sites with planar positions (km) and three sectors each."""

    site_ids: tuple
    positions: dict
    distances: tuple = field(default=())

    def __post_init__(self):
        if len(set(self.site_ids)) != len(self.site_ids):
            raise ValueError("site ids must be unique")
        if set(self.site_ids) != set(self.positions):
            raise ValueError("positions must cover exactly the listed site ids")
        _verify_distances(self.positions, self.distances)

    @property
    def sectors(self) -> tuple:
        return tuple(
            Sector(site, az) for site in self.site_ids for az in SECTOR_AZIMUTHS
        )

    def position(self, site_id: str) -> np.ndarray:
        return self.positions[site_id]

    def sector(self, site_id: str, azimuth_deg: float) -> Sector:
        site_id = str(site_id)
        if site_id not in self.positions:
            raise ValueError(f"unknown site id {site_id!r}")
        for az in SECTOR_AZIMUTHS:
            if abs(az - azimuth_deg) < 1e-9:
                return Sector(site_id, az)
        raise ValueError(f"sector azimuth must be one of {SECTOR_AZIMUTHS}, got {azimuth_deg}")

    def bounding_box(self, pad_km: float = 0.0):
        xy = np.array([self.positions[s] for s in self.site_ids])
        lo = xy.min(axis=0) - pad_km
        hi = xy.max(axis=0) + pad_km
        return lo, hi


@dataclass(frozen=True)
class ReuseAssignment:
    """Sector to subchannel-segment map; segments are 0, 1, 2."""

    segments: dict

    def segment(self, sector: Sector) -> int:
        return self.segments[(sector.site_id, sector.azimuth_deg)]

    def co_channel(self, layout: SiteLayout, serving: Sector) -> list:
        seg = self.segment(serving)
        return [
            s
            for s in layout.sectors
            if self.segment(s) == seg
            and (s.site_id, s.azimuth_deg) != (serving.site_id, serving.azimuth_deg)
        ]


@dataclass(frozen=True)
class PathLossModel:
    """Log-distance path loss, clamped to the reference loss below d0."""

    reference_distance_km: float = 0.1
    reference_loss_db: float = 100.0
    exponent: float = 3.5

    def __post_init__(self):
        if not self.reference_distance_km > 0:
            raise ValueError(
                f"reference_distance_km must be > 0, got {self.reference_distance_km}"
            )
        if not 2.0 <= self.exponent <= 6.0:
            raise ValueError(f"exponent must be in [2, 6], got {self.exponent}")


def path_loss(m: PathLossModel, distance_km: float) -> float:
    """Path loss in dB at the given distance."""
    if distance_km <= 0:
        raise ValueError(f"distance must be > 0 km, got {distance_km}")
    if distance_km < m.reference_distance_km:
        return m.reference_loss_db
    return m.reference_loss_db + 10.0 * m.exponent * math.log10(
        distance_km / m.reference_distance_km
    )


def _verify_distances(positions: dict, distance_rows) -> None:
    for a, b, d in distance_rows:
        realized = float(np.linalg.norm(positions[a] - positions[b]))
        if abs(realized - d) > DISTANCE_RTOL * d:
            raise ValueError(
                f"layout inconsistent: sites {a}-{b} listed at {d} km "
                f"but placed at {realized:.4f} km"
            )


def _check_triangles(distance_map: dict) -> None:
    sites = sorted({s for pair in distance_map for s in pair})
    for i, a in enumerate(sites):
        for b in sites[i + 1 :]:
            for c in sites:
                if c in (a, b):
                    continue
                sides = [(a, b), (a, c), (b, c)]
                if not all(tuple(sorted(p)) in distance_map for p in sides):
                    continue
                d_ab = distance_map[tuple(sorted((a, b)))]
                d_ac = distance_map[tuple(sorted((a, c)))]
                d_bc = distance_map[tuple(sorted((b, c)))]
                if d_ab > (d_ac + d_bc) * (1.0 + DISTANCE_RTOL):
                    raise ValueError(
                        f"layout inconsistent: sites {a}-{b} at {d_ab} km violate "
                        f"the triangle inequality via {c}"
                    )


def _synthesize_positions(site_ids, distance_rows) -> dict:
    """Place sites in the plane so listed pairwise distances are honored.

    Breadth-first seeding from the first site (golden-angle spread for the
    branch directions, deterministic), then a least-squares polish over all
    coordinates. The distance list may omit pairs; only listed pairs
    constrain the placement.
    """
    distance_map = {}
    for a, b, d in distance_rows:
        distance_map[tuple(sorted((a, b)))] = d
    _check_triangles(distance_map)

    neighbors = {s: [] for s in site_ids}
    for (a, b), d in distance_map.items():
        neighbors[a].append((b, d))
        neighbors[b].append((a, d))

    pos = {site_ids[0]: np.zeros(2)}
    golden = math.pi * (3.0 - math.sqrt(5.0))
    queue = [site_ids[0]]
    placed = 0
    while queue:
        current = queue.pop(0)
        for other, d in neighbors[current]:
            if other in pos:
                continue
            angle = placed * golden
            pos[other] = pos[current] + d * np.array([math.cos(angle), math.sin(angle)])
            placed += 1
            queue.append(other)
    for s in site_ids:
        if s not in pos:
            raise ValueError(f"site {s!r} has no distance connecting it to the layout")

    order = list(site_ids)
    pairs = [(order.index(a), order.index(b), d) for (a, b), d in sorted(distance_map.items())]

    def residuals(flat):
        xy = flat.reshape(-1, 2)
        return np.array([np.linalg.norm(xy[i] - xy[j]) - d for i, j, d in pairs])

    x0 = np.concatenate([pos[s] for s in order])
    fit = least_squares(residuals, x0, xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=20000)
    xy = fit.x.reshape(-1, 2)

    # Canonical pose: first site at the origin, second site on the +x axis,
    # first off-axis site in the upper half plane.
    xy = xy - xy[0]
    if len(order) > 1 and np.linalg.norm(xy[1]) > 0:
        theta = math.atan2(xy[1, 1], xy[1, 0])
        c, s = math.cos(theta), math.sin(theta)
        xy = xy @ np.array([[c, -s], [s, c]])
    for row in xy:
        if abs(row[1]) > 1e-9:
            if row[1] < 0:
                xy[:, 1] = -xy[:, 1]
            break
    return {s: xy[i].copy() for i, s in enumerate(order)}


def _parse_table(text: str):
    rows = [line.strip() for line in text.splitlines() if line.strip()]
    if not rows:
        raise ValueError("empty site table")
    header = [h.strip().lower() for h in rows[0].split(",")]
    body = [[c.strip() for c in line.split(",")] for line in rows[1:]]
    return header, body


def load_layout(source) -> SiteLayout:
    """Build a SiteLayout from a delimited site table.

    Two shapes are accepted, distinguished by the header row:
    `site_a,site_b,distance_km` (positions synthesized from distances) or
    `site,x_km,y_km` (positions given directly). `source` is a path or a
    string containing the table itself.
    """
    text = source
    if "\n" not in str(source):
        with open(source) as fh:
            text = fh.read()
    header, body = _parse_table(text)

    if header == ["site_a", "site_b", "distance_km"]:
        distance_rows = []
        site_ids = []
        for a, b, d in body:
            for s in (a, b):
                if s not in site_ids:
                    site_ids.append(s)
            distance_rows.append((a, b, float(d)))
        if not distance_rows:
            raise ValueError("distance table has no rows")
        positions = _synthesize_positions(tuple(site_ids), distance_rows)
        return SiteLayout(
            site_ids=tuple(site_ids),
            positions=positions,
            distances=tuple(distance_rows),
        )
    if header == ["site", "x_km", "y_km"]:
        site_ids = [row[0] for row in body]
        positions = {row[0]: np.array([float(row[1]), float(row[2])]) for row in body}
        return SiteLayout(site_ids=tuple(site_ids), positions=positions)
    raise ValueError(f"unrecognized site table header {header!r}")


def bundled_layout() -> SiteLayout:
    """The layout shipped with the package (11 sites given by distances)."""
    text = (
        resources.files("mimolink").joinpath("data/intersite_distances.csv").read_text()
    )
    return load_layout(text)


def assign_segments(layout: SiteLayout) -> ReuseAssignment:
    """Give each site's sectors the segments 0, 1, 2 in azimuth order."""
    segments = {}
    for site in layout.site_ids:
        for seg, az in enumerate(SECTOR_AZIMUTHS):
            segments[(site, az)] = seg
    return ReuseAssignment(segments=segments)


@dataclass(frozen=True)
class InterferenceEntry:
    sector: Sector
    distance_km: float
    gain_dbi: float
    path_loss_db: float
    rx_dbm: float
    inr: float

    @property
    def inr_db(self) -> float:
        return 10.0 * math.log10(self.inr)


def interference_profile(
    layout: SiteLayout,
    assignment: ReuseAssignment,
    pattern: AntennaPattern,
    model: PathLossModel,
    serving_sector: Sector,
    ms_position,
    tx_power_dbm: float,
    noise_floor_dbm: float = DEFAULT_NOISE_FLOOR_DBM,
    bs_height_m: float = DEFAULT_BS_HEIGHT_M,
    ms_height_m: float = DEFAULT_MS_HEIGHT_M,
) -> list:
    """Per-interferer received power and INR at the mobile, strongest first.

    Interferers are the co-channel sectors (same reuse segment, other
    sites). Each contributes tx_power + antenna gain toward the mobile
    minus the path loss; INR is that power over the noise floor. Azimuth 0
    points along +x and increases counterclockwise; elevation toward the
    mobile is the depression angle from the antenna height.
    """
    key = (serving_sector.site_id, serving_sector.azimuth_deg)
    if key not in assignment.segments or serving_sector.site_id not in layout.positions:
        raise ValueError(f"serving sector {serving_sector.name} not in layout")
    ms = np.asarray(ms_position, dtype=float)
    lo, hi = layout.bounding_box(pad_km=5.0)
    if not (np.all(ms >= lo) and np.all(ms <= hi)):
        raise ValueError(
            f"mobile position {ms.tolist()} outside the padded layout bounding box"
        )

    entries = []
    for sec in assignment.co_channel(layout, serving_sector):
        delta = ms - layout.position(sec.site_id)
        d_km = float(np.linalg.norm(delta))
        bearing = math.degrees(math.atan2(delta[1], delta[0]))
        az_off = wrap_angle(bearing - sec.azimuth_deg)
        drop_km = (bs_height_m - ms_height_m) / 1000.0
        el = math.degrees(math.atan2(drop_km, d_km)) if d_km > 0 else 90.0
        gain = composite_gain(pattern, az_off, el)
        loss = path_loss(model, d_km)
        rx_dbm = tx_power_dbm + gain - loss
        inr = 10.0 ** ((rx_dbm - noise_floor_dbm) / 10.0)
        entries.append(
            InterferenceEntry(
                sector=sec,
                distance_km=d_km,
                gain_dbi=gain,
                path_loss_db=loss,
                rx_dbm=rx_dbm,
                inr=inr,
            )
        )
    entries.sort(key=lambda e: (-e.inr, e.sector.name))
    return entries


def write_interference_csv(entries, path) -> None:
    """Write an interference report with the standard six-column header."""
    with open(path, "w") as fh:
        fh.write("sector,distance_km,gain_dbi,path_loss_db,rx_dbm,inr_db\n")
        for e in entries:
            fh.write(
                f"{e.sector.name},{e.distance_km:.4f},{e.gain_dbi:.4f},"
                f"{e.path_loss_db:.4f},{e.rx_dbm:.4f},{e.inr_db:.4f}\n"
            )
