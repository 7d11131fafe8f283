"""Sector antenna gain model with downtilt and an upper sidelobe.

The single-cut pattern is the parabolic 3GPP2 form

    G(theta) = g_max + max(-12 (theta / theta_3db)^2, -g_fb),

i.e. quadratic rolloff in dB floored at the front-to-back ratio. Azimuth
and elevation cuts compose by adding their attenuations, again floored at
g_fb. Elevation is measured positive toward the ground, the same sense as
the downtilt, so the tilted main beam peaks at elevation = downtilt and
the upper sidelobe sits above the horizon at elevation = downtilt minus
two vertical beamwidths.

All angles are degrees and all gains are dBi at every public interface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class AntennaPattern:
    """Far-field gain parameters of one sector antenna.

    g_max:                boresight gain, dBi.
    theta_3db_h:          horizontal 3 dB beamwidth, degrees.
    theta_3db_v:          vertical 3 dB beamwidth, degrees.
    g_fb:                 front-to-back ratio, dB (positive; pattern floor).
    downtilt:             electrical downtilt, degrees, positive toward ground.
    sidelobe_suppression: upper sidelobe suppression, dB; math.inf disables
                          the sidelobe entirely.
    metadata:             electrical parameters that do not shape the
                          far-field gain (VSWR, port isolation, ...), carried
                          through untouched.
    """

    g_max: float = 18.0
    theta_3db_h: float = 60.0
    theta_3db_v: float = 7.0
    g_fb: float = 30.0
    downtilt: float = 2.0
    sidelobe_suppression: float = 18.0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.theta_3db_h > 0:
            raise ValueError(f"theta_3db_h must be > 0, got {self.theta_3db_h}")
        if not self.theta_3db_v > 0:
            raise ValueError(f"theta_3db_v must be > 0, got {self.theta_3db_v}")
        if not self.g_fb > 0:
            raise ValueError(f"g_fb must be > 0, got {self.g_fb}")
        if not self.sidelobe_suppression >= 0:
            raise ValueError(
                f"sidelobe_suppression must be >= 0, got {self.sidelobe_suppression}"
            )

    @property
    def sidelobe_level_dbi(self) -> float:
        """Peak gain of the upper sidelobe (g_max - suppression)."""
        return self.g_max - self.sidelobe_suppression


def wrap_angle(angle_deg: float) -> float:
    """Wrap an angle in degrees into (-180, 180]."""
    wrapped = math.fmod(angle_deg + 180.0, 360.0)
    if wrapped <= 0.0:
        wrapped += 360.0
    return wrapped - 180.0


def gain_cut(p: AntennaPattern, theta_deg: float, beamwidth_deg: float) -> float:
    """Single-cut gain G(theta) = g_max + max(-12 (theta/bw)^2, -g_fb) in dBi."""
    theta = wrap_angle(theta_deg)
    return p.g_max + max(-12.0 * (theta / beamwidth_deg) ** 2, -p.g_fb)


def _horizontal_attenuation(p: AntennaPattern, azimuth_deg: float) -> float:
    az = wrap_angle(azimuth_deg)
    return min(12.0 * (az / p.theta_3db_h) ** 2, p.g_fb)


def _vertical_attenuation(p: AntennaPattern, elevation_deg: float) -> float:
    # Main lobe centered on the downtilt; the upper sidelobe is a second
    # parabolic lobe two vertical beamwidths above it, suppressed by a
    # fixed amount. The effective attenuation is whichever lobe dominates,
    # never more than the front-to-back floor.
    off_main = elevation_deg - p.downtilt
    a_main = 12.0 * (off_main / p.theta_3db_v) ** 2
    off_side = off_main + 2.0 * p.theta_3db_v
    a_side = p.sidelobe_suppression + 12.0 * (off_side / p.theta_3db_v) ** 2
    return min(a_main, a_side, p.g_fb)


def composite_gain(p: AntennaPattern, azimuth_deg: float, elevation_deg: float) -> float:
    """Gain toward (azimuth, elevation) in dBi.

    Azimuth 0 is the sector boresight; elevation is positive toward the
    ground. Horizontal and vertical attenuations add, floored at g_fb, so
    the result always lies in [g_max - g_fb, g_max].
    """
    if not -90.0 <= elevation_deg <= 90.0:
        raise ValueError(f"elevation must be in [-90, 90] degrees, got {elevation_deg}")
    a_h = _horizontal_attenuation(p, azimuth_deg)
    a_v = _vertical_attenuation(p, elevation_deg)
    return p.g_max - min(a_h + a_v, p.g_fb)


def sample_pattern(p: AntennaPattern, cut: str, step_deg: float):
    """Tabulate one pattern cut as rows of (angle_deg, gain_dbi).

    Angles cover (-180, 180] inclusive of 0, ascending, spaced step_deg
    apart; step_deg must divide 180 evenly and lie in (0, 90]. The
    horizontal cut is taken in the plane of the tilted main beam; the
    vertical cut is at boresight azimuth and continues through the back
    hemisphere for angles beyond +-90.
    """
    if cut not in ("horizontal", "vertical"):
        raise ValueError(f"cut must be 'horizontal' or 'vertical', got {cut!r}")
    if not 0.0 < step_deg <= 90.0:
        raise ValueError(f"step must be in (0, 90] degrees, got {step_deg}")
    n_half = 180.0 / step_deg
    if abs(n_half - round(n_half)) > 1e-9:
        raise ValueError(f"step must divide 180 degrees evenly, got {step_deg}")
    n = 2 * int(round(n_half))
    angles = (np.arange(1, n + 1) * step_deg) - 180.0
    gains = np.empty(n)
    for i, angle in enumerate(angles):
        if cut == "horizontal":
            gains[i] = composite_gain(p, angle, p.downtilt)
        elif abs(angle) <= 90.0:
            gains[i] = composite_gain(p, 0.0, angle)
        else:
            # Behind the mast: same polar angle approached from the rear.
            gains[i] = composite_gain(p, 180.0, math.copysign(180.0 - abs(angle), angle))
    return np.column_stack([angles, gains])


def write_pattern_csv(table, path) -> None:
    """Write a sampled cut as `angle_deg,gain_dbi` rows with 4 decimals."""
    with open(path, "w") as fh:
        fh.write("angle_deg,gain_dbi\n")
        for angle, gain in table:
            fh.write(f"{angle:.4f},{gain:.4f}\n")
