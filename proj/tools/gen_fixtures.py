#!/usr/bin/env python3
"""Regenerates the checked-in data fixtures.

The orbital table carries the leading terms of the classical trigonometric
expansions of climatic precession, obliquity, and eccentricity, converted to
rad/kyr. The two core excerpts are synthetic stand-ins with the documented
depth ranges and tie points; their d18O values are a deterministic pseudo
signal, not measurements.
"""

import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")

ARCSEC_PER_YR_TO_RAD_PER_KYR = math.pi / 180.0 / 3600.0 * 1000.0
DEG = math.pi / 180.0

# (amplitude, rate arcsec/yr, phase deg)
PRECESSION = [
    (0.018986, 54.646484, 32.01),
    (0.016354, 57.785370, 197.18),
    (0.013055, 68.296539, 311.69),
    (0.008849, 67.659821, 323.59),
    (0.004248, 56.009789, 143.51),
]

# amplitudes in arcsec, converted to degrees below; constant term in degrees
OBLIQUITY_MEAN_DEG = 23.320556
OBLIQUITY = [
    (-2462.22, 31.609970, 251.9025),
    (-857.32, 32.620499, 280.8325),
    (-629.32, 24.172195, 128.3057),
    (-414.28, 31.983780, 292.7252),
    (-311.76, 44.828339, 15.3747),
]

ECCENTRICITY_MEAN = 0.028707
ECCENTRICITY = [
    (0.011029, 3.138886, 165.16),
    (0.008733, 13.650058, 279.68),
    (0.006150, 10.511172, 114.51),
    (0.003985, 13.013341, 291.57),
    (0.003177, 9.874455, 126.41),
]


def write_orbital():
    lines = [
        "# Orbital element expansions: component amplitude angular_frequency(rad/kyr) phase(rad)",
        "# Leading terms only; adequate over the last 1000 kyr.",
    ]
    for amp, rate, phase in PRECESSION:
        lines.append(
            f"precession {amp:.6f} {rate * ARCSEC_PER_YR_TO_RAD_PER_KYR:.9f} {phase * DEG:.9f}"
        )
    lines.append(f"obliquity {OBLIQUITY_MEAN_DEG:.6f} 0 0")
    for amp, rate, phase in OBLIQUITY:
        lines.append(
            f"obliquity {amp / 3600.0:.9f} {rate * ARCSEC_PER_YR_TO_RAD_PER_KYR:.9f} {phase * DEG:.9f}"
        )
    lines.append(f"eccentricity {ECCENTRICITY_MEAN:.6f} 0 0")
    for amp, rate, phase in ECCENTRICITY:
        lines.append(
            f"eccentricity {amp:.6f} {rate * ARCSEC_PER_YR_TO_RAD_PER_KYR:.9f} {phase * DEG:.9f}"
        )
    with open(os.path.join(DATA, "orbital_coefficients.txt"), "w") as f:
        f.write("\n".join(lines) + "\n")


def d18o(depth, offset, p1, p2):
    return (
        offset
        + 0.45 * math.sin(2.0 * math.pi * depth / 2.6 + p1)
        + 0.25 * math.sin(2.0 * math.pi * depth / 1.1 + p2)
        + 0.08 * math.sin(17.0 * depth)
    )


def core_rows(tie_depth, top_depth, kept, deeper, offset, p1, p2):
    step = (tie_depth - top_depth) / (kept - 1)
    rows = []
    for i in range(kept):
        jitter = 0.0 if i == 0 else 0.015 * math.sin(7.3 * i + 1.7)
        depth = tie_depth - step * i + jitter
        rows.append((round(depth, 3), round(d18o(depth, offset, p1, p2), 3)))
    for k in range(1, deeper + 1):
        depth = tie_depth + step * k + 0.015 * math.sin(3.1 * k + 0.4)
        rows.append((round(depth, 3), round(d18o(depth, offset, p1, p2), 3)))
    rows.sort(key=lambda r: -r[0])
    depths = [r[0] for r in rows]
    assert len(set(depths)) == len(depths)
    assert all(a > b for a, b in zip(depths, depths[1:]))
    assert tie_depth in depths
    return rows


def write_core(name, path, tie_depth, rows, shallow_first):
    lines = [f"#core {name}", "# synthetic stand-in excerpt; see README", f"#tiepoint {tie_depth} 780 2", "depth_m,d18O"]
    ordered = list(reversed(rows)) if shallow_first else rows
    for depth, value in ordered:
        lines.append(f"{depth:.3f},{value:.3f}")
    with open(os.path.join(DATA, path), "w") as f:
        f.write("\n".join(lines) + "\n")


def main():
    os.makedirs(DATA, exist_ok=True)
    write_orbital()
    rows677 = core_rows(30.4, 0.1, 363, 15, 3.5, 0.0, 1.0)
    write_core("ODP677", "odp677_excerpt.csv", 30.4, rows677, shallow_first=False)
    rows846 = core_rows(28.7, 0.1, 308, 12, 3.8, 0.7, 2.1)
    write_core("ODP846", "odp846_excerpt.csv", 28.7, rows846, shallow_first=True)
    print("fixtures written to", DATA)


if __name__ == "__main__":
    main()
