#!/usr/bin/env python3
"""Writes tests/data/sst_like_30x40.bin, a masked gridded dataset with
SST-like structure for the gridded-pipeline acceptance check.

The field is a few smooth large-scale patterns with seasonal and red-noise
time series, plus spatially correlated small-scale noise whose amplitude is
strong in a band off the western coast and weak elsewhere. The output is the
rank-3 "SSEL1" binary layout described in docs/FORMATS.md.

    python3 tools/make_grid_fixture.py [OUT]
"""

import struct
import sys

import numpy as np
from scipy.ndimage import distance_transform_edt, gaussian_filter

NY, NX, T = 30, 40, 120
SEED = 20261016


def land_mask(yy, xx):
    continent = ((yy - 8) / 14.0) ** 2 + ((xx - 3) / 8.5) ** 2 < 1.0
    island = ((yy - 22) / 3.0) ** 2 + ((xx - 27) / 4.0) ** 2 < 1.0
    return continent | island


def red_noise(rng, n, phi):
    out = np.empty(n)
    out[0] = rng.standard_normal()
    scale = np.sqrt(1.0 - phi * phi)
    for t in range(1, n):
        out[t] = phi * out[t - 1] + scale * rng.standard_normal()
    return out


def build(rng):
    yy, xx = np.mgrid[0:NY, 0:NX].astype(float)
    land = land_mask(yy, xx)

    # Large-scale patterns: broad bumps with decaying amplitude.
    months = np.arange(T)
    field = np.zeros((T, NY, NX))
    field += (20.0 + 0.3 * yy)[None]  # mean meridional gradient
    for k in range(10):
        cy, cx = rng.uniform(0, NY), rng.uniform(0, NX)
        ly, lx = rng.uniform(6, 16), rng.uniform(8, 20)
        pattern = np.exp(-(((yy - cy) / ly) ** 2 + ((xx - cx) / lx) ** 2))
        pattern /= np.sqrt((pattern[~land] ** 2).mean())
        if k < 2:
            series = np.sin(2 * np.pi * months / 12.0 + rng.uniform(0, 2 * np.pi))
        else:
            series = red_noise(rng, T, 0.7)
        field += (1.5 / (1 + k)) * series[:, None, None] * pattern[None]

    # Small-scale correlated noise, strongest within a few cells of the coast.
    coast_distance = distance_transform_edt(~land)
    amplitude = 0.08 + 0.6 * np.exp(-coast_distance / 3.0) * (yy < 24)
    for t in range(T):
        eddy = gaussian_filter(rng.standard_normal((NY, NX)), sigma=1.5, mode="nearest")
        eddy /= eddy.std()
        field[t] += amplitude * eddy + 0.01 * rng.standard_normal((NY, NX))

    field[:, land] = np.nan
    return field


def write_ssel1(path, arr):
    with open(path, "wb") as f:
        f.write(b"SSEL1")
        f.write(struct.pack("<I", arr.ndim))
        for d in arr.shape:
            f.write(struct.pack("<I", d))
        f.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "tests/data/sst_like_30x40.bin"
    field = build(np.random.default_rng(SEED))
    write_ssel1(out, field)
    valid = int(np.isfinite(field[0]).sum())
    print(f"{out}: {T} frames, {NY}x{NX} grid, {valid} valid cells")


if __name__ == "__main__":
    main()
