"""Surface height/gradient queries and ASCII-grid ingestion.

Analytic surfaces (flat, incline, sinusoid) have closed-form height and
gradient. Gridded surfaces use bilinear interpolation with edge clamping,
so queries outside the extent never fail.
"""

import math
from collections import deque

from .errors import ConfigError, GridParseError


class Terrain:
    """Base interface: height(x, y) in metres and gradient(x, y) = (dh/dx, dh/dy)."""

    def height(self, x, y):
        raise NotImplementedError

    def gradient(self, x, y):
        raise NotImplementedError


class FlatTerrain(Terrain):
    def height(self, x, y):
        return 0.0

    def gradient(self, x, y):
        return (0.0, 0.0)


class InclineTerrain(Terrain):
    """Plane rising along the given azimuth with the given slope angle."""

    def __init__(self, slope, azimuth=0.0):
        self.slope = slope
        self.azimuth = azimuth
        self._gx = math.tan(slope) * math.cos(azimuth)
        self._gy = math.tan(slope) * math.sin(azimuth)

    def height(self, x, y):
        return self._gx * x + self._gy * y

    def gradient(self, x, y):
        return (self._gx, self._gy)


class SinusoidTerrain(Terrain):
    """h(x, y) = amplitude * sin(2*pi*x / wavelength); independent of y."""

    def __init__(self, amplitude, wavelength):
        if wavelength <= 0.0:
            raise ConfigError("sinusoid wavelength must be positive")
        self.amplitude = amplitude
        self.wavelength = wavelength
        self._k = 2.0 * math.pi / wavelength

    def height(self, x, y):
        return self.amplitude * math.sin(self._k * x)

    def gradient(self, x, y):
        return (self.amplitude * self._k * math.cos(self._k * x), 0.0)


class GridTerrain(Terrain):
    """Row-major heightmap with bilinear interpolation and edge clamping.

    `heights[j][i]` is the height at (origin_x + i*cell, origin_y + j*cell).
    """

    def __init__(self, heights, cell_size, origin=(0.0, 0.0)):
        if cell_size <= 0.0:
            raise ConfigError("grid cell size must be positive")
        nrows = len(heights)
        if nrows == 0:
            raise ConfigError("grid must have at least one row")
        ncols = len(heights[0])
        for j, row in enumerate(heights):
            if len(row) != ncols:
                raise ConfigError(f"grid row {j} has {len(row)} values, expected {ncols}")
            for v in row:
                if not math.isfinite(v):
                    raise ConfigError("grid heights must be finite")
        self.heights = [list(row) for row in heights]
        self.cell_size = cell_size
        self.origin = origin
        self.nrows = nrows
        self.ncols = ncols

    def _clamp_index(self, v, n):
        return 0 if v < 0 else (n - 1 if v > n - 1 else v)

    def height(self, x, y):
        fx = (x - self.origin[0]) / self.cell_size
        fy = (y - self.origin[1]) / self.cell_size
        # Clamp the query point to the grid extent before interpolating.
        fx = min(max(fx, 0.0), self.ncols - 1.0)
        fy = min(max(fy, 0.0), self.nrows - 1.0)
        i0 = self._clamp_index(int(math.floor(fx)), self.ncols)
        j0 = self._clamp_index(int(math.floor(fy)), self.nrows)
        i1 = self._clamp_index(i0 + 1, self.ncols)
        j1 = self._clamp_index(j0 + 1, self.nrows)
        tx = fx - i0
        ty = fy - j0
        h = self.heights
        h00, h10 = h[j0][i0], h[j0][i1]
        h01, h11 = h[j1][i0], h[j1][i1]
        return (
            h00 * (1.0 - tx) * (1.0 - ty)
            + h10 * tx * (1.0 - ty)
            + h01 * (1.0 - tx) * ty
            + h11 * tx * ty
        )

    def gradient(self, x, y):
        # Central finite difference with step equal to the cell size.
        d = self.cell_size
        gx = (self.height(x + d, y) - self.height(x - d, y)) / (2.0 * d)
        gy = (self.height(x, y + d) - self.height(x, y - d)) / (2.0 * d)
        return (gx, gy)


def attitude_from_terrain(terrain, x, y, psi):
    """Kinematic pitch/roll from the local surface slope under heading psi.

    Returns (phi, theta). Pitch is negative when the surface rises along the
    body X axis (Z positive down); roll is positive when the surface rises to
    the cross-track side.
    """
    gx, gy = terrain.gradient(x, y)
    c, s = math.cos(psi), math.sin(psi)
    slope_along = gx * c + gy * s
    slope_cross = gx * s - gy * c
    theta = -math.atan(slope_along)
    phi = math.atan(slope_cross)
    return (phi, theta)


_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value")


def load_ascii_grid(path):
    """Load an ESRI ASCII grid file into a GridTerrain.

    NODATA cells are replaced with the height of their nearest valid
    neighbour (breadth-first fill).
    """
    with open(path, "r", encoding="utf-8") as f:
        lines = f.readlines()

    header = {}
    idx = 0
    while idx < len(lines) and len(header) < 6:
        parts = lines[idx].split()
        if not parts:
            idx += 1
            continue
        key = parts[0].lower()
        if key not in _HEADER_KEYS:
            break
        if len(parts) != 2:
            raise GridParseError(f"malformed header entry {lines[idx].strip()!r}", line=idx + 1)
        try:
            header[key] = float(parts[1])
        except ValueError:
            raise GridParseError(f"non-numeric header value {parts[1]!r}", line=idx + 1)
        idx += 1

    for key in ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize"):
        if key not in header:
            raise GridParseError(f"missing header key {key!r}")
    ncols = int(header["ncols"])
    nrows = int(header["nrows"])
    if ncols < 1 or nrows < 1:
        raise GridParseError("grid dimensions must be at least 1x1")
    nodata = header.get("nodata_value")

    rows = []
    for line_no in range(idx, len(lines)):
        parts = lines[line_no].split()
        if not parts:
            continue
        if len(parts) != ncols:
            raise GridParseError(
                f"expected {ncols} values in data row {len(rows) + 1}, got {len(parts)}",
                line=line_no + 1,
            )
        try:
            rows.append([float(v) for v in parts])
        except ValueError:
            raise GridParseError("non-numeric cell value", line=line_no + 1)
    if len(rows) != nrows:
        raise GridParseError(f"expected {nrows} data rows, got {len(rows)}")

    # ESRI rows run north to south; store with the y index increasing.
    rows.reverse()

    mask = [[nodata is not None and v == nodata for v in row] for row in rows]
    _fill_nodata(rows, mask)
    return GridTerrain(rows, header["cellsize"], (header["xllcorner"], header["yllcorner"]))


def _fill_nodata(rows, mask):
    nrows, ncols = len(rows), len(rows[0])
    queue = deque(
        (j, i) for j in range(nrows) for i in range(ncols) if not mask[j][i]
    )
    if not queue:
        raise GridParseError("grid contains only NODATA cells")
    while queue:
        j, i = queue.popleft()
        for dj, di in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nj, ni = j + dj, i + di
            if 0 <= nj < nrows and 0 <= ni < ncols and mask[nj][ni]:
                rows[nj][ni] = rows[j][i]
                mask[nj][ni] = False
                queue.append((nj, ni))


def terrain_from_spec(spec):
    """Build a Terrain from its config dict, e.g. {"kind": "flat"}."""
    kind = spec.get("kind")
    if kind == "flat":
        return FlatTerrain()
    if kind == "incline":
        return InclineTerrain(spec["slope"], spec.get("azimuth", 0.0))
    if kind == "sinusoid":
        return SinusoidTerrain(spec["amplitude"], spec["wavelength"])
    if kind == "grid":
        return load_ascii_grid(spec["path"])
    raise ConfigError(f"unknown terrain kind {kind!r}")
