"""Grid classification, fundamental holes and loops, and image output.

A window of the plane is classified cell by cell with the same
depth-bounded level test used for single points, then the level picture
is probed structurally: the hole at level ``n`` is the connected piece
of the sub-level set around the origin, its boundary is traced as a
closed polyline, and both can be written out as portable bitmaps.

Classification runs through the compiled kernel when the extension is
importable and the function has one of the four closed-form kernels;
otherwise it falls back to per-cell ``max_level`` calls in Python.  The
two paths produce identical grids, which the test suite checks cell by
cell.  Everything outside the window is unknown, so boundedness of a
hole is only ever claimed *within* the window.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np
from scipy import ndimage

from fastescape.escape import DEFAULT_L_RANGE, _check_coverage, max_level
from fastescape.functions import EntireFunction
from fastescape.growth import ThresholdLadder

try:
    from fastescape import _speedups
except ImportError:  # pragma: no cover - depends on the build
    _speedups = None

KERNEL_BACKEND = "compiled" if _speedups is not None else "python"

# level value stored for cells where even the lowest tested level fails
_NO_LEVEL = -(1 << 30)

_MAX_CELLS = 16384 * 16384

# bbox coordinates this large would push |cell center| past the double
# range inside safe_abs; nothing legitimate renders out here
_COORD_LIMIT = 1e300

# complement pieces (holes) are 4-connected, level sets 8-connected: the
# standard dual pairing, so mask and non-mask never cross at a corner
_FOUR = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_EIGHT = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class Bbox:
    """A rectangular window given by its center and half-extents."""

    center: complex
    half_width: float
    half_height: float

    def __post_init__(self) -> None:
        c = complex(self.center)
        hw = float(self.half_width)
        hh = float(self.half_height)
        if not (math.isfinite(hw) and hw > 0.0 and math.isfinite(hh) and hh > 0.0):
            raise ValueError(
                f"window half-extents must be positive, got {hw!r} x {hh!r}"
            )
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise ValueError(f"window center must be finite, got {c!r}")
        if abs(c.real) + hw >= _COORD_LIMIT or abs(c.imag) + hh >= _COORD_LIMIT:
            raise ValueError("window reaches outside the representable plane")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "half_width", hw)
        object.__setattr__(self, "half_height", hh)

    @property
    def left(self) -> float:
        return self.center.real - self.half_width

    @property
    def top(self) -> float:
        return self.center.imag + self.half_height


def _as_bbox(bbox) -> Bbox:
    if isinstance(bbox, Bbox):
        return bbox
    center, hw, hh = bbox
    return Bbox(complex(center), float(hw), float(hh))


@dataclass(frozen=True, eq=False)
class LevelGrid:
    """Per-cell maximal escape levels over a rectangular window.

    ``level[i, j]`` is the largest L in [L_min, L_max] whose depth-N test
    passes at the cell center (row 0 is the top of the window), or an
    internal sentinel when even L_min fails; read it through
    ``level_at``.  ``indeterminate`` carries the per-cell flag of the
    level test.  With ``supersampled`` set, each cell records the best
    of four quarter-offset samples instead of its center.
    """

    function: EntireFunction
    ladder: ThresholdLadder
    bbox: Bbox
    depth: int
    L_min: int
    L_max: int
    level: np.ndarray
    indeterminate: np.ndarray
    supersampled: bool = False

    @property
    def resolution(self) -> tuple[int, int]:
        return (self.level.shape[1], self.level.shape[0])

    @property
    def cell_width(self) -> float:
        return 2.0 * self.bbox.half_width / self.level.shape[1]

    @property
    def cell_height(self) -> float:
        return 2.0 * self.bbox.half_height / self.level.shape[0]

    def x_centers(self) -> np.ndarray:
        w = self.level.shape[1]
        return self.bbox.left + (np.arange(w) + 0.5) * self.cell_width

    def y_centers(self) -> np.ndarray:
        h = self.level.shape[0]
        return self.bbox.top - (np.arange(h) + 0.5) * self.cell_height

    def level_at(self, row: int, col: int) -> int | None:
        v = int(self.level[row, col])
        return None if v == _NO_LEVEL else v

    def origin_cell(self) -> tuple[int, int]:
        """(row, col) of the cell whose center is nearest the origin."""
        return (
            int(np.argmin(np.abs(self.y_centers()))),
            int(np.argmin(np.abs(self.x_centers()))),
        )


@dataclass(frozen=True, eq=False)
class HoleMask:
    """The connected sub-level piece around the origin at one level.

    The mask is 4-connected and contains the origin-nearest cell by
    construction.  ``bounded_in_window`` records whether the piece stays
    clear of the window edge; nothing is claimed about the plane outside.
    """

    grid: LevelGrid
    level: int
    mask: np.ndarray
    bounded_in_window: bool


@dataclass(frozen=True)
class LoopPolyline:
    """The closed boundary curve of a hole, counterclockwise.

    Vertices are plane coordinates on cell-edge midpoints; the closing
    edge from the last vertex back to the first is implicit.
    """

    hole: HoleMask
    vertices: tuple[complex, ...]

    def perimeter(self) -> float:
        pts = self.vertices
        return sum(
            abs(pts[(k + 1) % len(pts)] - pts[k]) for k in range(len(pts))
        )

    def encloses(self, z: complex) -> bool:
        """Even-odd test; points on the curve itself are unspecified."""
        x, y = z.real, z.imag
        pts = self.vertices
        inside = False
        for k in range(len(pts)):
            a = pts[k]
            b = pts[(k + 1) % len(pts)]
            if (a.imag > y) != (b.imag > y):
                xc = a.real + (y - a.imag) * (b.real - a.real) / (b.imag - a.imag)
                if x < xc:
                    inside = not inside
        return inside


@dataclass(frozen=True)
class ComponentSummary:
    """Connected-component counts of one level set (diagnostic only)."""

    level: int
    count: int
    edge_fraction: float


# ---------------------------------------------------------------------------
# classification

def _rungs_as_arrays(ladder: ThresholdLadder) -> tuple[np.ndarray, np.ndarray]:
    depth = np.fromiter((r.depth for r in ladder.rungs), np.int64)
    mantissa = np.fromiter((r.mantissa for r in ladder.rungs), np.float64)
    return depth, mantissa


def _classify_rows_python(
    f: EntireFunction,
    ladder: ThresholdLadder,
    xs: np.ndarray,
    ys: np.ndarray,
    N: int,
    L_min: int,
    L_max: int,
) -> tuple[np.ndarray, np.ndarray]:
    h, w = ys.shape[0], xs.shape[0]
    level = np.full((h, w), _NO_LEVEL, np.int32)
    indet = np.zeros((h, w), np.bool_)
    for i in range(h):
        y = float(ys[i])
        for j in range(w):
            verdict = max_level(f, ladder, complex(float(xs[j]), y), N, L_min, L_max)
            if verdict.level is not None:
                level[i, j] = verdict.level
            indet[i, j] = verdict.indeterminate
    return level, indet


def _classify_rows_kernel(
    kernel_id: int,
    rung_depth: np.ndarray,
    rung_mantissa: np.ndarray,
    xs: np.ndarray,
    ys: np.ndarray,
    N: int,
    L_min: int,
    L_max: int,
) -> tuple[np.ndarray, np.ndarray]:
    h, w = ys.shape[0], xs.shape[0]
    level = np.empty((h, w), np.int32)
    indet = np.empty((h, w), np.uint8)
    _speedups.classify_block(
        kernel_id, xs, ys, N, rung_depth, rung_mantissa,
        L_min, L_max, _NO_LEVEL, level, indet,
    )
    return level, indet.astype(np.bool_)


def classify_grid(
    f: EntireFunction,
    ladder: ThresholdLadder,
    bbox,
    resolution: tuple[int, int],
    N: int,
    L_range: tuple[int, int] = DEFAULT_L_RANGE,
    *,
    supersample: bool = False,
    workers: int | None = None,
    backend: str = "auto",
) -> LevelGrid:
    """Classify every cell of the window by its maximal passing level.

    Cells are sampled at their centers (or at four quarter offsets with
    ``supersample``, recording the best subsample).  Rows are classified
    in parallel blocks and merged in index order, so the result does not
    depend on scheduling.  ``backend`` selects the compiled kernel or
    the pure-Python path explicitly; ``auto`` takes the kernel when the
    build and the function allow it.
    """
    box = _as_bbox(bbox)
    w, h = int(resolution[0]), int(resolution[1])
    if w < 1 or h < 1:
        raise ValueError(f"resolution must be positive, got {w} x {h}")
    if w * h > _MAX_CELLS:
        raise ValueError(f"resolution {w} x {h} exceeds 16384^2 cells")
    N = int(N)
    if N < 1:
        raise ValueError(f"depth must be >= 1, got {N}")
    L_min, L_max = int(L_range[0]), int(L_range[1])
    if L_min > L_max:
        raise ValueError(f"empty level range [{L_min}, {L_max}]")
    _check_coverage(ladder, L_max, N)
    if backend not in ("auto", "compiled", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    use_kernel = f.kernel_id > 0 and _speedups is not None
    if backend == "compiled":
        if f.kernel_id == 0:
            raise ValueError(f"{f.name} has no compiled kernel")
        if _speedups is None:
            raise ValueError("compiled kernel extension is not built")
        use_kernel = True
    elif backend == "python":
        use_kernel = False

    sw, sh = (2 * w, 2 * h) if supersample else (w, h)
    xs = box.left + (np.arange(sw) + 0.5) * (2.0 * box.half_width / sw)
    ys = box.top - (np.arange(sh) + 0.5) * (2.0 * box.half_height / sh)
    xs = np.ascontiguousarray(xs, np.float64)
    ys = np.ascontiguousarray(ys, np.float64)

    if use_kernel:
        rd, rv = _rungs_as_arrays(ladder)

        def run(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            return _classify_rows_kernel(
                f.kernel_id, rd, rv, xs, ys[rows], N, L_min, L_max
            )
    else:

        def run(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            return _classify_rows_python(f, ladder, xs, ys[rows], N, L_min, L_max)

    if workers is None:
        workers = os.cpu_count() or 1
    workers = max(1, min(int(workers), sh))
    blocks = np.array_split(np.arange(sh), workers)
    if workers == 1:
        parts = [run(blocks[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, blocks))
    level = np.vstack([p[0] for p in parts])
    indet = np.vstack([p[1] for p in parts])

    if supersample:
        lvl4 = level.reshape(h, 2, w, 2)
        ind4 = indet.reshape(h, 2, w, 2)
        level = lvl4.max(axis=(1, 3))
        attained = lvl4 == level[:, None, :, None]
        indet = np.logical_and(ind4, attained).any(axis=(1, 3))

    return LevelGrid(
        function=f,
        ladder=ladder,
        bbox=box,
        depth=N,
        L_min=L_min,
        L_max=L_max,
        level=level,
        indeterminate=indet,
        supersampled=supersample,
    )


# ---------------------------------------------------------------------------
# holes and loops

def extract_hole(grid: LevelGrid, n: int) -> HoleMask:
    """The 4-connected piece of {level < n} containing the origin cell.

    This approximates the fundamental hole at level ``n`` from the
    outside in: cells are in the complement whenever their depth-bounded
    test already failed.  Raises when the origin cell itself classifies
    at level >= n, which signals a window/threshold mismatch rather than
    a meaningful hole.
    """
    n = int(n)
    if not grid.L_min <= n <= grid.L_max:
        raise ValueError(
            f"grid tested levels [{grid.L_min}, {grid.L_max}], cannot cut at {n}"
        )
    below = grid.level < n
    oi, oj = grid.origin_cell()
    if not below[oi, oj]:
        raise ValueError(
            f"origin cell classifies at level >= {n}; the hole is empty "
            "at this window and threshold"
        )
    labels, _ = ndimage.label(below, structure=_FOUR)
    mask = labels == labels[oi, oj]
    edge = (
        mask[0, :].any() or mask[-1, :].any()
        or mask[:, 0].any() or mask[:, -1].any()
    )
    return HoleMask(grid=grid, level=n, mask=mask, bounded_in_window=not edge)


# directed marching-squares segments per corner case, oriented with the
# mask on the left; keys pack the four surrounding cells as
# tl*8 + tr*4 + bl*2 + br, offsets are (row, col) on the doubled lattice
_SEGMENTS: dict[int, tuple[tuple[tuple[int, int], tuple[int, int]], ...]] = {
    0: (),
    1: (((0, 1), (1, 0)),),
    2: (((1, 0), (0, -1)),),
    3: (((0, 1), (0, -1)),),
    4: (((-1, 0), (0, 1)),),
    5: (((-1, 0), (1, 0)),),
    6: (((-1, 0), (0, 1)), ((1, 0), (0, -1))),
    7: (((-1, 0), (0, -1)),),
    8: (((0, -1), (-1, 0)),),
    9: (((0, -1), (-1, 0)), ((0, 1), (1, 0))),
    10: (((1, 0), (-1, 0)),),
    11: (((0, 1), (-1, 0)),),
    12: (((0, -1), (0, 1)),),
    13: (((0, -1), (1, 0)),),
    14: (((1, 0), (0, 1)),),
    15: (),
}


def _fill_islands(mask: np.ndarray) -> np.ndarray:
    """Mask with interior non-mask pockets filled.

    Non-mask cells are level-set material and connect 8-wise; pockets
    that cannot reach the window edge are topological islands whose
    boundaries are not part of the outer loop.
    """
    labels, count = ndimage.label(~mask, structure=_EIGHT)
    if count == 0:
        return mask
    edge_labels = np.unique(
        np.concatenate(
            [labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]]
        )
    )
    keep = np.isin(labels, edge_labels[edge_labels != 0])
    return ~keep


def _trace_cycles(filled: np.ndarray) -> list[list[tuple[int, int]]]:
    """All directed boundary cycles of a binary grid, on the doubled
    lattice where corners are even and edge midpoints odd."""
    h, w = filled.shape
    padded = np.zeros((h + 2, w + 2), np.int8)
    padded[1:-1, 1:-1] = filled
    code = (
        8 * padded[:-1, :-1] + 4 * padded[:-1, 1:]
        + 2 * padded[1:, :-1] + padded[1:, 1:]
    )
    seg_next: dict[tuple[int, int], tuple[int, int]] = {}
    for bi, bj in np.argwhere((code != 0) & (code != 15)):
        r2, c2 = 2 * int(bi), 2 * int(bj)
        for (sr, sc), (er, ec) in _SEGMENTS[int(code[bi, bj])]:
            start = (r2 + sr, c2 + sc)
            if start in seg_next:
                raise RuntimeError("boundary tracing produced a branching vertex")
            seg_next[start] = (r2 + er, c2 + ec)
    cycles = []
    while seg_next:
        start = min(seg_next)
        cycle = [start]
        point = seg_next.pop(start)
        while point != start:
            cycle.append(point)
            point = seg_next.pop(point)
        cycles.append(cycle)
    return cycles


def _signed_area(pts: list[complex]) -> float:
    acc = 0.0
    for k in range(len(pts)):
        a = pts[k]
        b = pts[(k + 1) % len(pts)]
        acc += a.real * b.imag - b.real * a.imag
    return 0.5 * acc


def extract_loop(mask: HoleMask) -> LoopPolyline:
    """Trace the outer boundary of a hole as a closed polyline.

    Marching squares with vertices on cell-edge midpoints; mask-diagonal
    corner contacts are cut (the non-mask side connects), matching the
    4/8 connectivity pairing of the masks themselves.  Only the outer
    curve is returned; interior pockets are not part of the loop.
    """
    if not mask.bounded_in_window:
        raise ValueError(
            "hole reaches the window edge; its boundary is not contained "
            "in the window"
        )
    grid = mask.grid
    filled = _fill_islands(mask.mask)
    cycles = _trace_cycles(filled)
    if not cycles:
        raise ValueError("mask is empty, nothing to trace")
    half_w = 0.5 * grid.cell_width
    half_h = 0.5 * grid.cell_height
    left, top = grid.bbox.left, grid.bbox.top

    def to_plane(cycle: list[tuple[int, int]]) -> list[complex]:
        return [complex(left + c2 * half_w, top - r2 * half_h) for r2, c2 in cycle]

    plane_cycles = [to_plane(c) for c in cycles]
    outer = max(plane_cycles, key=lambda pts: abs(_signed_area(pts)))
    if _signed_area(outer) < 0.0:
        outer.reverse()
    return LoopPolyline(hole=mask, vertices=tuple(outer))


def component_diagnostics(grid: LevelGrid) -> tuple[ComponentSummary, ...]:
    """8-connected component counts of each level-≥-L set in the window.

    Purely diagnostic: window truncation can split unbounded components
    into fragments, so only the edge-touching fraction is reported, not
    any boundedness claim.
    """
    out = []
    for L in range(grid.L_min, grid.L_max + 1):
        cells = grid.level >= L
        labels, count = ndimage.label(cells, structure=_EIGHT)
        if count == 0:
            out.append(ComponentSummary(level=L, count=0, edge_fraction=0.0))
            continue
        edge = np.unique(
            np.concatenate(
                [labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]]
            )
        )
        touching = int((edge != 0).sum())
        out.append(
            ComponentSummary(level=L, count=int(count), edge_fraction=touching / count)
        )
    return tuple(out)


# ---------------------------------------------------------------------------
# image output

def default_palette(L_min: int, L_max: int) -> dict[int | None, tuple[int, int, int]]:
    """Grey ramp: unclassified cells white, deeper levels darker."""
    count = L_max - L_min + 1
    step = 255 // (count + 1)
    palette: dict[int | None, tuple[int, int, int]] = {None: (255, 255, 255)}
    for idx in range(count):
        g = 255 - step * (idx + 1)
        palette[L_min + idx] = (g, g, g)
    return palette


def _grid_rgb(grid: LevelGrid, palette: Mapping) -> np.ndarray:
    h, w = grid.level.shape
    rgb = np.empty((h, w, 3), np.uint8)
    for value in np.unique(grid.level):
        key = None if value == _NO_LEVEL else int(value)
        try:
            color = palette[key]
        except KeyError:
            raise ValueError(f"palette has no entry for level {key}") from None
        rgb[grid.level == value] = np.asarray(color, np.uint8)
    return rgb


def _metadata(source: LevelGrid | HoleMask) -> dict:
    grid = source.grid if isinstance(source, HoleMask) else source
    f = grid.function
    doc = {
        "schema": "fastescape.grid-image/1",
        "kind": "hole-mask" if isinstance(source, HoleMask) else "levels",
        "function": {"name": f.name, "params": dict(f.params)},
        "bbox": {
            "center_re": grid.bbox.center.real,
            "center_im": grid.bbox.center.imag,
            "half_width": grid.bbox.half_width,
            "half_height": grid.bbox.half_height,
        },
        "resolution": list(grid.resolution),
        "depth": grid.depth,
        "R": grid.ladder.R,
        "L_range": [grid.L_min, grid.L_max],
        "seed": f.params.get("seed"),
        "supersample": grid.supersampled,
    }
    if isinstance(source, HoleMask):
        doc["level"] = source.level
        doc["bounded_in_window"] = source.bounded_in_window
    return doc


def write_image(
    source: LevelGrid | HoleMask,
    path,
    palette: Mapping | None = None,
) -> Path:
    """Write a hole mask as binary PGM or a level grid as binary PPM.

    Output bytes are a pure function of the source (and palette): header
    fields are separated by single whitespace bytes, with no comments and
    exactly one byte between the maxval and the payload.  A ``.png``
    suffix switches to PNG (needs Pillow; PNG bytes are not guaranteed
    stable across library versions).  A JSON metadata sidecar is written
    next to the image at ``<path>.json``.
    """
    path = Path(path)
    if isinstance(source, HoleMask):
        payload = np.where(source.mask, 255, 0).astype(np.uint8)
        header = b"P5\n%d %d\n255\n" % (payload.shape[1], payload.shape[0])
        mode = "L"
    elif isinstance(source, LevelGrid):
        if palette is None:
            palette = default_palette(source.L_min, source.L_max)
        payload = _grid_rgb(source, palette)
        header = b"P6\n%d %d\n255\n" % (payload.shape[1], payload.shape[0])
        mode = "RGB"
    else:
        raise TypeError(f"cannot render a {type(source).__name__}")
    if path.suffix.lower() == ".png":
        try:
            from PIL import Image
        except ImportError:
            raise ValueError("PNG output needs Pillow installed") from None
        Image.fromarray(payload, mode=mode).save(path, format="PNG")
    else:
        path.write_bytes(header + payload.tobytes())
    sidecar = Path(str(path) + ".json")
    sidecar.write_text(json.dumps(_metadata(source), sort_keys=True, indent=2) + "\n")
    return path
