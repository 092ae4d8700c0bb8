"""
Image-plane sampling of harmonic maps: grids of circle and ray images, a sampler for
convexity in the direction of the real axis, and SVG/CSV output.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from harmconv import config
from harmconv.errors import DomainError, EvaluationError, OutputError, ParameterError
from harmconv.harmonic import eval_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ImageGrid:
    """ Polylines (arrays of shape (k, 2)) in the image plane plus a description of their source. """
    polylines: tuple
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.polylines) == 0:
            raise ParameterError("an image grid needs at least one polyline")
        for line in self.polylines:
            if line.ndim != 2 or line.shape[1] != 2 or line.shape[0] == 0:
                raise ParameterError("polylines are non-empty (k, 2) arrays")
            if not np.all(np.isfinite(line)):
                raise EvaluationError("image grid has non-finite points")

    @property
    def num_points(self):
        return sum(line.shape[0] for line in self.polylines)


@dataclass(frozen=True)
class CIDResult:
    passed: bool
    worst_line: float
    crossings: int


def image_grid(f, rings=12, rays=24, samples=256, rmax=0.99):
    """
    Images under f of the circles |z| = k rmax / rings (k = 1..rings, closed polylines) and of
    the radial segments [0, rmax] e^{2 pi i j / rays}.
    """
    if not 0 < rmax < 1:
        raise DomainError(f"rmax={rmax} must lie in (0, 1)")
    if rings < 1 or rays < 0 or samples < 2:
        raise ParameterError("image grid needs rings >= 1, rays >= 0 and samples >= 2")

    t = 2 * np.pi * np.arange(samples + 1) / samples
    radii = rmax * np.arange(1, rings + 1) / rings
    circles = radii[:, None] * np.exp(1j * t)[None, :]

    s = np.linspace(0, rmax, samples)
    angles = 2 * np.pi * np.arange(rays) / rays
    segments = s[None, :] * np.exp(1j * angles)[:, None]

    # one evaluation for every point keeps series maps at a single truncation order
    points = np.concatenate([circles.ravel(), segments.ravel()])
    w = np.asarray(eval_map(f, points)).ravel()
    xy = np.stack([w.real, w.imag], axis=-1)

    split = circles.size
    lines = [xy[:split].reshape(rings, samples + 1, 2)[i] for i in range(rings)]
    if rays:
        lines += [xy[split:].reshape(rays, samples, 2)[j] for j in range(rays)]

    meta = {"map": f.describe(), "rings": rings, "rays": rays, "samples": samples, "rmax": rmax}
    return ImageGrid(polylines=tuple(lines), meta=meta)


def _cyclic_sign_changes(signs):
    """ Sign changes around a closed curve; samples inside the deadband (sign 0) are skipped. """
    nonzero = signs[signs != 0]
    if nonzero.shape[0] < 2:
        return 0
    return int(np.count_nonzero(nonzero != np.roll(nonzero, 1)))


def cid_real_check(f, r=0.99, lines=64, samples=4096, eps=config.EPS_SIGN):
    """
    Necessary-condition sampler for convexity in the direction of the real axis. The closed
    curve t -> f(r e^{it}) is cut by ``lines`` horizontal levels spanning its imaginary range
    (minus a 1e-3 relative margin at both ends); a level meeting the curve in more than two
    transversal crossings shows that the image is not convex in that direction.
    Passing is no proof of convexity.

    Returns
    -------
    CIDResult(passed, worst_line, crossings): the level with the most crossings and their count.
    """
    if not 0 < r < 1:
        raise DomainError(f"r={r} must lie in (0, 1)")
    if lines < 1 or samples < 3:
        raise ParameterError("cid_real_check needs lines >= 1 and samples >= 3")

    t = 2 * np.pi * np.arange(samples) / samples
    w = np.asarray(eval_map(f, r * np.exp(1j * t)))
    if not np.all(np.isfinite(w)):
        raise EvaluationError("image curve has non-finite points")

    diameter = float(np.hypot(np.ptp(w.real), np.ptp(w.imag)))
    if diameter < 1e-9:
        raise DomainError(f"degenerate image curve (diameter {diameter:.3e})")

    low, high = float(w.imag.min()), float(w.imag.max())
    margin = 1e-3 * (high - low)
    levels = np.linspace(low + margin, high - margin, lines)

    deadband = eps * max(1.0, diameter)
    worst_line, worst = float(levels[0]), -1
    for level in levels:
        s = w.imag - level
        signs = np.where(s > deadband, 1, np.where(s < -deadband, -1, 0))
        crossings = _cyclic_sign_changes(signs)
        if crossings > worst:
            worst_line, worst = float(level), crossings

    logger.debug("cid check at r=%g: at most %d crossings (level %.6g)", r, worst, worst_line)
    return CIDResult(passed=worst <= 2, worst_line=worst_line, crossings=worst)


def view_box(grid):
    """ (x, y, width, height) of the bounding box with a 5% margin on every side. """
    xy = np.concatenate(grid.polylines)
    xmin, ymin = xy.min(axis=0)
    xmax, ymax = xy.max(axis=0)
    w = (xmax - xmin) or 1.0
    h = (ymax - ymin) or 1.0
    return xmin - 0.05 * w, ymin - 0.05 * h, 1.1 * w, 1.1 * h


def to_svg(grid):
    x, y, w, h = view_box(grid)
    stroke = 0.005 * max(w, h)
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'viewBox="{x:.10g} {y:.10g} {w:.10g} {h:.10g}">')
    paths = []
    for line in grid.polylines:
        d = " ".join(f"{'M' if i == 0 else 'L'}{px:.10g} {py:.10g}" for i, (px, py) in enumerate(line))
        paths.append(f'<path d="{d}" fill="none" stroke="black" stroke-width="{stroke:.10g}"/>')
    return "\n".join([head] + paths + ["</svg>", ""])


def to_rows(grid):
    """ (polyline_id, x, y) rows. """
    return np.concatenate([np.column_stack([np.full(line.shape[0], i), line])
                           for i, line in enumerate(grid.polylines)])


def render(grid, fmt, path):
    """
    Write the grid as SVG (one path per polyline) or as CSV rows ``polyline_id,x,y`` with 17
    significant digits. I/O failures raise OutputError naming the path.
    """
    if fmt not in ("svg", "csv"):
        raise ParameterError(f"unknown format {fmt!r}, choose svg or csv")
    try:
        if fmt == "svg":
            with open(path, "w") as f:
                f.write(to_svg(grid))
        else:
            np.savetxt(path, to_rows(grid), fmt="%d,%.17g,%.17g")
    except OSError as e:
        raise OutputError(path, e.strerror or str(e)) from e
    logger.info("wrote %d polylines to %s", len(grid.polylines), path)
    return path
