"""Masked uniform grids for "balls joined by thin corridors" domains.

The computational domain is a union of k disjoint open disks (the native
territories, one per species) optionally bridged by thin straight
rectangular corridors running center to center.  It is embedded in a
rectangular bounding box and discretized on a uniform square-cell lattice:
a node belongs to the domain iff it lies strictly inside one of the
continuous regions.  Nodes outside the mask carry homogeneous Dirichlet
data in every field defined on the grid.

Rasterization is refinement-monotone (a node interior at spacing h stays
interior at h/2) and shrinking a corridor width can only shrink the node
set, which the property tests rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy import ndimage

from .errors import DomainError

# 4-connectivity for component counting (edges of the 5-point stencil)
_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass(frozen=True)
class BallSpec:
    """One open disk: center, radius, and the species native to it."""

    center: tuple[float, float]
    radius: float
    species_index: int

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"ball radius must be positive, got {self.radius}")
        if self.species_index < 0:
            raise DomainError(f"species_index must be >= 0, got {self.species_index}")


@dataclass(frozen=True)
class CorridorSpec:
    """A straight rectangular bridge between two ball centers.

    The axis is the center-to-center segment; the corridor is the open
    rectangle of the given width around it.
    """

    from_ball: int
    to_ball: int
    width: float

    def __post_init__(self):
        if self.from_ball == self.to_ball:
            raise DomainError("corridor endpoints must be distinct balls")
        if not self.width > 0:
            raise DomainError(f"corridor width must be positive, got {self.width}")


class GridDomain:
    """Uniform grid with an interior mask and per-node region labels.

    Arrays are indexed ``[iy, ix]`` with node coordinates
    ``(x0 + ix*h, y0 + iy*h)``.  ``ball_label`` holds the index of the ball
    containing each node (-1 for none); nodes where a corridor overlaps a
    ball are labeled ball so that ball regions cover the disks completely.
    Instances are immutable after construction and safe to share.
    """

    def __init__(self, h, origin, interior_mask, ball_label, corridor_flag,
                 balls=(), corridors=()):
        interior_mask = np.asarray(interior_mask, dtype=bool)
        ball_label = np.asarray(ball_label, dtype=np.int64)
        corridor_flag = np.asarray(corridor_flag, dtype=bool)
        if interior_mask.ndim != 2:
            raise DomainError("interior mask must be a 2-d array")
        if ball_label.shape != interior_mask.shape or corridor_flag.shape != interior_mask.shape:
            raise DomainError("label arrays must match the mask shape")
        ny, nx = interior_mask.shape
        if interior_mask[0, :].any() or interior_mask[-1, :].any() \
                or interior_mask[:, 0].any() or interior_mask[:, -1].any():
            raise DomainError("interior mask must not touch the grid border")
        self.h = float(h)
        self.origin = (float(origin[0]), float(origin[1]))
        self.nx = nx
        self.ny = ny
        self.interior_mask = interior_mask
        self.ball_label = ball_label
        self.corridor_flag = corridor_flag
        self.balls = tuple(balls)
        self.corridors = tuple(corridors)
        self.n_interior = int(interior_mask.sum())
        for arr in (self.interior_mask, self.ball_label, self.corridor_flag):
            arr.setflags(write=False)
        self._lap_cache: dict[bytes, tuple[sp.csr_matrix, np.ndarray]] = {}

    # -- coordinates -------------------------------------------------------

    def node_x(self, ix):
        return self.origin[0] + np.asarray(ix) * self.h

    def node_y(self, iy):
        return self.origin[1] + np.asarray(iy) * self.h

    def coords(self):
        """Meshgrid arrays (X, Y) with the same [iy, ix] layout as fields."""
        x = self.origin[0] + self.h * np.arange(self.nx)
        y = self.origin[1] + self.h * np.arange(self.ny)
        return np.meshgrid(x, y)

    # -- regions -----------------------------------------------------------

    def ball_mask(self, ball_index):
        return self.ball_label == ball_index

    def species_ball_mask(self, species_index):
        """Interior mask of the ball whose native species is `species_index`."""
        for b, spec in enumerate(self.balls):
            if spec.species_index == species_index:
                return self.ball_mask(b)
        raise DomainError(f"no ball hosts species {species_index}")

    def connected_components(self):
        """Number of 4-connected components of the interior mask."""
        _, n = ndimage.label(self.interior_mask, structure=_CROSS)
        return int(n)

    # -- interior vector packing -------------------------------------------

    def extract(self, values):
        """Interior nodes of a grid array as a flat vector (C order)."""
        return np.asarray(values)[self.interior_mask]

    def insert(self, vec):
        """Flat interior vector back to a full grid array (zero outside)."""
        out = np.zeros((self.ny, self.nx))
        out[self.interior_mask] = vec
        return out

    # -- discrete Laplacian ------------------------------------------------

    def laplacian(self, region=None):
        """Sparse 5-point matrix of -Laplace on `region` (default: full interior).

        Returns (A, index_map) where A is CSR over the region nodes in
        C order and index_map is an (ny, nx) int array sending grid nodes
        to matrix rows (-1 outside the region).  Neighbors outside the
        region act as homogeneous Dirichlet nodes.  Results are cached.
        """
        if region is None:
            mask = self.interior_mask
        else:
            mask = np.asarray(region, dtype=bool)
            if mask.shape != self.interior_mask.shape:
                raise DomainError("region mask shape does not match the grid")
            if (mask & ~self.interior_mask).any():
                raise DomainError("region contains non-interior nodes")
        key = mask.tobytes()
        hit = self._lap_cache.get(key)
        if hit is not None:
            return hit
        n = int(mask.sum())
        index_map = -np.ones((self.ny, self.nx), dtype=np.int64)
        index_map[mask] = np.arange(n)
        iy, ix = np.nonzero(mask)
        invh2 = 1.0 / (self.h * self.h)
        rows = [np.arange(n)]
        cols = [np.arange(n)]
        vals = [np.full(n, 4.0 * invh2)]
        for dy, dx in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            jy, jx = iy + dy, ix + dx
            ok = (jy >= 0) & (jy < self.ny) & (jx >= 0) & (jx < self.nx)
            nb = np.full(n, -1, dtype=np.int64)
            nb[ok] = index_map[jy[ok], jx[ok]]
            has = nb >= 0
            rows.append(np.arange(n)[has])
            cols.append(nb[has])
            vals.append(np.full(int(has.sum()), -invh2))
        A = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, n),
        ).tocsr()
        index_map.setflags(write=False)
        self._lap_cache[key] = (A, index_map)
        return A, index_map

    @classmethod
    def from_mask(cls, mask, h, origin=(0.0, 0.0)):
        """Ad-hoc domain from an arbitrary interior mask (no region labels).

        Used for manufactured-solution and convergence studies; such
        domains carry no ball/corridor structure.
        """
        mask = np.asarray(mask, dtype=bool)
        label = -np.ones(mask.shape, dtype=np.int64)
        flag = np.zeros(mask.shape, dtype=bool)
        return cls(h, origin, mask, label, flag)


def unit_square_domain(n):
    """Unit square (0,1)^2 with spacing 1/n; interior nodes i, j in 1..n-1."""
    mask = np.zeros((n + 1, n + 1), dtype=bool)
    mask[1:-1, 1:-1] = True
    return GridDomain.from_mask(mask, 1.0 / n, origin=(0.0, 0.0))


def _validate_geometry(balls, corridors, bbox, h):
    x0, y0, x1, y1 = (float(v) for v in bbox)
    if not (x1 > x0 and y1 > y0):
        raise DomainError("bbox must have positive extent")
    if not h > 0:
        raise DomainError(f"spacing must be positive, got {h}")
    for a in range(len(balls)):
        for b in range(a + 1, len(balls)):
            ca, cb = balls[a], balls[b]
            dist = math.hypot(ca.center[0] - cb.center[0], ca.center[1] - cb.center[1])
            if dist <= ca.radius + cb.radius:
                raise DomainError("balls not disjoint")
    nx = int(math.floor((x1 - x0) / h + 1e-12)) + 1
    ny = int(math.floor((y1 - y0) / h + 1e-12)) + 1
    if nx < 3 or ny < 3:
        raise DomainError("bbox holds fewer than 3 nodes per direction")
    # strict containment against the node lattice hull, so the border ring
    # of nodes can never rasterize as interior
    xmax = x0 + (nx - 1) * h
    ymax = y0 + (ny - 1) * h
    for i, ball in enumerate(balls):
        cx, cy = ball.center
        if not (cx - ball.radius > x0 and cx + ball.radius < xmax
                and cy - ball.radius > y0 and cy + ball.radius < ymax):
            raise DomainError(f"ball {i} is not strictly inside the bbox lattice")
    for c, cor in enumerate(corridors):
        if not (0 <= cor.from_ball < len(balls)) or not (0 <= cor.to_ball < len(balls)):
            raise DomainError(f"corridor {c} references a missing ball")
        rmin = min(balls[cor.from_ball].radius, balls[cor.to_ball].radius)
        if not cor.width < rmin:
            raise DomainError(f"corridor {c} width must be below the endpoint radii")
        if cor.width < 3.0 * h:
            raise DomainError("corridor unresolved")
    return x0, y0, nx, ny


def build_domain(balls, corridors, bbox, h):
    """Rasterize balls and corridors into a GridDomain.

    A node is interior iff it lies strictly inside some ball or corridor
    rectangle.  Raises DomainError when balls overlap, a corridor is
    unresolved (width below 3h), geometry leaks out of the bbox, or two
    ball regions become grid-adjacent.
    """
    balls = list(balls)
    corridors = list(corridors)
    x0, y0, nx, ny = _validate_geometry(balls, corridors, bbox, h)
    x = x0 + h * np.arange(nx)
    y = y0 + h * np.arange(ny)
    X, Y = np.meshgrid(x, y)

    ball_label = -np.ones((ny, nx), dtype=np.int64)
    for i, ball in enumerate(balls):
        cx, cy = ball.center
        inside = (X - cx) ** 2 + (Y - cy) ** 2 < ball.radius ** 2
        ball_label[inside] = i

    corridor_flag = np.zeros((ny, nx), dtype=bool)
    for cor in corridors:
        ax, ay = balls[cor.from_ball].center
        bx, by = balls[cor.to_ball].center
        ex, ey = bx - ax, by - ay
        L2 = ex * ex + ey * ey
        t = ((X - ax) * ex + (Y - ay) * ey) / L2
        dperp = np.abs((X - ax) * ey - (Y - ay) * ex) / math.sqrt(L2)
        inside = (t > 0.0) & (t < 1.0) & (dperp < 0.5 * cor.width)
        corridor_flag |= inside
    corridor_flag &= ball_label < 0  # ball wins where regions overlap

    interior = (ball_label >= 0) | corridor_flag

    # distinct ball labels must never touch through a stencil edge
    for axis in (0, 1):
        a = ball_label if axis == 0 else ball_label.T
        la, lb = a[:-1, :], a[1:, :]
        if ((la >= 0) & (lb >= 0) & (la != lb)).any():
            raise DomainError("balls not resolved: distinct balls are grid-adjacent")

    return GridDomain(h, (x0, y0), interior, ball_label, corridor_flag,
                      balls=balls, corridors=corridors)


def region_membership(domain, ix, iy):
    """Classify node (ix, iy): ("exterior", None), ("ball", i) or ("corridor", None)."""
    if not (0 <= ix < domain.nx and 0 <= iy < domain.ny):
        raise IndexError(f"node ({ix}, {iy}) outside the {domain.nx}x{domain.ny} grid")
    if not domain.interior_mask[iy, ix]:
        return ("exterior", None)
    label = int(domain.ball_label[iy, ix])
    if label >= 0:
        return ("ball", label)
    return ("corridor", None)
