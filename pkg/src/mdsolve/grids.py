"""Mixed-dimensional grid construction on the unit square / cube.

A grid is a collection of subdomains (the porous matrix plus embedded
fracture objects of successively lower dimension) and interfaces that couple
each object to the one dimension below it. All geometries are axis-aligned
on a Cartesian n-by-n(-by-n) lattice with matching grids, so every mortar
cell coincides with one boundary face of the higher-dimensional neighbor and
one cell of the lower-dimensional one.

Degrees of freedom are laid out with all subdomain (pressure) unknowns first
and all interface (mortar flux) unknowns after them.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BoundaryConfig",
    "Subdomain",
    "Interface",
    "DofPartition",
    "MixedDimGrid",
    "Segment",
    "build_network_2d",
    "build_cross_2d",
    "build_random_network_2d",
    "build_regular_network_3d",
]


# A 1d fracture in 2d: runs along `axis` at lattice line `line` of the other
# axis, spanning lattice coordinates [lo, hi] of the running axis.
Segment = namedtuple("Segment", "axis line lo hi")

DIRICHLET = "dirichlet"
NEUMANN = "neumann"


@dataclass(frozen=True)
class BoundaryConfig:
    """Outer-box boundary conditions.

    Dirichlet pressure is imposed on the two sides perpendicular to
    ``dirichlet_axis`` (``value_low`` at coordinate 0, ``value_high`` at
    coordinate 1); every other side is no-flux Neumann. ``dirichlet_axis =
    None`` gives a pure Neumann box.
    """

    dirichlet_axis: int | None = 0
    value_low: float = 1.0
    value_high: float = 0.0

    def tag(self, axis: int, high_side: bool):
        if self.dirichlet_axis is not None and axis == self.dirichlet_axis:
            return (DIRICHLET, self.value_high if high_side else self.value_low)
        return (NEUMANN, 0.0)


@dataclass(frozen=True)
class Subdomain:
    """One geometric object of fixed dimension with its cell grid.

    ``internal_faces`` holds ``(cell_a, cell_b, geometric_factor)`` with the
    factor being face measure divided by center distance in the subdomain's
    own dimension. ``boundary_faces`` holds ``(cell, geometric_factor, tag)``
    where ``tag`` is ``("dirichlet", value)`` or ``("neumann", flux)``.
    """

    id: int
    dim: int
    cell_count: int
    cell_volumes: np.ndarray
    cell_centers: np.ndarray
    internal_faces: tuple
    boundary_faces: tuple


@dataclass(frozen=True)
class Interface:
    """Mortar coupling between a (d+1)-dimensional and a d-dimensional subdomain.

    ``cell_pairs`` holds one entry per mortar cell:
    ``(higher_cell, higher_face_geometric_factor, lower_cell, mortar_area)``,
    all cell indices local to their subdomain. ``orientation`` is the sign of
    the axis component of the higher side's outward normal at each mortar.
    """

    id: int
    dim: int
    higher_id: int
    lower_id: int
    cell_pairs: tuple
    orientation: tuple


@dataclass(frozen=True)
class DofPartition:
    """Contiguous global DOF ranges, subdomains first, interfaces after."""

    omega_ranges: tuple  # (subdomain_id, start, stop)
    gamma_ranges: tuple  # (interface_id, start, stop)

    @property
    def n_omega(self) -> int:
        return self.omega_ranges[-1][2] if self.omega_ranges else 0

    @property
    def n_gamma(self) -> int:
        base = self.n_omega
        return (self.gamma_ranges[-1][2] - base) if self.gamma_ranges else 0

    @property
    def n_total(self) -> int:
        return self.n_omega + self.n_gamma

    def omega_range(self, subdomain_id: int):
        for sid, start, stop in self.omega_ranges:
            if sid == subdomain_id:
                return start, stop
        raise KeyError(f"no omega range for subdomain {subdomain_id}")

    def gamma_range(self, interface_id: int):
        for iid, start, stop in self.gamma_ranges:
            if iid == interface_id:
                return start, stop
        raise KeyError(f"no gamma range for interface {interface_id}")

    def validate(self):
        cursor = 0
        for _, start, stop in list(self.omega_ranges) + list(self.gamma_ranges):
            if start != cursor or stop < start:
                raise ValueError("DOF ranges must be contiguous and ordered")
            cursor = stop
        return self


@dataclass(frozen=True)
class MixedDimGrid:
    ambient_dim: int
    subdomains: tuple
    interfaces: tuple
    dof_partition: DofPartition

    def subdomain(self, sid: int) -> Subdomain:
        return self._by_id(self.subdomains, sid, "subdomain")

    def interface(self, iid: int) -> Interface:
        return self._by_id(self.interfaces, iid, "interface")

    @staticmethod
    def _by_id(items, ident, what):
        for item in items:
            if item.id == ident:
                return item
        raise KeyError(f"no {what} with id {ident}")

    def validate(self):
        """Check structural invariants; raises ValueError on the first violation."""
        sub_by_id = {s.id: s for s in self.subdomains}
        if len(sub_by_id) != len(self.subdomains):
            raise ValueError("duplicate subdomain ids")
        for s in self.subdomains:
            if not 0 <= s.dim <= self.ambient_dim:
                raise ValueError(f"subdomain {s.id} has dim {s.dim} outside 0..{self.ambient_dim}")
            if len(s.cell_volumes) != s.cell_count or len(s.cell_centers) != s.cell_count:
                raise ValueError(f"subdomain {s.id}: cell array lengths mismatch")
            if s.cell_count and np.any(np.asarray(s.cell_volumes) <= 0):
                raise ValueError(f"subdomain {s.id}: nonpositive cell volume")
            for ca, cb, geo in s.internal_faces:
                if ca == cb or not (0 <= ca < s.cell_count and 0 <= cb < s.cell_count):
                    raise ValueError(f"subdomain {s.id}: invalid internal face ({ca},{cb})")
                if geo <= 0:
                    raise ValueError(f"subdomain {s.id}: nonpositive face factor")
            for c, geo, tag in s.boundary_faces:
                if not 0 <= c < s.cell_count or geo <= 0:
                    raise ValueError(f"subdomain {s.id}: invalid boundary face")
                if tag[0] not in (DIRICHLET, NEUMANN):
                    raise ValueError(f"subdomain {s.id}: unknown boundary tag {tag[0]!r}")
        iface_ids = set()
        for itf in self.interfaces:
            if itf.id in iface_ids:
                raise ValueError("duplicate interface ids")
            iface_ids.add(itf.id)
            if itf.higher_id not in sub_by_id or itf.lower_id not in sub_by_id:
                raise ValueError(f"interface {itf.id}: unknown neighbor id")
            hi, lo = sub_by_id[itf.higher_id], sub_by_id[itf.lower_id]
            if hi.dim != lo.dim + 1 or itf.dim != lo.dim:
                raise ValueError(
                    f"interface {itf.id}: dimension chain broken "
                    f"(higher {hi.dim}, lower {lo.dim}, interface {itf.dim})"
                )
            if len(itf.orientation) != len(itf.cell_pairs):
                raise ValueError(f"interface {itf.id}: orientation length mismatch")
            seen_faces = set()
            for (hc, geo, lc, area), sign in zip(itf.cell_pairs, itf.orientation):
                if not 0 <= hc < hi.cell_count or not 0 <= lc < lo.cell_count:
                    raise ValueError(f"interface {itf.id}: cell index out of range")
                if geo <= 0 or area <= 0:
                    raise ValueError(f"interface {itf.id}: nonpositive mortar geometry")
                if sign not in (-1, 1):
                    raise ValueError(f"interface {itf.id}: orientation must be +-1")
                if (hc, sign) in seen_faces:
                    raise ValueError(f"interface {itf.id}: higher-dim face used twice")
                seen_faces.add((hc, sign))
        self.dof_partition.validate()
        for iid, start, stop in self.dof_partition.gamma_ranges:
            if stop - start != len(self.interface(iid).cell_pairs):
                raise ValueError(f"interface {iid}: gamma range does not match mortar count")
        for sid, start, stop in self.dof_partition.omega_ranges:
            if stop - start != self.subdomain(sid).cell_count:
                raise ValueError(f"subdomain {sid}: omega range does not match cell count")
        return self

    def summary(self) -> dict:
        """Counts and DOF layout as a plain dict (JSON-friendly)."""
        by_dim_subs: dict = {}
        by_dim_cells: dict = {}
        for s in self.subdomains:
            by_dim_subs[s.dim] = by_dim_subs.get(s.dim, 0) + 1
            by_dim_cells[s.dim] = by_dim_cells.get(s.dim, 0) + s.cell_count
        return {
            "ambient_dim": self.ambient_dim,
            "subdomains": len(self.subdomains),
            "interfaces": len(self.interfaces),
            "subdomains_by_dim": dict(sorted(by_dim_subs.items(), reverse=True)),
            "cells_by_dim": dict(sorted(by_dim_cells.items(), reverse=True)),
            "mortar_cells": sum(len(i.cell_pairs) for i in self.interfaces),
            "n_omega": self.dof_partition.n_omega,
            "n_gamma": self.dof_partition.n_gamma,
            "n_total": self.dof_partition.n_total,
            "omega_ranges": [list(r) for r in self.dof_partition.omega_ranges],
            "gamma_ranges": [list(r) for r in self.dof_partition.gamma_ranges],
        }

    def describe(self) -> str:
        s = self.summary()
        lines = [
            f"mixed-dimensional grid, ambient dimension {s['ambient_dim']}",
            f"  subdomains: {s['subdomains']} "
            + ", ".join(f"dim {d}: {c}" for d, c in s["subdomains_by_dim"].items()),
            f"  cells:      " + ", ".join(f"dim {d}: {c}" for d, c in s["cells_by_dim"].items()),
            f"  interfaces: {s['interfaces']} with {s['mortar_cells']} mortar cells",
            f"  dofs:       {s['n_omega']} pressure + {s['n_gamma']} mortar = {s['n_total']}",
        ]
        return "\n".join(lines)


def _build_partition(subdomains, interfaces) -> DofPartition:
    omega = []
    cursor = 0
    for s in subdomains:
        omega.append((s.id, cursor, cursor + s.cell_count))
        cursor += s.cell_count
    gamma = []
    for itf in interfaces:
        gamma.append((itf.id, cursor, cursor + len(itf.cell_pairs)))
        cursor += len(itf.cell_pairs)
    return DofPartition(tuple(omega), tuple(gamma))


# -- 2d builder --------------------------------------------------------------


def _merge_segments(n: int, segments) -> list:
    """Validate, snap-check and merge collinear overlapping/touching segments."""
    by_line: dict = {}
    for seg in segments:
        seg = Segment(*seg)
        if seg.axis not in (0, 1):
            raise ValueError(f"segment axis must be 0 or 1, got {seg.axis}")
        if not 0 < seg.line < n:
            raise ValueError(f"segment line {seg.line} not an interior lattice line of n={n}")
        if not 0 <= seg.lo < seg.hi <= n:
            raise ValueError(f"degenerate or out-of-range segment span [{seg.lo}, {seg.hi}]")
        by_line.setdefault((seg.axis, seg.line), []).append((seg.lo, seg.hi))
    merged = []
    for (axis, line), spans in sorted(by_line.items()):
        spans.sort()
        cur_lo, cur_hi = spans[0]
        for lo, hi in spans[1:]:
            if lo <= cur_hi:  # overlapping or touching: merge
                cur_hi = max(cur_hi, hi)
            else:
                merged.append(Segment(axis, line, cur_lo, cur_hi))
                cur_lo, cur_hi = lo, hi
        merged.append(Segment(axis, line, cur_lo, cur_hi))
    return merged


def build_network_2d(n: int, segments, bc: BoundaryConfig | None = None) -> MixedDimGrid:
    """Unit-square grid with axis-aligned fracture segments on lattice lines.

    Parameters
    ----------
    n : int
        Cells per direction of the background grid (mesh size 1/n).
    segments : iterable of Segment or 4-tuples
        ``(axis, line, lo, hi)`` with ``axis`` the running axis, ``line`` the
        interior lattice line of the fixed axis, and span ``[lo, hi]`` in
        lattice units. Collinear overlapping or touching segments are merged.
    bc : BoundaryConfig, optional
        Outer boundary conditions; defaults to Dirichlet along axis 0.

    Each crossing of two segments becomes a 0d subdomain; segment grids are
    disconnected there and both flanking cells couple to the point. Segment
    endpoints inside the domain are no-flux tips and get no coupling.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    bc = bc or BoundaryConfig()
    h = 1.0 / n
    segs = _merge_segments(n, segments)

    # crossing points between one horizontal (axis 0) and one vertical (axis 1)
    points: dict = {}
    for si, s in enumerate(segs):
        for ti, t in enumerate(segs):
            if s.axis == 0 and t.axis == 1:
                px, py = t.line, s.line
                if s.lo <= px <= s.hi and t.lo <= py <= t.hi:
                    points.setdefault((px, py), []).append((si, px))
                    points[(px, py)].append((ti, py))
    point_keys = sorted(points)

    subdomains = []
    interfaces = []

    # matrix subdomain, id 0
    blocked = {0: set(), 1: set()}  # axis of face normal -> {(line, transverse cell)}
    for s in segs:
        normal = 1 - s.axis
        for t in range(s.lo, s.hi):
            blocked[normal].add((s.line, t))
    centers = np.empty((n * n, 2))
    ix, iy = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    cell = lambda i, j: i + j * n  # noqa: E731
    centers[(ix + iy * n).ravel()] = np.column_stack(
        [(ix.ravel() + 0.5) * h, (iy.ravel() + 0.5) * h]
    )
    internal = []
    for k in range(1, n):  # x-normal faces
        for j in range(n):
            if (k, j) not in blocked[0]:
                internal.append((cell(k - 1, j), cell(k, j), 1.0))
    for k in range(1, n):  # y-normal faces
        for i in range(n):
            if (k, i) not in blocked[1]:
                internal.append((cell(i, k - 1), cell(i, k), 1.0))
    boundary = []
    for j in range(n):
        boundary.append((cell(0, j), 2.0, bc.tag(0, False)))
        boundary.append((cell(n - 1, j), 2.0, bc.tag(0, True)))
    for i in range(n):
        boundary.append((cell(i, 0), 2.0, bc.tag(1, False)))
        boundary.append((cell(i, n - 1), 2.0, bc.tag(1, True)))
    subdomains.append(
        Subdomain(0, 2, n * n, np.full(n * n, h * h), centers, tuple(internal), tuple(boundary))
    )

    # fracture subdomains
    seg_sid = {}
    next_id = 1
    for si, s in enumerate(segs):
        m = s.hi - s.lo
        splits = {
            pos
            for (px, py), inc in points.items()
            for (idx, pos) in inc
            if idx == si and s.lo < pos < s.hi
        }
        cc = np.empty((m, 2))
        run = (np.arange(s.lo, s.hi) + 0.5) * h
        cc[:, s.axis] = run
        cc[:, 1 - s.axis] = s.line * h
        internal = tuple(
            (t - s.lo - 1, t - s.lo, 1.0 / h) for t in range(s.lo + 1, s.hi) if t not in splits
        )
        boundary = []
        if s.lo == 0:
            boundary.append((0, 2.0 / h, bc.tag(s.axis, False)))
        if s.hi == n:
            boundary.append((m - 1, 2.0 / h, bc.tag(s.axis, True)))
        subdomains.append(
            Subdomain(next_id, 1, m, np.full(m, h), cc, internal, tuple(boundary))
        )
        seg_sid[si] = next_id
        next_id += 1

    # 0d intersection subdomains
    point_sid = {}
    for px, py in point_keys:
        subdomains.append(
            Subdomain(
                next_id, 0, 1, np.ones(1), np.array([[px * h, py * h]]), (), ()
            )
        )
        point_sid[(px, py)] = next_id
        next_id += 1

    # matrix <-> fracture interfaces, one per side
    iid = 0
    for si, s in enumerate(segs):
        for high_side in (False, True):
            line = s.line if high_side else s.line - 1
            pairs = []
            for t in range(s.lo, s.hi):
                if s.axis == 0:
                    hc = cell(t, line)
                else:
                    hc = cell(line, t)
                pairs.append((hc, 2.0, t - s.lo, h))
            sign = -1 if high_side else 1
            interfaces.append(
                Interface(iid, 1, 0, seg_sid[si], tuple(pairs), (sign,) * len(pairs))
            )
            iid += 1

    # fracture <-> point interfaces
    for px, py in point_keys:
        for si, pos in sorted(set(points[(px, py)])):
            s = segs[si]
            pairs = []
            orient = []
            if pos > s.lo:
                pairs.append((pos - s.lo - 1, 2.0 / h, 0, 1.0))
                orient.append(1)
            if pos < s.hi:
                pairs.append((pos - s.lo, 2.0 / h, 0, 1.0))
                orient.append(-1)
            interfaces.append(
                Interface(iid, 0, seg_sid[si], point_sid[(px, py)], tuple(pairs), tuple(orient))
            )
            iid += 1

    grid = MixedDimGrid(2, tuple(subdomains), tuple(interfaces), _build_partition(subdomains, interfaces))
    return grid.validate()


def build_cross_2d(n: int, bc: BoundaryConfig | None = None) -> MixedDimGrid:
    """Unit square with two full fractures crossing at the center.

    Produces one 2d subdomain, two 1d fractures spanning the whole square,
    and one 0d subdomain at the crossing. Requires even ``n`` so the center
    lies on a lattice line.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if n % 2:
        raise ValueError(f"the centered cross needs even n, got {n}")
    mid = n // 2
    return build_network_2d(n, [Segment(0, mid, 0, n), Segment(1, mid, 0, n)], bc)


def build_random_network_2d(
    n: int, num_fractures: int, seed: int = 0, bc: BoundaryConfig | None = None
) -> MixedDimGrid:
    """Random axis-aligned fracture network snapped to interior lattice lines.

    Deterministic for a fixed seed. Collinear overlapping fractures are
    merged by the underlying engine.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if num_fractures < 0:
        raise ValueError("num_fractures must be nonnegative")
    rng = np.random.default_rng(seed)
    segments = []
    for _ in range(num_fractures):
        axis = int(rng.integers(0, 2))
        line = int(rng.integers(1, n))
        lo, hi = np.sort(rng.choice(n + 1, size=2, replace=False))
        segments.append(Segment(axis, line, int(lo), int(hi)))
    return build_network_2d(n, segments, bc)


# -- 3d builder --------------------------------------------------------------

Plane = namedtuple("Plane", "axis line")  # axis = normal axis


def build_regular_network_3d(
    n: int, num_planes: int, bc: BoundaryConfig | None = None
) -> MixedDimGrid:
    """Unit cube with up to nine full axis-aligned fracture planes.

    Plane k has normal axis ``k % 3``; the first three planes sit at the
    center coordinate, the next at one quarter, then three quarters. Plane
    intersections become 1d line subdomains, triple intersections 0d points,
    so three mutually orthogonal planes already produce the full dimension
    chain 3-2-1-0.

    Parameters
    ----------
    n : int
        Cells per direction; must place every requested plane on a lattice
        line (even for the center planes, divisible by 4 beyond three).
    num_planes : int
        Number of planes, 0 to 9.
    bc : BoundaryConfig, optional
        Outer boundary conditions; defaults to Dirichlet along axis 0.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if not 0 <= num_planes <= 9:
        raise ValueError(f"num_planes must be in 0..9, got {num_planes}")
    positions = [n // 2, n // 4, (3 * n) // 4]
    planes = []
    for k in range(num_planes):
        pos_idx = k // 3
        denom = 2 if pos_idx == 0 else 4
        if n % denom:
            raise ValueError(
                f"plane {k} needs n divisible by {denom} to sit on a lattice line, got n={n}"
            )
        planes.append(Plane(k % 3, positions[pos_idx]))
    bc = bc or BoundaryConfig()
    h = 1.0 / n

    # intersection lines: pairs of non-parallel planes; fixed = {axis: line}
    lines = []
    for a in range(len(planes)):
        for b in range(a + 1, len(planes)):
            p, q = planes[a], planes[b]
            if p.axis != q.axis:
                fixed = {p.axis: p.line, q.axis: q.line}
                run = 3 - p.axis - q.axis
                lines.append((tuple(sorted(fixed.items())), run))
    lines = sorted(set(lines))

    # intersection points: triples of mutually orthogonal planes
    by_axis: dict = {0: [], 1: [], 2: []}
    for p in planes:
        by_axis[p.axis].append(p.line)
    pts = sorted(
        (x, y, z) for x in by_axis[0] for y in by_axis[1] for z in by_axis[2]
    )

    subdomains = []
    interfaces = []

    # 3d matrix, id 0
    plane_set = {(p.axis, p.line) for p in planes}
    idx = lambda i, j, k: i + j * n + k * n * n  # noqa: E731
    ii, jj, kk = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    centers = np.empty((n**3, 3))
    centers[idx(ii, jj, kk).ravel()] = np.column_stack(
        [(ii.ravel() + 0.5) * h, (jj.ravel() + 0.5) * h, (kk.ravel() + 0.5) * h]
    )
    internal = []
    for axis in range(3):
        u, v = [a for a in range(3) if a != axis]
        for k in range(1, n):
            if (axis, k) in plane_set:
                continue
            for tu in range(n):
                for tv in range(n):
                    lo_c = [0, 0, 0]
                    lo_c[axis], lo_c[u], lo_c[v] = k - 1, tu, tv
                    hi_c = list(lo_c)
                    hi_c[axis] = k
                    internal.append((idx(*lo_c), idx(*hi_c), h))
    boundary = []
    for axis in range(3):
        u, v = [a for a in range(3) if a != axis]
        for tu in range(n):
            for tv in range(n):
                c = [0, 0, 0]
                c[u], c[v] = tu, tv
                c[axis] = 0
                boundary.append((idx(*c), 2.0 * h, bc.tag(axis, False)))
                c[axis] = n - 1
                boundary.append((idx(*c), 2.0 * h, bc.tag(axis, True)))
    subdomains.append(
        Subdomain(0, 3, n**3, np.full(n**3, h**3), centers, tuple(internal), tuple(boundary))
    )

    # plane subdomains
    plane_sid = {}
    next_id = 1
    for p in planes:
        u, v = [a for a in range(3) if a != p.axis]
        # in-plane lattice lines where an intersection line disconnects the grid
        cut = {0: set(), 1: set()}  # 0 -> u-normal cuts, 1 -> v-normal cuts
        for fixed, run in lines:
            fd = dict(fixed)
            if fd.get(p.axis) == p.line:
                other_axis = [a for a in fd if a != p.axis][0]
                if other_axis == u:
                    cut[0].add(fd[u])
                else:
                    cut[1].add(fd[v])
        loc = lambda a, b: a + b * n  # noqa: E731
        cc = np.empty((n * n, 3))
        au, av = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        flat = loc(au, av).ravel()
        cc[flat, u] = (au.ravel() + 0.5) * h
        cc[flat, v] = (av.ravel() + 0.5) * h
        cc[flat, p.axis] = p.line * h
        internal = []
        for k in range(1, n):
            if k not in cut[0]:
                for b in range(n):
                    internal.append((loc(k - 1, b), loc(k, b), 1.0))
        for k in range(1, n):
            if k not in cut[1]:
                for a in range(n):
                    internal.append((loc(a, k - 1), loc(a, k), 1.0))
        boundary = []
        for b in range(n):
            boundary.append((loc(0, b), 2.0, bc.tag(u, False)))
            boundary.append((loc(n - 1, b), 2.0, bc.tag(u, True)))
        for a in range(n):
            boundary.append((loc(a, 0), 2.0, bc.tag(v, False)))
            boundary.append((loc(a, n - 1), 2.0, bc.tag(v, True)))
        subdomains.append(
            Subdomain(next_id, 2, n * n, np.full(n * n, h * h), cc, tuple(internal), tuple(boundary))
        )
        plane_sid[p] = next_id
        next_id += 1

    # line subdomains
    line_sid = {}
    for fixed, run in lines:
        fd = dict(fixed)
        splits = {pt[run] for pt in pts if all(pt[a] == fd[a] for a in fd)}
        cc = np.empty((n, 3))
        cc[:, run] = (np.arange(n) + 0.5) * h
        for a, l in fd.items():
            cc[:, a] = l * h
        internal = tuple(
            (t - 1, t, 1.0 / h) for t in range(1, n) if t not in splits
        )
        boundary = (
            (0, 2.0 / h, bc.tag(run, False)),
            (n - 1, 2.0 / h, bc.tag(run, True)),
        )
        subdomains.append(
            Subdomain(next_id, 1, n, np.full(n, h), cc, internal, boundary)
        )
        line_sid[(fixed, run)] = next_id
        next_id += 1

    # point subdomains
    point_sid = {}
    for pt in pts:
        subdomains.append(
            Subdomain(next_id, 0, 1, np.ones(1), np.array([np.array(pt) * h]), (), ())
        )
        point_sid[pt] = next_id
        next_id += 1

    # matrix <-> plane interfaces
    iid = 0
    for p in planes:
        u, v = [a for a in range(3) if a != p.axis]
        for high_side in (False, True):
            layer = p.line if high_side else p.line - 1
            pairs = []
            for av_ in range(n):
                for au_ in range(n):
                    c = [0, 0, 0]
                    c[p.axis], c[u], c[v] = layer, au_, av_
                    pairs.append((idx(*c), 2.0 * h, au_ + av_ * n, h * h))
            sign = -1 if high_side else 1
            interfaces.append(
                Interface(iid, 2, 0, plane_sid[p], tuple(pairs), (sign,) * len(pairs))
            )
            iid += 1

    # plane <-> line interfaces
    for fixed, run in lines:
        fd = dict(fixed)
        for p in planes:
            if fd.get(p.axis) != p.line:
                continue
            u, v = [a for a in range(3) if a != p.axis]
            other_axis = [a for a in fd if a != p.axis][0]
            k = fd[other_axis]
            for high_side in (False, True):
                layer = k if high_side else k - 1
                pairs = []
                for t in range(n):
                    if other_axis == u:
                        hc = layer + t * n
                    else:
                        hc = t + layer * n
                    pairs.append((hc, 2.0, t, h))
                sign = -1 if high_side else 1
                interfaces.append(
                    Interface(
                        iid, 1, plane_sid[p], line_sid[(fixed, run)], tuple(pairs),
                        (sign,) * len(pairs),
                    )
                )
                iid += 1

    # line <-> point interfaces
    for fixed, run in lines:
        fd = dict(fixed)
        for pt in pts:
            if not all(pt[a] == fd[a] for a in fd):
                continue
            t = pt[run]
            pairs = ((t - 1, 2.0 / h, 0, 1.0), (t, 2.0 / h, 0, 1.0))
            interfaces.append(
                Interface(iid, 0, line_sid[(fixed, run)], point_sid[pt], pairs, (1, -1))
            )
            iid += 1

    grid = MixedDimGrid(3, tuple(subdomains), tuple(interfaces), _build_partition(subdomains, interfaces))
    return grid.validate()
