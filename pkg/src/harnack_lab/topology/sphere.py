"""Cube-sphere cells, exact adjacency keys, and the antipodal involution.

The unit sphere is parameterized by the six faces of the cube [-1,1]^3
projected radially.  Face f in 0..5 fixes coordinate axis f % 3 to +1
(f < 3) or -1 (f >= 3); the remaining coordinates, in ascending axis
order, are the parameters (u, v) in [-1,1]^2.  A cell at depth d is the
dyadic box [i, i+1] x [j, j+1] scaled by 2^-d in unit-square coordinates.

All adjacency works through exact integer geometry on the cube surface at
scale 2^d: every cell edge is an axis-parallel segment with integer data,
and two cells (same face or not) are edge-adjacent exactly when they share
a segment key.  Antipodes satisfy -P_f(u, v) = P_{f+3 mod 6}(-u, -v), so
the antipodal image of cell (f, i, j) is (f+3 mod 6, 2^d-1-i, 2^d-1-j).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SphereCell",
    "FACE_AXIS",
    "FACE_SIGN",
    "OTHERS",
    "embed_face",
    "antipode_cell",
    "to_data_cell",
    "edge_keys",
    "corner_keys",
    "edge_endpoint_keys",
    "neighbor_cell",
]

FACE_AXIS = (0, 1, 2, 0, 1, 2)
FACE_SIGN = (1, 1, 1, -1, -1, -1)
OTHERS = {0: (1, 2), 1: (0, 2), 2: (0, 1)}

_BIAS = 1 << 14  # fits scaled coordinates up to depth 13


@dataclass(frozen=True)
class SphereCell:
    """One dyadic box of one cube face."""

    face: int
    depth: int
    i: int
    j: int

    def __post_init__(self):
        if not 0 <= self.face < 6:
            raise ValueError("face must be in 0..5")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        side = 1 << self.depth
        if not (0 <= self.i < side and 0 <= self.j < side):
            raise ValueError("cell indices out of range for depth")

    def box_unit(self) -> tuple[float, float, float, float]:
        """(u0, u1, v0, v1) in unit-square coordinates."""
        h = 0.5**self.depth
        return (self.i * h, (self.i + 1) * h, self.j * h, (self.j + 1) * h)

    def box_face(self) -> tuple[float, float, float, float]:
        """(u0, u1, v0, v1) in face coordinates [-1, 1]."""
        u0, u1, v0, v1 = self.box_unit()
        return (2 * u0 - 1, 2 * u1 - 1, 2 * v0 - 1, 2 * v1 - 1)

    def children(self) -> list["SphereCell"]:
        return [
            SphereCell(self.face, self.depth + 1, 2 * self.i + di, 2 * self.j + dj)
            for di in (0, 1)
            for dj in (0, 1)
        ]

    def antipode(self) -> "SphereCell":
        f, d, i, j = antipode_cell(self.face, self.depth, self.i, self.j)
        return SphereCell(f, d, i, j)


def embed_face(face: int, u, v) -> np.ndarray:
    """3D coordinates (not normalized) of face parameters; vectorized."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    k = FACE_AXIS[face]
    o1, o2 = OTHERS[k]
    out = np.empty(u.shape + (3,))
    out[..., k] = FACE_SIGN[face]
    out[..., o1] = u
    out[..., o2] = v
    return out


def antipode_cell(face: int, depth: int, i, j):
    side = 1 << depth
    return ((face + 3) % 6, depth, side - 1 - i, side - 1 - j)


def to_data_cell(face: int, depth: int, i, j):
    """Map a logical cell to its data cell on faces 0..2.

    Returns (data_face, i, j, mirrored).  The face polynomial of face f+3
    equals (-1)^n times the data-face polynomial at (-u, -v), so statuses
    of mirrored cells are the data statuses times (-1)^n.
    """
    if face < 3:
        return face, i, j, False
    side = 1 << depth
    return face - 3, side - 1 - i, side - 1 - j, True


def _pack3(a, b, c):
    return (
        (np.asarray(a, dtype=np.int64) + _BIAS) << 34
        | (np.asarray(b, dtype=np.int64) + _BIAS) << 17
        | (np.asarray(c, dtype=np.int64) + _BIAS)
    )


def _rect_ints(face, depth, i, j):
    """Scaled integer rect data: fixed axis value and the (u, v) low corners."""
    s = np.int64(1) << depth
    k = FACE_AXIS[face] if np.isscalar(face) else None
    if k is None:
        raise ValueError("face must be scalar here")
    u0 = 2 * np.asarray(i, dtype=np.int64) - s
    v0 = 2 * np.asarray(j, dtype=np.int64) - s
    return s, FACE_SIGN[face] * s, u0, v0


def edge_keys(face: int, depth: int, i, j) -> np.ndarray:
    """Packed int64 keys of the four edges of the given cells; shape (N, 4).

    The key of a segment encodes its varying axis, its low endpoint along
    that axis, and the two fixed coordinate values (their axes are the
    complement, in ascending order).  Keys agree across faces for segments
    on cube edges, so adjacency needs no gluing table.  Edge order is
    v- (bottom), v+ (top), u- (left), u+ (right).
    """
    k = FACE_AXIS[face]
    o1, o2 = OTHERS[k]
    s, kval, u0, v0 = _rect_ints(face, depth, i, j)
    n = u0.shape[0] if u0.ndim else 1
    u0 = np.atleast_1d(u0)
    v0 = np.atleast_1d(v0)
    kv = np.full(n, kval, dtype=np.int64)
    out = np.empty((n, 4), dtype=np.int64)
    for col, (var_ax, lo, fixed) in enumerate(
        (
            (o1, u0, (v0,)),  # v- : varies along o1 at v = v0
            (o1, u0, (v0 + 2,)),  # v+
            (o2, v0, (u0,)),  # u- : varies along o2 at u = u0
            (o2, v0, (u0 + 2,)),  # u+
        )
    ):
        # fixed axes are {k, o2} for v-edges and {k, o1} for u-edges
        if col < 2:
            fa, fv_a = (k, kv) if k < o2 else (o2, fixed[0])
            fb_v = fixed[0] if k < o2 else kv
        else:
            fa, fv_a = (k, kv) if k < o1 else (o1, fixed[0])
            fb_v = fixed[0] if k < o1 else kv
        key = (
            np.int64(var_ax) << 52
            | (lo + _BIAS) << 36
            | (fv_a + _BIAS) << 18
            | (fb_v + _BIAS)
        )
        out[:, col] = key
    return out


def corner_keys(face: int, depth: int, i, j) -> np.ndarray:
    """Packed int64 keys of the four corners of the given cells; shape (N, 4)."""
    k = FACE_AXIS[face]
    o1, o2 = OTHERS[k]
    s, kval, u0, v0 = _rect_ints(face, depth, i, j)
    u0 = np.atleast_1d(u0)
    v0 = np.atleast_1d(v0)
    n = u0.shape[0]
    kv = np.full(n, kval, dtype=np.int64)
    out = np.empty((n, 4), dtype=np.int64)
    for col, (uu, vv) in enumerate(((u0, v0), (u0 + 2, v0), (u0, v0 + 2), (u0 + 2, v0 + 2))):
        coords = [None, None, None]
        coords[k] = kv
        coords[o1] = uu
        coords[o2] = vv
        out[:, col] = _pack3(coords[0], coords[1], coords[2])
    return out


_SIDES = ("v-", "v+", "u-", "u+")


def edge_endpoint_keys(face: int, depth: int, i: int, j: int, side: str):
    """Corner keys of the two endpoints of one cell edge."""
    k = FACE_AXIS[face]
    o1, o2 = OTHERS[k]
    s = np.int64(1) << depth
    kval = FACE_SIGN[face] * s
    u0 = 2 * np.int64(i) - s
    v0 = 2 * np.int64(j) - s
    if side == "v-":
        pts = ((u0, v0), (u0 + 2, v0))
    elif side == "v+":
        pts = ((u0, v0 + 2), (u0 + 2, v0 + 2))
    elif side == "u-":
        pts = ((u0, v0), (u0, v0 + 2))
    elif side == "u+":
        pts = ((u0 + 2, v0), (u0 + 2, v0 + 2))
    else:
        raise ValueError(f"bad side {side!r}")
    keys = []
    for uu, vv in pts:
        coords = [0, 0, 0]
        coords[k] = int(kval)
        coords[o1] = int(uu)
        coords[o2] = int(vv)
        keys.append(int(_pack3(*coords)))
    return keys


def neighbor_cell(face: int, depth: int, i: int, j: int, side: str):
    """The same-depth cell across one edge, folding over cube edges.

    Returns (face2, i2, j2).  Interior moves stay on the face; boundary
    moves land on the adjacent face, located by exact integer geometry.
    """
    side_len = 1 << depth
    if side == "u-" and i > 0:
        return face, i - 1, j
    if side == "u+" and i < side_len - 1:
        return face, i + 1, j
    if side == "v-" and j > 0:
        return face, i, j - 1
    if side == "v+" and j < side_len - 1:
        return face, i, j + 1

    k = FACE_AXIS[face]
    sigma = FACE_SIGN[face]
    o1, o2 = OTHERS[k]
    s = side_len
    u0 = 2 * i - s
    v0 = 2 * j - s
    if side in ("u-", "u+"):
        cross_axis = o1
        tau = 1 if side == "u+" else -1
        along_axis, along_lo = o2, v0
    else:
        cross_axis = o2
        tau = 1 if side == "v+" else -1
        along_axis, along_lo = o1, u0
    face2 = cross_axis if tau > 0 else cross_axis + 3
    # neighbor rect: cross_axis fixed at tau*s; spans axis k inward from
    # sigma*s by one cell; spans along_axis over [along_lo, along_lo + 2]
    k_lo = s - 2 if sigma > 0 else -s
    o1b, o2b = OTHERS[cross_axis]
    lows = {k: k_lo, along_axis: along_lo}
    i2 = (lows[o1b] + s) // 2
    j2 = (lows[o2b] + s) // 2
    return face2, int(i2), int(j2)
