"""Dense-grid flood-fill oracle for component counts, independent of the
certified subdivision pipeline.

The projective plane is covered by three closed boxes: box c fixes
homogeneous coordinate c to 1 and lets the other two range over [-1, 1]
(every point has a representative with its max-modulus coordinate scaled
to +-1).  Signs are sampled on a dense corner grid per box; a pixel is a
zero pixel when its four corners are not strictly one sign.  Zero pixels
are labeled with 8-connectivity inside each box, and labels are merged
across the six pairwise box gluings, which are linear (possibly reversed)
maps along the shared boundary edges.  The number of merged labels is the
component count estimate.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

__all__ = ["grid_component_count"]


def _chart_signs(n, mono_coeffs, exponents, box: int, res: int) -> np.ndarray:
    """Sign array of the section on box ``box`` at (res+1)^2 corners."""
    t = np.linspace(-1.0, 1.0, res + 1)
    A, B = np.meshgrid(t, t, indexing="ij")
    coords = [None, None, None]
    others = [i for i in range(3) if i != box]
    coords[box] = np.ones_like(A)
    coords[others[0]] = A
    coords[others[1]] = B
    val = np.zeros_like(A)
    pows = {c: [np.ones_like(A)] for c in range(3)}
    for c in range(3):
        for k in range(1, n + 1):
            pows[c].append(pows[c][-1] * coords[c])
    for coef, (a, b, cc) in zip(mono_coeffs, exponents):
        val += coef * pows[0][int(a)] * pows[1][int(b)] * pows[2][int(cc)]
    return np.sign(val)


def grid_component_count(n, mono_coeffs, exponents, res: int = 2048) -> int:
    """Flood-fill count of the zero set's components in the projective plane."""
    signs = [_chart_signs(n, mono_coeffs, exponents, box, res) for box in range(3)]
    zero = []
    labels = []
    offsets = [0]
    structure = np.ones((3, 3), dtype=int)
    for box in range(3):
        s = signs[box]
        corner_pos = s > 0
        corner_neg = s < 0
        allpos = (
            corner_pos[:-1, :-1] & corner_pos[1:, :-1] & corner_pos[:-1, 1:] & corner_pos[1:, 1:]
        )
        allneg = (
            corner_neg[:-1, :-1] & corner_neg[1:, :-1] & corner_neg[:-1, 1:] & corner_neg[1:, 1:]
        )
        z = ~(allpos | allneg)
        lab, _count = ndimage.label(z, structure=structure)
        zero.append(z)
        labels.append(lab)
        offsets.append(offsets[-1] + int(lab.max()))
    if offsets[-1] == 0:
        return 0

    parent = list(range(offsets[-1] + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    def gid(box, lab_val):
        return offsets[box] + int(lab_val)

    def merge_edges(boxA, edgeA, boxB, edgeB, reverse: bool):
        """Glue boundary pixel rows; edge spec is (axis, index)."""
        la = labels[boxA]
        lb = labels[boxB]
        rowA = la[edgeA[1], :] if edgeA[0] == 0 else la[:, edgeA[1]]
        rowB = lb[edgeB[1], :] if edgeB[0] == 0 else lb[:, edgeB[1]]
        if reverse:
            rowB = rowB[::-1]
        both = (rowA > 0) & (rowB > 0)
        for a, b in zip(rowA[both], rowB[both]):
            union(gid(boxA, a), gid(boxB, b))

    last = res - 1
    # box 0: (1, a, b); box 1: (a, 1, b); box 2: (a, b, 1); pixel coords are
    # (first-listed free coordinate, second).  Gluings:
    # (1, 1, c)  ~ box1 (1, 1, c):          box0 a=+1 <-> box1 a=+1, aligned
    # (1,-1, c) ~ (-1, 1,-c):               box0 a=-1 <-> box1 a=-1, reversed
    # (1, b, 1)  ~ box2 (1, b, 1):          box0 b=+1 <-> box2 a=+1, aligned
    # (1, b,-1) ~ (-1,-b, 1):               box0 b=-1 <-> box2 a=-1, reversed
    # (a, 1, 1)  ~ box2 (a, 1, 1):          box1 b=+1 <-> box2 b=+1, aligned
    # (a, 1,-1) ~ (-a,-1, 1):               box1 b=-1 <-> box2 b=-1, reversed
    merge_edges(0, (0, last), 1, (0, last), False)
    merge_edges(0, (0, 0), 1, (0, 0), True)
    merge_edges(0, (1, last), 2, (0, last), False)
    merge_edges(0, (1, 0), 2, (0, 0), True)
    merge_edges(1, (1, last), 2, (1, last), False)
    merge_edges(1, (1, 0), 2, (1, 0), True)

    roots = set()
    for box in range(3):
        for lab_val in range(1, int(labels[box].max()) + 1):
            roots.add(find(gid(box, lab_val)))
    return len(roots)
