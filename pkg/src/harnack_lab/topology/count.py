"""Certified count of connected components of a real plane curve.

The zero set of a real homogeneous polynomial is counted on the unit
sphere (the double cover of the real projective plane) by adaptive
subdivision of the cube-sphere:

1. Cells whose Bernstein enclosure excludes zero are sign-certified;
   the remaining cells cover the zero set.
2. Edge-connected clusters of unknown cells isolate curve pieces: since
   certified cells are sign-checked on closed boxes, no component can
   cross between clusters, even through corner contacts.
3. A cluster is certified to contain exactly one circle when (a) it is a
   combinatorial annulus (Euler characteristic 0, two boundary loops, all
   boundary vertices of degree 2), (b) the certified neighbors along its
   two boundary loops carry uniform and opposite signs, and (c) an
   enclosure of the spherical gradient excludes critical points on every
   cluster cell.  Under (c), components inside the annulus are disjoint
   core-parallel circles; two of them would trap an interior extremum of
   the section between them, contradicting (c); (b) forces at least one
   crossing.  So the count is exactly one.
4. Clusters pair under the antipodal involution (statuses are exactly
   symmetric by construction); each orbit is one component in the
   projective plane, whether the orbit is a swapped pair (an oval) or a
   single self-symmetric cluster (a pseudoline).

Certification failures refine the offending cluster and retry, up to
``max_depth``; anything still unresolved yields a best-effort count with
``certified=False``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..ensemble import OrthonormalBasis, SectionSample, monomial_coefficients
from . import bernstein as bn
from . import sphere as sp

__all__ = [
    "genus",
    "harnack_bound",
    "TopologyReport",
    "MaximalityVerdict",
    "classify_maximality",
    "sign_certify",
    "count_components",
    "count_zero_components",
]


def genus(n: int) -> int:
    """Genus of a smooth plane curve of degree n, (n-1)(n-2)/2."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    return (n - 1) * (n - 2) // 2


def harnack_bound(n: int) -> int:
    """Largest possible component count of a smooth real curve, genus + 1."""
    return genus(n) + 1


@dataclass(frozen=True)
class TopologyReport:
    """Certified (or best-effort) component count of one real curve."""

    n: int
    b0: int
    certified: bool
    depth_used: int
    unresolved_cells: int
    min_gradient_proxy: float
    sphere_components: int
    orbit_count: int
    discard_reason: str = ""

    def __post_init__(self):
        if self.certified and self.unresolved_cells != 0:
            raise ValueError("certified reports cannot carry unresolved cells")
        if self.certified and self.b0 > harnack_bound(self.n):
            raise ValueError(
                f"certified b0={self.b0} violates the component bound {harnack_bound(self.n)}"
            )


@dataclass(frozen=True)
class MaximalityVerdict:
    in_M: bool
    threshold: float
    deficit: int


def classify_maximality(report: TopologyReport, a: float) -> MaximalityVerdict:
    """Membership in the near-maximal set b0 >= g + 1 - a n.

    Refuses uncertified reports: a best-effort count must not enter
    frequency estimates.
    """
    if not report.certified:
        raise ValueError("refusing to classify an uncertified report")
    if a <= 0:
        raise ValueError("slack parameter a must be > 0")
    thr = genus(report.n) + 1 - a * report.n
    return MaximalityVerdict(
        in_M=bool(report.b0 >= thr - 1e-12),
        threshold=thr,
        deficit=harnack_bound(report.n) - report.b0,
    )


# ---------------------------------------------------------------------------
# engine


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


class _Engine:
    def __init__(self, n: int, mono_coeffs: np.ndarray, exponents: np.ndarray):
        self.n = n
        self.parity = n % 2
        scale = float(np.max(np.abs(mono_coeffs)))
        if scale == 0.0:
            raise ValueError("zero section has no curve")
        mono = np.asarray(mono_coeffs, dtype=float) / scale
        self.P = [bn.face_power_coeffs(n, mono, exponents, f) for f in range(3)]
        self.G = [bn.gradient_power_coeffs(n, p) for p in self.P]
        self.store = [dict() for _ in range(3)]  # (d, i, j) -> data sign
        self.frozen = []  # dicts: cells [(f,i,j)], depth, margin
        self.depth = 0
        # root cells
        ij = np.zeros((1, 2), dtype=np.int64)
        self.active = []
        for f in range(3):
            B, err = bn.root_bernstein(self.P[f])
            self.active.append(
                {"ij": ij.copy(), "B": B[None, :, :], "err": np.array([err])}
            )
        self._classify_active()

    # -- classification and refinement

    def _classify_active(self):
        for f in range(3):
            fa = self.active[f]
            if fa["ij"].shape[0] == 0:
                continue
            st = bn.classify(fa["B"], fa["err"])
            keep = st == 0
            for (i, j), s in zip(fa["ij"][~keep], st[~keep]):
                self.store[f][(self.depth, int(i), int(j))] = int(s)
            fa["ij"] = fa["ij"][keep]
            fa["B"] = fa["B"][keep]
            fa["err"] = fa["err"][keep]

    def _split_active(self):
        for f in range(3):
            fa = self.active[f]
            npar = fa["ij"].shape[0]
            if npar == 0:
                continue
            B4, err4 = bn.split_children(fa["B"], fa["err"])
            # child order (di, dj) = (0,0), (0,1), (1,0), (1,1)
            di = np.array([0, 0, 1, 1])
            dj = np.array([0, 1, 0, 1])
            ij = np.empty((npar, 4, 2), dtype=np.int64)
            ij[:, :, 0] = 2 * fa["ij"][:, 0:1] + di[None, :]
            ij[:, :, 1] = 2 * fa["ij"][:, 1:2] + dj[None, :]
            fa["ij"] = ij.reshape(-1, 2)
            fa["B"] = B4.reshape(-1, B4.shape[-1], B4.shape[-1])
            fa["err"] = err4.reshape(-1)
        self.depth += 1
        self._classify_active()

    def _active_count(self) -> int:
        return sum(fa["ij"].shape[0] for fa in self.active)

    # -- logical cells and clusters

    def _logical_cells(self):
        """Arrays (faces, iis, jjs) of all unknown cells on all six faces."""
        faces, iis, jjs = [], [], []
        side = 1 << self.depth
        for f in range(3):
            ij = self.active[f]["ij"]
            if ij.shape[0] == 0:
                continue
            faces.append(np.full(ij.shape[0], f, dtype=np.int64))
            iis.append(ij[:, 0])
            jjs.append(ij[:, 1])
            faces.append(np.full(ij.shape[0], f + 3, dtype=np.int64))
            iis.append(side - 1 - ij[:, 0])
            jjs.append(side - 1 - ij[:, 1])
        if not faces:
            return (np.empty(0, np.int64),) * 3
        return np.concatenate(faces), np.concatenate(iis), np.concatenate(jjs)

    def _build_clusters(self):
        faces, iis, jjs = self._logical_cells()
        m = faces.shape[0]
        if m == 0:
            return faces, iis, jjs, np.empty(0, np.int64), {}
        keys = np.empty((m, 4), dtype=np.int64)
        for f in range(6):
            sel = faces == f
            if sel.any():
                keys[sel] = sp.edge_keys(f, self.depth, iis[sel], jjs[sel])
        flat = keys.reshape(-1)
        owner = np.repeat(np.arange(m), 4)
        order = np.argsort(flat, kind="stable")
        skeys = flat[order]
        sown = owner[order]
        uf = _UnionFind(m)
        same = np.nonzero(skeys[1:] == skeys[:-1])[0]
        for idx in same:
            uf.union(int(sown[idx]), int(sown[idx + 1]))
        labels = np.fromiter((uf.find(i) for i in range(m)), dtype=np.int64, count=m)
        clusters: dict[int, list[int]] = {}
        for idx, lab in enumerate(labels):
            clusters.setdefault(int(lab), []).append(idx)
        return faces, iis, jjs, labels, clusters

    # -- certified-sign lookup

    def _lookup_sign(self, face: int, depth: int, i: int, j: int):
        f, ii, jj, mirrored = sp.to_data_cell(face, depth, i, j)
        flip = -1 if (mirrored and self.parity) else 1
        d, store = depth, self.store[f]
        while d >= 0:
            s = store.get((d, ii, jj))
            if s is not None:
                return s * flip
            ii //= 2
            jj //= 2
            d -= 1
        return None

    # -- cluster certification

    def _certify_cluster(self, faces, iis, jjs, members):
        """Try to certify that one cluster holds exactly one circle.

        Returns (ok, margin, reason)."""
        depth = self.depth
        cf = faces[members]
        ci = iis[members]
        cj = jjs[members]
        ncell = len(members)
        ekeys = np.empty((ncell, 4), dtype=np.int64)
        ckeys = np.empty((ncell, 4), dtype=np.int64)
        for f in range(6):
            sel = cf == f
            if sel.any():
                ekeys[sel] = sp.edge_keys(f, depth, ci[sel], cj[sel])
                ckeys[sel] = sp.corner_keys(f, depth, ci[sel], cj[sel])
        uniq_e, counts = np.unique(ekeys.reshape(-1), return_counts=True)
        if counts.max(initial=0) > 2:
            return False, 0.0, "non-manifold edge"
        n_v = np.unique(ckeys.reshape(-1)).shape[0]
        chi = n_v - uniq_e.shape[0] + ncell
        if chi != 0:
            return False, 0.0, f"chi={chi}"

        boundary_set = set(uniq_e[counts == 1].tolist())
        boundary = []  # (cell local idx, side, key)
        for loc in range(ncell):
            for col, side in enumerate(("v-", "v+", "u-", "u+")):
                k = int(ekeys[loc, col])
                if k in boundary_set:
                    boundary.append((loc, side, k))
        # vertex degrees and loop tracing
        vert_edges: dict[int, list[int]] = {}
        ends = []
        for bidx, (loc, side, _k) in enumerate(boundary):
            e = sp.edge_endpoint_keys(int(cf[loc]), depth, int(ci[loc]), int(cj[loc]), side)
            ends.append(e)
            for vk in e:
                vert_edges.setdefault(vk, []).append(bidx)
        if any(len(v) != 2 for v in vert_edges.values()):
            return False, 0.0, "pinched boundary"
        seen = [False] * len(boundary)
        loops = []
        for start in range(len(boundary)):
            if seen[start]:
                continue
            loop = [start]
            seen[start] = True
            cur, prev_v = start, ends[start][0]
            nxt_v = ends[start][1]
            while True:
                cands = vert_edges[nxt_v]
                nxt = cands[0] if cands[1] == cur else cands[1]
                if nxt == start:
                    break
                loop.append(nxt)
                seen[nxt] = True
                e = ends[nxt]
                nxt_v = e[1] if e[0] == nxt_v else e[0]
                cur = nxt
            loops.append(loop)
        if len(loops) != 2:
            return False, 0.0, f"{len(loops)} boundary loops"

        loop_signs = []
        for loop in loops:
            signs = set()
            for bidx in loop:
                loc, side, _k = boundary[bidx]
                nb = sp.neighbor_cell(int(cf[loc]), depth, int(ci[loc]), int(cj[loc]), side)
                s = self._lookup_sign(nb[0], depth, nb[1], nb[2])
                if s is None:
                    return False, 0.0, "unresolved boundary neighbor"
                signs.add(s)
            if len(signs) != 1:
                return False, 0.0, "mixed signs on a boundary loop"
            loop_signs.append(signs.pop())
        if loop_signs[0] * loop_signs[1] != -1:
            return False, 0.0, "boundary loops not oppositely signed"

        # gradient enclosure per cell (on data faces; mirrored cells reduce
        # to the data polynomial on the mirrored box, sign-flips included)
        margin = math.inf
        h = 2.0 / (1 << depth)
        for f in range(3):
            locs = [t for t in range(ncell)]
            sel_i = []
            sel_loc = []
            for loc in locs:
                df, di_, dj_, _m = sp.to_data_cell(int(cf[loc]), depth, int(ci[loc]), int(cj[loc]))
                if df == f:
                    sel_i.append((di_, dj_))
                    sel_loc.append(loc)
            if not sel_i:
                continue
            arr = np.array(sel_i, dtype=np.int64)
            a_u = arr[:, 0] * h - 1.0
            a_v = arr[:, 1] * h - 1.0
            ok = np.zeros(len(sel_i), dtype=bool)
            cellmarg = np.zeros(len(sel_i))
            for gp in self.G[f]:
                Bg, errg = bn.bernstein_on_boxes(gp, a_u, a_v, h)
                flat = Bg.reshape(Bg.shape[0], -1)
                lo = flat.min(axis=1) - errg
                hi = flat.max(axis=1) + errg
                excl = (lo > 0.0) | (hi < 0.0)
                gmarg = np.where(excl, np.minimum(np.abs(lo), np.abs(hi)), 0.0)
                cellmarg = np.maximum(cellmarg, gmarg)
                ok |= excl
            if not ok.all():
                return False, 0.0, "gradient enclosure contains zero"
            margin = min(margin, float(cellmarg.min()))
        return True, margin, ""

    def _freeze(self, faces, iis, jjs, members, margin):
        cells = sorted(
            (int(faces[t]), int(iis[t]), int(jjs[t])) for t in members
        )
        self.frozen.append({"cells": cells, "depth": self.depth, "margin": margin})
        # drop the data cells of this cluster from the active set
        per_face: dict[int, set] = {0: set(), 1: set(), 2: set()}
        for f, i, j in cells:
            df, di_, dj_, _m = sp.to_data_cell(f, self.depth, i, j)
            per_face[df].add((di_, dj_))
        for f in range(3):
            fa = self.active[f]
            if fa["ij"].shape[0] == 0 or not per_face[f]:
                continue
            drop = np.array(
                [tuple(x) in per_face[f] for x in fa["ij"]], dtype=bool
            )
            keep = ~drop
            fa["ij"] = fa["ij"][keep]
            fa["B"] = fa["B"][keep]
            fa["err"] = fa["err"][keep]

    def _certify_pass(self):
        """Attempt certification of all current clusters; returns leftover
        cluster descriptors (cells of clusters that still resist)."""
        faces, iis, jjs, labels, clusters = self._build_clusters()
        if not clusters:
            return []
        cell_to_label = {}
        for lab, members in clusters.items():
            for t in members:
                cell_to_label[(int(faces[t]), int(iis[t]), int(jjs[t]))] = lab
        order = sorted(
            clusters, key=lambda lab: min((int(faces[t]), int(iis[t]), int(jjs[t])) for t in clusters[lab])
        )
        results: dict[int, tuple[bool, float, str]] = {}
        side = 1 << self.depth
        for lab in order:
            if lab in results:
                continue
            members = clusters[lab]
            f0, i0, j0 = min((int(faces[t]), int(iis[t]), int(jjs[t])) for t in members)
            anti = ((f0 + 3) % 6, side - 1 - i0, side - 1 - j0)
            anti_lab = cell_to_label[anti]
            res = self._certify_cluster(faces, iis, jjs, members)
            results[lab] = res
            if anti_lab != lab:
                results[anti_lab] = res  # statuses are exactly antipodally symmetric
        leftovers = []
        for lab in order:
            ok, margin, _reason = results[lab]
            members = clusters[lab]
            if ok:
                self._freeze(faces, iis, jjs, members, margin)
            else:
                leftovers.append(
                    sorted((int(faces[t]), int(iis[t]), int(jjs[t])) for t in members)
                )
        return leftovers

    # -- main loop

    def run(self, max_depth: int, cell_budget: int, certify_from: int):
        leftovers = []
        reason = ""
        while True:
            n_active = self._active_count()
            if n_active == 0:
                leftovers = []
                break
            if self.depth >= certify_from:
                leftovers = self._certify_pass()
                if not leftovers:
                    if self._active_count() == 0:
                        break
                    # clusters all certified; nothing active should remain
                    leftovers = []
            if self.depth >= max_depth:
                if leftovers:
                    reason = "max depth reached with unresolved clusters"
                break
            if 4 * self._active_count() > cell_budget:
                reason = "cell budget exceeded"
                leftovers = self._certify_pass()
                break
            if self._active_count() == 0:
                break
            self._split_active()
        return leftovers, reason

    def tally(self, leftovers, reason, max_depth) -> TopologyReport:
        all_clusters = [
            {"cells": fr["cells"], "depth": fr["depth"], "ok": True, "margin": fr["margin"]}
            for fr in self.frozen
        ]
        for cells in leftovers:
            all_clusters.append(
                {"cells": cells, "depth": self.depth, "ok": False, "margin": 0.0}
            )
        cell_map = {}
        for idx, cl in enumerate(all_clusters):
            for f, i, j in cl["cells"]:
                cell_map[(f, cl["depth"], i, j)] = idx
        orbits = set()
        for idx, cl in enumerate(all_clusters):
            f, i, j = cl["cells"][0]
            af, ad, ai, aj = sp.antipode_cell(f, cl["depth"], i, j)
            other = cell_map.get((af, ad, ai, aj))
            if other is None:  # antipodal symmetry must pair every cluster
                raise AssertionError("antipodal image of a cluster not found")
            orbits.add(frozenset((idx, other)))
        certified = not leftovers and all(cl["ok"] for cl in all_clusters)
        margins = [cl["margin"] for cl in all_clusters if cl["ok"]]
        return TopologyReport(
            n=self.n,
            b0=len(orbits),
            certified=certified,
            depth_used=self.depth,
            unresolved_cells=sum(len(c) for c in leftovers),
            min_gradient_proxy=min(margins) if margins else math.inf,
            sphere_components=len(all_clusters),
            orbit_count=len(orbits),
            discard_reason=reason if not certified else "",
        )


def count_zero_components(
    n: int,
    mono_coeffs: np.ndarray,
    exponents: np.ndarray,
    max_depth: int = 12,
    cell_budget: int = 300_000,
    certify_from: int = 2,
) -> TopologyReport:
    """Count components of {s = 0} in the projective plane from monomial
    coefficients in the lex order of :class:`~harnack_lab.ensemble.MonomialBasis`."""
    if max_depth < 4:
        raise ValueError("max_depth must be >= 4")
    eng = _Engine(n, mono_coeffs, exponents)
    leftovers, reason = eng.run(max_depth, cell_budget, certify_from)
    return eng.tally(leftovers, reason, max_depth)


def count_components(
    s: SectionSample,
    onb: OrthonormalBasis,
    max_depth: int = 12,
    cell_budget: int = 300_000,
) -> TopologyReport:
    """Certified component count of the real zero curve of a sampled section."""
    mono = monomial_coefficients(s, onb)
    return count_zero_components(
        s.n, mono, onb.basis.exponents, max_depth=max_depth, cell_budget=cell_budget
    )


def sign_certify(n: int, mono_coeffs: np.ndarray, exponents: np.ndarray, cell: sp.SphereCell) -> str:
    """Sign status of the section over one sphere cell.

    Returns 'all-positive' or 'all-negative' only when the Bernstein
    enclosure over the closed cell excludes zero; 'unknown' otherwise.
    """
    df, di, dj, mirrored = sp.to_data_cell(cell.face, cell.depth, cell.i, cell.j)
    P = bn.face_power_coeffs(n, np.asarray(mono_coeffs, dtype=float), exponents, df)
    B, err = bn.root_bernstein(P)
    B = B[None]
    err = np.array([err])
    for level in range(cell.depth - 1, -1, -1):
        B4, err4 = bn.split_children(B, err)
        di_bit = (di >> level) & 1
        dj_bit = (dj >> level) & 1
        child = 2 * di_bit + dj_bit
        B = B4[:, child]
        err = err4[:, child]
    status = int(bn.classify(B, err)[0])
    if mirrored and n % 2 == 1:
        status = -status
    return {1: "all-positive", -1: "all-negative", 0: "unknown"}[status]
