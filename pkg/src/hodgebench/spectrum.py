"""Discrete exterior calculus Hodge Laplacian on closed triangle surfaces.

Cochains live on vertices/edges/faces with signed incidence matrices as the
exterior derivative and diagonal (circumcentric, cotangent-weighted) Hodge
stars.  The degree-0 Laplacian is the classical cotan Laplacian; degree-1
and degree-2 Laplacians come from the same operators, and the nonzero
1-form spectrum splits into the exact family (shared with functions) and
the coexact family (shared with 2-forms).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy import sparse
from scipy.linalg import eigh
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .meshes import MeshComplex, MeshError

__all__ = [
    "DecOperators",
    "SpectrumReport",
    "SolverError",
    "assemble_dec",
    "spectrum_functions",
    "spectrum_one_forms",
    "spectrum_two_forms",
    "sphere_hodge_oracle",
]

DENSE_CUTOFF = 3000  # unknowns below this solve densely, above via Lanczos


class SolverError(Exception):
    """Eigensolver failed to converge; carries the residual information."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


@dataclass
class DecOperators:
    """Signed incidence matrices and diagonal Hodge stars of a surface mesh."""

    d0: sparse.csr_matrix  # (E, V)
    d1: sparse.csr_matrix  # (F, E)
    star0: np.ndarray  # (V,) dual areas
    star1: np.ndarray  # (E,) dual/primal length ratios
    star2: np.ndarray  # (F,) inverse face areas
    mesh: MeshComplex
    clamped_star0: list = field(default_factory=list)
    clamped_star1: list = field(default_factory=list)

    def laplacian_matrices(self, degree: int):
        """Stiffness/mass pair (A, B) of the degree-p Hodge Laplacian.

        The generalized problem A x = lambda B x is symmetric with B the
        diagonal Hodge star of the degree.
        """
        s0 = sparse.diags(self.star0)
        s1 = sparse.diags(self.star1)
        s2 = sparse.diags(self.star2)
        if degree == 0:
            return (self.d0.T @ s1 @ self.d0).tocsr(), self.star0
        if degree == 1:
            inv0 = sparse.diags(1.0 / self.star0)
            a = s1 @ self.d0 @ inv0 @ self.d0.T @ s1 + self.d1.T @ s2 @ self.d1
            return a.tocsr(), self.star1
        if degree == 2:
            inv1 = sparse.diags(1.0 / self.star1)
            a = s2 @ self.d1 @ inv1 @ self.d1.T @ s2
            return a.tocsr(), self.star2
        raise ValueError("degree must be 0, 1 or 2")

    def codifferential_1(self, x: np.ndarray) -> np.ndarray:
        """Codifferential of an edge cochain (vertex cochain result)."""
        return (self.d0.T @ (self.star1 * x)) / self.star0

    def codifferential_2(self, x: np.ndarray) -> np.ndarray:
        """Codifferential of a face cochain (edge cochain result)."""
        return (self.d1.T @ (self.star2 * x)) / self.star1


def assemble_dec(mesh: MeshComplex, strict: bool = False, clamp_floor: float = 1e-10) -> DecOperators:
    """Assemble incidence matrices and circumcentric Hodge stars.

    Negative cotan weights (non-Delaunay edges) and negative circumcentric
    dual areas (obtuse triangles) are clamped to a small positive floor of
    the local scale; with ``strict=True`` they raise instead, naming the
    offending simplex.
    """
    if mesh.kind != "surface":
        raise MeshError("bad_kind", "DEC assembly requires a surface mesh")
    v = mesh.vertices
    f = mesh.cells
    edges = mesh.edges
    eidx = mesh.edge_index
    nv, ne, nf = mesh.n_vertices, mesh.n_edges, mesh.n_cells

    rows = np.repeat(np.arange(ne), 2)
    cols = edges.reshape(-1)
    vals = np.tile([-1.0, 1.0], ne)
    d0 = sparse.csr_matrix((vals, (rows, cols)), shape=(ne, nv))

    r1, c1, v1 = [], [], []
    for fi, (a, b, c) in enumerate(f):
        for u, w in ((a, b), (b, c), (c, a)):
            e = eidx[(min(u, w), max(u, w))]
            r1.append(fi)
            c1.append(e)
            v1.append(1.0 if u < w else -1.0)
    d1 = sparse.csr_matrix((v1, (r1, c1)), shape=(nf, ne))

    # cotangents of the three corner angles of every face
    cots = np.empty((nf, 3))
    for corner in range(3):
        p0 = v[f[:, corner]]
        e1 = v[f[:, (corner + 1) % 3]] - p0
        e2 = v[f[:, (corner + 2) % 3]] - p0
        cross = np.linalg.norm(np.cross(e1, e2), axis=1)
        cots[:, corner] = np.einsum("ij,ij->i", e1, e2) / cross

    _, face_areas = mesh.face_normals_areas()

    star1 = np.zeros(ne)
    for corner in range(3):
        u = f[:, (corner + 1) % 3]
        w = f[:, (corner + 2) % 3]
        eids = np.array([eidx[(min(a, b), max(a, b))] for a, b in zip(u, w)])
        np.add.at(star1, eids, 0.5 * cots[:, corner])

    # circumcentric dual areas: per corner (|e_opp_j|^2 cot_j + |e_opp_k|^2 cot_k)/8
    lengths_sq = np.empty((nf, 3))
    for corner in range(3):
        lengths_sq[:, corner] = (
            np.linalg.norm(v[f[:, (corner + 1) % 3]] - v[f[:, (corner + 2) % 3]], axis=1)
            ** 2
        )
    star0 = np.zeros(nv)
    for corner in range(3):
        j = (corner + 1) % 3
        k = (corner + 2) % 3
        contrib = (lengths_sq[:, j] * cots[:, j] + lengths_sq[:, k] * cots[:, k]) / 8.0
        np.add.at(star0, f[:, corner], contrib)

    star2 = 1.0 / face_areas

    clamped0, clamped1 = [], []
    bary = np.zeros(nv)
    for corner in range(3):
        np.add.at(bary, f[:, corner], face_areas / 3.0)
    bad0 = np.flatnonzero(star0 <= 0)
    if bad0.size:
        if strict:
            raise MeshError(
                "nonpositive_weight", f"dual area of vertex {bad0[0]} is nonpositive"
            )
        star0 = star0.copy()
        star0[bad0] = clamp_floor * bary[bad0]
        clamped0 = bad0.tolist()
    bad1 = np.flatnonzero(star1 <= 0)
    if bad1.size:
        if strict:
            e = edges[bad1[0]]
            raise MeshError(
                "nonpositive_weight", f"cotan weight of edge {tuple(e)} is nonpositive"
            )
        star1 = star1.copy()
        star1[bad1] = clamp_floor
        clamped1 = bad1.tolist()

    return DecOperators(
        d0=d0,
        d1=d1,
        star0=star0,
        star1=star1,
        star2=star2,
        mesh=mesh,
        clamped_star0=clamped0,
        clamped_star1=clamped1,
    )


# ---------------------------------------------------------------------------
# reports


@dataclass
class SpectrumReport:
    """Sorted Hodge-Laplacian eigenvalues with family tags and clusters."""

    degree: int
    eigenvalues: np.ndarray
    families: list  # 'harmonic' | 'exact' | 'coexact' per eigenvalue
    clusters: list  # (value, multiplicity) with the clustering tolerance
    cluster_ids: np.ndarray
    mesh_meta: dict
    zero_tol: float
    cluster_tol: float
    method: str

    def first_positive(self, family: str | None = None) -> float:
        for lam, fam in zip(self.eigenvalues, self.families):
            if fam == "harmonic":
                continue
            if family is None or fam == family:
                return float(lam)
        raise ValueError(f"no positive eigenvalue of family {family!r} in report")

    def first_eigenvalue(self) -> float:
        """First positive eigenvalue: min over the exact/coexact families."""
        return self.first_positive(None)

    def count(self, family: str) -> int:
        return sum(1 for f in self.families if f == family)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "eigenvalues": self.eigenvalues.tolist(),
            "families": list(self.families),
            "clusters": [[float(v), int(m)] for v, m in self.clusters],
            "cluster_ids": self.cluster_ids.tolist(),
            "mesh": self.mesh_meta,
            "zero_tol": self.zero_tol,
            "cluster_tol": self.cluster_tol,
            "method": self.method,
        }

    def to_json(self, path=None, extra=None) -> str:
        payload = self.to_dict()
        if extra:
            payload.update(extra)
        text = json.dumps(payload, indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["value", "family", "cluster"])
            for lam, fam, cid in zip(self.eigenvalues, self.families, self.cluster_ids):
                writer.writerow([f"{lam:.16g}", fam, int(cid)])


def _cluster(eigenvalues: np.ndarray, tol: float, scale: float):
    ids = np.zeros(len(eigenvalues), dtype=int)
    clusters = []
    if len(eigenvalues) == 0:
        return clusters, ids
    start = 0
    for i in range(1, len(eigenvalues) + 1):
        if i == len(eigenvalues) or (
            eigenvalues[i] - eigenvalues[i - 1]
            > tol * max(abs(eigenvalues[i - 1]), scale)
        ):
            block = eigenvalues[start:i]
            clusters.append((float(block.mean()), len(block)))
            ids[start:i] = len(clusters) - 1
            start = i
    return clusters, ids


def _pencil_scale(a, b_diag) -> float:
    # robust Rayleigh scale; the median ignores clamped near-zero weights
    return float(np.median(a.diagonal() / b_diag))


def _solve_pencil(
    a: sparse.csr_matrix,
    b_diag: np.ndarray,
    k: int,
    v0_seed: int = 7,
    force_sparse: bool = False,
):
    """k smallest eigenpairs of the symmetric pencil (A, diag(b)).

    Dense below DENSE_CUTOFF unknowns, shift-invert Lanczos above.  Meshes
    with clamped Hodge weights make diag(b) badly conditioned, which breaks
    the dense Cholesky reduction; they are forced onto the shift-invert
    path, where A - sigma*B stays SPD for sigma < 0.
    """
    n = a.shape[0]
    k = min(k, n)
    if n <= DENSE_CUTOFF and not force_sparse:
        w, vecs = eigh(
            a.toarray(), np.diag(b_diag), subset_by_index=(0, k - 1)
        )
        return w, vecs, "dense"
    if k >= n:
        raise SolverError(
            "full spectra of meshes with clamped Hodge weights are not "
            "computable reliably; request k < number of unknowns"
        )
    sigma = -1e-2 * _pencil_scale(a, b_diag)
    rng = np.random.default_rng(v0_seed)
    v0 = rng.standard_normal(n)
    try:
        w, vecs = eigsh(
            a, k=k, M=sparse.diags(b_diag), sigma=sigma, which="LM", v0=v0
        )
    except ArpackNoConvergence as exc:
        got = np.asarray(exc.eigenvalues)
        raise SolverError(
            f"Lanczos converged only {got.size}/{k} eigenvalues",
            residuals={"converged": got.tolist()},
        ) from exc
    order = np.argsort(w)
    return w[order], vecs[:, order], "shift-invert"


def _zero_tol(a, b_diag) -> float:
    return 1e-8 * _pencil_scale(a, b_diag)


def spectrum_functions(
    mesh: MeshComplex,
    k: int = 10,
    dec: DecOperators | None = None,
    cluster_tol: float = 1e-3,
    strict: bool = False,
) -> SpectrumReport:
    """k smallest eigenvalues of the Laplacian on functions (0-forms).

    Eigenvalue 0 appears with multiplicity equal to the number of connected
    components; the nonzero eigenvalues form the coexact family (their
    differentials are the exact 1-eigenforms).
    """
    if k < 1:
        raise ValueError("need k >= 1")
    ops = dec or assemble_dec(mesh, strict=strict)
    a, b = ops.laplacian_matrices(0)
    forced = bool(ops.clamped_star0 or ops.clamped_star1)
    w, _, method = _solve_pencil(a, b, k, force_sparse=forced)
    ztol = _zero_tol(a, b)
    families = ["harmonic" if lam < ztol else "coexact" for lam in w]
    scale = _pencil_scale(a, b)
    clusters, ids = _cluster(w, cluster_tol, 1e-6 * scale)
    return SpectrumReport(
        degree=0,
        eigenvalues=w,
        families=families,
        clusters=clusters,
        cluster_ids=ids,
        mesh_meta=mesh.report(),
        zero_tol=ztol,
        cluster_tol=cluster_tol,
        method=method,
    )


def spectrum_one_forms(
    mesh: MeshComplex,
    k: int = 10,
    dec: DecOperators | None = None,
    cluster_tol: float = 1e-3,
    strict: bool = False,
) -> SpectrumReport:
    """k smallest 1-form Hodge Laplacian eigenvalues, tagged exact/coexact.

    Harmonic eigenvalues (numerical zeros) count the first Betti number of
    a closed surface.  Each nonzero eigenvector is classified by comparing
    the norms of its discrete differential and codifferential.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    ops = dec or assemble_dec(mesh, strict=strict)
    a, b = ops.laplacian_matrices(1)
    forced = bool(ops.clamped_star0 or ops.clamped_star1)
    w, vecs, method = _solve_pencil(a, b, k, force_sparse=forced)
    ztol = _zero_tol(a, b)
    families = []
    for i, lam in enumerate(w):
        if lam < ztol:
            families.append("harmonic")
            continue
        x = vecs[:, i]
        dx = ops.d1 @ x
        d_norm = float(np.sqrt((ops.star2 * dx * dx).sum()))
        cx = ops.codifferential_1(x)
        c_norm = float(np.sqrt((ops.star0 * cx * cx).sum()))
        families.append("exact" if d_norm <= c_norm else "coexact")
    scale = _pencil_scale(a, b)
    clusters, ids = _cluster(w, cluster_tol, 1e-6 * scale)
    return SpectrumReport(
        degree=1,
        eigenvalues=w,
        families=families,
        clusters=clusters,
        cluster_ids=ids,
        mesh_meta=mesh.report(),
        zero_tol=ztol,
        cluster_tol=cluster_tol,
        method=method,
    )


def spectrum_two_forms(
    mesh: MeshComplex,
    k: int = 10,
    dec: DecOperators | None = None,
    cluster_tol: float = 1e-3,
    strict: bool = False,
) -> SpectrumReport:
    """k smallest 2-form eigenvalues: the exact family plus harmonics."""
    if k < 1:
        raise ValueError("need k >= 1")
    ops = dec or assemble_dec(mesh, strict=strict)
    a, b = ops.laplacian_matrices(2)
    forced = bool(ops.clamped_star0 or ops.clamped_star1)
    w, _, method = _solve_pencil(a, b, k, force_sparse=forced)
    ztol = _zero_tol(a, b)
    families = ["harmonic" if lam < ztol else "exact" for lam in w]
    scale = _pencil_scale(a, b)
    clusters, ids = _cluster(w, cluster_tol, 1e-6 * scale)
    return SpectrumReport(
        degree=2,
        eigenvalues=w,
        families=families,
        clusters=clusters,
        cluster_ids=ids,
        mesh_meta=mesh.report(),
        zero_tol=ztol,
        cluster_tol=cluster_tol,
        method=method,
    )


def sphere_hodge_oracle(n: int, p: int):
    """First exact p-form eigenvalue of the unit n-sphere and its multiplicity.

    Returns (p * (n - p + 1), C(n + 1, p)).
    """
    if not 1 <= p <= n:
        raise ValueError(f"p={p} out of range 1..{n}")
    return float(p * (n - p + 1)), comb(n + 1, p)
