"""Simplicial geometry substrate: triangle surfaces and tetrahedral solids.

Orientation conventions
-----------------------
Surface triangles are stored counter-clockwise as seen from OUTSIDE the
enclosed region, so the right-hand-rule face normal points outward.  All
curvature computations use the INNER normal (minus the outward one), which
makes the principal curvatures of a sphere positive.

Solid meshes store positively oriented tetrahedra; their boundary triangles
follow the same outward counter-clockwise convention.

Tetrahedral ASCII format (``.tet``)::

    tetmesh
    <n_vertices> <n_tets> <n_boundary_faces>
    x y z                  (one line per vertex)
    a b c d                (one line per tet, 0-based indices)
    i j k                  (one line per boundary face, outward CCW)

Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .curvature import ShapeData

__all__ = [
    "MeshComplex",
    "MeshError",
    "DiscreteShape",
    "generate_icosphere",
    "generate_ellipsoid",
    "generate_ball",
    "generate_torus",
    "merge_meshes",
    "load_mesh",
    "discrete_shape",
    "ellipsoid_shape_world",
    "ellipsoid_principal_curvatures",
]


class MeshError(Exception):
    """Mesh validation or parse failure with a machine-readable code."""

    def __init__(self, code: str, message: str, line: int | None = None):
        self.code = code
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"[{code}]{where} {message}")


class MeshComplex:
    """A triangulated surface or a tetrahedral solid with boundary.

    Parameters
    ----------
    vertices : (V, 3) float array
    cells : (F, 3) int array of triangles, or (T, 4) int array of tets
    boundary_faces : (B, 3) int array, optional
        Outward-CCW boundary triangles of a solid; extracted from the tets
        when omitted.
    metadata : dict, optional
        Generator provenance (kind, radius, ...), echoed into reports.
    validate : bool
        Run the manifoldness/orientation validators on construction.
    require_closed : bool
        For surfaces, demand that every edge has exactly two incident
        triangles.  Open patches are allowed with ``False``.
    """

    def __init__(
        self,
        vertices,
        cells,
        boundary_faces=None,
        metadata=None,
        validate=True,
        require_closed=True,
    ):
        self.vertices = np.asarray(vertices, dtype=float).reshape(-1, 3)
        self.cells = np.asarray(cells, dtype=np.int64)
        if self.cells.ndim != 2 or self.cells.shape[1] not in (3, 4):
            raise MeshError("bad_format", "cells must be (F,3) triangles or (T,4) tets")
        self.kind = "surface" if self.cells.shape[1] == 3 else "solid"
        self.metadata = dict(metadata or {})
        self._edges = None
        self._edge_index = None
        if self.kind == "solid":
            if boundary_faces is None:
                boundary_faces = self._extract_boundary()
            self.boundary_faces = np.asarray(boundary_faces, dtype=np.int64)
        else:
            self.boundary_faces = None
        if validate:
            self.validate(require_closed=require_closed)

    # ------------------------------------------------------------------
    # derived tables

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_cells(self):
        return self.cells.shape[0]

    @property
    def edges(self) -> np.ndarray:
        """Undirected edges as sorted (i, j) pairs in a fixed global order."""
        if self._edges is None:
            if self.kind == "surface":
                raw = np.vstack(
                    [self.cells[:, [0, 1]], self.cells[:, [1, 2]], self.cells[:, [2, 0]]]
                )
            else:
                pairs = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]
                raw = np.vstack([self.cells[:, p] for p in pairs])
            raw = np.sort(raw, axis=1)
            self._edges = np.unique(raw, axis=0)
        return self._edges

    @property
    def edge_index(self) -> dict:
        if self._edge_index is None:
            self._edge_index = {tuple(e): i for i, e in enumerate(self.edges)}
        return self._edge_index

    @property
    def n_edges(self):
        return self.edges.shape[0]

    def euler_characteristic(self) -> int:
        if self.kind != "surface":
            raise MeshError("bad_kind", "Euler characteristic defined for surfaces here")
        return self.n_vertices - self.n_edges + self.n_cells

    def connected_components(self) -> int:
        from scipy.sparse import coo_matrix
        from scipy.sparse.csgraph import connected_components

        e = self.edges
        ones = np.ones(len(e))
        adj = coo_matrix(
            (ones, (e[:, 0], e[:, 1])), shape=(self.n_vertices, self.n_vertices)
        )
        n, _ = connected_components(adj, directed=False)
        return int(n)

    def genus(self) -> int:
        """Genus of a closed connected orientable surface."""
        chi = self.euler_characteristic()
        comps = self.connected_components()
        if comps != 1:
            raise MeshError("bad_topology", "genus requires a connected surface")
        return (2 - chi) // 2

    def first_betti_number(self) -> int:
        """b1 of a closed orientable surface (2*components - Euler char.)."""
        return 2 * self.connected_components() - self.euler_characteristic()

    # ------------------------------------------------------------------
    # measures

    def face_normals_areas(self, faces=None):
        f = self.cells if faces is None else faces
        v = self.vertices
        cross = np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])
        norms = np.linalg.norm(cross, axis=1)
        return cross / norms[:, None], norms / 2.0

    def area(self) -> float:
        faces = self.cells if self.kind == "surface" else self.boundary_faces
        _, areas = self.face_normals_areas(faces)
        return float(areas.sum())

    def volume(self) -> float:
        """Signed volume: of the solid, or enclosed by a closed surface."""
        v = self.vertices
        if self.kind == "solid":
            t = self.cells
            d = np.einsum(
                "ij,ij->i",
                v[t[:, 1]] - v[t[:, 0]],
                np.cross(v[t[:, 2]] - v[t[:, 0]], v[t[:, 3]] - v[t[:, 0]]),
            )
            return float(d.sum() / 6.0)
        f = self.cells
        d = np.einsum("ij,ij->i", v[f[:, 0]], np.cross(v[f[:, 1]], v[f[:, 2]]))
        return float(d.sum() / 6.0)

    # ------------------------------------------------------------------
    # validation

    def validate(self, require_closed=True) -> None:
        if self.cells.min() < 0 or self.cells.max() >= self.n_vertices:
            raise MeshError("bad_index", "cell index out of range")
        referenced = np.zeros(self.n_vertices, dtype=bool)
        referenced[self.cells.reshape(-1)] = True
        if self.kind == "solid" and self.boundary_faces is not None:
            if self.boundary_faces.min() < 0 or self.boundary_faces.max() >= self.n_vertices:
                raise MeshError("bad_index", "boundary face index out of range")
            referenced[self.boundary_faces.reshape(-1)] = True
        if not referenced.all():
            missing = np.flatnonzero(~referenced)
            raise MeshError(
                "unreferenced_vertices",
                f"{missing.size} vertices unused (first: {missing[:5].tolist()})",
            )
        if self.kind == "surface":
            self._validate_surface(self.cells, require_closed)
        else:
            self._validate_solid()

    def _validate_surface(self, faces, require_closed) -> None:
        directed = {}
        for f_idx, (a, b, c) in enumerate(faces):
            for u, v in ((a, b), (b, c), (c, a)):
                key = (min(u, v), max(u, v))
                directed.setdefault(key, []).append((u, v, f_idx))
        for key, uses in directed.items():
            if len(uses) > 2:
                raise MeshError(
                    "non_manifold_edge", f"edge {key} borders {len(uses)} faces"
                )
            if len(uses) == 1:
                if require_closed:
                    raise MeshError("not_closed", f"edge {key} borders a single face")
                continue
            (u1, v1, f1), (u2, v2, f2) = uses
            if (u1, v1) == (u2, v2):
                raise MeshError(
                    "inconsistent_orientation",
                    f"faces {f1} and {f2} traverse edge {key} the same way",
                )

    def _validate_solid(self) -> None:
        v = self.vertices
        t = self.cells
        d = np.einsum(
            "ij,ij->i",
            v[t[:, 1]] - v[t[:, 0]],
            np.cross(v[t[:, 2]] - v[t[:, 0]], v[t[:, 3]] - v[t[:, 0]]),
        )
        bad = np.flatnonzero(d <= 0)
        if bad.size:
            raise MeshError(
                "inconsistent_orientation",
                f"{bad.size} tets non-positively oriented (first: {bad[:5].tolist()})",
            )
        extracted = self._extract_boundary()
        if sorted(map(tuple, np.sort(extracted, axis=1))) != sorted(
            map(tuple, np.sort(self.boundary_faces, axis=1))
        ):
            raise MeshError(
                "bad_boundary", "stored boundary faces do not match tet boundary"
            )
        self._validate_surface(self.boundary_faces, require_closed=True)

    def _extract_boundary(self) -> np.ndarray:
        # outward faces of tet (v0,v1,v2,v3): opposite each vertex, CCW outside
        t = self.cells
        faces = np.vstack(
            [t[:, [1, 2, 3]], t[:, [0, 3, 2]], t[:, [0, 1, 3]], t[:, [0, 2, 1]]]
        )
        keys = np.sort(faces, axis=1)
        _, inverse, counts = np.unique(
            keys, axis=0, return_inverse=True, return_counts=True
        )
        return faces[counts[inverse] == 1]

    def boundary_mesh(self):
        """Boundary as a standalone surface mesh plus the vertex index map."""
        if self.kind != "solid":
            raise MeshError("bad_kind", "boundary_mesh requires a solid mesh")
        used = np.unique(self.boundary_faces.reshape(-1))
        remap = -np.ones(self.n_vertices, dtype=np.int64)
        remap[used] = np.arange(used.size)
        surf = MeshComplex(
            self.vertices[used],
            remap[self.boundary_faces],
            metadata={**self.metadata, "boundary_of": self.metadata.get("generator")},
        )
        return surf, used

    # ------------------------------------------------------------------
    # reports

    def report(self) -> dict:
        stats = {
            "kind": self.kind,
            "n_vertices": self.n_vertices,
            "n_cells": self.n_cells,
            "n_edges": self.n_edges,
            "metadata": self.metadata,
        }
        if self.kind == "surface":
            stats["area"] = self.area()
            stats["euler_characteristic"] = self.euler_characteristic()
            stats["components"] = self.connected_components()
            stats["first_betti_number"] = self.first_betti_number()
        else:
            stats["volume"] = self.volume()
            stats["boundary_faces"] = int(self.boundary_faces.shape[0])
            stats["boundary_area"] = self.area()
        return stats

    def save_report(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.report(), fh, indent=2)

    def save_off(self, path) -> None:
        if self.kind != "surface":
            raise MeshError("bad_kind", "OFF export is for surface meshes")
        with open(path, "w") as fh:
            fh.write("OFF\n")
            fh.write(f"{self.n_vertices} {self.n_cells} 0\n")
            for v in self.vertices:
                fh.write(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
            for f in self.cells:
                fh.write(f"3 {f[0]} {f[1]} {f[2]}\n")


# ---------------------------------------------------------------------------
# generators


def _icosahedron():
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=float,
    )
    verts /= np.linalg.norm(verts[0])
    faces = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ],
        dtype=np.int64,
    )
    return verts, faces


def _subdivide(verts, faces):
    verts = list(map(np.asarray, verts))
    midpoint = {}

    def mid(i, j):
        key = (min(i, j), max(i, j))
        if key not in midpoint:
            midpoint[key] = len(verts)
            verts.append((verts[i] + verts[j]) / 2.0)
        return midpoint[key]

    new_faces = []
    for a, b, c in faces:
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        new_faces.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]])
    return np.asarray(verts), np.asarray(new_faces, dtype=np.int64)


def generate_icosphere(subdivisions: int, radius: float = 1.0) -> MeshComplex:
    """Closed genus-0 sphere mesh: subdivided icosahedron projected to radius.

    Vertex count is 10 * 4**subdivisions + 2.
    """
    if subdivisions < 0:
        raise ValueError("subdivisions must be >= 0")
    if radius <= 0:
        raise ValueError("radius must be positive")
    verts, faces = _icosahedron()
    for _ in range(subdivisions):
        verts, faces = _subdivide(verts, faces)
    verts = verts * (radius / np.linalg.norm(verts, axis=1))[:, None]
    return MeshComplex(
        verts,
        faces,
        metadata={"generator": "icosphere", "subdivisions": subdivisions, "radius": radius},
    )


def generate_ellipsoid(a: float, b: float, c: float, subdivisions: int = 3) -> MeshComplex:
    """Icosphere scaled by the semi-axes (a, b, c)."""
    if min(a, b, c) <= 0:
        raise ValueError("semi-axes must be positive")
    base = generate_icosphere(subdivisions, 1.0)
    verts = base.vertices * np.array([a, b, c])
    return MeshComplex(
        verts,
        base.cells,
        metadata={
            "generator": "ellipsoid",
            "subdivisions": subdivisions,
            "semi_axes": [a, b, c],
        },
    )


def _split_prism(bottom, top):
    """Decompose a prism into 3 tets with globally consistent quad diagonals.

    Bottom/top are triples of global vertex ids with top[i] above bottom[i].
    The split keys off global ids only, so prisms sharing a quad face agree
    on its diagonal.
    """
    v = list(bottom) + list(top)
    if min(v[3:]) < min(v[:3]):
        # flip upside down, preserving the vertical edge pairing and winding
        v = [v[3], v[5], v[4], v[0], v[2], v[1]]
    r = int(np.argmin(v[:3]))
    v = [v[r], v[(r + 1) % 3], v[(r + 2) % 3], v[3 + r], v[3 + (r + 1) % 3], v[3 + (r + 2) % 3]]
    if min(v[1], v[5]) < min(v[2], v[4]):
        tets = [(v[0], v[1], v[2], v[5]), (v[0], v[1], v[5], v[4]), (v[0], v[4], v[5], v[3])]
    else:
        tets = [(v[0], v[1], v[2], v[4]), (v[0], v[4], v[2], v[5]), (v[0], v[4], v[5], v[3])]
    return tets


def generate_ball(subdivisions: int, layers: int | None = None) -> MeshComplex:
    """Tetrahedralized unit ball whose boundary is icosphere(subdivisions).

    Scaled copies of the boundary sphere at radii k/L form radial layers;
    the innermost layer cones to the center and consecutive layers are
    joined by prisms split into tets.  The tets tile the polyhedral ball
    exactly, so the total volume equals the polyhedron volume.
    """
    sphere = generate_icosphere(subdivisions, 1.0)
    nv = sphere.n_vertices
    if layers is None:
        layers = max(1, 2**subdivisions)
    radii = np.arange(1, layers + 1) / layers
    verts = [np.zeros((1, 3))]
    for r in radii:
        verts.append(sphere.vertices * r)
    verts = np.vstack(verts)

    def layer_idx(k):  # 1-based layer -> global ids of its sphere copy
        return 1 + (k - 1) * nv

    tets = []
    base = layer_idx(1)
    for a, b, c in sphere.cells:
        tets.append((0, base + a, base + b, base + c))
    for k in range(1, layers):
        lo, hi = layer_idx(k), layer_idx(k + 1)
        for a, b, c in sphere.cells:
            tets.extend(_split_prism((lo + a, lo + b, lo + c), (hi + a, hi + b, hi + c)))

    tets = np.asarray(tets, dtype=np.int64)
    # orient every tet positively (the split table does not track handedness)
    d = np.einsum(
        "ij,ij->i",
        verts[tets[:, 1]] - verts[tets[:, 0]],
        np.cross(verts[tets[:, 2]] - verts[tets[:, 0]], verts[tets[:, 3]] - verts[tets[:, 0]]),
    )
    flip = d < 0
    tets[flip] = tets[flip][:, [0, 2, 1, 3]]

    outer = layer_idx(layers)
    boundary = sphere.cells + outer
    return MeshComplex(
        verts,
        tets,
        boundary_faces=boundary,
        metadata={
            "generator": "ball",
            "subdivisions": subdivisions,
            "radius": 1.0,
            "layers": layers,
        },
    )


def generate_torus(nu: int = 24, nv: int = 12, big_radius: float = 2.0, small_radius: float = 0.7) -> MeshComplex:
    """Triangulated torus of revolution, genus 1, outward orientation."""
    if nu < 3 or nv < 3:
        raise ValueError("need at least 3 samples per direction")
    us = 2 * np.pi * np.arange(nu) / nu
    vs = 2 * np.pi * np.arange(nv) / nv
    verts = np.empty((nu * nv, 3))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            r = big_radius + small_radius * np.cos(v)
            verts[i * nv + j] = (r * np.cos(u), r * np.sin(u), small_radius * np.sin(v))
    faces = []
    for i in range(nu):
        for j in range(nv):
            a = i * nv + j
            b = ((i + 1) % nu) * nv + j
            c = ((i + 1) % nu) * nv + (j + 1) % nv
            d = i * nv + (j + 1) % nv
            faces.append([a, b, c])
            faces.append([a, c, d])
    return MeshComplex(
        verts,
        np.asarray(faces, dtype=np.int64),
        metadata={
            "generator": "torus",
            "nu": nu,
            "nv": nv,
            "big_radius": big_radius,
            "small_radius": small_radius,
        },
    )


def merge_meshes(a: MeshComplex, b: MeshComplex) -> MeshComplex:
    """Disjoint union of two surface meshes."""
    if a.kind != "surface" or b.kind != "surface":
        raise MeshError("bad_kind", "merge supports surface meshes")
    verts = np.vstack([a.vertices, b.vertices])
    cells = np.vstack([a.cells, b.cells + a.n_vertices])
    return MeshComplex(verts, cells, metadata={"generator": "merge"})


# ---------------------------------------------------------------------------
# file IO


def load_mesh(path, fmt: str | None = None) -> MeshComplex:
    """Load an OFF/OBJ triangle surface or an ASCII tet mesh.

    The format is inferred from the extension unless ``fmt`` is given
    ('off', 'obj' or 'tet').  Raises MeshError with a line number on parse
    failures and with a distinct code on validation failures.
    """
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".")).lower()
    text = path.read_text()
    if fmt == "off":
        return _parse_off(text)
    if fmt == "obj":
        return _parse_obj(text)
    if fmt == "tet":
        return _parse_tet(text)
    raise MeshError("bad_format", f"unknown mesh format {fmt!r}")


def _content_lines(text):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line


def _parse_off(text) -> MeshComplex:
    lines = _content_lines(text)
    try:
        i, header = next(lines)
    except StopIteration:
        raise MeshError("parse", "empty OFF file", 1) from None
    if header.upper() != "OFF":
        raise MeshError("parse", f"expected OFF header, got {header!r}", i)
    try:
        i, counts = next(lines)
        nv, nf, _ = (int(tok) for tok in counts.split()[:3])
    except (StopIteration, ValueError):
        raise MeshError("parse", "bad OFF count line", i) from None
    verts = np.empty((nv, 3))
    for k in range(nv):
        try:
            i, line = next(lines)
            verts[k] = [float(tok) for tok in line.split()[:3]]
        except (StopIteration, ValueError):
            raise MeshError("parse", f"bad vertex line {k}", i) from None
    faces = np.empty((nf, 3), dtype=np.int64)
    for k in range(nf):
        try:
            i, line = next(lines)
            toks = line.split()
            if int(toks[0]) != 3:
                raise MeshError("bad_format", "only triangular faces supported", i)
            faces[k] = [int(t) for t in toks[1:4]]
        except (StopIteration, ValueError, IndexError):
            raise MeshError("parse", f"bad face line {k}", i) from None
    return MeshComplex(verts, faces, metadata={"source": "off"})


def _parse_obj(text) -> MeshComplex:
    verts = []
    faces = []
    for i, line in _content_lines(text):
        toks = line.split()
        if toks[0] == "v":
            try:
                verts.append([float(t) for t in toks[1:4]])
            except (ValueError, IndexError):
                raise MeshError("parse", "bad vertex line", i) from None
        elif toks[0] == "f":
            refs = toks[1:]
            if len(refs) != 3:
                raise MeshError("bad_format", "only triangular faces supported", i)
            try:
                # "f 1/uv/nrm 2 3" -> geometry index before the first slash
                faces.append([int(r.split("/")[0]) - 1 for r in refs])
            except ValueError:
                raise MeshError("parse", "bad face line", i) from None
        # all other directives (vt, vn, usemtl, ...) are ignored
    if not verts or not faces:
        raise MeshError("parse", "no geometry found in OBJ", 1)
    return MeshComplex(np.asarray(verts), np.asarray(faces, dtype=np.int64), metadata={"source": "obj"})


def _parse_tet(text) -> MeshComplex:
    lines = _content_lines(text)
    try:
        i, header = next(lines)
    except StopIteration:
        raise MeshError("parse", "empty tet file", 1) from None
    if header != "tetmesh":
        raise MeshError("parse", f"expected 'tetmesh' header, got {header!r}", i)
    try:
        i, counts = next(lines)
        nv, nt, nb = (int(tok) for tok in counts.split()[:3])
    except (StopIteration, ValueError):
        raise MeshError("parse", "bad count line", i) from None

    def read_block(count, width, caster, what):
        out = []
        last = i
        for k in range(count):
            try:
                last, line = next(lines)
                toks = line.split()
                if len(toks) < width:
                    raise ValueError
                out.append([caster(t) for t in toks[:width]])
            except (StopIteration, ValueError):
                raise MeshError("parse", f"bad {what} line {k}", last) from None
        return out

    verts = np.asarray(read_block(nv, 3, float, "vertex"))
    tets = np.asarray(read_block(nt, 4, int, "tet"), dtype=np.int64)
    bnd = np.asarray(read_block(nb, 3, int, "boundary"), dtype=np.int64)
    return MeshComplex(verts, tets, boundary_faces=bnd, metadata={"source": "tet"})


def save_tet(mesh: MeshComplex, path) -> None:
    if mesh.kind != "solid":
        raise MeshError("bad_kind", "tet export is for solid meshes")
    with open(path, "w") as fh:
        fh.write("tetmesh\n")
        fh.write(f"{mesh.n_vertices} {mesh.n_cells} {mesh.boundary_faces.shape[0]}\n")
        for v in mesh.vertices:
            fh.write(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in mesh.cells:
            fh.write(f"{t[0]} {t[1]} {t[2]} {t[3]}\n")
        for f in mesh.boundary_faces:
            fh.write(f"{f[0]} {f[1]} {f[2]}\n")


# ---------------------------------------------------------------------------
# discrete shape operator


@dataclass
class DiscreteShape:
    """Per-vertex shape data of a triangulated surface.

    ``normals`` are inner unit normals; ``shape`` holds symmetric 2x2 shape
    operators in the per-vertex tangent frames; ``shape_world`` the same
    operators as ambient 3x3 maps annihilating the normal.
    """

    normals: np.ndarray  # (V, 3)
    frames: np.ndarray  # (V, 3, 2)
    shape: np.ndarray  # (V, 2, 2)
    shape_world: np.ndarray  # (V, 3, 3)
    principal: np.ndarray  # (V, 2) ascending
    mean: np.ndarray  # (V,)
    areas: np.ndarray  # (V,) barycentric vertex areas

    def shape_data(self, vertex: int) -> ShapeData:
        return ShapeData(
            principal=self.principal[vertex], shape_matrix=self.shape[vertex]
        )

    def iter_shape_data(self):
        for v in range(self.principal.shape[0]):
            yield self.shape_data(v)

    def integral_shape_norm_sq(self) -> float:
        """Area-weighted integral of |S|^2 over the surface."""
        return float((self.areas * (self.principal**2).sum(axis=1)).sum())


def _vertex_adjacency(mesh: MeshComplex):
    neighbors = [set() for _ in range(mesh.n_vertices)]
    for a, b, c in mesh.cells:
        neighbors[a].update((b, c))
        neighbors[b].update((a, c))
        neighbors[c].update((a, b))
    return neighbors


def _vertex_rings(mesh: MeshComplex, depth: int = 2, min_size: int = 8):
    """k-ring neighbourhoods, grown deeper where the mesh is too sparse
    (patch corners) to determine a quadric fit."""
    neighbors = _vertex_adjacency(mesh)
    rings = []
    for v in range(mesh.n_vertices):
        ring = set(neighbors[v])
        level = 1
        while level < depth or (len(ring) < min_size and level < depth + 3):
            ring |= {w for u in list(ring) for w in neighbors[u]}
            level += 1
        ring.discard(v)
        rings.append(sorted(ring))
    return rings


def _vertex_normals(mesh: MeshComplex) -> np.ndarray:
    """Angle-weighted average of outward face normals, flipped to inner."""
    v = mesh.vertices
    f = mesh.cells
    fn, _ = mesh.face_normals_areas()
    acc = np.zeros((mesh.n_vertices, 3))
    for corner in range(3):
        p0 = v[f[:, corner]]
        e1 = v[f[:, (corner + 1) % 3]] - p0
        e2 = v[f[:, (corner + 2) % 3]] - p0
        cosang = np.einsum("ij,ij->i", e1, e2) / (
            np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1)
        )
        ang = np.arccos(np.clip(cosang, -1.0, 1.0))
        np.add.at(acc, f[:, corner], ang[:, None] * fn)
    norms = np.linalg.norm(acc, axis=1)
    if (norms < 1e-300).any():
        raise MeshError("degenerate_ring", "vanishing vertex normal")
    return -(acc / norms[:, None])


def discrete_shape(mesh: MeshComplex, ring_depth: int = 2) -> DiscreteShape:
    """Per-vertex shape operator by osculating-quadric least squares.

    Heights over the tangent plane (along the inner normal) of the
    ``ring_depth``-ring neighbours are fit with a full quadratic; the shape
    operator is the symmetric first-fundamental-form correction
    I^{-1/2} II I^{-1/2} of the fitted Hessian, so a unit sphere yields
    principal curvatures +1.
    """
    if mesh.kind != "surface":
        raise MeshError("bad_kind", "discrete shape requires a surface mesh")
    v = mesh.vertices
    normals = _vertex_normals(mesh)
    rings = _vertex_rings(mesh, ring_depth)
    nv = mesh.n_vertices

    frames = np.empty((nv, 3, 2))
    shapes = np.empty((nv, 2, 2))
    shape_world = np.empty((nv, 3, 3))
    principal = np.empty((nv, 2))

    from .exterior import tangent_frame

    for i in range(nv):
        ring = rings[i]
        if len(ring) < 5:
            raise MeshError("degenerate_ring", f"vertex {i} has too few neighbours")
        frame = tangent_frame(normals[i])
        rel = v[ring] - v[i]
        uv = rel @ frame
        h = rel @ normals[i]
        # full quadratic h(u,w) = a u^2 + b u w + c w^2 + d u + e w + g
        cols = np.column_stack(
            [uv[:, 0] ** 2, uv[:, 0] * uv[:, 1], uv[:, 1] ** 2, uv, np.ones(len(ring))]
        )
        sol, _, rank, _ = np.linalg.lstsq(cols, h, rcond=None)
        if rank < 6:
            raise MeshError("degenerate_ring", f"rank-deficient fit at vertex {i}")
        a, b, c, d, e, _ = sol
        hess = np.array([[2 * a, b], [b, 2 * c]])
        grad = np.array([d, e])
        first = np.eye(2) + np.outer(grad, grad)
        second = hess / np.sqrt(1.0 + grad @ grad)
        evals, evecs = np.linalg.eigh(first)
        inv_sqrt = evecs @ np.diag(evals**-0.5) @ evecs.T
        s = inv_sqrt @ second @ inv_sqrt
        s = (s + s.T) / 2.0
        frames[i] = frame
        shapes[i] = s
        shape_world[i] = frame @ s @ frame.T
        principal[i] = np.linalg.eigvalsh(s)

    _, face_areas = mesh.face_normals_areas()
    areas = np.zeros(nv)
    np.add.at(areas, mesh.cells[:, 0], face_areas / 3.0)
    np.add.at(areas, mesh.cells[:, 1], face_areas / 3.0)
    np.add.at(areas, mesh.cells[:, 2], face_areas / 3.0)

    return DiscreteShape(
        normals=normals,
        frames=frames,
        shape=shapes,
        shape_world=shape_world,
        principal=principal,
        mean=principal.mean(axis=1),
        areas=areas,
    )


# ---------------------------------------------------------------------------
# analytic ellipsoid oracle


def ellipsoid_shape_world(points, semi_axes) -> np.ndarray:
    """Ambient 3x3 shape operators of an ellipsoid at on-surface points.

    Level-set formula P (Hess F / |grad F|) P with the inner-normal sign
    convention, so convex ellipsoids give positive curvatures.
    """
    q = np.atleast_2d(np.asarray(points, dtype=float))
    a, b, c = semi_axes
    weights = np.array([1.0 / a**2, 1.0 / b**2, 1.0 / c**2])
    grad = 2.0 * q * weights
    gnorm = np.linalg.norm(grad, axis=1)
    nu = grad / gnorm[:, None]  # outward
    proj = np.eye(3)[None] - np.einsum("mi,mj->mij", nu, nu)
    hess = np.diag(2.0 * weights)[None] / gnorm[:, None, None]
    return np.einsum("mij,mjk,mkl->mil", proj, hess, proj)


def ellipsoid_principal_curvatures(points, semi_axes) -> np.ndarray:
    """Closed-form principal curvatures (ascending) at on-surface points."""
    s = ellipsoid_shape_world(points, semi_axes)
    evals = np.linalg.eigvalsh(s)
    # one eigenvalue is exactly zero (the normal direction); drop the one
    # with smallest magnitude
    idx = np.argmin(np.abs(evals), axis=1)
    out = np.empty((len(evals), 2))
    for m, i in enumerate(idx):
        keep = [j for j in range(3) if j != i]
        out[m] = np.sort(evals[m, keep])
    return out
