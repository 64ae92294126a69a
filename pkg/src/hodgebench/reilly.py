"""Term-by-term evaluation of integrated Bochner (Reilly-type) identities.

On a flat solid mesh with boundary, the energy of a p-form field splits as

    int |d w|^2 + |delta w|^2  =  int |grad w|^2 + <W w, w>
                                  + 2 int_bnd <i_N w, delta^S (J* w)>
                                  + int_bnd B(w, w)

with N the inner unit normal, J* the tangential restriction, delta^S the
surface codifferential and B a shape-operator boundary term with two
equivalent expressions.  Every term is integrated separately and the
residual of the identity is reported.

The surface codifferential in the cross term is evaluated through the
commutation identity (see :func:`check_commutation`, which tests that
identity itself against surface finite differences); a DEC-based second
path is available as a diagnostic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dataclass_field
from math import comb

import numpy as np

from .curvature import CurvatureTerm
from .exterior import (
    AlternatingForm,
    induced_endomorphism,
    induced_generator_stack,
    interior_basis_stack,
    interior_product,
    star_matrix,
    tangent_frame,
    tangential_part,
    wedge,
    wedge_basis_stack,
)
from .fields import FormField, ScalarField
from .meshes import MeshComplex, MeshError, discrete_shape

__all__ = [
    "ReillyLedger",
    "SphereSurface",
    "MeshBoundarySurface",
    "evaluate_reilly",
    "evaluate_classical_reilly",
    "check_commutation",
    "check_derivative_formulas",
    "check_stokes",
    "restriction_identity_residuals",
    "sphere_sample_points",
    "run_reilly_levels",
]

_TET4_A = 0.5854101966249685
_TET4_B = 0.1381966011250105


# ---------------------------------------------------------------------------
# batched multilinear helpers (structure matrices come from the exterior core)


def _batch_interior(coeffs, normals, degree):
    stack = interior_basis_stack(normals.shape[1], degree)
    return np.einsum("kDc,mc,mk->mD", stack, coeffs, normals)


def _batch_wedge_vec(coeffs, normals, degree):
    stack = wedge_basis_stack(normals.shape[1], degree)
    return np.einsum("kDc,mc,mk->mD", stack, coeffs, normals)


def _batch_tangential(coeffs, normals, degree):
    if degree == 0:
        return coeffs
    v = _batch_interior(coeffs, normals, degree)
    return coeffs - _batch_wedge_vec(v, normals, degree - 1)


def _batch_shape(coeffs, shape_world, degree):
    stack = induced_generator_stack(shape_world.shape[1], degree)
    return np.einsum("IJab,mab,mJ->mI", stack, shape_world, coeffs)


def _batch_d(jac, degree, dim):
    if degree == dim:
        return np.zeros((jac.shape[0], 1))
    stack = wedge_basis_stack(dim, degree)
    return np.einsum("kDc,mck->mD", stack, jac)


def _batch_delta(jac, degree, dim):
    stack = interior_basis_stack(dim, degree)
    return -np.einsum("kDc,mck->mD", stack, jac)


# ---------------------------------------------------------------------------
# surfaces supplying normals and shape operators at boundary points


class SphereSurface:
    """Round sphere with the inner-normal convention (curvatures +1/r)."""

    def __init__(self, radius: float = 1.0, center=None, dim: int = 3):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.dim = dim
        self.center = np.zeros(dim) if center is None else np.asarray(center, float)
        self.analytic = True

    def normals(self, points) -> np.ndarray:
        q = np.atleast_2d(points) - self.center
        return -q / np.linalg.norm(q, axis=1)[:, None]

    def normal_at(self, point) -> np.ndarray:
        return self.normals(point[None])[0]

    def shape_world(self, points) -> np.ndarray:
        n = self.normals(points)
        proj = np.eye(self.dim)[None] - np.einsum("mi,mj->mij", n, n)
        return proj / self.radius

    def shape_world_at(self, point) -> np.ndarray:
        return self.shape_world(point[None])[0]

    def project(self, points) -> np.ndarray:
        q = np.atleast_2d(points) - self.center
        return self.center + self.radius * q / np.linalg.norm(q, axis=1)[:, None]

    def quadrature_data(self, points, face_ids=None, bary=None):
        return self.normals(points), self.shape_world(points)


class MeshBoundarySurface:
    """Boundary of a solid mesh with barycentric-interpolated discrete shape."""

    def __init__(self, mesh: MeshComplex):
        if mesh.kind != "solid":
            raise MeshError("bad_kind", "boundary surface requires a solid mesh")
        self.mesh = mesh
        self.surface, self.vertex_map = mesh.boundary_mesh()
        self.shape = discrete_shape(self.surface)
        self.analytic = False

    def quadrature_data(self, points, face_ids, bary):
        faces = self.surface.cells[face_ids]  # (M, 3) surface vertex ids
        n = np.einsum("mq,mqi->mi", bary, self.shape.normals[faces])
        n /= np.linalg.norm(n, axis=1)[:, None]
        s = np.einsum("mq,mqij->mij", bary, self.shape.shape_world[faces])
        proj = np.eye(3)[None] - np.einsum("mi,mj->mij", n, n)
        s = np.einsum("mij,mjk,mkl->mil", proj, s, proj)
        return n, (s + s.transpose(0, 2, 1)) / 2.0


def _resolve_surface(mesh: MeshComplex, shape_source):
    if not isinstance(shape_source, str):
        return shape_source  # caller-supplied surface object
    gen = mesh.metadata.get("generator")
    if shape_source == "auto":
        shape_source = "analytic" if gen == "ball" else "discrete"
    if shape_source == "analytic":
        if gen != "ball":
            raise ValueError("analytic shape data only available for generated balls")
        return SphereSurface(radius=mesh.metadata.get("radius", 1.0))
    if shape_source == "discrete":
        return MeshBoundarySurface(mesh)
    raise ValueError(f"unknown shape source {shape_source!r}")


# ---------------------------------------------------------------------------
# quadrature


def _tet_quadrature(mesh: MeshComplex, order: int):
    v = mesh.vertices[mesh.cells]  # (T, 4, 3)
    vols = (
        np.einsum(
            "ij,ij->i",
            v[:, 1] - v[:, 0],
            np.cross(v[:, 2] - v[:, 0], v[:, 3] - v[:, 0]),
        )
        / 6.0
    )
    if order <= 1:
        bary = np.full((1, 4), 0.25)
    else:
        bary = np.full((4, 4), _TET4_B)
        np.fill_diagonal(bary, _TET4_A)
    pts = np.einsum("qk,tkc->tqc", bary, v).reshape(-1, 3)
    w = np.repeat(vols / bary.shape[0], bary.shape[0])
    return pts, w


def _tri_quadrature(vertices, faces, order: int):
    v = vertices[faces]  # (F, 3, 3)
    areas = np.linalg.norm(np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]), axis=1) / 2.0
    if order <= 1:
        bary = np.full((1, 3), 1.0 / 3.0)
    else:
        bary = np.full((3, 3), 1.0 / 6.0)
        np.fill_diagonal(bary, 2.0 / 3.0)
    pts = np.einsum("qk,fkc->fqc", bary, v).reshape(-1, 3)
    w = np.repeat(areas / bary.shape[0], bary.shape[0])
    face_ids = np.repeat(np.arange(len(faces)), bary.shape[0])
    bary_all = np.tile(bary, (len(faces), 1))
    return pts, w, face_ids, bary_all


def _diameter(mesh: MeshComplex) -> float:
    lo = mesh.vertices.min(axis=0)
    hi = mesh.vertices.max(axis=0)
    return float(np.linalg.norm(hi - lo))


# ---------------------------------------------------------------------------
# ledgers


@dataclass
class ReillyLedger:
    """Individually integrated terms of an energy identity plus its residual.

    ``terms`` maps term names to values; ``rhs_terms`` lists the names that
    balance against ``lhs`` in the residual.  Diagnostic columns (the
    alternative boundary expression, the DEC path) are carried alongside.
    """

    kind: str  # 'p-form' or 'classical'
    degree: int
    lhs: float
    terms: dict
    rhs_terms: tuple
    residual: float
    relative_residual: float
    meta: dict = dataclass_field(default_factory=dict)

    def __getitem__(self, name):
        return self.terms[name]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "degree": self.degree,
            "lhs": self.lhs,
            "terms": {k: float(v) for k, v in self.terms.items() if v is not None},
            "rhs_terms": list(self.rhs_terms),
            "residual": self.residual,
            "relative_residual": self.relative_residual,
            "meta": self.meta,
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


def _finish_ledger(kind, degree, lhs, terms, rhs_names, meta):
    rhs_total = sum(terms[name] for name in rhs_names)
    residual = lhs - rhs_total
    scale = max(
        [abs(lhs)] + [abs(terms[name]) for name in rhs_names] + [1e-300]
    )
    return ReillyLedger(
        kind=kind,
        degree=degree,
        lhs=lhs,
        terms=terms,
        rhs_terms=tuple(rhs_names),
        residual=float(residual),
        relative_residual=float(abs(residual) / scale),
        meta=meta,
    )


def _check_curvature(curvature, degree):
    if curvature is None:
        return 0.0
    if not isinstance(curvature, CurvatureTerm):
        raise TypeError("curvature must be a CurvatureTerm or None")
    if curvature.kind != "constant_curvature":
        raise ValueError(
            "only flat solids (None) and the constant-curvature scalar rule "
            f"are supported here, got {curvature.kind!r}"
        )
    return curvature.scalar(degree, 3)


def evaluate_reilly(
    mesh: MeshComplex,
    form: FormField,
    order: int = 2,
    shape_source="auto",
    curvature: CurvatureTerm | None = None,
    nodes: str = "auto",
    fd_step: float | None = None,
    include_dec: bool = False,
    allow_fd: bool = True,
) -> ReillyLedger:
    """Integrate every term of the p-form energy identity on a solid mesh.

    ``shape_source`` picks where boundary normals/shape operators come from:
    'analytic' (generated balls), 'discrete' (quadric-fitted boundary shape),
    'auto', or a surface object.  ``nodes='projected'`` evaluates boundary
    integrands at points projected onto the analytic surface (default for
    balls).  ``include_dec`` adds a DEC evaluation of the cross term as a
    diagnostic column.
    """
    if mesh.kind != "solid":
        raise MeshError("bad_kind", "p-form ledger requires a solid mesh")
    p = form.degree
    if not 1 <= p <= 3:
        raise ValueError("form degree must be 1, 2 or 3")
    if not form.has_analytic_derivatives:
        if not allow_fd:
            raise ValueError("field lacks analytic derivatives and FD is disabled")
        if fd_step is None:
            fd_step = 1e-5 * _diameter(mesh)
    h = fd_step

    surface = _resolve_surface(mesh, shape_source)
    w_scalar = _check_curvature(curvature, p)

    # interior terms
    pts, wts = _tet_quadrature(mesh, order)
    coeffs = form.value(pts)
    jac = form.jacobian(pts, h=h)
    d_co = _batch_d(jac, p, 3)
    delta_co = _batch_delta(jac, p, 3)
    lhs = float(wts @ ((d_co**2).sum(axis=1) + (delta_co**2).sum(axis=1)))
    dirichlet = float(wts @ (jac**2).sum(axis=(1, 2)))
    curvature_term = w_scalar * float(wts @ (coeffs**2).sum(axis=1))

    # boundary terms
    bpts, bw, fids, bary = _tri_quadrature(mesh.vertices, mesh.boundary_faces, order)
    if nodes == "auto":
        nodes = "projected" if getattr(surface, "analytic", False) else "flat"
    if nodes == "projected" and not hasattr(surface, "project"):
        raise ValueError("projected boundary nodes require an analytic surface")
    epts = surface.project(bpts) if nodes == "projected" else bpts
    normals, shape_world = surface.quadrature_data(epts, fids, bary)
    cb = form.value(epts)
    jb = form.jacobian(epts, h=h)

    v_part = _batch_interior(cb, normals, p)  # degree p-1
    t_part = cb - _batch_wedge_vec(v_part, normals, p - 1)
    delta_b = _batch_delta(jb, p, 3)
    t_delta = _batch_tangential(delta_b, normals, p - 1)
    grad_n = np.einsum("mck,mk->mc", jb, normals)
    i_n_grad_n = _batch_interior(grad_n, normals, p)
    s_v = _batch_shape(v_part, shape_world, p - 1)
    n_mean = np.einsum("mii->m", shape_world)  # n*H = trace of the shape operator
    delta_sigma_j = t_delta + i_n_grad_n + s_v - n_mean[:, None] * v_part
    cross = 2.0 * float(bw @ (v_part * delta_sigma_j).sum(axis=1))

    s_t = _batch_shape(t_part, shape_world, p)
    b_two = (s_t * t_part).sum(axis=1) + n_mean * (v_part**2).sum(axis=1) - (
        s_v * v_part
    ).sum(axis=1)
    star_c = cb @ star_matrix(3, p).T
    t_star = _batch_tangential(star_c, normals, 3 - p)
    b_one = (s_t * t_part).sum(axis=1) + (
        _batch_shape(t_star, shape_world, 3 - p) * t_star
    ).sum(axis=1)
    boundary = float(bw @ b_two)
    boundary_star = float(bw @ b_one)
    gap = float(np.abs(b_one - b_two).max()) if len(b_one) else 0.0

    terms = {
        "dirichlet_energy": dirichlet,
        "curvature_energy": curvature_term,
        "normal_cross_term": cross,
        "boundary_shape_term": boundary,
        "boundary_shape_term_star_form": boundary_star,
        "boundary_forms_max_gap": gap,
        "form_l2_norm_sq": float(wts @ (coeffs**2).sum(axis=1)),
    }
    if include_dec:
        terms["dec_cross_term"] = _dec_cross_term(mesh, form, surface, h)

    meta = {
        "field": form.name,
        "degree": p,
        "order": order,
        "nodes": nodes,
        "shape_source": "analytic" if getattr(surface, "analytic", False) else "discrete",
        "mesh": mesh.report(),
    }
    return _finish_ledger(
        "p-form",
        p,
        lhs,
        terms,
        ("dirichlet_energy", "curvature_energy", "normal_cross_term", "boundary_shape_term"),
        meta,
    )


def evaluate_classical_reilly(
    mesh: MeshComplex,
    f: ScalarField,
    order: int = 2,
    shape_source="auto",
    curvature: CurvatureTerm | None = None,
    nodes: str = "auto",
    fd_step: float | None = None,
    allow_fd: bool = True,
) -> ReillyLedger:
    """Integrate the classical (function) form of the identity.

    The ledger holds int (Lap f)^2 on the left and the Hessian energy, the
    Ricci term (zero on flat solids) and the three boundary integrals
    2 f_N Lap^S f, <S grad^S f, grad^S f>, nH f_N^2 on the right.
    """
    if mesh.kind != "solid":
        raise MeshError("bad_kind", "classical ledger requires a solid mesh")
    if not f.has_analytic_derivatives:
        if not allow_fd:
            raise ValueError("field lacks analytic derivatives and FD is disabled")
        if fd_step is None:
            fd_step = 1e-5 * _diameter(mesh)
    h = fd_step
    surface = _resolve_surface(mesh, shape_source)
    ric_scalar = _check_curvature(curvature, 1)

    pts, wts = _tet_quadrature(mesh, order)
    hess = f.hessian(pts, h=h)
    grad = f.gradient(pts, h=h)
    lap = -np.einsum("mii->m", hess)  # positive-spectrum convention
    lhs = float(wts @ lap**2)
    hessian_energy = float(wts @ (hess**2).sum(axis=(1, 2)))
    ricci = ric_scalar * float(wts @ (grad**2).sum(axis=1))

    bpts, bw, fids, bary = _tri_quadrature(mesh.vertices, mesh.boundary_faces, order)
    if nodes == "auto":
        nodes = "projected" if getattr(surface, "analytic", False) else "flat"
    if nodes == "projected" and not hasattr(surface, "project"):
        raise ValueError("projected boundary nodes require an analytic surface")
    epts = surface.project(bpts) if nodes == "projected" else bpts
    normals, shape_world = surface.quadrature_data(epts, fids, bary)
    gb = f.gradient(epts, h=h)
    hb = f.hessian(epts, h=h)
    f_n = np.einsum("mk,mk->m", gb, normals)
    lap_b = -np.einsum("mii->m", hb)
    hess_nn = np.einsum("mi,mij,mj->m", normals, hb, normals)
    n_mean = np.einsum("mii->m", shape_world)
    # surface Laplacian via the commutation identity for df
    lap_sigma = lap_b + hess_nn - n_mean * f_n
    boundary_normal_lap = 2.0 * float(bw @ (f_n * lap_sigma))
    boundary_shape_grad = float(bw @ np.einsum("mi,mij,mj->m", gb, shape_world, gb))
    boundary_mean_sq = float(bw @ (n_mean * f_n**2))

    terms = {
        "hessian_energy": hessian_energy,
        "ricci_term": ricci,
        "boundary_normal_laplacian": boundary_normal_lap,
        "boundary_shape_gradient": boundary_shape_grad,
        "boundary_mean_normal_sq": boundary_mean_sq,
    }
    meta = {
        "field": f.name,
        "order": order,
        "nodes": nodes,
        "shape_source": "analytic" if getattr(surface, "analytic", False) else "discrete",
        "mesh": mesh.report(),
    }
    return _finish_ledger(
        "classical",
        0,
        lhs,
        terms,
        tuple(terms.keys()),
        meta,
    )


def run_reilly_levels(
    levels,
    field,
    order: int = 2,
    shape_source="auto",
    **kwargs,
):
    """Evaluate the appropriate ledger on generated balls over refinement levels."""
    from .meshes import generate_ball

    ledgers = []
    for level in levels:
        mesh = generate_ball(level)
        if isinstance(field, ScalarField):
            ledger = evaluate_classical_reilly(
                mesh, field, order=order, shape_source=shape_source, **kwargs
            )
        else:
            ledger = evaluate_reilly(
                mesh, field, order=order, shape_source=shape_source, **kwargs
            )
        ledger.meta["level"] = level
        ledgers.append(ledger)
    return ledgers


# ---------------------------------------------------------------------------
# DEC diagnostic path for the cross term


def _dec_cross_term(mesh: MeshComplex, form: FormField, surface, h):
    from .spectrum import assemble_dec

    p = form.degree
    if p == 3:
        return 0.0  # J* of a top-degree ambient form vanishes on the surface
    if isinstance(surface, MeshBoundarySurface) and surface.mesh is mesh:
        surf = surface.surface
        normals_v = surface.shape.normals
    else:
        surf, _ = mesh.boundary_mesh()
        if getattr(surface, "analytic", False):
            normals_v = surface.normals(surf.vertices)
        else:
            normals_v = discrete_shape(surf).normals
    ops = assemble_dec(surf)
    edges = surf.edges
    mids = (surf.vertices[edges[:, 0]] + surf.vertices[edges[:, 1]]) / 2.0
    if getattr(surface, "analytic", False):
        n_mid = surface.normals(mids)
    else:
        n_mid = normals_v[edges[:, 0]] + normals_v[edges[:, 1]]
        n_mid /= np.linalg.norm(n_mid, axis=1)[:, None]
    edge_vec = surf.vertices[edges[:, 1]] - surf.vertices[edges[:, 0]]

    cm = form.value(mids)
    v_mid = _batch_interior(cm, n_mid, p)
    t_mid = cm - _batch_wedge_vec(v_mid, n_mid, p - 1)

    if p == 1:
        cv = form.value(surf.vertices)
        v_vert = _batch_interior(cv, normals_v, 1)[:, 0]
        a = np.einsum("ek,ek->e", t_mid, edge_vec)
        delta_a = ops.codifferential_1(a)
        return 2.0 * float((ops.star0 * v_vert * delta_a).sum())

    # p == 2: edge cochain of the normal part, face cochain of the restriction
    b = np.einsum("ek,ek->e", v_mid, edge_vec)
    f = surf.cells
    centroids = surf.vertices[f].mean(axis=1)
    if getattr(surface, "analytic", False):
        n_cent = surface.normals(centroids)
    else:
        n_cent = normals_v[f].sum(axis=1)
        n_cent /= np.linalg.norm(n_cent, axis=1)[:, None]
    cc = form.value(centroids)
    vc = _batch_interior(cc, n_cent, 2)
    tc = cc - _batch_wedge_vec(vc, n_cent, 1)
    u = surf.vertices[f[:, 1]] - surf.vertices[f[:, 0]]
    w = surf.vertices[f[:, 2]] - surf.vertices[f[:, 0]]
    iu = _batch_interior(tc, u, 2)
    face_vals = np.einsum("mk,mk->m", iu, w) / 2.0
    delta_c = ops.codifferential_2(face_vals)
    return 2.0 * float((ops.star1 * b * delta_c).sum())


# ---------------------------------------------------------------------------
# pointwise surface-derivative machinery and identity checks


def sphere_sample_points(count: int, dim: int = 3, radius: float = 1.0, seed: int = 3):
    """Deterministic spread of points on the sphere (seeded Gaussian rays)."""
    rng = np.random.default_rng(seed)
    q = rng.standard_normal((count, dim))
    return radius * q / np.linalg.norm(q, axis=1)[:, None]


def _point_value(form: FormField, q, h):
    val = AlternatingForm(form.dim, form.degree, form.value(q[None])[0])
    jac = form.jacobian(q[None], h=h)[0]
    return val, jac


def _surface_covariant_derivative(form, surface, q, x, method="fd", h=1e-4, fd_field_h=None):
    """(surface covariant derivative of J*w, of i_N w) along tangent x at q.

    'fd' differentiates the split fields along the projected curve through q
    (independent of any commutation identity); 'analytic' uses the shape
    operator and the ambient field derivative.
    Returns ambient-coefficient tangential AlternatingForms.
    """
    n_vec = surface.normal_at(q)
    p = form.degree
    if method == "analytic":
        s_world = surface.shape_world_at(q)
        val, jac = _point_value(form, q, fd_field_h)
        grad_x = AlternatingForm(form.dim, p, jac @ x)
        dn = -(s_world @ x)
        v = interior_product(n_vec, val)
        dxv = interior_product(dn, val) + interior_product(n_vec, grad_x)
        dxt = grad_x - wedge(AlternatingForm.covector(dn), v) - wedge(
            AlternatingForm.covector(n_vec), dxv
        )
        return tangential_part(dxt, n_vec), tangential_part(dxv, n_vec)
    if method != "fd":
        raise ValueError("method must be 'fd' or 'analytic'")

    def split_at(y):
        ny = surface.normal_at(y)
        w = AlternatingForm(form.dim, p, form.value(y[None])[0])
        return tangential_part(w, ny), interior_product(ny, w)

    qp = surface.project((q + h * x)[None])[0]
    qm = surface.project((q - h * x)[None])[0]
    tp, vp = split_at(qp)
    tm, vm = split_at(qm)
    dxt = (tp - tm) * (1.0 / (2 * h))
    dxv = (vp - vm) * (1.0 / (2 * h))
    return tangential_part(dxt, n_vec), tangential_part(dxv, n_vec)


def check_derivative_formulas(
    form: FormField,
    surface,
    points,
    h: float = 1e-4,
    fd_field_h: float | None = None,
    seed: int = 11,
):
    """Residuals of the two tangential/normal derivative identities.

    For each sample point and a random tangent direction X, the surface
    covariant derivatives of J*w and i_N w (surface finite differences) are
    compared against  J*(grad_X w) + (S X)^* ^ i_N w  and
    i_N grad_X w - i_{S X} J* w.  Returns the max residual of each identity.
    """
    pts = np.atleast_2d(points)
    rng = np.random.default_rng(seed)
    res1 = res2 = 0.0
    for q in pts:
        n_vec = surface.normal_at(q)
        s_world = surface.shape_world_at(q)
        x = rng.standard_normal(form.dim)
        x -= (x @ n_vec) * n_vec
        x /= np.linalg.norm(x)
        lhs1, lhs2 = _surface_covariant_derivative(
            form, surface, q, x, method="fd", h=h, fd_field_h=fd_field_h
        )
        val, jac = _point_value(form, q, fd_field_h)
        grad_x = AlternatingForm(form.dim, form.degree, jac @ x)
        v = interior_product(n_vec, val)
        t = tangential_part(val, n_vec)
        sx = s_world @ x
        rhs1 = tangential_part(grad_x, n_vec) + wedge(AlternatingForm.covector(sx), v)
        rhs2 = interior_product(n_vec, grad_x) - interior_product(sx, t)
        res1 = max(res1, (lhs1 - rhs1).norm())
        res2 = max(res2, (lhs2 - rhs2).norm())
    return res1, res2


def _surface_d_delta(form, surface, q, method, h, fd_field_h):
    """(delta^S of J*w, d^S of i_N w) as ambient tangential forms at q."""
    n_vec = surface.normal_at(q)
    frame = tangent_frame(n_vec)
    p = form.degree
    delta_t = AlternatingForm.zero(form.dim, p - 1) if p >= 1 else None
    d_v = AlternatingForm.zero(form.dim, p) if p >= 1 else None
    for i in range(frame.shape[1]):
        ti = frame[:, i]
        dt, dv = _surface_covariant_derivative(
            form, surface, q, ti, method=method, h=h, fd_field_h=fd_field_h
        )
        delta_t = delta_t - interior_product(ti, dt)
        d_v = d_v + wedge(AlternatingForm.covector(ti), dv)
    return delta_t, d_v


def check_commutation(
    form: FormField,
    surface,
    points,
    h: float = 1e-4,
    fd_field_h: float | None = None,
    method: str = "fd",
):
    """Residuals of the two commutation identities relating surface and
    ambient derivatives at the boundary.

    delta^S(J*w) is tested against J*(delta w) + i_N grad_N w
    + S^[p-1](i_N w) - nH i_N w, and d^S(i_N w) against
    -i_N dw + J*(grad_N w) - S^[p](J*w).  The left sides come from surface
    finite differences (method='fd', the independent oracle) or from the
    analytic shape-operator path.
    """
    pts = np.atleast_2d(points)
    p = form.degree
    res1 = res2 = 0.0
    for q in pts:
        n_vec = surface.normal_at(q)
        s_world = surface.shape_world_at(q)
        lhs_delta, lhs_d = _surface_d_delta(form, surface, q, method, h, fd_field_h)
        val, jac = _point_value(form, q, fd_field_h)
        v = interior_product(n_vec, val)
        t = tangential_part(val, n_vec)
        n_mean = float(np.trace(s_world))
        delta_w = AlternatingForm(
            form.dim, p - 1, _batch_delta(jac[None], p, form.dim)[0]
        )
        grad_n = AlternatingForm(form.dim, p, jac @ n_vec)
        rhs1 = (
            tangential_part(delta_w, n_vec)
            + interior_product(n_vec, grad_n)
            + induced_endomorphism(s_world, p - 1).apply(v)
            - n_mean * v
        )
        d_w_co = _batch_d(jac[None], p, form.dim)[0]
        if p == form.dim:
            i_n_dw = AlternatingForm.zero(form.dim, p)
        else:
            d_w = AlternatingForm(form.dim, p + 1, d_w_co)
            i_n_dw = interior_product(n_vec, d_w)
        rhs2 = (
            -1.0 * i_n_dw
            + tangential_part(grad_n, n_vec)
            - induced_endomorphism(s_world, p).apply(t)
        )
        res1 = max(res1, (lhs_delta - rhs1).norm())
        res2 = max(res2, (lhs_d - rhs2).norm())
    return res1, res2


def restriction_identity_residuals(
    xi: AlternatingForm, radius: float = 1.0, points=None, count: int = 16, seed: int = 5
):
    """Residuals of the two restriction identities of a parallel form on a
    round sphere:  delta^S(J*xi) = -(n-p+1) H i_N xi  and
    d^S(i_N xi) = -p H J*xi  with H = 1/radius (inner normal).

    Evaluated analytically; the residual is numerical noise for any constant
    form.  Returns the max residual pair over the sample points.
    """
    m = xi.dim
    p = xi.degree
    if p < 1:
        raise ValueError("restriction identities need degree >= 1")
    surface = SphereSurface(radius=radius, dim=m)
    if points is None:
        points = sphere_sample_points(count, dim=m, radius=radius, seed=seed)
    form = FormField.constant(xi.coeffs, p, dim=m, name="parallel")
    h_mean = 1.0 / radius
    n = m - 1
    res1 = res2 = 0.0
    for q in np.atleast_2d(points):
        n_vec = surface.normal_at(q)
        lhs_delta, lhs_d = _surface_d_delta(form, surface, q, "analytic", 0.0, None)
        v = interior_product(n_vec, xi)
        t = tangential_part(xi, n_vec)
        want_delta = -(n - p + 1) * h_mean * v
        want_d = -p * h_mean * t
        res1 = max(res1, (lhs_delta - want_delta).norm())
        res2 = max(res2, (lhs_d - want_d).norm())
    return res1, res2


# ---------------------------------------------------------------------------
# integrated adjointness (Stokes) check


def check_stokes(
    mesh: MeshComplex,
    omega: FormField,
    phi: FormField,
    order: int = 2,
    shape_source="auto",
    fd_step: float | None = None,
):
    """Residual of  int <d w, phi> = int <w, delta phi> - int_bnd <J*w, i_N phi>.

    Returns (residual, relative_residual).
    """
    if mesh.kind != "solid":
        raise MeshError("bad_kind", "requires a solid mesh")
    if phi.degree != omega.degree + 1:
        raise ValueError("phi must have degree one higher than omega")
    p = phi.degree
    h = fd_step
    if (not omega.has_analytic_derivatives or not phi.has_analytic_derivatives) and h is None:
        h = 1e-5 * _diameter(mesh)
    surface = _resolve_surface(mesh, shape_source)

    pts, wts = _tet_quadrature(mesh, order)
    d_omega = _batch_d(omega.jacobian(pts, h=h), omega.degree, 3)
    phi_vals = phi.value(pts)
    lhs = float(wts @ (d_omega * phi_vals).sum(axis=1))
    delta_phi = _batch_delta(phi.jacobian(pts, h=h), p, 3)
    omega_vals = omega.value(pts)
    vol_term = float(wts @ (omega_vals * delta_phi).sum(axis=1))

    bpts, bw, fids, bary = _tri_quadrature(mesh.vertices, mesh.boundary_faces, order)
    nodes = "projected" if getattr(surface, "analytic", False) else "flat"
    epts = surface.project(bpts) if nodes == "projected" else bpts
    normals, _ = surface.quadrature_data(epts, fids, bary)
    ob = omega.value(epts)
    t_omega = _batch_tangential(ob, normals, omega.degree)
    i_n_phi = _batch_interior(phi.value(epts), normals, p)
    bnd = float(bw @ (t_omega * i_n_phi).sum(axis=1))

    residual = lhs - (vol_term - bnd)
    scale = max(abs(lhs), abs(vol_term), abs(bnd), 1e-300)
    return float(residual), float(abs(residual) / scale)
