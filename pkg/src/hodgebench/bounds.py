"""Eigenvalue inequality and equality-case reports on concrete geometries.

Every check produces a BoundVerdict with the two sides of the inequality,
an explicit satisfied/violated/inapplicable status, the signed slack
(oriented so that >= 0 means satisfied) and a tightness measure.  Analytic
sphere cases use closed-form curvatures and spectra; mesh cases use the
quadric-fitted shape operator and the DEC spectrum.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .curvature import lowest_p_curvature, sum_largest_squared_curvatures
from .exterior import AlternatingForm
from .meshes import MeshComplex, discrete_shape, generate_ellipsoid
from .reilly import restriction_identity_residuals
from .spectrum import sphere_hodge_oracle, spectrum_functions, spectrum_one_forms

__all__ = [
    "BoundVerdict",
    "GeometryCase",
    "main_lower_bound",
    "xia_bound",
    "upper_bound_degree_one",
    "upper_bound_degree_p",
    "minimal_upper_bound_constant",
    "special_killing_relation",
    "parallel_restriction_check",
    "equality_case_diagnostics",
    "EqualityDiagnostics",
    "verdict_table",
]

ANALYTIC_TOL = 1e-12
MESH_TOL = 3e-2


@dataclass
class BoundVerdict:
    """Outcome of one inequality check on one geometry."""

    name: str
    status: str  # 'satisfied' | 'violated' | 'inapplicable'
    lhs: float
    rhs: float
    formula: str
    slack: float  # oriented: >= 0 means the bound holds
    tightness: float  # |slack| / max(|lhs|, |rhs|)
    tolerance: float
    geometry: dict
    note: str = ""

    @property
    def satisfied(self) -> bool:
        return self.status == "satisfied"

    @property
    def applicable(self) -> bool:
        return self.status != "inapplicable"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "formula": self.formula,
            "slack": self.slack,
            "tightness": self.tightness,
            "tolerance": self.tolerance,
            "geometry": self.geometry,
            "note": self.note,
        }


def _verdict(name, lhs, rhs, orient, formula, tol, geometry, note=""):
    """orient=+1: lhs >= rhs must hold; orient=-1: lhs <= rhs."""
    slack = orient * (lhs - rhs)
    scale = max(abs(lhs), abs(rhs), 1e-300)
    status = "satisfied" if slack >= -tol * scale else "violated"
    return BoundVerdict(
        name=name,
        status=status,
        lhs=float(lhs),
        rhs=float(rhs),
        formula=formula,
        slack=float(slack),
        tightness=float(abs(slack) / scale),
        tolerance=tol,
        geometry=geometry,
        note=note,
    )


def _inapplicable(name, formula, geometry, note, tol):
    return BoundVerdict(
        name=name,
        status="inapplicable",
        lhs=float("nan"),
        rhs=float("nan"),
        formula=formula,
        slack=float("nan"),
        tightness=float("nan"),
        tolerance=tol,
        geometry=geometry,
        note=note,
    )


# ---------------------------------------------------------------------------
# geometry cases


class GeometryCase:
    """A geometry the bounds run on: analytic sphere or mesh-backed surface.

    Analytic spheres know their curvatures and spectra in closed form; mesh
    cases compute them from the quadric-fitted shape operator and the DEC
    Laplacian, lazily and cached.
    """

    def __init__(
        self,
        kind: str,
        boundary_dim: int,
        radius: float | None = None,
        mesh: MeshComplex | None = None,
        label: str = "",
        spectrum_k: int = 8,
    ):
        if kind not in ("analytic-sphere", "mesh-surface"):
            raise ValueError(f"unknown case kind {kind!r}")
        self.kind = kind
        self.boundary_dim = boundary_dim
        self.radius = radius
        self.mesh = mesh
        self.label = label or kind
        self.spectrum_k = spectrum_k
        self.ambient_w_nonneg = True  # flat Euclidean interiors throughout
        self._shape = None
        self._spectrum0 = None
        self._spectrum1 = None

    # constructors ------------------------------------------------------
    @classmethod
    def sphere(cls, n: int, radius: float = 1.0) -> "GeometryCase":
        return cls(
            "analytic-sphere", n, radius=radius, label=f"sphere(n={n}, r={radius:g})"
        )

    @classmethod
    def from_surface_mesh(cls, mesh: MeshComplex, label: str = "", spectrum_k: int = 8):
        if mesh.kind != "surface":
            raise ValueError("mesh case needs a surface mesh")
        return cls(
            "mesh-surface",
            2,
            mesh=mesh,
            label=label or mesh.metadata.get("generator", "mesh"),
            spectrum_k=spectrum_k,
        )

    @classmethod
    def ellipsoid(cls, a, b, c, subdivisions: int = 3, spectrum_k: int = 8):
        mesh = generate_ellipsoid(a, b, c, subdivisions)
        return cls.from_surface_mesh(
            mesh, label=f"ellipsoid({a:g},{b:g},{c:g}; s={subdivisions})", spectrum_k=spectrum_k
        )

    # data --------------------------------------------------------------
    @property
    def is_analytic(self) -> bool:
        return self.kind == "analytic-sphere"

    def describe(self) -> dict:
        out = {"label": self.label, "kind": self.kind, "n": self.boundary_dim}
        if self.is_analytic:
            out["radius"] = self.radius
        else:
            out["mesh"] = {
                "n_vertices": self.mesh.n_vertices,
                "metadata": self.mesh.metadata,
            }
        return out

    def shape(self):
        if self._shape is None:
            self._shape = discrete_shape(self.mesh)
        return self._shape

    def spectrum0(self):
        if self._spectrum0 is None:
            self._spectrum0 = spectrum_functions(self.mesh, self.spectrum_k)
        return self._spectrum0

    def spectrum1(self):
        if self._spectrum1 is None:
            self._spectrum1 = spectrum_one_forms(self.mesh, self.spectrum_k)
        return self._spectrum1

    def sigma(self, p: int) -> float:
        """Lowest p-curvature over the boundary."""
        n = self.boundary_dim
        if not 1 <= p <= n:
            raise ValueError(f"p={p} out of range 1..{n}")
        if self.is_analytic:
            return p / self.radius
        eta = self.shape().principal
        return float(np.partition(eta, p - 1, axis=1)[:, :p].sum(axis=1).min())

    def lambda1_exact(self, p: int) -> float:
        """First eigenvalue on exact p-forms of the boundary."""
        n = self.boundary_dim
        if self.is_analytic:
            lam, _ = sphere_hodge_oracle(n, p)
            return lam / self.radius**2
        if p == 1:
            return self.spectrum0().first_positive()
        raise ValueError("mesh-backed spectra only provide the degree-1 value")

    def h1_trivial(self) -> bool:
        if self.is_analytic:
            # n=1 is kept applicable: the circle attains the degree-one upper
            # bound with equality and serves as its sharpness case
            return True
        return self.mesh.first_betti_number() == 0

    def mean_shape_norm_sq(self, p: int | None = None) -> float:
        """Area-averaged |S|^2 (or top-p partial sum |S|_p^2)."""
        n = self.boundary_dim
        if self.is_analytic:
            count = n if p is None else p
            return count / self.radius**2
        sh = self.shape()
        if p is None:
            vals = (sh.principal**2).sum(axis=1)
        else:
            vals = np.sort(sh.principal**2, axis=1)[:, -p:].sum(axis=1)
        return float((sh.areas * vals).sum() / sh.areas.sum())


# ---------------------------------------------------------------------------
# inequality checks


def main_lower_bound(case: GeometryCase, p: int, tol: float | None = None) -> BoundVerdict:
    """Lower bound of the first exact p-form eigenvalue by the product of the
    extreme p- and (n-p+1)-curvatures, for p-convex boundaries of flat (or
    nonnegatively curved) domains."""
    n = case.boundary_dim
    formula = "lambda'_1,p >= sigma_p * sigma_(n-p+1)"
    tol = tol if tol is not None else (ANALYTIC_TOL if case.is_analytic else MESH_TOL)
    geometry = case.describe() | {"p": p}
    if not 1 <= p <= (n + 1) / 2:
        return _inapplicable(
            "p_form_lower_bound", formula, geometry, f"requires 1 <= p <= (n+1)/2, got p={p}", tol
        )
    if not case.ambient_w_nonneg:
        return _inapplicable(
            "p_form_lower_bound", formula, geometry, "curvature term of the domain not known nonnegative", tol
        )
    sigma_p = case.sigma(p)
    if sigma_p <= 0:
        return _inapplicable(
            "p_form_lower_bound", formula, geometry, f"boundary is not strictly p-convex (sigma_p={sigma_p:g})", tol
        )
    lhs = case.lambda1_exact(p)
    rhs = sigma_p * case.sigma(n - p + 1)
    return _verdict("p_form_lower_bound", lhs, rhs, +1, formula, tol, geometry)


def xia_bound(case: GeometryCase, tol: float | None = None) -> BoundVerdict:
    """Function-Laplacian lower bound n*c^2 for convex boundaries with all
    principal curvatures >= c > 0."""
    n = case.boundary_dim
    formula = "lambda_1 >= n * c^2"
    tol = tol if tol is not None else (ANALYTIC_TOL if case.is_analytic else MESH_TOL)
    geometry = case.describe()
    c = case.sigma(1)
    if c <= 0:
        return _inapplicable(
            "xia_bound", formula, geometry, f"boundary not convex (min curvature {c:g})", tol
        )
    lhs = case.lambda1_exact(1)
    rhs = n * c * c
    return _verdict("xia_bound", lhs, rhs, +1, formula, tol, geometry)


def upper_bound_degree_one(case: GeometryCase, tol: float | None = None) -> BoundVerdict:
    """Upper bound of the function eigenvalue by the averaged squared shape
    norm, for boundaries with trivial first cohomology in a flat ambient."""
    n = case.boundary_dim
    formula = "lambda_1 <= n * avg|S|^2"
    tol = tol if tol is not None else (ANALYTIC_TOL if case.is_analytic else MESH_TOL)
    geometry = case.describe()
    if not case.h1_trivial():
        return _inapplicable(
            "parallel_upper_bound_degree_one",
            formula,
            geometry,
            "nontrivial H^1: harmonic 1-forms absorb the parallel restrictions",
            tol,
        )
    lhs = case.lambda1_exact(1)
    rhs = n * case.mean_shape_norm_sq()
    return _verdict("parallel_upper_bound_degree_one", lhs, rhs, -1, formula, tol, geometry)


def upper_bound_degree_p(case: GeometryCase, p: int, tol: float | None = None) -> BoundVerdict:
    """Upper bound of the exact p-form eigenvalue by alpha(p) times the
    averaged top-alpha(p) squared curvature sum, alpha(p) = max(p, n-p+1).

    Mid-degree bound for hypersurfaces with vanishing cohomology in degrees
    p and n-p+1; sharp at p = (n+1)/2 (attained by odd-dimensional unit
    spheres).  Analytic cases only: surface meshes have no degree in range.
    """
    n = case.boundary_dim
    alpha = max(p, n - p + 1)
    formula = "lambda'_1,p <= alpha(p) * avg|S|^2_alpha(p)"
    tol = tol if tol is not None else (ANALYTIC_TOL if case.is_analytic else MESH_TOL)
    geometry = case.describe() | {"p": p, "alpha": alpha}
    if not 2 <= p <= n - 1:
        raise ValueError(f"p={p} out of range 2..{n - 1}")
    if not case.is_analytic:
        return _inapplicable(
            "parallel_upper_bound_degree_p",
            formula,
            geometry,
            "only analytic cases carry p-form spectra in this range",
            tol,
        )
    lhs = case.lambda1_exact(p)
    rhs = alpha * case.mean_shape_norm_sq(alpha)
    return _verdict("parallel_upper_bound_degree_p", lhs, rhs, -1, formula, tol, geometry)


def minimal_upper_bound_constant(n: int, p: int) -> float:
    """Improved constant for minimal hypersurfaces:
    max(p(n-p), (p-1)(n-p+1)) / n."""
    if not 1 <= p <= n:
        raise ValueError(f"p={p} out of range 1..{n}")
    return max(p * (n - p), (p - 1) * (n - p + 1)) / n


def special_killing_relation(c: float, p: int, n: int, tol: float = ANALYTIC_TOL):
    """Eigenvalue c(p+1)(n-p) of the coclosed eigenform built from a special
    Killing p-form with number c, plus the verdict that it matches the
    exact (p+1)-form eigenvalue of the round sphere of curvature c.

    Returns (eigenvalue, BoundVerdict).
    """
    if c < 0:
        raise ValueError("special Killing number c must be >= 0")
    if not 1 <= p + 1 <= n:
        raise ValueError(f"degree p+1={p + 1} out of range 1..{n}")
    value = c * (p + 1) * (n - p)
    geometry = {"label": f"special-killing(c={c:g}, p={p}, n={n})", "n": n, "p": p, "c": c}
    formula = "lambda''_1,p = lambda'_1,p+1 = c(p+1)(n-p)"
    lam_unit, _ = sphere_hodge_oracle(n, p + 1)
    sphere_value = lam_unit * c  # radius 1/sqrt(c); zero for c = 0
    slack = -abs(value - sphere_value)
    scale = max(abs(value), abs(sphere_value), 1e-300)
    status = "satisfied" if abs(value - sphere_value) <= tol * scale else "violated"
    verdict = BoundVerdict(
        name="special_killing_eigenvalue",
        status=status,
        lhs=float(value),
        rhs=float(sphere_value),
        formula=formula,
        slack=float(slack),
        tightness=float(abs(value - sphere_value) / scale),
        tolerance=tol,
        geometry=geometry,
    )
    return value, verdict


def parallel_restriction_check(radius: float, xi: AlternatingForm, points=None):
    """Residual pair of the two parallel-form restriction identities on the
    round sphere of the given radius (totally umbilical, H = 1/radius)."""
    return restriction_identity_residuals(xi, radius=radius, points=points)


# ---------------------------------------------------------------------------
# equality-case diagnostics


@dataclass
class EqualityDiagnostics:
    """Volume-ratio relations that characterize the round ball."""

    geometry: dict
    checks: list  # (name, got, want, ok)
    tolerance: float
    satisfied: bool

    def to_dict(self):
        return {
            "geometry": self.geometry,
            "checks": [
                {"name": n, "got": g, "want": w, "ok": bool(o)}
                for n, g, w, o in self.checks
            ],
            "tolerance": self.tolerance,
            "satisfied": self.satisfied,
        }


def equality_case_diagnostics(
    ball, p: int = 1, radius: float = 1.0, n: int | None = None, tol: float | None = None
) -> EqualityDiagnostics:
    """Check vol(boundary)/vol(domain) = sigma_p + sigma_(n-p+1) = (n+1)/r
    and H = ratio/(n+1), on an analytic ball or a solid ball mesh."""
    checks = []
    if isinstance(ball, MeshComplex):
        if ball.kind != "solid":
            raise ValueError("equality diagnostics needs a solid mesh or analytic data")
        tol = tol if tol is not None else 2e-2
        n = 2
        r = ball.metadata.get("radius", radius)
        ratio = ball.area() / ball.volume()
        surf, _ = ball.boundary_mesh()
        sh = discrete_shape(surf)
        sigma_sum = float(
            np.sort(sh.principal, axis=1)[:, :p].sum(axis=1).min()
            + np.sort(sh.principal, axis=1)[:, : n - p + 1].sum(axis=1).min()
        )
        h_mean = float(sh.mean.mean())
        geometry = {"label": "mesh-ball", "metadata": ball.metadata, "p": p}
    else:
        tol = tol if tol is not None else ANALYTIC_TOL
        n = int(ball) if n is None else n
        r = radius
        ratio = (n + 1) / r
        sigma_sum = p / r + (n - p + 1) / r
        h_mean = 1.0 / r
        geometry = {"label": f"ball(n+1={n + 1}, r={r:g})", "p": p}

    expected = (n + 1) / r

    def rel_ok(got, want, factor=1.0):
        # curvature-backed checks inherit the quadric-fit bias: looser factor
        return abs(got - want) <= factor * tol * max(abs(want), 1e-300)

    checks.append(("area_over_volume", float(ratio), float(expected), rel_ok(ratio, expected)))
    checks.append(
        ("sigma_p_plus_sigma_dual", float(sigma_sum), float(expected), rel_ok(sigma_sum, expected, 2.5))
    )
    checks.append(
        (
            "mean_curvature_vs_ratio",
            float(h_mean),
            float(ratio / (n + 1)),
            rel_ok(h_mean, ratio / (n + 1), 2.5),
        )
    )
    return EqualityDiagnostics(
        geometry=geometry,
        checks=checks,
        tolerance=tol,
        satisfied=all(ok for *_, ok in checks),
    )


# ---------------------------------------------------------------------------
# reporting


def verdict_table(verdicts) -> str:
    """Human-readable grid of verdicts."""
    rows = [("check", "geometry", "status", "lhs", "rhs", "tightness")]
    for v in verdicts:
        rows.append(
            (
                v.name,
                v.geometry.get("label", "?"),
                v.status,
                "-" if np.isnan(v.lhs) else f"{v.lhs:.6g}",
                "-" if np.isnan(v.rhs) else f"{v.rhs:.6g}",
                "-" if np.isnan(v.tightness) else f"{v.tightness:.2e}",
            )
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for r in rows:
        lines.append("  ".join(str(x).ljust(w) for x, w in zip(r, widths)))
    return "\n".join(lines)


def verdicts_to_json(verdicts, path=None, extra=None) -> str:
    payload = {"verdicts": [v.to_dict() for v in verdicts]}
    if extra:
        payload.update(extra)
    text = json.dumps(payload, indent=2)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
