"""Indefinite Hermitian linear algebra for the model quadrics.

The complex hyperbolic space CH^n is modelled as the quotient of the
anti-de Sitter quadric

    H^{2n+1}_1 = { z in C^{n+1} : (z,z) = -1 },
    (z,w) = sum_{i<=n} z_i conj(w_i) - z_{n+1} conj(w_{n+1}),

by unit-phase scalars; CP^n is the analogous quotient of the unit sphere
S^{2n+1} for the positive-definite form.  Points are row vectors and
isometries act on the right, z -> z A, so the matrix group preserving the
hyperbolic form is { A : conj(A)^T S A = S } with S = diag(1,...,1,-1).

Everything here is vectorized over leading axes: a "vector" argument may be
an array of shape (..., n+1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GeometryError",
    "InvalidArgument",
    "PreconditionViolation",
    "HermitianSpace",
    "ProjectivePoint",
    "IsometryElement",
    "herm_form",
    "on_quadric",
    "quadric_defect",
    "normalize_phase",
    "projective_distance",
    "projective_equal",
    "horizontal_project",
    "omega_eval",
    "embed_isometry",
    "umbilical_embed",
    "validate_model_point",
    "random_so",
    "random_so1",
    "random_euclid",
    "complex_to_pairs",
    "pairs_to_complex",
]

DEFAULT_TOL = 1e-10


class GeometryError(Exception):
    """Base class for errors raised by this package."""


class InvalidArgument(GeometryError, ValueError):
    """Argument outside the documented domain of an operation."""


class PreconditionViolation(GeometryError):
    """A geometric precondition (quadric membership, horizontality) fails."""


@dataclass(frozen=True)
class HermitianSpace:
    """Ambient C^{n+1} with a signature-(n,1) or (n+1,0) Hermitian form.

    ``n`` is the complex dimension of the projectivized model (CH^n or
    CP^n); ambient vectors have n+1 complex coordinates.
    """

    n: int
    signature: str  # "hyperbolic" | "spherical"

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgument(f"model dimension must be >= 1, got {self.n}")
        if self.signature not in ("hyperbolic", "spherical"):
            raise InvalidArgument(f"unknown signature {self.signature!r}")

    @property
    def ambient_dim(self) -> int:
        return self.n + 1

    @property
    def signs(self) -> np.ndarray:
        s = np.ones(self.n + 1)
        if self.signature == "hyperbolic":
            s[-1] = -1.0
        return s

    @property
    def quadric_target(self) -> float:
        """Value of (z,z) on the model quadric: -1 hyperbolic, +1 spherical."""
        return -1.0 if self.signature == "hyperbolic" else 1.0

    def signature_matrix(self) -> np.ndarray:
        return np.diag(self.signs)


def _check_dim(space: HermitianSpace, *vecs: np.ndarray) -> None:
    for v in vecs:
        if v.shape[-1] != space.ambient_dim:
            raise InvalidArgument(
                f"expected {space.ambient_dim} ambient coordinates, got {v.shape[-1]}"
            )


def herm_form(space: HermitianSpace, z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Hermitian form (z,w) = sum_i s_i z_i conj(w_i) with the space's signs.

    Sesquilinear (conjugate-linear in ``w``) and conjugate-symmetric.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    _check_dim(space, z, w)
    return np.einsum("...i,...i,i->...", z, np.conj(w), space.signs)


def quadric_defect(space: HermitianSpace, z: np.ndarray) -> np.ndarray:
    """|(z,z) - target|, the deviation from quadric membership."""
    return np.abs(herm_form(space, z, z).real - space.quadric_target)


def on_quadric(space: HermitianSpace, z: np.ndarray, tol: float = DEFAULT_TOL):
    """Whether z lies on H^{2n+1}_1 (resp. S^{2n+1}) within ``tol``."""
    return quadric_defect(space, z) <= tol


def normalize_phase(z: np.ndarray) -> np.ndarray:
    """Rotate by a unit phase so the largest-modulus coordinate is real >= 0.

    Ties broken by lowest index (np.argmax convention), which makes the
    representative deterministic and serialization reproducible.
    """
    z = np.asarray(z, dtype=complex)
    k = np.argmax(np.abs(z), axis=-1)
    pivot = np.take_along_axis(z, np.expand_dims(k, -1), axis=-1)[..., 0]
    phase = np.where(np.abs(pivot) > 0, pivot / np.maximum(np.abs(pivot), 1e-300), 1.0)
    return z * np.conj(phase)[..., None]


def projective_distance(space: HermitianSpace, z: np.ndarray, w: np.ndarray) -> float:
    """Distance between [z] and [w]: phase-aligned max-coordinate deviation.

    The optimal phase is read off in closed form from the largest-modulus
    coordinate of ``w``; the result is normalized by the larger coordinate
    scale of the two representatives, so it is dimensionless.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    _check_dim(space, z, w)
    k = int(np.argmax(np.abs(w)))
    if abs(z[k]) == 0.0:
        aligned = z
    else:
        phase = (w[k] / z[k])
        phase = phase / abs(phase)
        aligned = z * phase
    scale = max(float(np.max(np.abs(z))), float(np.max(np.abs(w))), 1.0)
    return float(np.max(np.abs(aligned - w))) / scale


def projective_equal(space, z, w, tol: float = 1e-8) -> bool:
    """True iff representatives differ by a unit-modulus scalar within tol."""
    return projective_distance(space, z, w) <= tol


@dataclass(frozen=True)
class ProjectivePoint:
    """A point of CH^n / CP^n with a deterministic phase-normalized representative.

    Construction renormalizes the representative onto the quadric by real
    scaling when the defect is below 1e-6 and rejects otherwise.
    """

    space: HermitianSpace
    rep: np.ndarray = field(repr=False)

    def __post_init__(self):
        rep = np.asarray(self.rep, dtype=complex)
        _check_dim(self.space, rep)
        val = herm_form(self.space, rep, rep).real
        target = self.space.quadric_target
        if val * target <= 0:
            raise InvalidArgument("representative on the wrong side of the null cone")
        scale = np.sqrt(val / target)
        defect = abs(val - target)
        if defect > 1e-6:
            raise InvalidArgument(f"quadric defect {defect:.3e} exceeds 1e-6")
        rep = normalize_phase(rep / scale)
        rep.setflags(write=False)
        object.__setattr__(self, "rep", rep)

    def distance_to(self, other: "ProjectivePoint") -> float:
        return projective_distance(self.space, self.rep, other.rep)

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return (
            self.space == other.space
            and projective_equal(self.space, self.rep, other.rep, 1e-12)
        )


def horizontal_project(
    space: HermitianSpace, z: np.ndarray, v: np.ndarray, tol: float = 1e-10
) -> np.ndarray:
    """Project ``v`` onto the horizontal space of the Hopf fibration at ``z``.

    The single complex condition (h, z) = 0 encodes both tangency to the
    quadric and orthogonality to the fiber direction i z.  Idempotent, and
    annihilates the fiber.
    """
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if np.any(quadric_defect(space, z) > tol):
        raise PreconditionViolation("base point is not on the quadric")
    coeff = herm_form(space, v, z)[..., None]
    if space.signature == "hyperbolic":
        return v + coeff * z
    return v - coeff * z


def omega_eval(
    space: HermitianSpace,
    z: np.ndarray,
    u: np.ndarray,
    v: np.ndarray,
    tol: float = 1e-8,
) -> np.ndarray:
    """Kahler two-form Omega(u, v) = <J u, v> on horizontal vectors at z.

    J is multiplication by i on horizontal vectors (the package-wide
    orientation convention).  Skew-symmetric and J-invariant.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    scale = 1.0 + np.sqrt(np.abs(herm_form(space, u, u).real * herm_form(space, v, v).real))
    bad = (np.abs(herm_form(space, u, z)) > tol * scale) | (
        np.abs(herm_form(space, v, z)) > tol * scale
    )
    if np.any(bad):
        raise PreconditionViolation("omega_eval requires horizontal arguments")
    return herm_form(space, 1j * u, v).real


@dataclass(frozen=True)
class IsometryElement:
    """Element of U^1(n+1) (hyperbolic) or U(n+1) (spherical), acting z -> z A."""

    space: HermitianSpace
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = self.space.ambient_dim
        if m.shape != (d, d):
            raise InvalidArgument(f"matrix must be {d}x{d}")
        S = self.space.signature_matrix()
        defect = np.max(np.abs(np.conj(m).T @ S @ m - S))
        if defect > 1e-10:
            raise InvalidArgument(f"form-preservation defect {defect:.3e} exceeds 1e-10")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def apply(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(z, dtype=complex) @ self.matrix

    def inverse(self) -> "IsometryElement":
        S = self.space.signature_matrix()
        # A^{-1} = S conj(A)^T S from conj(A)^T S A = S
        inv = S @ np.conj(self.matrix).T @ S
        return IsometryElement(self.space, inv)


def _check_special_orthogonal(A: np.ndarray, tol: float) -> None:
    if np.max(np.abs(A @ A.T - np.eye(A.shape[0]))) > tol:
        raise InvalidArgument("matrix is not orthogonal within tolerance")
    if np.linalg.det(A) < 0:
        raise InvalidArgument("matrix has determinant -1, expected +1")


def embed_isometry(group: str, params, n: int, tol: float = 1e-10) -> IsometryElement:
    """Embed an element of SO(n), SO^1_0(n) or SO(n-1) x R^{n-1} into the
    holomorphic isometry group of CH^n.

    ``params`` is an n x n special orthogonal matrix (``so_n``), an element
    of the identity component of the indefinite orthogonal group preserving
    diag(1,..,1,-1) (``so1_n``), or a pair (A, a) with A in SO(n-1) and
    a in R^{n-1} (``euclid_n``).
    """
    space = HermitianSpace(n, "hyperbolic")
    d = n + 1
    M = np.zeros((d, d))
    if group == "so_n":
        A = np.asarray(params, dtype=float)
        if A.shape != (n, n):
            raise InvalidArgument(f"so_n expects an {n}x{n} matrix")
        _check_special_orthogonal(A, tol)
        M[:n, :n] = A
        M[n, n] = 1.0
    elif group == "so1_n":
        A = np.asarray(params, dtype=float)
        if A.shape != (n, n):
            raise InvalidArgument(f"so1_n expects an {n}x{n} matrix")
        S0 = np.diag(np.r_[np.ones(n - 1), -1.0])
        if np.max(np.abs(A @ S0 @ A.T - S0)) > tol:
            raise InvalidArgument("matrix does not preserve the (n-1,1) form")
        if np.linalg.det(A) < 0 or A[n - 1, n - 1] < 1.0 - tol:
            raise InvalidArgument("matrix is not in the identity component")
        M[0, 0] = 1.0
        M[1:, 1:] = A
    elif group == "euclid_n":
        A, a = params
        A = np.atleast_2d(np.asarray(A, dtype=float))
        a = np.atleast_1d(np.asarray(a, dtype=float))
        if A.shape != (n - 1, n - 1) or a.shape != (n - 1,):
            raise InvalidArgument("euclid_n expects (A in SO(n-1), a in R^{n-1})")
        _check_special_orthogonal(A, tol)
        h = float(a @ a) / 2.0
        M[: n - 1, : n - 1] = A
        M[: n - 1, n - 1] = A @ a
        M[: n - 1, n] = A @ a
        M[n - 1, : n - 1] = -a
        M[n - 1, n - 1] = 1.0 - h
        M[n - 1, n] = -h
        M[n, : n - 1] = a
        M[n, n - 1] = h
        M[n, n] = 1.0 + h
    else:
        raise InvalidArgument(f"unknown group {group!r}")
    return IsometryElement(space, M)


def validate_model_point(kind: str, x: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Validate coordinates of a point of S^{m}, RH^{m} or R^{m}.

    Hyperbolic points x in R^{m+1} satisfy sum_{i<last} x_i^2 - x_last^2 = -1
    with x_last >= 1.
    """
    x = np.asarray(x, dtype=float)
    if kind == "sphere":
        if np.any(np.abs(np.sum(x * x, axis=-1) - 1.0) > tol):
            raise InvalidArgument("sphere point with |x|^2 != 1")
    elif kind == "hyperbolic":
        q = np.sum(x[..., :-1] ** 2, axis=-1) - x[..., -1] ** 2
        if np.any(np.abs(q + 1.0) > tol) or np.any(x[..., -1] < 1.0 - tol):
            raise InvalidArgument("point not on the upper hyperboloid sheet")
    elif kind != "euclidean":
        raise InvalidArgument(f"unknown model point kind {kind!r}")
    return x


def umbilical_embed(kind: str, x: np.ndarray, r: float | None = None) -> np.ndarray:
    """Embed an umbilical hypersurface of RH^n into the quadric.

    geodesic_sphere: x in S^{n-1}   -> (sinh r x, cosh r)
    tube:            x in RH^{n-1}  -> (sinh r, cosh r x)
    horosphere:      x in R^{n-1}   -> (x, |x|^2/2, |x|^2/2 + 1)

    Outputs are real vectors on RH^n inside H^{2n+1}_1.
    """
    x = np.asarray(x, dtype=float)
    if kind == "geodesic_sphere":
        if r is None or r <= 0:
            raise InvalidArgument("geodesic_sphere requires radius r > 0")
        validate_model_point("sphere", x)
        return np.concatenate(
            [np.sinh(r) * x, np.broadcast_to(np.cosh(r), x.shape[:-1] + (1,))], axis=-1
        )
    if kind == "tube":
        if r is None or r <= 0:
            raise InvalidArgument("tube requires radius r > 0")
        validate_model_point("hyperbolic", x)
        return np.concatenate(
            [np.broadcast_to(np.sinh(r), x.shape[:-1] + (1,)), np.cosh(r) * x], axis=-1
        )
    if kind == "horosphere":
        if r is not None:
            raise InvalidArgument("horosphere takes no radius")
        h = np.sum(x * x, axis=-1, keepdims=True) / 2.0
        return np.concatenate([x, h, h + 1.0], axis=-1)
    raise InvalidArgument(f"unknown umbilical kind {kind!r}")


# ---------------------------------------------------------------------------
# random group elements (seeded; used by invariance checks and tests)

def random_so(rng: np.random.Generator, n: int, scale: float = 0.7) -> np.ndarray:
    """Random element of SO(n) via the exponential of a random skew matrix."""
    from scipy.linalg import expm

    X = rng.normal(size=(n, n)) * scale
    return expm(X - X.T)


def random_so1(rng: np.random.Generator, n: int, scale: float = 0.4) -> np.ndarray:
    """Random element of SO^1_0(n) preserving diag(1,..,1,-1), x -> xA."""
    from scipy.linalg import expm

    X = np.zeros((n, n))
    B = rng.normal(size=(n - 1, n - 1)) * scale
    X[: n - 1, : n - 1] = B - B.T
    v = rng.normal(size=n - 1) * scale
    X[: n - 1, n - 1] = v
    X[n - 1, : n - 1] = v
    return expm(X)


def random_euclid(rng: np.random.Generator, n: int, scale: float = 0.5):
    """Random (A, a) in SO(n-1) x R^{n-1}."""
    return random_so(rng, n - 1), rng.normal(size=n - 1) * scale


# ---------------------------------------------------------------------------
# JSON encoding of complex data: a complex number is a two-element [re, im]

def complex_to_pairs(z: np.ndarray) -> np.ndarray:
    """(..., m) complex -> (..., m, 2) real."""
    z = np.asarray(z, dtype=complex)
    return np.stack([z.real, z.imag], axis=-1)


def pairs_to_complex(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return p[..., 0] + 1j * p[..., 1]
