import numpy as np
import pytest

from lagmin.model_spaces import (
    HermitianSpace,
    InvalidArgument,
    IsometryElement,
    PreconditionViolation,
    ProjectivePoint,
    embed_isometry,
    herm_form,
    horizontal_project,
    normalize_phase,
    omega_eval,
    on_quadric,
    projective_distance,
    projective_equal,
    random_euclid,
    random_so,
    random_so1,
    umbilical_embed,
    validate_model_point,
)

RNG = np.random.default_rng(42)


def _rand_vec(space, rng=RNG):
    d = space.ambient_dim
    return rng.normal(size=d) + 1j * rng.normal(size=d)


@pytest.fixture
def ch2():
    return HermitianSpace(2, "hyperbolic")


class TestHermForm:
    def test_signature_examples(self, ch2):
        e_last = np.array([0, 0, 1.0], dtype=complex)
        e_first = np.array([1.0, 0, 0], dtype=complex)
        assert herm_form(ch2, e_last, e_last) == -1
        assert herm_form(ch2, e_first, e_first) == 1

    def test_point_on_h31(self):
        space = HermitianSpace(1, "hyperbolic")
        z = np.array([1.0, np.sqrt(2.0)], dtype=complex)
        assert abs(herm_form(space, z, z) + 1.0) < 1e-15
        assert on_quadric(space, z, 1e-12)

    def test_sesquilinear_and_conjugate_symmetric(self, ch2):
        for _ in range(100):
            z, w, v = (_rand_vec(ch2) for _ in range(3))
            a = RNG.normal() + 1j * RNG.normal()
            assert abs(herm_form(ch2, a * z + v, w)
                       - (a * herm_form(ch2, z, w) + herm_form(ch2, v, w))) < 1e-12
            assert abs(herm_form(ch2, z, a * w)
                       - np.conj(a) * herm_form(ch2, z, w)) < 1e-12
            assert abs(herm_form(ch2, w, z) - np.conj(herm_form(ch2, z, w))) < 1e-12

    def test_dimension_mismatch(self, ch2):
        with pytest.raises(InvalidArgument):
            herm_form(ch2, np.zeros(4, dtype=complex), np.zeros(4, dtype=complex))

    def test_spherical_is_positive(self):
        cp2 = HermitianSpace(2, "spherical")
        z = _rand_vec(cp2)
        assert herm_form(cp2, z, z).real > 0


class TestQuadric:
    def test_membership(self, ch2):
        assert on_quadric(ch2, np.array([0, 0, 1.0], dtype=complex), 1e-12)
        assert not on_quadric(ch2, np.array([1.0, 0, 0], dtype=complex), 1e-12)

    def test_horosphere_lift_is_on_quadric(self, ch2):
        for _ in range(20):
            x = RNG.normal(size=1)
            h = float(x @ x) / 2.0
            z = np.array([x[0], h, h + 1.0], dtype=complex)
            assert on_quadric(ch2, z, 1e-12)


class TestProjective:
    def test_unit_phase_equal(self, ch2):
        z = np.array([0.3, 0.1j, 1.2], dtype=complex)
        assert projective_equal(ch2, z, 1j * z, 1e-12)
        assert projective_equal(ch2, z, -z, 1e-12)

    def test_distinct_points(self, ch2):
        p = np.array([0, 0, 1.0], dtype=complex)
        q = np.array([np.sinh(1.0), 0, np.cosh(1.0)], dtype=complex)
        assert not projective_equal(ch2, p, q, 1e-6)
        assert projective_distance(ch2, p, q) > 0.1

    def test_normalize_phase_deterministic(self):
        z = np.array([0.2 + 0.1j, -1.3j, 0.4], dtype=complex)
        w = normalize_phase(z)
        k = np.argmax(np.abs(w))
        assert w[k].imag == pytest.approx(0.0, abs=1e-16)
        assert w[k].real >= 0
        # invariant under a further phase
        w2 = normalize_phase(np.exp(0.7j) * z)
        assert np.max(np.abs(w - w2)) < 1e-14

    def test_projective_point_renormalizes(self, ch2):
        rep = np.array([0, 0, 1.0 + 3e-8], dtype=complex)
        p = ProjectivePoint(ch2, rep)
        assert abs(herm_form(ch2, p.rep, p.rep) + 1.0) < 1e-14
        with pytest.raises(InvalidArgument):
            ProjectivePoint(ch2, np.array([0, 0, 1.1], dtype=complex))

    def test_projective_point_equality(self, ch2):
        rep = np.array([0.5, 0.2j, np.sqrt(1.29 + 1e-0)], dtype=complex)
        rep = rep / np.sqrt(-herm_form(ch2, rep, rep).real)
        assert ProjectivePoint(ch2, rep) == ProjectivePoint(ch2, np.exp(2.1j) * rep)


class TestHorizontalProject:
    def test_fixes_horizontal(self, ch2):
        z = np.array([0, 0, 1.0], dtype=complex)
        v = np.array([0.3 + 0.2j, -0.1j, 0], dtype=complex)
        assert abs(herm_form(ch2, v, z)) < 1e-15
        assert np.max(np.abs(horizontal_project(ch2, z, v) - v)) < 1e-15

    def test_annihilates_fiber(self, ch2):
        z = np.array([0.4, 0.3, np.sqrt(1.25)], dtype=complex)
        out = horizontal_project(ch2, z, 1j * z)
        assert np.max(np.abs(out)) < 1e-14

    def test_idempotent_and_horizontal(self):
        space = HermitianSpace(1, "hyperbolic")
        z = np.array([1.0, np.sqrt(2.0)], dtype=complex)
        for _ in range(25):
            v = _rand_vec(space)
            h = horizontal_project(space, z, v)
            assert abs(herm_form(space, h, z)) < 1e-12
            assert np.max(np.abs(horizontal_project(space, z, h) - h)) < 1e-12

    def test_requires_quadric_base(self, ch2):
        with pytest.raises(PreconditionViolation):
            horizontal_project(ch2, np.array([1.0, 0, 0], dtype=complex),
                               np.zeros(3, dtype=complex))


class TestOmega:
    def _setup(self, ch2):
        z = np.array([0.5, -0.2, np.sqrt(1.29)], dtype=complex)
        u = horizontal_project(ch2, z, _rand_vec(ch2))
        v = horizontal_project(ch2, z, _rand_vec(ch2))
        return z, u, v

    def test_skew(self, ch2):
        z, u, v = self._setup(ch2)
        assert abs(omega_eval(ch2, z, u, u)) < 1e-10
        assert abs(omega_eval(ch2, z, u, v) + omega_eval(ch2, z, v, u)) < 1e-12

    def test_j_compatibility(self, ch2):
        z, u, v = self._setup(ch2)
        g_uu = herm_form(ch2, u, u).real
        assert omega_eval(ch2, z, u, 1j * u) == pytest.approx(g_uu, rel=1e-12)
        assert omega_eval(ch2, z, 1j * u, 1j * v) == pytest.approx(
            omega_eval(ch2, z, u, v), rel=1e-10, abs=1e-12)

    def test_bilinear(self, ch2):
        z, u, v = self._setup(ch2)
        w = horizontal_project(ch2, z, _rand_vec(ch2))
        lhs = omega_eval(ch2, z, u + 2.0 * w, v)
        rhs = omega_eval(ch2, z, u, v) + 2.0 * omega_eval(ch2, z, w, v)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_real_vectors_give_zero(self, ch2):
        # tangents of the totally geodesic real form are Lagrangian
        z = np.array([np.sinh(0.7), 0, np.cosh(0.7)], dtype=complex)
        u = horizontal_project(ch2, z, np.array([np.cosh(0.7), 0, np.sinh(0.7)], dtype=complex))
        v = horizontal_project(ch2, z, np.array([0, 1.0, 0], dtype=complex))
        assert abs(omega_eval(ch2, z, u, v)) < 1e-12

    def test_rejects_non_horizontal(self, ch2):
        z = np.array([0, 0, 1.0], dtype=complex)
        with pytest.raises(PreconditionViolation):
            omega_eval(ch2, z, 1j * z + np.array([1.0, 0, 0]), np.array([1.0, 0, 0], dtype=complex))


class TestEmbedIsometry:
    def test_identity(self):
        el = embed_isometry("so_n", np.eye(3), 3)
        assert np.max(np.abs(el.matrix - np.eye(4))) == 0.0

    def test_euclid_displayed_matrix(self):
        el = embed_isometry("euclid_n", (np.array([[1.0]]), np.array([1.0])), 2)
        expected = np.array([
            [1.0, 1.0, 1.0],
            [-1.0, 0.5, -0.5],
            [1.0, 0.5, 1.5],
        ])
        assert np.max(np.abs(el.matrix - expected)) < 1e-15

    @pytest.mark.parametrize("group,n", [("so_n", 2), ("so_n", 4), ("so1_n", 3), ("euclid_n", 3)])
    def test_form_preservation_random(self, group, n):
        rng = np.random.default_rng(7)
        space = HermitianSpace(n, "hyperbolic")
        S = space.signature_matrix()
        for _ in range(20):
            if group == "so_n":
                params = random_so(rng, n)
            elif group == "so1_n":
                params = random_so1(rng, n)
            else:
                params = random_euclid(rng, n)
            m = embed_isometry(group, params, n).matrix
            assert np.max(np.abs(np.conj(m).T @ S @ m - S)) < 1e-10

    def test_preserves_herm_form(self):
        rng = np.random.default_rng(3)
        space = HermitianSpace(3, "hyperbolic")
        m = embed_isometry("euclid_n", random_euclid(rng, 3), 3).matrix
        for _ in range(100):
            z, w = _rand_vec(space, rng), _rand_vec(space, rng)
            assert abs(herm_form(space, z @ m, w @ m) - herm_form(space, z, w)) < 1e-10

    def test_rejects_non_orthogonal(self):
        with pytest.raises(InvalidArgument):
            embed_isometry("so_n", np.diag([2.0, 1.0]), 2)

    def test_inverse(self):
        rng = np.random.default_rng(5)
        el = embed_isometry("so1_n", random_so1(rng, 2), 2)
        prod = el.matrix @ el.inverse().matrix
        assert np.max(np.abs(prod - np.eye(3))) < 1e-12


class TestUmbilical:
    def test_horosphere_origin(self):
        out = umbilical_embed("horosphere", np.zeros(2))
        assert np.max(np.abs(out - np.array([0, 0, 0, 1.0]))) == 0.0

    def test_geodesic_sphere_display(self):
        x = np.array([1.0, 0, 0])
        out = umbilical_embed("geodesic_sphere", x, r=1.0)
        expected = np.array([np.sinh(1.0), 0, 0, np.cosh(1.0)])
        assert np.max(np.abs(out - expected)) < 1e-15

    @pytest.mark.parametrize("kind", ["geodesic_sphere", "tube", "horosphere"])
    def test_images_on_quadric(self, kind):
        rng = np.random.default_rng(11)
        n = 3
        space = HermitianSpace(n, "hyperbolic")
        for _ in range(20):
            if kind == "geodesic_sphere":
                x = rng.normal(size=n)
                x = x / np.linalg.norm(x)
                out = umbilical_embed(kind, x, r=0.8)
            elif kind == "tube":
                y = rng.normal(size=n - 1) * 0.7
                x = np.r_[y, np.sqrt(1.0 + y @ y)]
                out = umbilical_embed(kind, x, r=0.8)
            else:
                out = umbilical_embed(kind, rng.normal(size=n - 1))
            assert on_quadric(space, out.astype(complex), 1e-12)
            assert np.max(np.abs(np.imag(out.astype(complex)))) == 0.0

    def test_kind_point_mismatch(self):
        with pytest.raises(InvalidArgument):
            umbilical_embed("geodesic_sphere", np.array([2.0, 0.0]), r=1.0)
        with pytest.raises(InvalidArgument):
            umbilical_embed("tube", np.array([1.0, 0.0]), r=1.0)


class TestModelPoints:
    def test_sphere(self):
        validate_model_point("sphere", np.array([0.6, 0.8]))
        with pytest.raises(InvalidArgument):
            validate_model_point("sphere", np.array([0.6, 0.9]))

    def test_hyperbolic_sheet(self):
        validate_model_point("hyperbolic", np.array([0.0, 1.0]))
        with pytest.raises(InvalidArgument):
            validate_model_point("hyperbolic", np.array([0.0, -1.0]))

    def test_unknown_kind(self):
        with pytest.raises(InvalidArgument):
            validate_model_point("torus", np.zeros(2))


class TestIsometryElement:
    def test_rejects_bad_matrix(self):
        space = HermitianSpace(2, "hyperbolic")
        with pytest.raises(InvalidArgument):
            IsometryElement(space, np.eye(3) * 1.5)
