import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from grassradon.errors import DimensionMismatch, DomainMismatch, NotOrthogonal, OverflowGuard, UnsupportedCase
from grassradon.fields import (
    FieldSpec,
    ScalarField,
    ball_bump_field,
    gaussian_field,
    shell_bump_field,
    shell_profile,
    zero_field,
)
from grassradon.geometry import (
    AffinePlane,
    FlagPoint,
    Subspace,
    complete_frame,
    make_rng,
    orthonormalize,
    project_perp,
    random_affine_plane,
    random_flag,
    random_orthogonal,
    random_subspace,
)
from grassradon.transforms import (
    DEFAULT_CONFIG,
    TransformConfig,
    compact_fiber_transform,
    dual_flag_S,
    partial_fourier,
    partial_fourier_field,
    partial_fourier_inverse,
    partial_fourier_many,
    projection_slice_residual,
    radon_field,
    radon_many,
    radon_pq,
    restrict_to_hyperplane,
    slice_sides,
)

E = np.eye(4)
SQPI = np.sqrt(np.pi)


def _generic(p, n, fun, radius=None):
    """Wrap a plain callable as a field with no compiled kernel."""
    sm = "compact" if radius is not None else "schwartz"
    return ScalarField("affine", p, n, fun, sm, radius)


def _rigid(f, u, t):
    """The field ``f∘m`` for the rigid motion ``m(x) = u x + t``."""
    def ev(B, x):
        B = np.asarray(B, float)
        UB = np.einsum("ij,njk->nik", u, B)
        pts = np.asarray(x, float) @ u.T + t
        proj = pts - np.einsum("nik,nk->ni", UB, np.einsum("nik,ni->nk", UB, pts))
        return f.evaluate(UB, proj)

    return _generic(f.p, f.n, ev)


def _moved_plane(xi, u, t):
    s = Subspace(u @ xi.subspace.basis)
    return AffinePlane(s, project_perp(s, u @ xi.offset + t))


# -- radon_pq ---------------------------------------------------------------------

def test_radon_zero_field(rng):
    assert radon_pq(zero_field(1, 4), random_affine_plane(rng, 4, 2, 1.0)) == 0.0


def test_radon_grass14_gaussian_at_origin():
    xi = AffinePlane(Subspace(E[:, :2]), np.zeros(4))
    assert radon_pq(gaussian_field(1, 4), xi) == pytest.approx(1.7724539, abs=1e-7)


@pytest.mark.parametrize("dist", [0.0, 0.4, 1.1, 2.0])
def test_radon_grass14_gaussian_closed_form(rng, dist):
    xi = random_affine_plane(rng, 4, 2, dist)
    assert radon_pq(gaussian_field(1, 4), xi) == pytest.approx(SQPI * np.exp(-dist**2), rel=1e-10)


@pytest.mark.parametrize(
    "p, q, n, closed",
    [(0, 1, 2, lambda s: SQPI * np.exp(-s * s)),
     (0, 2, 3, lambda s: np.pi * np.exp(-s * s)),
     (0, 1, 3, lambda s: SQPI * np.exp(-s * s))],
)
def test_radon_classical_gaussian(rng, p, q, n, closed):
    for s in (0.0, 0.7, 1.9):
        xi = random_affine_plane(rng, n, q, s)
        assert radon_pq(gaussian_field(p, n), xi) == pytest.approx(closed(s), rel=1e-10)


def test_radon_shell_bump_matches_scipy_quad(rng):
    """Each line in the plane sees a 1-D slice of the radial shell profile."""
    f = shell_bump_field(1, 4, 1.0, 2.0)
    for dist in (0.0, 0.8, 1.5):
        xi = random_affine_plane(rng, 4, 2, dist)
        ref, _ = quad(lambda t: shell_profile(np.sqrt(dist**2 + t * t), 1.0, 2.0), -2.0, 2.0,
                      points=[-np.sqrt(max(1 - dist**2, 0)), np.sqrt(max(1 - dist**2, 0))], epsabs=1e-13,
                      limit=200)
        assert radon_pq(f, xi) == pytest.approx(ref, abs=1e-8)


def test_radon_ball_bump_line_matches_scipy_quad():
    f = ball_bump_field(2, 1.0, [0.3, -0.2])
    for ang, s in [(0.3, 0.1), (1.2, -0.5), (2.0, 0.0)]:
        th = np.array([np.cos(ang), np.sin(ang)])
        nrm = np.array([-th[1], th[0]])
        xi = AffinePlane(Subspace(th), s * nrm)
        ref, _ = quad(lambda t: f.evaluate(np.zeros((1, 2, 0)), (s * nrm + t * th)[None])[0], -3, 3,
                      epsabs=1e-13, limit=200)
        assert radon_pq(f, xi) == pytest.approx(ref, abs=1e-9)


def test_radon_compiled_and_numpy_engines_agree(rng):
    g = gaussian_field(1, 4, FieldSpec("quadratic", (("a11", 1.0), ("a23", 0.5)))) + gaussian_field(1, 4, scale=0.7)
    planes = [random_affine_plane(rng, 4, 2, d) for d in (0.1, 0.9, 1.7)]
    etas = np.stack([pl.subspace.basis for pl in planes])
    vs = np.stack([pl.offset for pl in planes])
    a = radon_many(g, etas, vs, engine="compiled")
    b = radon_many(g, etas, vs, engine="numpy")
    np.testing.assert_allclose(a, b, atol=1e-13)


@pytest.mark.parametrize(
    "field, q",
    [(shell_bump_field(1, 4, 0.5, 2.0), 2), (ball_bump_field(2, 1.0, [0.3, -0.2]), 1),
     (ball_bump_field(3, 1.0, [0.3, -0.2, 0.4]), 2), (shell_bump_field(0, 3, 0.5, 1.5), 2),
     (shell_bump_field(0, 3, 0.5, 1.5), 1)],
)
def test_radon_compiled_matches_refined_numpy(rng, field, q):
    """The numpy path spans the whole support chord and needs a fine rule to agree."""
    n = field.n
    planes = [random_affine_plane(rng, n, q, d) for d in (0.1, 0.6, 1.2)]
    etas = np.stack([pl.subspace.basis for pl in planes])
    vs = np.stack([pl.offset for pl in planes])
    a = radon_many(field, etas, vs, engine="compiled")
    fine = TransformConfig(fiber_points=400 if q == 1 else 160)
    b = radon_many(field, etas, vs, fine, engine="numpy")
    np.testing.assert_allclose(a, b, atol=2e-6)


def test_radon_errors():
    with pytest.raises(UnsupportedCase):
        radon_pq(gaussian_field(1, 3), AffinePlane(Subspace(np.eye(3)[:, :2]), np.zeros(3)))
    with pytest.raises(DomainMismatch):
        radon_pq(gaussian_field(1, 4), AffinePlane(Subspace(np.eye(3)[:, :2]), np.zeros(3)))


@given(st.integers(0, 2**32 - 1), st.floats(-3, 3))
def test_radon_linearity(seed, a):
    rng = make_rng(seed)
    f, g = gaussian_field(1, 4, scale=1.3), shell_bump_field(1, 4, 0.5, 2.0)
    xi = random_affine_plane(rng, 4, 2, float(rng.uniform(0, 2)))
    lhs = radon_pq(a * f + g, xi)
    assert lhs == pytest.approx(a * radon_pq(f, xi) + radon_pq(g, xi), abs=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_radon_euclidean_equivariance(seed):
    rng = make_rng(seed)
    u = random_orthogonal(rng, 4)
    t = 0.5 * rng.standard_normal(4)
    base = gaussian_field(1, 4)
    # an off-centre, direction-dependent field makes the check non-trivial
    a = np.array([0.4, -0.3, 0.2, 0.1])

    def ev(B, x):
        B = np.asarray(B, float)
        w = np.einsum("nij,i->nj", B, a)[:, 0]
        return (1 + w * w) * base.evaluate(B, np.asarray(x) - project_perp_batch(B, a))

    f = _generic(1, 4, ev)
    xi = random_affine_plane(rng, 4, 2, float(rng.uniform(0, 1.5)))
    # the two sides sample the circle of lines in different frames, so the
    # circle rule must resolve the off-centre angular dependence
    cfg = TransformConfig(fiber_radius=9.0, circle_points=32)
    lhs = radon_pq(_rigid(f, u, t), xi, cfg)
    rhs = radon_pq(f, _moved_plane(xi, u, t), cfg)
    assert lhs == pytest.approx(rhs, abs=1e-9)


def project_perp_batch(B, v):
    return v - np.einsum("nik,nk->ni", B, np.einsum("nik,i->nk", B, v))


def test_radon_field_wraps_transform(rng):
    phi = radon_field(gaussian_field(1, 4), 2)
    xi = random_affine_plane(rng, 4, 2, 0.5)
    assert phi(xi) == pytest.approx(SQPI * np.exp(-0.25), rel=1e-10)
    assert phi.source[0] == "radon"


def test_easy_support_direction(rng):
    f = shell_bump_field(1, 4, 2.0, 3.0)
    vals = [radon_pq(f, random_affine_plane(rng, 4, 2, d)) for d in rng.uniform(3.0, 6.0, 50)]
    assert max(abs(v) for v in vals) < 1e-12


# -- partial_fourier ---------------------------------------------------------------

def test_partial_fourier_gaussian_volume():
    sigma = Subspace(E[:, :1])
    assert partial_fourier(gaussian_field(1, 4), sigma, np.zeros(4)).real == pytest.approx(np.pi**1.5, abs=1e-9)


def test_partial_fourier_gaussian_frequency(rng):
    sigma = random_subspace(rng, 4, 1)
    y = 2.0 * project_perp(sigma, rng.standard_normal(4))
    y *= 2.0 / np.linalg.norm(y)
    val = partial_fourier(gaussian_field(1, 4), sigma, y)
    assert val == pytest.approx(np.pi**1.5 * np.exp(-1.0), abs=1e-9)


def test_partial_fourier_zero():
    assert partial_fourier(zero_field(1, 4), Subspace(E[:, :1]), E[:, 1]) == 0


def test_partial_fourier_requires_orthogonal_frequency():
    with pytest.raises(NotOrthogonal):
        partial_fourier(gaussian_field(1, 4), Subspace(E[:, :1]), E[:, 0])


def test_partial_fourier_complex_frequency_and_guard():
    f = shell_bump_field(1, 4, 1.0, 2.0)
    sigma = Subspace(E[:, :1])
    # a radial real field has a real, even transform; analytic continuation stays real on iR
    val = partial_fourier(f, sigma, 2j * E[:, 1])
    assert abs(val.imag) < 1e-10 * abs(val)
    assert val.real > partial_fourier(f, sigma, np.zeros(4)).real
    with pytest.raises(OverflowGuard):
        partial_fourier(f, sigma, 30j * E[:, 1])


def test_partial_fourier_evenness(rng):
    a = np.array([0.3, 0.5, -0.2, 0.7])
    f = _generic(1, 4, lambda B, x: np.exp(-np.sum((np.asarray(x) - 0.5 * a) ** 2, axis=-1)))
    F = partial_fourier_field(f)
    flag = random_flag(rng, 4, 1)
    B = flag.subspace.basis[None]
    for lam in (0.3, 1.7):
        plus = F.evaluate(B, flag.direction[None], np.array([lam]))
        minus = F.evaluate(B, -flag.direction[None], np.array([-lam]))
        assert abs(plus[0] - minus[0]) <= 1e-14 * abs(plus[0])
    assert F.even


# -- partial_fourier_inverse ----------------------------------------------------------

def test_partial_fourier_inverse_round_trip():
    F = partial_fourier_field(gaussian_field(1, 4))
    val = partial_fourier_inverse(F, Subspace(E[:, :1]), np.zeros(4))
    assert abs(val - 1.0) < 1e-6


def test_partial_fourier_inverse_off_origin(rng):
    F = partial_fourier_field(gaussian_field(1, 4))
    sigma = Subspace(E[:, :1])
    x = 0.8 * E[:, 2]
    assert abs(partial_fourier_inverse(F, sigma, x) - np.exp(-0.64)) < 1e-5


def test_partial_fourier_inverse_zero_and_linearity(rng):
    sigma = Subspace(E[:, :1])
    zero = partial_fourier_field(zero_field(1, 4))
    assert partial_fourier_inverse(zero, sigma, E[:, 2]) == 0
    F = partial_fourier_field(gaussian_field(1, 4))
    x = project_perp(sigma, rng.standard_normal(4))
    cfg = TransformConfig(fiber_points=32, lambda_points=61, sphere_order=12)
    a = partial_fourier_inverse(F.scaled(2.5), sigma, x, cfg)
    b = partial_fourier_inverse(F, sigma, x, cfg)
    assert abs(a - 2.5 * b) < 1e-12


def test_partial_fourier_inverse_domain():
    with pytest.raises(DomainMismatch):
        partial_fourier_inverse(gaussian_field(1, 4), Subspace(E[:, :1]), np.zeros(4))


# -- dual_flag_S ----------------------------------------------------------------------

def _plane_flag_field(fun):
    """Field on (2-planes) x (directions) x R."""
    return ScalarField("flag", 2, 4, fun)


def test_dual_flag_constant_and_zero(rng):
    flag = random_flag(rng, 4, 1)
    const = _plane_flag_field(lambda B, w, r: np.full(len(r), 3.25))
    assert dual_flag_S(const, flag, 0.4) == pytest.approx(3.25)
    zero = _plane_flag_field(lambda B, w, r: np.zeros(len(r)))
    assert dual_flag_S(zero, flag, 0.4) == 0


def test_dual_flag_equivariance(rng):
    a = np.array([0.9, -0.4, 0.3, 0.5])
    b = np.array([0.1, 0.7, -0.6, 0.2])

    def phi(B, w, r):
        P = np.einsum("nik,njk->nij", B, B)
        return np.einsum("i,nij,j->n", a, P, a) + np.einsum("i,nij,j->n", b, P, b) ** 2 + r * (w @ a)

    u = random_orthogonal(rng, 4)
    Phi = _plane_flag_field(phi)
    Phi_u = _plane_flag_field(lambda B, w, r: phi(np.einsum("ij,njk->nik", u, B), w @ u.T, r))
    cfg = TransformConfig(circle_points=16)
    for _ in range(10):
        flag = random_flag(rng, 4, 1)
        r = float(rng.uniform(-1, 1))
        moved = FlagPoint(Subspace(u @ flag.subspace.basis), u @ flag.direction)
        assert dual_flag_S(Phi_u, flag, r, cfg) == pytest.approx(dual_flag_S(Phi, moved, r, cfg), abs=1e-9)


def test_dual_flag_unsupported(rng):
    with pytest.raises(UnsupportedCase):
        dual_flag_S(ScalarField("flag", 1, 3, lambda *a: 0), random_flag(rng, 4, 1), 0.0)


# -- compact_fiber_transform -------------------------------------------------------------

def _line_field_in_frame(W, g):
    """Line field on lines of ω⊥ given as ``g`` of the coordinates in frame ``W``."""
    return ScalarField("grassmannian", 1, 4, lambda B: g(np.asarray(B)[:, :, 0] @ W))


def test_compact_fiber_constant():
    omega = E[:, 3]
    F = ScalarField("grassmannian", 1, 4, lambda B: np.ones(len(B)))
    assert compact_fiber_transform(F, Subspace(E[:, :2]), omega) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "g",
    [lambda u: u[:, 2] ** 2 - 1 / 3, lambda u: u[:, 0] * u[:, 1], lambda u: u[:, 0] ** 2 - u[:, 1] ** 2],
)
def test_compact_fiber_degree_two_multiplier(rng, g):
    flag = random_flag(rng, 4, 1)
    omega = flag.direction
    W = complete_frame(omega[:, None])
    F = _line_field_in_frame(W, g)
    for _ in range(5):
        nrm = W @ rng.standard_normal(3)
        nrm /= np.linalg.norm(nrm)
        eta = orthonormalize(complete_frame(np.column_stack([omega, nrm])))
        val = compact_fiber_transform(F, eta, omega)
        expected = -0.5 * g((W.T @ nrm)[None])[0]
        assert val == pytest.approx(expected, abs=1e-12)


def test_compact_fiber_requires_eta_in_omega_perp():
    F = ScalarField("grassmannian", 1, 4, lambda B: np.ones(len(B)))
    with pytest.raises(NotOrthogonal):
        compact_fiber_transform(F, Subspace(E[:, :2]), E[:, 0])


# -- restrict_to_hyperplane ------------------------------------------------------------------

def test_restrict_gaussian_3d():
    f = gaussian_field(0, 3)
    c = 0.7
    L = AffinePlane(Subspace(np.eye(3)[:, :2]), c * np.eye(3)[:, 2])
    g = restrict_to_hyperplane(f, L)
    a = np.array([0.3, -1.1])
    assert g(AffinePlane(Subspace(np.zeros((2, 0))), a)) == pytest.approx(np.exp(-(a @ a + c * c)), rel=1e-14)


def test_restrict_zero_and_consistency(rng):
    L = random_affine_plane(rng, 3, 2, 0.5)
    z = restrict_to_hyperplane(zero_field(1, 3), L)
    line_in_L = AffinePlane(Subspace(np.array([1.0, 0.0])), np.array([0.0, 0.2]))
    assert z(line_in_L) == 0.0
    f = gaussian_field(1, 3)
    g = restrict_to_hyperplane(f, L)
    Lb = L.subspace.basis
    ambient = AffinePlane(Subspace(Lb @ line_in_L.subspace.basis),
                          project_perp(Subspace(Lb @ line_in_L.subspace.basis), L.offset + Lb @ line_in_L.offset))
    assert g(line_in_L) == pytest.approx(f(ambient), rel=1e-14)


def test_restrict_dimension_errors(rng):
    with pytest.raises(DimensionMismatch):
        restrict_to_hyperplane(gaussian_field(0, 3), random_affine_plane(rng, 3, 1, 0.0))
    with pytest.raises(DimensionMismatch):
        restrict_to_hyperplane(gaussian_field(1, 3).truncated(1) if False else _generic(2, 3, None),
                               random_affine_plane(rng, 3, 2, 0.0))


def test_restrict_then_classical_transform():
    """Lines of L ≅ R² see the classical 2-D transform of the slice."""
    f = gaussian_field(0, 3)
    c = 0.5
    L = AffinePlane(Subspace(np.eye(3)[:, :2]), c * np.eye(3)[:, 2])
    g = restrict_to_hyperplane(f, L)
    xi = AffinePlane(Subspace(np.array([1.0, 0.0])), np.array([0.0, 0.8]))
    assert radon_pq(g, xi) == pytest.approx(SQPI * np.exp(-(0.64 + c * c)), rel=1e-10)


# -- projection-slice ----------------------------------------------------------------------

def test_projection_slice_zero(rng):
    eta = random_subspace(rng, 4, 2)
    assert projection_slice_residual(zero_field(1, 4), eta, np.zeros(4)) == 0.0


def test_projection_slice_closed_form_sides(rng):
    eta = random_subspace(rng, 4, 2)
    y = 1.3 * complete_frame(eta.basis)[:, 0]
    lhs, rhs = slice_sides(gaussian_field(1, 4), eta, y)
    closed = SQPI * np.pi * np.exp(-1.69 / 4)
    assert lhs == pytest.approx(closed, abs=1e-9)
    assert rhs == pytest.approx(closed, abs=1e-9)


def test_projection_slice_grass14(rng):
    for _ in range(3):
        eta = random_subspace(rng, 4, 2)
        y = complete_frame(eta.basis) @ rng.standard_normal(2)
        assert projection_slice_residual(gaussian_field(1, 4), eta, y) < 1e-3


def test_projection_slice_classical(rng):
    eta = random_subspace(rng, 2, 1)
    y = 1.5 * complete_frame(eta.basis)[:, 0]
    assert projection_slice_residual(gaussian_field(0, 2), eta, y) < 1e-6


def test_projection_slice_requires_orthogonal(rng):
    with pytest.raises(NotOrthogonal):
        projection_slice_residual(gaussian_field(1, 4), Subspace(E[:, :2]), E[:, 0])


def test_config_validation():
    with pytest.raises(ValueError):
        TransformConfig(circle_points=4)
    with pytest.raises(ValueError):
        TransformConfig(sphere_order=2)
    with pytest.raises(ValueError):
        TransformConfig(fiber_radius=-1)
    assert DEFAULT_CONFIG.fiber_radius == 6.0


@pytest.mark.parametrize(
    "field",
    [gaussian_field(1, 4, scale=0.8), shell_bump_field(1, 4, 0.5, 1.5), gaussian_field(0, 2),
     shell_bump_field(0, 3, 0.5, 1.5)],
)
def test_radial_fourier_path_matches_tensor_rule(field):
    """Catalog fields take a radial shortcut; a kernel-free copy uses the cube rule."""
    sigma = Subspace(E[:, :1]) if field.p == 1 else Subspace(np.zeros((field.n, 0)))
    ys = np.zeros((4, field.n), dtype=complex)
    ys[1, -1], ys[2, -1], ys[3, -2] = 2.0, 1.5j, 0.7
    plain = _generic(field.p, field.n, field.evaluator, field.radius)
    fine = TransformConfig(fiber_points=128)
    np.testing.assert_allclose(partial_fourier_many(field, sigma, ys),
                               partial_fourier_many(plain, sigma, ys, fine), atol=2e-6)
