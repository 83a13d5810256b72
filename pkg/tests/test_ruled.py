"""Ruled surfaces: frames, coefficient polynomials, normalization, sweep."""

import math

import numpy as np
import pytest

from singular_geom import catenary as cat
from singular_geom.algebra import Metric, Vec3, cross, inner, triple
from singular_geom.curves import Curve, line_curve
from singular_geom.errors import (
    ConfigError,
    CylindricalInput,
    NonSpacelikeInput,
    NotNormalized,
    ZeroDirection,
    ZeroQ,
)
from singular_geom.ruled import (
    DirectorClass,
    RuledSurface,
    SweepConfig,
    coefficients,
    default_t_samples,
    falsification_sweep,
    frame,
    helicoid,
    lightlike_reference,
    make_cylinder,
    normalize_euclidean,
    normalize_lorentz,
    random_euclidean_ruled,
    random_lightlike_ruled,
    random_lorentz_ruled,
    random_prenormalization_input,
    random_unit_timelike,
    random_unit_vector,
    residual_polynomial_consistency,
    sweep_surface,
    translate_into_halfspace,
    verify_normalization,
)
from singular_geom.ruled import _halfspace_window
from singular_geom.surface import singular_residual

E = Metric.EUCLIDEAN
L = Metric.LORENTZIAN
EZ = Vec3(0, 0, 1)

HELIX_DIRECTOR = Curve(
    lambda s: Vec3(math.cos(s), math.sin(s), 0.0),
    lambda s: Vec3(-math.sin(s), math.cos(s), 0.0),
    lambda s: Vec3(-math.cos(s), -math.sin(s), 0.0),
)


# ---------------------------------------------------------------------------
# helicoid frame and coefficients
# ---------------------------------------------------------------------------

def test_helicoid_frame_values():
    h = helicoid(0.7)
    for s in (0.5, 1.0, 2.0):
        fr = frame(h, s)
        assert abs(fr.P - 0.7) < 1e-12
        assert abs(fr.Q) < 1e-12


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("alpha", [1.0, 2.0])
def test_helicoid_coefficients_hand_values(c, alpha):
    h = helicoid(c)
    for s in (0.4, 1.3):
        cv = coefficients(h, s, EZ, alpha)
        expected = (0.0, -alpha * c * c, 0.0, -alpha)
        assert max(abs(a - e) for a, e in zip(cv.A, expected)) <= 1e-9


def test_helicoid_alpha_zero_coefficients_vanish():
    cv = coefficients(helicoid(1.0), 1.0, EZ, 0.0)
    assert cv.max_abs() <= 1e-9


def test_coefficients_linear_in_direction():
    rng = np.random.default_rng(0)
    rs = random_euclidean_ruled(rng)
    v = random_unit_vector(rng)
    a = coefficients(rs, 1.0, v, 1.7).A
    b = coefficients(rs, 1.0, -1.0 * v, 1.7).A
    assert max(abs(x + y) for x, y in zip(a, b)) <= 1e-12


def test_frame_of_cylinder_raises():
    base = cat.plane_curve(cat.integrate(cat.CatenaryState(0, 1, 0, 0), 1.0, 1.0, 1e-3),
                           EZ, Vec3(0, 1, 0))
    cyl = make_cylinder(base, Vec3(0, 1, 0), E)
    with pytest.raises(NotNormalized):
        frame(cyl, 0.5)


def test_make_cylinder_zero_direction():
    with pytest.raises(ZeroDirection):
        make_cylinder(line_curve(Vec3(1, 0, 0), Vec3(0, 0, 1)), Vec3(0, 0, 0), E)


def test_circular_cylinder_not_singular_minimal():
    circle = Curve(
        lambda s: Vec3(math.sin(s), 0.0, 2.0 + math.cos(s)),
        lambda s: Vec3(math.cos(s), 0.0, -math.sin(s)),
        lambda s: Vec3(-math.sin(s), 0.0, -math.cos(s)),
    )
    cyl = make_cylinder(circle, Vec3(0, 1, 0), E)
    surf = cyl.as_param_surface((-1.0, 1.0))
    vals = [abs(singular_residual(E, surf, s, 0.2, EZ, 1.0)) for s in (0.1, 0.5, 0.9)]
    assert max(vals) > 1e-2


def test_make_cylinder_line_base_is_plane():
    line = line_curve(Vec3(0, 0, 1), Vec3(0.2, 0, 1.0))
    plane = make_cylinder(line, Vec3(0, 1, 0), E)
    surf = plane.as_param_surface((-1.0, 1.0))
    for alpha in (0.0, 1.0, 2.0):
        assert abs(singular_residual(E, surf, 0.3, 0.4, EZ, alpha)) < 1e-12


def test_catenary_cylinder_two_representations_agree():
    path = cat.integrate(cat.CatenaryState(0, 1, 0, 0), 1.0, 2.0, 5e-4)
    base = cat.plane_curve(path, EZ, Vec3(0, 1, 0))
    cyl = make_cylinder(base, Vec3(0, 1, 0), E, s_range=(0.0, 2.0))
    ruled_rep = cyl.as_param_surface((-1.0, 1.0))
    direct_rep = cat.catenary_cylinder(path, EZ, Vec3(0, 1, 0))
    for s in np.linspace(0.1, 1.9, 9):
        for t in (-0.7, 0.2, 0.9):
            r1 = singular_residual(E, ruled_rep, s, t, EZ, 1.0)
            r2 = singular_residual(E, direct_rep, s, t, EZ, 1.0)
            assert abs(r1 - r2) <= 1e-12
            assert abs(r1) <= 1e-5  # D vanishes for the exact solution


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def test_normalize_euclidean_helicoid_identity():
    axis = Curve(lambda s: Vec3(0, 0, s), lambda s: Vec3(0, 0, 1), lambda s: Vec3(0, 0, 0))
    rs = normalize_euclidean(axis, HELIX_DIRECTOR, (0.0, 2.0))
    assert rs.normalized
    # the slide is identically zero: the base comes back unchanged
    for s in (0.2, 1.0, 1.8):
        assert (rs.base.value(s) - Vec3(0, 0, s)).max_abs() < 1e-12


def test_normalize_euclidean_shifted_base():
    shifted = Curve(
        lambda s: Vec3(math.cos(s), math.sin(s), s),
        lambda s: Vec3(-math.sin(s), math.cos(s), 1.0),
        lambda s: Vec3(-math.cos(s), -math.sin(s), 0.0),
    )
    rs = normalize_euclidean(shifted, HELIX_DIRECTOR, (0.0, 2.0))
    assert verify_normalization(rs) <= 1e-9


def test_normalize_euclidean_value_only_input():
    shifted = Curve(lambda s: Vec3(math.cos(s), math.sin(s), s))
    rs = normalize_euclidean(shifted, HELIX_DIRECTOR, (0.0, 2.0))
    assert verify_normalization(rs) <= 1e-9


def test_normalize_euclidean_rejects_cylinder():
    axis = Curve(lambda s: Vec3(0, 0, s), lambda s: Vec3(0, 0, 1), lambda s: Vec3(0, 0, 0))
    const_w = Curve(lambda s: Vec3(1, 0, 0), lambda s: Vec3(0, 0, 0), lambda s: Vec3(0, 0, 0))
    with pytest.raises(CylindricalInput):
        normalize_euclidean(axis, const_w, (0.0, 2.0))


def test_normalize_euclidean_rejects_conoid():
    # a ruled surface whose striction curve is not orthogonal to the rulings
    conoid_base = Curve(lambda s: Vec3(math.cos(s), 0.0, s))
    with pytest.raises(NotNormalized):
        normalize_euclidean(conoid_base, HELIX_DIRECTOR, (0.0, 2.0))


def test_normalize_lorentz_fixed_point_on_normalized_input():
    rng = np.random.default_rng(21)
    rs = random_lorentz_ruled(rng, -1)
    out = normalize_lorentz(rs.base, rs.director, -1, rs.s_range)
    for s in out.s_samples(9):
        assert (out.base.value(s) - rs.base.value(s)).max_abs() <= 1e-8


@pytest.mark.parametrize("delta", [1, -1])
def test_normalize_lorentz_random_inputs(delta):
    from singular_geom.curves import fd1

    rng = np.random.default_rng(100 + delta)
    for _ in range(4):
        base, director, s_range = random_prenormalization_input(rng, delta)
        rs = normalize_lorentz(base, director, delta, s_range)
        for s in rs.s_samples(20):
            gp = fd1(rs.base.value, s, 1e-4)
            assert abs(inner(L, gp, rs.director.value(s))) <= 1e-8
            assert abs(inner(L, gp, rs.director.d1(s))) <= 1e-8


def test_normalize_lorentz_rejects_bad_director():
    axis = Curve(lambda s: Vec3(s, 0, 0), lambda s: Vec3(1, 0, 0), lambda s: Vec3(0, 0, 0))
    wrong = Curve(lambda s: Vec3(0, 2, 0), lambda s: Vec3(0, 0, 0), lambda s: Vec3(0, 0, 0))
    with pytest.raises(NonSpacelikeInput):
        normalize_lorentz(axis, wrong, 1, (0.0, 1.0))


def test_normalize_lorentz_singular_system_breaks_down():
    from singular_geom.errors import ODEBreakdown

    # g1' = w' makes f3 = <g1, w'>_L vanish identically while f2 = 1, so the
    # algebraic equation for y1' has no solution
    director = Curve(
        lambda s: Vec3(math.cos(s), math.sin(s), 0.0),
        lambda s: Vec3(-math.sin(s), math.cos(s), 0.0),
        lambda s: Vec3(-math.cos(s), -math.sin(s), 0.0),
    )
    base = Curve(
        lambda s: Vec3(math.cos(s), math.sin(s), 2.0),
        lambda s: Vec3(-math.sin(s), math.cos(s), 0.0),
        lambda s: Vec3(-math.cos(s), -math.sin(s), 0.0),
    )
    with pytest.raises(ODEBreakdown):
        normalize_lorentz(base, director, 1, (0.0, 1.0))


# ---------------------------------------------------------------------------
# frame identities on random surfaces
# ---------------------------------------------------------------------------

def test_frame_identities_euclid():
    rng = np.random.default_rng(31)
    for _ in range(5):
        rs = random_euclidean_ruled(rng)
        for s in rs.s_samples(40):
            fr = frame(rs, s)
            gp = rs.base.d1(s)
            wpp = rs.director.d2(s)
            assert (gp - fr.P * fr.wxwp).max_abs() <= 1e-8
            assert (wpp + fr.w - fr.Q * fr.wxwp).max_abs() <= 1e-8
            assert (cross(E, gp, fr.w) - fr.P * fr.wp).max_abs() <= 1e-8


@pytest.mark.parametrize("delta", [1, -1])
def test_frame_identities_lorentz(delta):
    rng = np.random.default_rng(41 + delta)
    for _ in range(5):
        rs = random_lorentz_ruled(rng, delta)
        for s in rs.s_samples(40):
            fr = frame(rs, s)
            gp = rs.base.d1(s)
            wpp = rs.director.d2(s)
            assert (gp + delta * fr.P * fr.wxwp).max_abs() <= 1e-8
            assert (wpp + delta * (fr.w + fr.Q * fr.wxwp)).max_abs() <= 1e-8
            assert (cross(L, gp, fr.w) - delta * fr.P * fr.wp).max_abs() <= 1e-8
            assert abs(inner(L, fr.wxwp, fr.wxwp) + delta) <= 1e-9


def test_unit_direction_decomposition_euclid():
    # (w,w',v)^2 + <w,v>^2 + <w',v>^2 = 1 for unit v
    rng = np.random.default_rng(6)
    rs = random_euclidean_ruled(rng)
    for _ in range(20):
        v = random_unit_vector(rng)
        s = float(rng.uniform(*rs.s_range))
        fr = frame(rs, s)
        total = (triple(fr.w, fr.wp, v) ** 2 + inner(E, fr.w, v) ** 2
                 + inner(E, fr.wp, v) ** 2)
        assert abs(total - 1.0) <= 1e-10


# ---------------------------------------------------------------------------
# lightlike class
# ---------------------------------------------------------------------------

def test_lightlike_cross_identity_exact():
    rs = lightlike_reference()
    for s in np.linspace(-1.0, 1.0, 11):
        w = rs.director.value(s)
        wp = rs.director.d1(s)
        assert (cross(L, w, wp) + wp).max_abs() <= 1e-12


def test_lightlike_reference_forms():
    from singular_geom.surface import fundamental_forms

    rs = lightlike_reference()
    for s in np.linspace(-0.9, 0.9, 7):
        fr = frame(rs, s)
        assert abs(fr.Q + 1.0) <= 1e-12
        for t in np.linspace(-0.3, 0.3, 5):
            j = rs.jet(s, t)
            f = fundamental_forms(L, j)
            assert abs(f.E - (1.0 + 2.0 * fr.Q * t)) <= 1e-12
            assert abs(f.F) <= 1e-12 and abs(f.G - 1.0) <= 1e-12
            # Q' = 0 for the reference, so (Xs, Xt, Xss) = Q'/Q + Q' t = 0
            assert abs(triple(j.Xs, j.Xt, j.Xss)) <= 1e-12


def test_lightlike_random_identities():
    from singular_geom.surface import fundamental_forms
    from singular_geom.curves import fd1_scalar

    rng = np.random.default_rng(8)
    for _ in range(5):
        rs = random_lightlike_ruled(rng)
        qf = lambda s: inner(L, rs.base.d1(s), rs.director.d1(s))
        for s in rs.s_samples(10):
            Q = qf(s)
            Qp = fd1_scalar(qf, s, 1e-4)
            assert abs(Q) > 1e-3
            for t in np.linspace(-0.3, 0.3, 5):
                j = rs.jet(s, t)
                f = fundamental_forms(L, j)
                assert abs(f.E - (1.0 + 2.0 * Q * t)) <= 1e-8
                assert abs(triple(j.Xs, j.Xt, j.Xss) - (Qp / Q + Qp * t)) <= 1e-8


def test_lightlike_zero_q_guard():
    m0 = 5e-11  # valid lightlike data always has |Q| = |m| >= the floor

    def gp(s):
        a = (s * s * m0 * m0 - 1.0) / m0
        return Vec3(s * m0, 0.5 * (a - m0), 0.5 * (a + m0))

    def gval(s):
        return Vec3(0.5 * s * s * m0,
                    m0 * s ** 3 / 6.0 - 0.5 * s / m0 - 0.5 * m0 * s,
                    m0 * s ** 3 / 6.0 - 0.5 * s / m0 + 0.5 * m0 * s)

    base = Curve(gval, gp, lambda s: Vec3(m0, s * m0, s * m0))
    director = line_curve(Vec3(0, 1, 1), Vec3(1, 0, 0))
    rs = RuledSurface.build(base, director, (-1.0, 1.0), L,
                            DirectorClass.LORENTZ_LIGHTLIKE, delta=0,
                            trust_normalized=True)
    with pytest.raises(ZeroQ):
        coefficients(rs, 0.5, EZ, 1.0)


# ---------------------------------------------------------------------------
# coefficient/oracle consistency
# ---------------------------------------------------------------------------

def test_consistency_helicoid():
    h = helicoid(1.0)
    worst = residual_polynomial_consistency(h, 1.2, EZ, 1.0, [-1.0, -0.5, 0.1, 0.5, 1.0])
    assert worst <= 1e-9


def test_consistency_alpha_zero():
    rng = np.random.default_rng(14)
    rs = random_euclidean_ruled(rng)
    v = random_unit_vector(rng)
    rs = translate_into_halfspace(rs, v, rs.s_samples(5), (-1.0, 1.0))
    for s in rs.s_samples(5):
        assert residual_polynomial_consistency(rs, s, v, 0.0,
                                               default_t_samples(rs, s)) <= 1e-9


@pytest.mark.parametrize("maker,vmaker", [
    (lambda rng: random_euclidean_ruled(rng), random_unit_vector),
    (lambda rng: random_lorentz_ruled(rng, 1), random_unit_timelike),
    (lambda rng: random_lorentz_ruled(rng, -1), random_unit_timelike),
    (lambda rng: random_lightlike_ruled(rng), random_unit_timelike),
])
def test_consistency_random_surfaces(maker, vmaker):
    rng = np.random.default_rng(77)
    for _ in range(6):
        rs = maker(rng)
        v = vmaker(rng)
        alpha = float(rng.uniform(-3, 3))
        s_values = rs.s_samples(4)
        rs = translate_into_halfspace(rs, v, s_values, _halfspace_window(rs, s_values))
        for s in s_values:
            worst = residual_polynomial_consistency(rs, s, v, alpha,
                                                    default_t_samples(rs, s))
            assert worst <= 1e-8


def test_consistency_needs_enough_valid_samples():
    h = helicoid(1.0)
    with pytest.raises(ConfigError):
        residual_polynomial_consistency(h, 1.0, EZ, 1.0, [0.1, 0.2])


# ---------------------------------------------------------------------------
# falsification sweep
# ---------------------------------------------------------------------------

def test_sweep_reproducible():
    cfg = SweepConfig(n_surfaces=8, n_s_samples=5, seed=12345)
    a = falsification_sweep(cfg).to_json()
    b = falsification_sweep(SweepConfig(n_surfaces=8, n_s_samples=5, seed=12345)).to_json()
    assert a == b


def test_sweep_small_runs_find_nothing():
    cfg = SweepConfig(n_surfaces=15, n_s_samples=6, seed=42)
    rep = falsification_sweep(cfg)
    assert rep.counterexamples == []
    assert rep.min_max_abs_coeff > 1e-3
    cfgl = SweepConfig(n_surfaces=8, n_s_samples=6, seed=7, metric=L,
                       director_class=DirectorClass.LORENTZ_LIGHTLIKE)
    repl = falsification_sweep(cfgl)
    assert repl.counterexamples == []


def test_sweep_excludes_planted_cylinder():
    path = cat.integrate(cat.CatenaryState(0, 1, 0, 0), 1.0, 1.0, 1e-3)
    base = cat.plane_curve(path, EZ, Vec3(0, 1, 0))
    cyl = make_cylinder(base, Vec3(0, 1, 0), E)
    cfg = SweepConfig(n_surfaces=3, n_s_samples=4, seed=5)
    rep = falsification_sweep(cfg, planted=[cyl])
    row = rep.per_surface[0]
    assert row["excluded"] is True
    assert row["flagged"] is False
    assert rep.counterexamples == []


def test_sweep_detector_flags_helicoid_at_alpha_zero():
    # alpha = 0 annihilates every coefficient of a helicoid: the detector fires
    h = helicoid(1.0)
    row = sweep_surface(h, EZ, 0.0, h.s_samples(6))
    assert row["flagged"] is True
    assert row["max_abs_coeff"] <= 1e-9


def test_sweep_config_validation():
    with pytest.raises(ConfigError):
        falsification_sweep(SweepConfig(n_surfaces=0))
    with pytest.raises(ConfigError):
        falsification_sweep(SweepConfig(n_surfaces=1, alpha_range=(0.0, 0.1)))
    with pytest.raises(ConfigError):
        falsification_sweep(SweepConfig(n_surfaces=1, metric=L))
    with pytest.raises(ConfigError):
        falsification_sweep(SweepConfig(n_surfaces=1, n_s_samples=0))
