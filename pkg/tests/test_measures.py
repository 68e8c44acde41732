"""Tests for free Meixner laws, semicircle and Marchenko-Pastur members, and reweighting."""

import math

import numpy as np
import pytest

from freefam.cumulants import RationalVarianceFunction, cumulants_from_variance
from freefam.measures import (
    Atom,
    Measure,
    MeixnerParams,
    MeixnerType,
    atoms_payload,
    density_table,
    family_member,
    kernel_reweight,
    measure_moment,
    meixner_g_closed,
    meixner_measure,
    mp_member,
    semicircle_measure,
)
from freefam.moments import moments_from_cumulants, support_bound
from freefam.transforms import g_numeric, mean_to_theta, theta_maps

MEIXNER_GRID = [
    (a, b) for a in (0.0, 1.0, -1.0, 2.0) for b in (-1.0, -0.5, 0.0, 0.5, 1.0, 2.0)
]


def external_points(nu: Measure) -> list[float]:
    """Ten real points well away from the support and from every pole."""
    edge = max(abs(x) for x in nu.support_points)
    return [s * (edge + 2.0 + 0.75 * j) for s in (1.0, -1.0) for j in range(5)]


# --- Measure ---


def test_measure_validation() -> None:
    """Negative radius or atom mass is rejected."""
    with pytest.raises(ValueError, match="radius"):
        Measure(center=0.0, radius=-1.0, weight=None)
    with pytest.raises(ValueError, match="atom masses"):
        Measure(center=0.0, radius=0.0, weight=None, atoms=(Atom(0.0, -0.1),))


def test_purely_atomic_measure() -> None:
    """Atoms alone integrate as a finite sum."""
    nu = Measure(center=0.0, radius=0.0, weight=None, atoms=(Atom(-1.0, 0.5), Atom(1.0, 0.5)))
    assert not nu.has_ac_part
    assert nu.ac_support is None
    assert nu.total_mass() == 1.0
    assert nu.variance() == 1.0
    assert density_table(nu) == []


# --- semicircle ---


def test_semicircle_moments(semicircle: Measure) -> None:
    """Moments (0, 1, 0, 2) and unit mass."""
    assert semicircle.total_mass() == pytest.approx(1.0, abs=1e-12)
    for k, expected in enumerate([0.0, 1.0, 0.0, 2.0], start=1):
        assert semicircle.moment(k) == pytest.approx(expected, abs=1e-10)


def test_semicircle_translation() -> None:
    """mean=5 shifts the law."""
    assert semicircle_measure(mean=5.0).mean() == pytest.approx(5.0)
    assert semicircle_measure(mean=5.0, sd=2.0).variance() == pytest.approx(4.0)


def test_semicircle_rejects_bad_sd() -> None:
    """sd must be positive."""
    with pytest.raises(ValueError, match="standard deviation must be positive"):
        semicircle_measure(sd=0.0)


def test_semicircle_density(semicircle: Measure) -> None:
    """sqrt(4 - x**2)/(2 pi) inside, 0 outside."""
    xs = np.array([-3.0, -1.0, 0.0, 0.5, 2.0])
    expected = [0.0, math.sqrt(3), 2.0, math.sqrt(3.75), 0.0]
    expected = [y / (2 * math.pi) for y in expected]
    assert semicircle.ac_density(xs).tolist() == pytest.approx(expected)


# --- free Meixner ---


def test_meixner_taxonomy() -> None:
    """Each (a, b) region names its law."""
    assert MeixnerParams(0.0, 0.0).law_type is MeixnerType.SEMICIRCLE
    assert MeixnerParams(2.0, 0.0).law_type is MeixnerType.FREE_POISSON
    assert MeixnerParams(3.0, 1.0).law_type is MeixnerType.FREE_PASCAL
    assert MeixnerParams(2.0, 1.0).law_type is MeixnerType.FREE_GAMMA
    assert MeixnerParams(1.0, 1.0).law_type is MeixnerType.FREE_HYPERBOLIC
    assert MeixnerParams(0.0, -0.5).law_type is MeixnerType.FREE_BINOMIAL


def test_meixner_admissibility() -> None:
    """b < -1 has no Meixner law."""
    with pytest.raises(ValueError, match="outside Meixner admissibility"):
        MeixnerParams(0.0, -2.0)
    with pytest.raises(ValueError, match="outside Meixner admissibility"):
        MeixnerParams(float("nan"), 0.0)


def test_meixner_semicircle_reduction() -> None:
    """a = b = 0 is the semicircle with no atoms."""
    nu = meixner_measure(MeixnerParams(0.0, 0.0))
    assert nu.atoms == ()
    xs = np.linspace(-1.9, 1.9, 7)
    assert nu.ac_density(xs).tolist() == pytest.approx(
        (np.sqrt(4 - xs**2) / (2 * math.pi)).tolist()
    )


def test_meixner_free_poisson_atom() -> None:
    """a = 2, b = 0 has an atom of mass 3/4 at -1/2."""
    nu = meixner_measure(MeixnerParams(2.0, 0.0))
    assert atoms_payload(nu) == [{"location": -0.5, "mass": 0.75}]
    assert nu.metadata["type"] == "free_poisson"


def test_meixner_hyperbolic_has_no_atoms() -> None:
    """a**2 < 4b leaves no atoms."""
    assert meixner_measure(MeixnerParams(1.0, 1.0)).atoms == ()


def test_meixner_bernoulli() -> None:
    """b = -1 is purely atomic."""
    nu = meixner_measure(MeixnerParams(0.0, -1.0))
    assert not nu.has_ac_part
    assert atoms_payload(nu) == [
        {"location": pytest.approx(-1.0), "mass": pytest.approx(0.5)},
        {"location": pytest.approx(1.0), "mass": pytest.approx(0.5)},
    ]


def test_meixner_negative_candidate_is_clamped(caplog: pytest.LogCaptureFixture) -> None:
    """A negative candidate atom mass is dropped and recorded."""
    nu = meixner_measure(MeixnerParams(2.0, -0.5))
    assert len(nu.atoms) == 1
    clamped = nu.metadata["clamped_atoms"]
    assert len(clamped) == 1
    assert clamped[0]["location"] == pytest.approx(2.0 + math.sqrt(6.0))
    assert clamped[0]["mass"] < 0
    assert "Clamped negative atom mass" in caplog.text
    assert nu.metadata["total_mass"] == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize(("a", "b"), MEIXNER_GRID)  # type: ignore[untyped-decorator]
def test_meixner_moments_match_cumulants(a: float, b: float) -> None:
    """Quadrature moments equal the moments implied by V = 1 + a*m + b*m**2."""
    nu = meixner_measure(MeixnerParams(a, b))
    assert nu.total_mass() == pytest.approx(1.0, abs=1e-8)
    c = cumulants_from_variance(RationalVarianceFunction.quadratic(a, b), 8)
    expected = moments_from_cumulants(c).to_list()
    got = [nu.moment(k) for k in range(1, 9)]
    assert got == pytest.approx(expected, rel=1e-6, abs=1e-6)


@pytest.mark.parametrize(("a", "b"), MEIXNER_GRID)  # type: ignore[untyped-decorator]
def test_meixner_closed_form_cauchy_transform(a: float, b: float) -> None:
    """Closed-form G agrees with quadrature off the support."""
    p = MeixnerParams(a, b)
    nu = meixner_measure(p)
    for z in external_points(nu):
        assert meixner_g_closed(p, z) == pytest.approx(g_numeric(nu, z), rel=1e-8)


def test_meixner_closed_form_examples() -> None:
    """Semicircle value and the 1/z decay."""
    assert meixner_g_closed(MeixnerParams(0.0, 0.0), 3.0) == pytest.approx((3 - math.sqrt(5)) / 2)
    z = 1e6
    assert z * meixner_g_closed(MeixnerParams(1.0, 0.5), z) == pytest.approx(1.0, rel=1e-5)
    for a, b in [(2.0, 0.0), (1.0, 1.0), (0.0, -0.5)]:
        p = MeixnerParams(a, b)
        z = a + 2 * math.sqrt(1 + b) + 1
        assert meixner_g_closed(p, z) == pytest.approx(g_numeric(meixner_measure(p), z), rel=1e-8)


def test_meixner_closed_form_inside_support_fails() -> None:
    """Real points inside the AC support have no real G."""
    with pytest.raises(ValueError, match="evaluation inside support"):
        meixner_g_closed(MeixnerParams(0.0, 0.0), 1.0)


@pytest.mark.parametrize(  # type: ignore[untyped-decorator]
    ("a", "b", "law", "count"),
    [
        (0.0, 0.0, MeixnerType.SEMICIRCLE, 0),
        (2.0, 0.0, MeixnerType.FREE_POISSON, 1),
        (0.5, 0.0, MeixnerType.FREE_POISSON, 0),
        (3.0, 1.0, MeixnerType.FREE_PASCAL, 1),
        (2.0, 1.0, MeixnerType.FREE_GAMMA, 0),
        (1.0, 1.0, MeixnerType.FREE_HYPERBOLIC, 0),
        (0.0, -1.0, MeixnerType.FREE_BINOMIAL, 2),
        (0.0, -0.5, MeixnerType.FREE_BINOMIAL, 0),
    ],
)
def test_meixner_atom_counts(a: float, b: float, law: MeixnerType, count: int) -> None:
    """Atoms per law, with the free gamma boundary a**2 = 4b atomless."""
    nu = meixner_measure(MeixnerParams(a, b))
    assert nu.metadata["type"] == law.value
    assert len(nu.atoms) == count
    assert nu.metadata["total_mass"] == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize(("a", "b"), MEIXNER_GRID)  # type: ignore[untyped-decorator]
def test_support_bound_envelope(a: float, b: float) -> None:
    """|m_n| <= B**n and the support lies inside [-B, B]."""
    c = cumulants_from_variance(RationalVarianceFunction.quadratic(a, b), 16)
    bound = support_bound(c)
    moments = moments_from_cumulants(c).to_list()
    for n, value in enumerate(moments, start=1):
        assert abs(value) <= bound**n * (1 + 1e-9)
    nu = meixner_measure(MeixnerParams(a, b))
    assert all(abs(x) <= bound for x in nu.support_points)


# --- Marchenko-Pastur members ---


def test_mp_member_at_zero_is_semicircle(semicircle: Measure) -> None:
    """m = 0, lambda = 1 is the standard semicircle."""
    nu = mp_member(0.0, 1.0)
    xs = np.linspace(-1.95, 1.95, 9)
    assert nu.ac_density(xs).tolist() == pytest.approx(semicircle.ac_density(xs).tolist())


def test_mp_member_mass_and_mean() -> None:
    """m = 0.5, lambda = 1 has unit mass and mean 0.5."""
    nu = mp_member(0.5, 1.0)
    assert nu.total_mass() == pytest.approx(1.0, abs=1e-8)
    assert nu.mean() == pytest.approx(0.5, abs=1e-8)


def test_mp_member_at_boundary() -> None:
    """m**2 = 1/lambda is still a probability measure."""
    nu = mp_member(0.5, 4.0)
    assert nu.total_mass() == pytest.approx(1.0, abs=1e-8)
    assert nu.mean() == pytest.approx(0.5, abs=1e-8)


def test_mp_member_outside_domain() -> None:
    """m**2 > 1/lambda is rejected."""
    with pytest.raises(ValueError, match="mean outside family domain"):
        mp_member(1.1, 1.0)
    with pytest.raises(ValueError, match="lambda must be positive"):
        mp_member(0.0, 0.0)


# --- kernel and mean reweighting ---


def test_kernel_reweight_identity(semicircle: Measure) -> None:
    """theta = 0 leaves the measure alone."""
    assert kernel_reweight(semicircle, 0.0) is semicircle


def test_kernel_reweight_matches_theta_maps(semicircle: Measure) -> None:
    """P_theta is normalized and its mean is m(theta)."""
    p = kernel_reweight(semicircle, 0.25)
    assert p.total_mass() == pytest.approx(1.0, abs=1e-10)
    assert p.mean() == pytest.approx(theta_maps(semicircle, 0.25).mean, abs=1e-8)
    assert p.metadata["theta"] == 0.25


def test_kernel_positivity(semicircle: Measure) -> None:
    """1 - theta*x must stay positive on the support."""
    with pytest.raises(ValueError, match="kernel positivity violated"):
        kernel_reweight(semicircle, 0.5)


def test_family_member_identity(
    semicircle: Measure, unit_variance: RationalVarianceFunction
) -> None:
    """m = m0 returns the generator."""
    assert family_member(semicircle, unit_variance, 0.0) is semicircle


def test_family_member_domain_errors(semicircle: Measure) -> None:
    """Non-positive weights, V(m) <= 0 and poles are outside the domain."""
    with pytest.raises(ValueError, match="mean outside family domain"):
        family_member(semicircle, RationalVarianceFunction.constant(0.1), 1.0)
    with pytest.raises(ValueError, match="mean outside family domain"):
        family_member(semicircle, RationalVarianceFunction.quadratic(0.0, -1.0), 1.5)
    with pytest.raises(ValueError, match="mean outside family domain"):
        family_member(semicircle, RationalVarianceFunction((1.0,), (1.0, -1.0)), 1.0)


def test_family_member_triangle(
    semicircle: Measure, unit_variance: RationalVarianceFunction
) -> None:
    """Q_m has mass 1, mean m, variance V(m), and G at z(m) equals (m - m0)/V(m)."""
    xs = np.linspace(-1.99, 1.99, 41)
    for m in np.linspace(-0.9, 0.9, 20):
        q = family_member(semicircle, unit_variance, float(m))
        assert q.total_mass() == pytest.approx(1.0, abs=1e-8)
        assert q.mean() == pytest.approx(m, abs=1e-6)
        assert q.variance() == pytest.approx(1.0, abs=1e-6)
        z = mean_to_theta(unit_variance, float(m)).z
        assert g_numeric(semicircle, z) == pytest.approx(m, abs=1e-8)
        mp = mp_member(float(m), 1.0)
        assert q.ac_density(xs).tolist() == pytest.approx(mp.ac_density(xs).tolist(), abs=1e-8)


def test_family_member_scaled_semicircle() -> None:
    """V = 1/lambda with the sd 1/sqrt(lambda) semicircle gives the MP member."""
    lam = 4.0
    nu = semicircle_measure(sd=1 / math.sqrt(lam))
    v = RationalVarianceFunction.constant(1 / lam)
    q = family_member(nu, v, 0.3)
    xs = np.linspace(-0.99, 0.99, 21)
    assert q.ac_density(xs).tolist() == pytest.approx(
        mp_member(0.3, lam).ac_density(xs).tolist(), abs=1e-8
    )
    assert q.variance() == pytest.approx(0.25, abs=1e-8)


def test_family_member_of_atomic_generator() -> None:
    """Atoms are reweighted too: the Bernoulli family stays Bernoulli."""
    nu = meixner_measure(MeixnerParams(0.0, -1.0))
    v = RationalVarianceFunction.quadratic(0.0, -1.0)
    q = family_member(nu, v, 0.5)
    assert q.total_mass() == pytest.approx(1.0)
    assert q.mean() == pytest.approx(0.5)
    assert q.variance() == pytest.approx(v(0.5))


@pytest.mark.parametrize(  # type: ignore[untyped-decorator]
    ("a", "b", "m"), [(1.0, 0.5, 0.2), (2.0, 0.0, 0.1), (0.0, -0.5, 0.3), (1.0, 1.0, -0.2)]
)
def test_family_member_is_kernel_member(a: float, b: float, m: float) -> None:
    """Reweighting by mean and by theta = psi(m) give the same law."""
    nu = meixner_measure(MeixnerParams(a, b))
    v = RationalVarianceFunction.quadratic(a, b)
    by_mean = family_member(nu, v, m)
    by_theta = kernel_reweight(nu, mean_to_theta(v, m).theta)
    assert by_mean.total_mass() == pytest.approx(by_theta.total_mass(), abs=1e-7)
    assert by_mean.mean() == pytest.approx(by_theta.mean(), abs=1e-7)
    assert by_mean.variance() == pytest.approx(by_theta.variance(), abs=1e-7)
    assert by_theta.mean() == pytest.approx(m, abs=1e-6)
    assert by_theta.variance() == pytest.approx(v(m), abs=1e-6)


# --- exports ---


def test_measure_moment() -> None:
    """Moments by quadrature with order guards."""
    assert measure_moment(semicircle_measure(), 4) == pytest.approx(2.0, abs=1e-8)
    assert measure_moment(meixner_measure(MeixnerParams(2.0, 0.0)), 1) == pytest.approx(
        0.0, abs=1e-8
    )
    assert measure_moment(meixner_measure(MeixnerParams(1.0, 1.0)), 0) == pytest.approx(1.0)
    with pytest.raises(ValueError, match="non-negative"):
        measure_moment(semicircle_measure(), -1)
    with pytest.raises(ValueError, match="configured maximum"):
        measure_moment(semicircle_measure(), 17)


def test_density_table(semicircle: Measure) -> None:
    """Rows span the AC support, zero at the edges."""
    rows = density_table(semicircle, 5)
    assert [x for x, _ in rows] == [-2.0, -1.0, 0.0, 1.0, 2.0]
    assert rows[0][1] == 0.0
    assert rows[2][1] == pytest.approx(1 / math.pi)
    assert len(density_table(semicircle)) == 201


def test_quadrature_node_override() -> None:
    """A coarser rule still integrates polynomials against the semicircle."""
    nu = semicircle_measure(nodes=200)
    assert nu.moment(6) == pytest.approx(5.0, abs=1e-10)
    assert nu.with_nodes(400).nodes == 400
