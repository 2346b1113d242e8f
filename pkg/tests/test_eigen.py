import math

import numpy as np
import pytest
from scipy import integrate, stats
from scipy.special import gammaln

from cone_wishart import algebra as ja
from cone_wishart.algebra import AlgebraDescriptor
from cone_wishart.bartlett import l_from_ratio
from cone_wishart.eigen import (
    DensityKind,
    EigDensitySpec,
    MCMCConfig,
    c0,
    k_average,
    log_bartlett_null_density,
    log_bartlett_null_density_batch,
    log_beta_rel_density,
    log_eig_density_central,
    log_eig_density_central_batch,
    log_eig_density_noncentral,
    sample_eigenvalues,
)
from cone_wishart.errors import DomainError
from cone_wishart.wishart import WishartParams, sample_central

RANK1 = AlgebraDescriptor.real_sym(1)
RS2 = AlgebraDescriptor.real_sym(2)

# (family, n, r, d) for the five worked specializations
SPECIALIZATIONS = [
    (AlgebraDescriptor.real_sym(3), 6, 3, 1),
    (AlgebraDescriptor.complex_herm(3), 9, 3, 2),
    (AlgebraDescriptor.quaternion_herm(2), 6, 2, 4),
    (AlgebraDescriptor.lorentz(6), 6, 2, 4),
    (AlgebraDescriptor.octonion(), 27, 3, 8),
]


def hand_log_density(xi, n, r, d, eta, zeta):
    """Independent expansion of the ordered-eigenvalue law written out with scipy gammas."""
    log_gamma_omega = lambda s: (n - r) / 2 * math.log(2 * math.pi) + sum(  # noqa: E731
        gammaln(s - j * d / 2) for j in range(r)
    )
    log_c = (n - r) * math.log(2 * math.pi) + r * gammaln(d / 2) - log_gamma_omega(r * d / 2)
    out = log_c - log_gamma_omega(eta / 2) - r * eta / 2 * math.log(2 * zeta)
    out += sum((eta / 2 - n / r) * math.log(x) - x / (2 * zeta) for x in xi)
    out += d * sum(math.log(xi[i] - xi[j]) for i in range(r) for j in range(i + 1, r))
    return out


def test_c0_examples():
    assert c0(RANK1) == pytest.approx(1.0)
    assert c0(RS2) == pytest.approx(math.pi * math.sqrt(2))
    # Lorentz n=4: (2 pi)^2 / Gamma_Omega(2) with Gamma_Omega(2) = 2 pi Gamma(2) Gamma(1)
    assert c0(AlgebraDescriptor.lorentz(4)) == pytest.approx(2 * math.pi)


@pytest.mark.parametrize("alg,n,r,d", SPECIALIZATIONS, ids=lambda v: str(v) if isinstance(v, AlgebraDescriptor) else "")
def test_family_specializations(alg, n, r, d):
    xi = np.array([6.0, 3.5, 1.25][:r])
    eta = (r - 1) * d + 3.0
    got = log_eig_density_central(xi, alg, eta, 1.4).log_value
    assert got == pytest.approx(hand_log_density(xi, n, r, d, eta, 1.4), rel=1e-12)


def test_central_examples():
    assert log_eig_density_central([1.0], RANK1, 2.0).value == pytest.approx(0.5 * math.exp(-0.5))
    assert log_eig_density_central_batch(np.array([2.0, 2.0]), RS2, 5.0) == -np.inf
    with pytest.raises(DomainError):
        log_eig_density_central([1.0, 2.0], RS2, 5.0)
    with pytest.raises(DomainError):
        log_eig_density_central([2.0, 1.0], RS2, 1.0)


@pytest.mark.parametrize("alg", [AlgebraDescriptor.complex_herm(2), AlgebraDescriptor.quaternion_herm(2)], ids=str)
def test_central_normalization_other_families(alg):
    eta = alg.peirce + 3.0
    mass = integrate.dblquad(
        lambda x2, x1: math.exp(log_eig_density_central_batch(np.array([x1, x2]), alg, eta, 0.7)),
        0,
        np.inf,
        0,
        lambda x1: x1,
    )[0]
    assert mass == pytest.approx(1.0, abs=1e-6)


def test_noncentral_examples(rng):
    val = log_eig_density_noncentral([1.5], RANK1, 3.0, 1.0, [2.0]).value
    assert val == pytest.approx(stats.ncx2.pdf(1.5, 3, 2), abs=1e-9)
    alg = AlgebraDescriptor.complex_herm(3)
    eps = ja.random_cone_element(alg, rng)
    frame = ja.haar_frame(alg, rng)
    rotated = ja.frame_element(frame, ja.eigenvalues(eps))
    xi = [4.0, 2.0, 0.5]
    a = log_eig_density_noncentral(xi, alg, 7.0, 1.0, eps).log_value
    b = log_eig_density_noncentral(xi, alg, 7.0, 1.0, rotated).log_value
    assert a == pytest.approx(b, abs=1e-12)


def test_noncentral_scaled_rank1():
    # sigma = zeta: xi / zeta ~ ncx2(eta, eps)
    zeta = 2.5
    val = log_eig_density_noncentral([4.0], RANK1, 3.0, zeta, [1.2]).value
    assert val == pytest.approx(stats.ncx2.pdf(4.0 / zeta, 3, 1.2) / zeta, rel=1e-9)


def test_noncentral_normalizes_rank2():
    # E_central[f_noncentral / f_central] = 1 when the non-central law is a density
    eps = np.array([1.5, 0.5])
    draws = sample_central(WishartParams.standard(RS2, 5.0), 4000, seed=31).coords
    xi = np.sort(ja.eigenvalues_batch(RS2, draws), axis=1)[:, ::-1]
    ratio = np.array(
        [
            math.exp(
                log_eig_density_noncentral(v, RS2, 5.0, 1.0, eps).log_value
                - log_eig_density_central(v, RS2, 5.0).log_value
            )
            for v in xi
        ]
    )
    se = ratio.std(ddof=1) / math.sqrt(len(ratio))
    assert abs(ratio.mean() - 1.0) < 4 * se


def test_beta_relative_rank1():
    got = log_beta_rel_density([0.8], RANK1, 4.0, 6.0).value
    assert got == pytest.approx(stats.betaprime.pdf(0.8, 2, 3), rel=1e-12)
    for variant in ("a", "b"):
        assert log_beta_rel_density([0.8], RANK1, 4.0, 6.0, variant=variant).value == got


@pytest.mark.parametrize("variant", ["a", "b"])
def test_beta_relative_noncentral_normalizes(variant):
    f = lambda z: log_beta_rel_density([z], RANK1, 3.0, 5.0, [1.7], variant).value  # noqa: E731
    mass = integrate.quad(f, 0, np.inf, limit=200)[0]
    assert mass == pytest.approx(1.0, abs=1e-6)


def test_beta_relative_variant_b_matches_simulation():
    # z = x / y with x noncentral: x ~ ncx2(3, 1.7), y ~ chi2(5)
    rng = np.random.default_rng(12)
    z = stats.ncx2.rvs(3, 1.7, size=5000, random_state=rng) / stats.chi2.rvs(5, size=5000, random_state=rng)
    grid = np.concatenate([[0.0], np.geomspace(1e-4, z.max() * 1.01, 400)])
    pieces = [
        integrate.quad(lambda u: log_beta_rel_density([u], RANK1, 3.0, 5.0, [1.7], "b").value, a, b)[0]
        for a, b in zip(grid[:-1], grid[1:])
    ]
    cdf_grid = np.concatenate([[0.0], np.cumsum(pieces)])
    assert stats.kstest(z, lambda t: np.interp(t, grid, cdf_grid)).pvalue > 1e-3


def test_beta_relative_rank2_normalizes():
    # substitute z = u / (1 - u) to map the ordered quadrant onto 1 > u1 > u2 > 0
    def f(u2, u1):
        z = np.array([u1 / (1 - u1), u2 / (1 - u2)])
        return log_beta_rel_density(z, RS2, 5.0, 6.0).value / ((1 - u1) ** 2 * (1 - u2) ** 2)

    mass = integrate.dblquad(f, 0, 1 - 1e-12, 1e-12, lambda u1: u1 - 1e-12)[0]
    assert mass == pytest.approx(1.0, abs=1e-4)


def test_bartlett_null_rank1():
    eta = 5.0
    const = 1 / integrate.quad(lambda t: (1 - t * t) ** (eta / 2 - 1), -1, 1)[0]
    for t in (-0.7, 0.0, 0.3):
        got = log_bartlett_null_density([t], RANK1, eta, eta).value
        assert got == pytest.approx(const * (1 - t * t) ** (eta / 2 - 1), rel=1e-9)
    mass = integrate.quad(lambda t: log_bartlett_null_density([t], RANK1, 3.0, 4.0, [2.0]).value, -1, 1)[0]
    assert mass == pytest.approx(1.0, abs=1e-6)


def test_bartlett_null_symmetry_and_mass():
    alg = AlgebraDescriptor.complex_herm(3)
    l = np.array([0.6, 0.1, -0.4])
    a = log_bartlett_null_density_batch(l, alg, 7.0, 7.0)
    b = log_bartlett_null_density_batch(-l[::-1], alg, 7.0, 7.0)
    assert a == pytest.approx(b, abs=1e-12)
    mass = integrate.dblquad(
        lambda l2, l1: math.exp(log_bartlett_null_density_batch(np.array([l1, l2]), RS2, 5.0, 5.0)),
        -1,
        1,
        -1,
        lambda l1: l1,
    )[0]
    assert mass == pytest.approx(1.0, abs=1e-4)


@pytest.mark.parametrize("eps", [None, [1.3, 0.4]])
def test_beta_relative_maps_to_bartlett_null(eps):
    rng = np.random.default_rng(13)
    eta1, eta2 = 5.0, 6.0
    for _ in range(100):
        zs = np.sort(rng.uniform(0.05, 6.0, 2))[::-1]
        l = l_from_ratio(zs)
        jac = np.sum(np.log(2.0 / (1.0 + l) ** 2))
        lhs = log_bartlett_null_density(l, RS2, eta1, eta2, eps).log_value
        rhs = log_beta_rel_density(zs, RS2, eta1, eta2, eps, "a").log_value + jac
        assert lhs == pytest.approx(rhs, abs=1e-9)


@pytest.mark.parametrize("alg", [AlgebraDescriptor.real_sym(3), AlgebraDescriptor.complex_herm(3)], ids=str)
def test_rel_eigenvalues_vs_root_finder(alg, rng):
    x = ja.random_cone_element(alg, rng)
    y = ja.random_cone_element(alg, rng)
    X, Y = ja.to_matrix(x), ja.to_matrix(y)
    if X.ndim == 3:
        X, Y = X[..., 0] + 1j * X[..., 1], Y[..., 0] + 1j * Y[..., 1]
    grid = np.arange(alg.rank + 1, dtype=float)
    values = [np.linalg.det(t * Y - X).real for t in grid]
    roots = np.sort(np.roots(np.polyfit(grid, values, alg.rank)).real)
    assert np.allclose(np.sort(ja.rel_eigenvalues(x, y)), roots, rtol=1e-8)


def test_mh_rank1_exact():
    sample = sample_eigenvalues(RANK1, 4.0, 1.0, 10_000, seed=3)
    assert sample.acceptance_rate == 1.0
    assert stats.kstest(sample.values[:, 0], stats.chi2(4).cdf).pvalue > 1e-3


def _chain_mean_z(sample, target, n_chains=64):
    tr = sample.values.sum(axis=1).reshape(-1, n_chains)
    chain_means = tr.mean(axis=0)
    se = chain_means.std(ddof=1) / math.sqrt(n_chains)
    return abs(tr.mean() - target) / se


@pytest.mark.parametrize(
    "alg,eta,zeta,target",
    [
        (RS2, 5.0, 1.0, 10.0),
        (AlgebraDescriptor.lorentz(4), 6.0, 0.5, 6.0),
        (AlgebraDescriptor.quaternion_herm(3), 12.0, 1.0, 36.0),
        (AlgebraDescriptor.octonion(), 20.0, 1.0, 60.0),
    ],
    ids=["real-sym", "lorentz", "quaternion", "octonion"],
)
def test_mh_trace_moment(alg, eta, zeta, target):
    sample = sample_eigenvalues(alg, eta, zeta, 12_800, seed=21)
    assert np.all(np.diff(sample.values, axis=1) <= 0)
    assert _chain_mean_z(sample, target) < 4


def test_mh_reproducible_across_threads():
    a = sample_eigenvalues(RS2, 5.0, 1.0, 2000, seed=5)
    b = sample_eigenvalues(RS2, 5.0, 1.0, 2000, seed=5, threads=4)
    assert np.array_equal(a.values, b.values)
    c = sample_eigenvalues(RS2, 5.0, 1.0, 2000, seed=5, mcmc=MCMCConfig(burn_in=200, thin=2, proposal_shape_shift=0.5))
    assert 0 < c.acceptance_rate < 1


def test_k_average_of_invariant_function(rng):
    alg = AlgebraDescriptor.complex_herm(2)
    mean, se = k_average(alg, ja.determinant, np.array([3.0, 2.0]), 50, rng)
    assert mean == pytest.approx(6.0)
    assert se == pytest.approx(0.0, abs=1e-10)


def test_density_spec_dispatch():
    spec = EigDensitySpec(RS2, DensityKind.CENTRAL_SCALAR, {"eta": 5.0, "zeta": 1.0})
    xi = np.array([3.0, 1.0])
    assert spec.evaluate(xi).log_value == log_eig_density_central(xi, RS2, 5.0).log_value
    spec = EigDensitySpec(RS2, DensityKind.BARTLETT_NULL, {"eta1": 5.0, "eta2": 5.0})
    assert spec.evaluate(np.array([0.5, -0.2])).log_value == pytest.approx(
        float(log_bartlett_null_density_batch(np.array([0.5, -0.2]), RS2, 5.0, 5.0))
    )
