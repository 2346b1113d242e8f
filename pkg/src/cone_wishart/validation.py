"""Self-check suites run by ``cone-wishart validate``.

Each check reports the measured discrepancy next to its tolerance. The suites are
sized to finish in seconds; the full test suite carries the heavier statistics.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from . import algebra as ja
from .algebra import AlgebraDescriptor, Element
from .bartlett import bartlett_eigenvalues, lr_statistic, q_from_l
from .eigen import log_eig_density_central_batch, log_eig_density_noncentral, sample_eigenvalues
from .special import det_identity_check, gamma_cone, hypergeom, partitions, zonal
from .wishart import WishartParams, log_density_central, log_density_noncentral, sample_central

SUITES = ("algebra", "special-functions", "wishart", "eigen", "bartlett")


@dataclass
class Check:
    suite: str
    name: str
    measured: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.measured) and self.measured <= self.tolerance)

    def to_dict(self):
        return {
            "suite": self.suite,
            "name": self.name,
            "measured": float(self.measured),
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def all_families():
    return [
        AlgebraDescriptor.real_sym(3),
        AlgebraDescriptor.complex_herm(3),
        AlgebraDescriptor.quaternion_herm(3),
        AlgebraDescriptor.lorentz(5),
        AlgebraDescriptor.octonion(),
    ]


def _algebra_suite(seed):
    rng = np.random.default_rng(seed)
    out = []
    for alg in all_families():
        jordan = recon = star_det = detp = 0.0
        for _ in range(10):
            x = ja.random_element(alg, rng)
            y = ja.random_element(alg, rng)
            x2 = ja.square(x)
            lhs = ja.jordan_product(x, ja.jordan_product(x2, y))
            rhs = ja.jordan_product(x2, ja.jordan_product(x, y))
            jordan = max(jordan, ja.norm(lhs - rhs) / (1.0 + ja.norm(x) ** 3 * ja.norm(y)))
            lam = ja.eigenvalues(x)
            recon = max(recon, abs(ja.trace(x) - lam.sum()) / (1.0 + abs(lam).sum()))
            a = ja.random_cone_element(alg, rng)
            b = ja.random_cone_element(alg, rng)
            star_det = max(star_det, abs(ja.determinant(ja.star(a, b)) / (ja.determinant(a) * ja.determinant(b)) - 1))
            dp = np.linalg.det(ja.quad_rep_matrix(a))
            detp = max(detp, abs(dp / ja.determinant(a) ** (2 * alg.n_over_r) - 1))
        out += [
            Check("algebra", f"jordan identity {alg}", jordan, 1e-9),
            Check("algebra", f"trace vs eigenvalues {alg}", recon, 1e-9),
            Check("algebra", f"det(x*y) = det x det y {alg}", star_det, 1e-8),
            Check("algebra", f"det P(x) = det(x)^(2n/r) {alg}", detp, 1e-8),
        ]
    return out


def _special_suite(seed):
    rng = np.random.default_rng(seed)
    out = []
    rank1 = AlgebraDescriptor.real_sym(1)
    quad = integrate.quad(lambda t: math.exp(-t) * t ** 3.5, 0, np.inf)[0]
    out.append(Check("special-functions", "rank-1 gamma vs quadrature", abs(gamma_cone(rank1, 4.5) - quad), 1e-6))
    out.append(
        Check(
            "special-functions",
            "real-sym r=2 gamma(2)",
            abs(gamma_cone(AlgebraDescriptor.real_sym(2), 2) - math.sqrt(2 * math.pi) * math.gamma(1.5)),
            1e-12,
        )
    )
    for alg in all_families():
        worst = 0.0
        x = rng.uniform(0.2, 1.5, alg.rank)
        for k in range(1, 7):
            total = sum(zonal(alg, lam, x) for lam in partitions(k, alg.rank))
            worst = max(worst, abs(total / x.sum() ** k - 1))
        out.append(Check("special-functions", f"zonal sum rule k<=6 {alg}", worst, 1e-8))
    alg = AlgebraDescriptor.real_sym(2)
    x = np.array([0.4, 0.15])
    res = hypergeom(alg, [1.5], [], x)
    ref = det_identity_check(alg, 1.5, x)
    out.append(Check("special-functions", "1F0 determinant identity", abs(res.value / ref - 1), 1e-6))
    res = hypergeom(alg, [], [], [0.3, 0.2])
    out.append(Check("special-functions", "0F0 = exp(tr)", abs(res.value - math.exp(0.5)), 1e-8))
    return out


def _wishart_suite(seed):
    out = []
    rank1 = AlgebraDescriptor.real_sym(1)
    one = Element(rank1, [1.0])
    p = WishartParams.standard(rank1, 2.0)
    out.append(
        Check("wishart", "rank-1 central vs chi2", abs(log_density_central(one, p) - stats.chi2.logpdf(1.0, 2)), 1e-9)
    )
    p = WishartParams.standard(rank1, 3.0, 1.0, Element(rank1, [2.0]))
    val = log_density_noncentral(Element(rank1, [1.5]), p)
    out.append(Check("wishart", "rank-1 non-central vs ncx2", abs(val - stats.ncx2.logpdf(1.5, 3, 2)), 1e-9))
    p = WishartParams.standard(rank1, 3.0)
    mass = integrate.quad(lambda t: math.exp(log_density_central(Element(rank1, [t]), p)), 0, np.inf)[0]
    out.append(Check("wishart", "rank-1 normalization", abs(mass - 1), 1e-6))
    alg = AlgebraDescriptor.real_sym(2)
    batch = sample_central(WishartParams.standard(alg, 5.0), 20000, seed)
    tr = batch.coords[:, 0] + batch.coords[:, 2]
    z = abs(tr.mean() - 10.0) / (tr.std(ddof=1) / math.sqrt(len(tr)))
    out.append(Check("wishart", "sampler E[tr] (standard errors)", z, 4.0))
    return out


def _eigen_suite(seed):
    out = []
    for alg in (AlgebraDescriptor.real_sym(2), AlgebraDescriptor.lorentz(4)):
        mass = integrate.dblquad(
            lambda x2, x1: math.exp(log_eig_density_central_batch(np.array([x1, x2]), alg, 5.0, 1.0)),
            0,
            np.inf,
            0,
            lambda x1: x1,
        )[0]
        out.append(Check("eigen", f"eigenvalue density mass {alg}", abs(mass - 1), 1e-4))
    rank1 = AlgebraDescriptor.real_sym(1)
    val = log_eig_density_noncentral([1.5], rank1, 3.0, 1.0, [2.0]).log_value
    out.append(Check("eigen", "rank-1 non-central vs ncx2", abs(math.exp(val) - stats.ncx2.pdf(1.5, 3, 2)), 1e-6))
    sample = sample_eigenvalues(rank1, 4.0, 1.0, 2000, seed)
    out.append(Check("eigen", "rank-1 MH rejection rate", 1.0 - sample.acceptance_rate, 0.0))
    return out


def _bartlett_suite(seed):
    rng = np.random.default_rng(seed)
    alg = AlgebraDescriptor.real_sym(2)
    e = ja.identity(alg)
    out = [
        Check("bartlett", "q at x=y", abs(lr_statistic(e, e, 5.0) - 1.0), 0.0),
        Check("bartlett", "q at x=3e, y=e", abs(lr_statistic(3 * e, e, 5.0) - 0.2373046875), 1e-9),
    ]
    worst_q = worst_g = 0.0
    for fam in all_families():
        for _ in range(5):
            x = ja.random_cone_element(fam, rng)
            y = ja.random_cone_element(fam, rng)
            s = ja.random_cone_element(fam, rng)
            q = lr_statistic(x, y, 5.0)
            l_values = bartlett_eigenvalues(x, y)
            worst_q = max(worst_q, abs(q - q_from_l(l_values, 5.0)) / q)
            moved = bartlett_eigenvalues(ja.star(s, x), ja.star(s, y))
            worst_g = max(worst_g, float(np.max(np.abs(moved - l_values))))
    out.append(Check("bartlett", "q vs prod(1-l^2)^(eta/2)", worst_q, 1e-10))
    out.append(Check("bartlett", "l-values G-invariance", worst_g, 1e-9))
    return out


_RUNNERS = {
    "algebra": _algebra_suite,
    "special-functions": _special_suite,
    "wishart": _wishart_suite,
    "eigen": _eigen_suite,
    "bartlett": _bartlett_suite,
}


def run_suites(names, seed=0):
    checks = []
    for name in names:
        if name not in _RUNNERS:
            raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
        checks.extend(_RUNNERS[name](seed))
    return checks


def format_table(checks):
    width = max(len(c.name) for c in checks) if checks else 10
    lines = [f"{'suite':<18} {'check':<{width}} {'measured':>12} {'tolerance':>10}  result"]
    for c in checks:
        flag = "PASS" if c.passed else "FAIL"
        lines.append(f"{c.suite:<18} {c.name:<{width}} {c.measured:>12.3e} {c.tolerance:>10.1e}  {flag}")
    return "\n".join(lines)
