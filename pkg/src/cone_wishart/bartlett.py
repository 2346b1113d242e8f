"""Two-sample test of equal Wishart scale parameters on a symmetric cone."""

import math
from dataclasses import dataclass

import numpy as np

from . import algebra as ja
from .algebra import Element, Family
from .errors import DomainError, Unsupported
from .seeding import derive_seed, resolve_seed
from .wishart import WishartParams, sample_central


@dataclass
class TestResult:
    statistic_q: float
    l_values: np.ndarray
    pooled_mle: Element
    p_value: float
    n_sims: int
    seed: int

    __test__ = False  # keep pytest from collecting this class

    def to_dict(self):
        return {
            "statistic_q": self.statistic_q,
            "l_values": [float(v) for v in self.l_values],
            "pooled_mle": {"algebra": self.pooled_mle.alg.to_dict(), "data": self.pooled_mle.coords.tolist()},
            "p_value": self.p_value,
            "n_sims": self.n_sims,
            "seed": self.seed,
        }


def pooled_mle(x, y):
    """Maximum likelihood estimate ``(x + y)/2`` of the common scale."""
    ja.require_cone(x, "x")
    ja.require_cone(y, "y")
    return 0.5 * (x + y)


def l_from_ratio(zeta):
    """Map ``Eig(x|y)`` rows to ordered ``l_j = (1 - zeta_{r+1-j}) / (1 + zeta_{r+1-j})``."""
    zeta = np.asarray(zeta, dtype=float)[..., ::-1]
    return (1.0 - zeta) / (1.0 + zeta)


def bartlett_eigenvalues(x, y):
    """Ordered statistics ``1 > l_1 >= ... >= l_r > -1`` built from ``Eig(x|y)``."""
    ja.require_cone(x, "x")
    ja.require_cone(y, "y")
    return l_from_ratio(ja.rel_eigenvalues(x, y))


def bartlett_eigenvalues_batch(alg, x_coords, y_coords):
    return l_from_ratio(ja.rel_eigenvalues_batch(alg, x_coords, y_coords))


def q_from_l(l_values, eta):
    l_values = np.asarray(l_values, dtype=float)
    return np.exp(0.5 * eta * np.sum(np.log1p(-l_values * l_values), axis=-1))


def lr_statistic(x, y, eta):
    """``q = 2^(eta r) det(x)^(eta/2) det(y)^(eta/2) / det(x + y)^eta``, in ``(0, 1]``."""
    if not eta > 0:
        raise DomainError("eta must be positive")
    ja.require_cone(x, "x")
    ja.require_cone(y, "y")
    r = x.alg.rank
    log_q = (
        eta * r * math.log(2.0)
        + 0.5 * eta * (np.sum(np.log(ja.eigenvalues(x))) + np.sum(np.log(ja.eigenvalues(y))))
        - eta * np.sum(np.log(ja.eigenvalues(x + y)))
    )
    return float(min(math.exp(log_q), 1.0))


def _null_pairs(alg, eta, n_sims, seed, threads):
    if alg.family is Family.OCTONION:
        raise Unsupported("null simulation needs element draws, which the octonion family lacks")
    params = WishartParams.standard(alg, eta)
    x = sample_central(params, n_sims, derive_seed(seed, 1), threads).coords
    y = sample_central(params, n_sims, derive_seed(seed, 2), threads).coords
    return x, y


def simulate_null_l(alg, eta, n_sims, seed=None, threads=1):
    """``l`` rows for ``n_sims`` independent pairs ``x, y ~ W(eta, e)``."""
    seed = resolve_seed(seed)
    x, y = _null_pairs(alg, eta, n_sims, seed, threads)
    return bartlett_eigenvalues_batch(alg, x, y)


def p_value_mc(observed_q, alg, eta, n_sims, seed=None, threads=1):
    """Add-one Monte Carlo p-value ``(1 + #{q_sim <= q_obs}) / (1 + n_sims)``.

    The null law of ``q`` does not depend on the common scale, so pairs are drawn
    from ``W(eta, e)``.
    """
    if not 0.0 < observed_q <= 1.0:
        raise DomainError(f"observed q must lie in (0, 1], got {observed_q}")
    if not eta > (alg.rank - 1) * alg.peirce:
        raise DomainError(f"eta={eta} must exceed (r-1)d")
    n_sims = int(n_sims)
    if n_sims < 1:
        raise ValueError("n_sims must be positive")
    seed = resolve_seed(seed)
    q_sim = q_from_l(simulate_null_l(alg, eta, n_sims, seed, threads), eta)
    count = int(np.sum(q_sim <= observed_q))
    return (1.0 + count) / (1.0 + n_sims)


def bartlett_test(x, y, eta, n_sims=999, seed=None, threads=1):
    if x.alg != y.alg:
        raise ja.AlgebraMismatch(f"{x.alg} vs {y.alg}")
    seed = resolve_seed(seed)
    s = pooled_mle(x, y)
    l_values = bartlett_eigenvalues(x, y)
    q = lr_statistic(x, y, eta)
    p = p_value_mc(q, x.alg, eta, n_sims, seed, threads)
    return TestResult(q, l_values, s, p, int(n_sims), seed)


@dataclass
class IndependenceReport:
    correlations: np.ndarray
    bound: float
    n_sims: int
    insufficient: bool

    @property
    def flagged(self):
        if self.insufficient:
            return []
        return [j for j, c in enumerate(self.correlations) if abs(c) > self.bound]

    @property
    def ok(self):
        return not self.insufficient and not self.flagged

    def to_dict(self):
        return {
            "correlations": [float(c) for c in self.correlations],
            "bound": self.bound,
            "n_sims": self.n_sims,
            "insufficient": self.insufficient,
            "flagged": self.flagged,
        }


def independence_diagnostic(alg, eta, n_sims, seed=None, threads=1):
    """Sample correlation of ``tr((x+y)/2)`` with each ``l_j`` under the null."""
    n_sims = int(n_sims)
    if n_sims < 3:
        return IndependenceReport(np.full(alg.rank, np.nan), float("inf"), n_sims, True)
    seed = resolve_seed(seed)
    x, y = _null_pairs(alg, eta, n_sims, seed, threads)
    weights = ja.backend(alg).weights
    tr_s = 0.5 * ((x + y) @ (weights * ja.identity(alg).coords))
    l_values = bartlett_eigenvalues_batch(alg, x, y)
    corr = np.array([np.corrcoef(tr_s, l_values[:, j])[0, 1] for j in range(alg.rank)])
    return IndependenceReport(corr, 4.0 / math.sqrt(n_sims), n_sims, False)
