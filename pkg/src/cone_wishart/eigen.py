"""Joint laws of ordered (relative) eigenvalues and an eigenvalue-space sampler."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .algebra import Element, eigenvalues, frame_element, haar_frame
from .errors import DomainError
from .seeding import resolve_seed, stream_rng
from .special import SeriesResult, TruncationPolicy, hypergeom, log_beta_cone, log_gamma_cone


class DensityKind(str, Enum):
    CENTRAL_SCALAR = "central"
    NONCENTRAL_SCALAR = "noncentral"
    BETA_RELATIVE = "beta-relative"
    BARTLETT_NULL = "bartlett-null"


@dataclass(frozen=True)
class DensityEvaluation:
    log_value: float
    constant_c0: float
    series: SeriesResult | None = None

    @property
    def value(self):
        return math.exp(self.log_value) if self.log_value > -np.inf else 0.0

    def to_dict(self):
        out = {"log_value": self.log_value, "value": self.value, "constant_c0": self.constant_c0}
        if self.series is not None:
            out["series"] = self.series.to_dict()
        return out


def log_c0(alg):
    """``log c0`` with ``c0 = (2 pi)^(n-r) Gamma(d/2)^r / Gamma_Omega(rd/2)``."""
    n, r, d = alg.ambient_dim, alg.rank, alg.peirce
    return (n - r) * math.log(2.0 * math.pi) + r * math.lgamma(d / 2.0) - log_gamma_cone(alg, r * d / 2.0)


def c0(alg):
    return math.exp(log_c0(alg))


def _check_shape(alg, eta):
    if not eta > (alg.rank - 1) * alg.peirce:
        raise DomainError(f"shape eta={eta} must exceed (r-1)d={(alg.rank - 1) * alg.peirce}")


def _log_vandermonde(xi, d):
    """``d * sum_{i<j} log(xi_i - xi_j)`` for descending rows; -inf on ties."""
    xi = np.asarray(xi, dtype=float)
    r = xi.shape[-1]
    out = np.zeros(xi.shape[:-1])
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(r):
            for j in range(i + 1, r):
                gap = xi[..., i] - xi[..., j]
                out = out + np.where(gap > 0, np.log(np.where(gap > 0, gap, 1.0)), -np.inf)
    return d * out


def _eig_tuple(alg, xi, lower=0.0, upper=np.inf):
    vals = np.asarray(xi, dtype=float).reshape(-1)
    if vals.size != alg.rank:
        raise ValueError(f"expected {alg.rank} eigenvalues, got {vals.size}")
    if np.any(np.diff(vals) > 0):
        raise DomainError(f"eigenvalues must be in decreasing order: {vals}")
    if np.any(vals <= lower) or np.any(vals >= upper):
        raise DomainError(f"eigenvalues must lie in ({lower}, {upper}): {vals}")
    return vals


def _eps_eigs(alg, eps):
    if eps is None:
        return np.zeros(alg.rank)
    if isinstance(eps, Element):
        return eigenvalues(eps)
    vals = np.sort(np.asarray(eps, dtype=float).reshape(-1))[::-1]
    if vals.size != alg.rank:
        raise ValueError(f"epsilon needs {alg.rank} eigenvalues")
    return vals


def log_eig_density_central_batch(xi, alg, eta, zeta=1.0):
    """Vectorized log of the central ordered-eigenvalue density for ``sigma = zeta e``.

    Rows outside the ordered positive domain map to ``-inf``.
    """
    _check_shape(alg, eta)
    if not zeta > 0:
        raise DomainError("zeta must be positive")
    xi = np.asarray(xi, dtype=float)
    n, r, d = alg.ambient_dim, alg.rank, alg.peirce
    const = log_c0(alg) - log_gamma_cone(alg, eta / 2.0) - 0.5 * eta * r * math.log(2.0 * zeta)
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(xi > 0, np.log(np.where(xi > 0, xi, 1.0)), -np.inf)
        out = const - np.sum(xi, axis=-1) / (2.0 * zeta) + (eta / 2.0 - n / r) * np.sum(logs, axis=-1)
        out = out + _log_vandermonde(xi, d)
    return np.where(np.isnan(out), -np.inf, out)


def log_eig_density_central(xi, alg, eta, zeta=1.0):
    vals = _eig_tuple(alg, xi)
    value = float(log_eig_density_central_batch(vals, alg, eta, zeta))
    return DensityEvaluation(value, c0(alg))


def log_eig_density_noncentral(xi, alg, eta, zeta, eps, policy=None):
    """Central part times ``exp(-tr(eps)/2) 0F1(eta/2; xi, eps/(4 zeta))``."""
    policy = policy or TruncationPolicy()
    vals = _eig_tuple(alg, xi)
    central = log_eig_density_central(vals, alg, eta, zeta)
    e_vals = _eps_eigs(alg, eps)
    if np.any(e_vals < -1e-12 * max(1.0, abs(e_vals[0]))):
        raise DomainError("epsilon must lie in the closed cone")
    if not np.any(e_vals != 0.0):
        return central
    series = hypergeom(alg, [], [eta / 2.0], vals, e_vals / (4.0 * zeta), policy)
    if series.value <= 0:
        raise DomainError("hypergeometric factor is not positive; raise max_degree")
    log_value = central.log_value - 0.5 * float(np.sum(e_vals)) + math.log(series.value)
    return DensityEvaluation(log_value, central.constant_c0, series)


def _log_beta_rel_base(zs, alg, eta1, eta2):
    n, r, d = alg.ambient_dim, alg.rank, alg.peirce
    return (
        log_c0(alg)
        - log_beta_cone(alg, eta1 / 2.0, eta2 / 2.0)
        + (eta1 / 2.0 - n / r) * np.sum(np.log(zs), axis=-1)
        - 0.5 * (eta1 + eta2) * np.sum(np.log1p(zs), axis=-1)
        + _log_vandermonde(zs, d)
    )


def log_beta_rel_density(zs, alg, eta1, eta2, eps=None, variant="a", policy=None):
    """Ordered eigenvalues of ``z = y^{-1} * x`` for independent Wisharts with a shared scale.

    Variant ``a``: ``x ~ W(eta1, sigma)``, ``y ~ W(eta2, sigma, eps)``; series factor
    ``1F1((eta1+eta2)/2; eta2/2; (e+z)^{-1}, eps/2)``.
    Variant ``b``: ``x ~ W(eta1, sigma, eps)``, ``y ~ W(eta2, sigma)``; series factor
    ``1F1((eta1+eta2)/2; eta1/2; z(e+z)^{-1}, eps/2)``.
    """
    if variant not in ("a", "b"):
        raise ValueError("variant must be 'a' or 'b'")
    policy = policy or TruncationPolicy()
    _check_shape(alg, eta1)
    _check_shape(alg, eta2)
    vals = _eig_tuple(alg, zs)
    base = float(_log_beta_rel_base(vals, alg, eta1, eta2))
    e_vals = _eps_eigs(alg, eps)
    if not np.any(e_vals != 0.0):
        return DensityEvaluation(base, c0(alg))
    if variant == "a":
        lower, arg = eta2 / 2.0, 1.0 / (1.0 + vals)
    else:
        lower, arg = eta1 / 2.0, vals / (1.0 + vals)
    series = hypergeom(alg, [(eta1 + eta2) / 2.0], [lower], arg, e_vals / 2.0, policy)
    log_value = base - 0.5 * float(np.sum(e_vals)) + math.log(series.value)
    return DensityEvaluation(log_value, c0(alg), series)


def log_bartlett_null_density_batch(l, alg, eta1, eta2):
    """Central (``eps = 0``) Bartlett-null log density on rows ``1 > l_1 > ... > l_r > -1``."""
    _check_shape(alg, eta1)
    _check_shape(alg, eta2)
    l = np.asarray(l, dtype=float)
    n, r, d = alg.ambient_dim, alg.rank, alg.peirce
    const = log_c0(alg) + (n - r * (eta1 + eta2) / 2.0) * math.log(2.0) - log_beta_cone(alg, eta1 / 2.0, eta2 / 2.0)
    inside = np.all((l > -1.0) & (l < 1.0), axis=-1)
    safe = np.where((l > -1.0) & (l < 1.0), l, 0.0)
    out = (
        const
        + (eta1 / 2.0 - n / r) * np.sum(np.log1p(-safe), axis=-1)
        + (eta2 / 2.0 - n / r) * np.sum(np.log1p(safe), axis=-1)
        + _log_vandermonde(safe, d)
    )
    return np.where(inside, out, -np.inf)


def log_bartlett_null_density(l, alg, eta1, eta2, eps=None, policy=None):
    """Ordered eigenvalues of ``(x-y)/2`` relative to ``(x+y)/2`` with ``y`` carrying ``eps``.

    The scale parameter drops out: ``sigma * W(eta, e, eps)`` has law
    ``W(eta, sigma, eps)``, so the law of these relative eigenvalues does not
    depend on ``sigma``.
    """
    policy = policy or TruncationPolicy()
    vals = _eig_tuple(alg, l, -1.0, 1.0)
    base = float(log_bartlett_null_density_batch(vals, alg, eta1, eta2))
    e_vals = _eps_eigs(alg, eps)
    if not np.any(e_vals != 0.0):
        return DensityEvaluation(base, c0(alg))
    series = hypergeom(alg, [(eta1 + eta2) / 2.0], [eta2 / 2.0], (1.0 + vals) / 2.0, e_vals / 2.0, policy)
    log_value = base - 0.5 * float(np.sum(e_vals)) + math.log(series.value)
    return DensityEvaluation(log_value, c0(alg), series)


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class MCMCConfig:
    """Sampler settings.

    Each sweep makes one independence step (sorted iid Gamma proposal) and, for
    rank above one, ``rw_steps`` log-scale random-walk steps. The random-walk
    scale adapts during burn-in only, so the kept draws come from a fixed kernel.
    """

    burn_in: int = 1000
    thin: int = 5
    proposal_shape_shift: float = 0.0
    rw_steps: int = 1
    n_chains: int = 64
    chains_per_stream: int = 16


@dataclass
class EigenSample:
    values: np.ndarray
    acceptance_rate: float
    seed: int
    rw_acceptance_rate: float | None = None


def _chain_group(alg, eta, zeta, cfg, rng, n_chains, per_chain):
    r, d = alg.rank, alg.peirce
    power = eta / 2.0 - alg.n_over_r
    shape = power + 1.0 + cfg.proposal_shape_shift
    if not shape > 0:
        raise DomainError(f"proposal shape {shape} must be positive")
    rw_steps = int(cfg.rw_steps) if r > 1 else 0

    def propose():
        return -np.sort(-rng.gamma(shape, 2.0 * zeta, size=(n_chains, r)), axis=1)

    def log_weight(xi):
        return _log_vandermonde(xi, d) - cfg.proposal_shape_shift * np.sum(np.log(xi), axis=1)

    def log_target(xi):
        return -np.sum(xi, axis=1) / (2.0 * zeta) + power * np.sum(np.log(xi), axis=1) + _log_vandermonde(xi, d)

    state = propose()
    w = log_weight(state)
    lt = log_target(state)
    step_size = np.full(n_chains, 0.5 / math.sqrt(r))
    out = np.empty((per_chain, n_chains, r))
    accepted = rw_accepted = 0
    total_steps = cfg.burn_in + per_chain * cfg.thin
    kept = 0
    for step in range(1, total_steps + 1):
        cand = propose()
        wc = log_weight(cand)
        take = np.log(rng.random(n_chains)) < wc - w
        state = np.where(take[:, None], cand, state)
        w = np.where(take, wc, w)
        accepted += int(take.sum())
        if rw_steps:
            lt = np.where(take, log_target(state), lt)
            for _ in range(rw_steps):
                cand = state * np.exp(step_size[:, None] * rng.standard_normal((n_chains, r)))
                with np.errstate(invalid="ignore"):
                    lc = log_target(cand)
                # log-scale moves carry the Jacobian prod(cand / state)
                log_ratio = lc - lt + np.sum(np.log(cand) - np.log(state), axis=1)
                ok = np.log(rng.random(n_chains)) < np.where(np.isfinite(lc), log_ratio, -np.inf)
                state = np.where(ok[:, None], cand, state)
                lt = np.where(ok, lc, lt)
                if step <= cfg.burn_in:
                    step_size *= np.where(ok, 1.02, 0.99)
                else:
                    rw_accepted += int(ok.sum())
            w = log_weight(state)
        if step > cfg.burn_in and (step - cfg.burn_in) % cfg.thin == 0:
            out[kept] = state
            kept += 1
    kept_steps = per_chain * cfg.thin * n_chains * rw_steps
    return out, accepted, total_steps * n_chains, rw_accepted, kept_steps


def sample_eigenvalues(alg, eta, zeta, n_draws, seed=None, mcmc=None, threads=1):
    """Metropolis-Hastings draws from the central ordered-eigenvalue law.

    Independence proposals are sorted iid ``Gamma(eta/2 - n/r + 1 + shift, scale 2 zeta)``,
    so their weight ratio only involves the Vandermonde factor and the shift. At
    rank one with ``shift = 0`` the proposal is the target and every step is
    accepted. Chains run in groups; each group owns the sub-stream ``(seed, group)``.
    """
    cfg = mcmc or MCMCConfig()
    _check_shape(alg, eta)
    if not zeta > 0:
        raise DomainError("zeta must be positive")
    n_draws = int(n_draws)
    if n_draws < 1:
        raise ValueError("n_draws must be positive")
    seed = resolve_seed(seed)
    n_chains = max(1, min(cfg.n_chains, n_draws))
    per_chain = -(-n_draws // n_chains)
    groups = []
    start = 0
    while start < n_chains:
        size = min(cfg.chains_per_stream, n_chains - start)
        groups.append(size)
        start += size

    def run(g):
        return _chain_group(alg, eta, zeta, cfg, stream_rng(seed, g), groups[g], per_chain)

    if threads > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            results = list(pool.map(run, range(len(groups))))
    else:
        results = [run(g) for g in range(len(groups))]
    draws = np.concatenate([res[0] for res in results], axis=1)  # (per_chain, n_chains, r)
    values = draws.reshape(-1, alg.rank)[:n_draws]
    acc = sum(res[1] for res in results) / sum(res[2] for res in results)
    rw_total = sum(res[4] for res in results)
    rw_acc = sum(res[3] for res in results) / rw_total if rw_total else None
    return EigenSample(values, float(acc), seed, rw_acc)


def k_average(alg, func, xi, n_samples, rng):
    """Monte Carlo estimate of the K-integral of ``func(sum_j xi_j c_j)`` over Haar frames.

    Returns ``(mean, standard_error)``. No accuracy contract beyond the usual MC rate.
    """
    vals = np.array([func(frame_element(haar_frame(alg, rng), xi)) for _ in range(int(n_samples))], dtype=float)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(len(vals)))


@dataclass(frozen=True)
class EigDensitySpec:
    """A named eigenvalue law plus its parameters; ``evaluate`` dispatches to the log density."""

    alg: object
    kind: DensityKind
    params: dict

    def evaluate(self, point, policy=None):
        kind = DensityKind(self.kind)
        p = dict(self.params)
        if kind is DensityKind.CENTRAL_SCALAR:
            return log_eig_density_central(point, self.alg, p["eta"], p.get("zeta", 1.0))
        if kind is DensityKind.NONCENTRAL_SCALAR:
            return log_eig_density_noncentral(point, self.alg, p["eta"], p.get("zeta", 1.0), p.get("eps"), policy)
        if kind is DensityKind.BETA_RELATIVE:
            return log_beta_rel_density(
                point, self.alg, p["eta1"], p["eta2"], p.get("eps"), p.get("variant", "a"), policy
            )
        return log_bartlett_null_density(point, self.alg, p["eta1"], p["eta2"], p.get("eps"), policy)
