"""Central and non-central Wishart laws on the five cone families.

Densities are taken with respect to the Lebesgue measure of the trace-form inner
product. ``W(eta, sigma, eps)`` is the law of ``sigma * w`` where ``w`` has
``E[exp(-<z, w>)] = det(e + 2z)^(-eta/2) exp(-tr(eps)/2 + <(e + 2z)^(-1), eps>/2)``.
"""

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import algebra as ja
from .algebra import Element, Family
from .errors import DomainError, NotConvergedWarning, NotInCone, ShapeConventionWarning, Unsupported
from .seeding import CHUNK, derive_seed, resolve_seed, run_chunked
from .special import TruncationPolicy, hypergeom, log_gamma_cone

MATRIX_FAMILIES = (Family.REAL_SYM, Family.COMPLEX_HERM, Family.QUATERNION_HERM)


class Method(str, Enum):
    BARTLETT = "bartlett"
    GAUSSIAN = "gaussian"
    EIGEN_REJECTION = "eigen-rejection"


@dataclass(frozen=True)
class WishartParams:
    """Shape ``eta``, scale ``sigma`` in the open cone, non-centrality ``eps`` in its closure."""

    eta: float
    sigma: Element
    epsilon: Element | None = None

    def __post_init__(self):
        alg = self.sigma.alg
        eps = self.epsilon if self.epsilon is not None else ja.zero(alg)
        if eps.alg != alg:
            raise ja.AlgebraMismatch(f"{eps.alg} vs {alg}")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "eta", float(self.eta))
        bound = (alg.rank - 1) * alg.peirce
        if not self.eta > bound:
            raise DomainError(f"eta={self.eta} must exceed (r-1)d={bound}")
        if self.eta <= alg.ambient_dim - alg.rank:
            warnings.warn(
                f"eta={self.eta} is integrable but not above n-r={alg.ambient_dim - alg.rank}",
                ShapeConventionWarning,
                stacklevel=3,
            )
        ja.require_cone(self.sigma, "sigma")
        vals = ja.eigenvalues(eps)
        if vals[-1] < -1e-12 * max(1.0, abs(vals[0])):
            raise NotInCone(f"epsilon must lie in the closed cone, eigenvalues {vals}")

    @property
    def alg(self):
        return self.sigma.alg

    @property
    def is_central(self):
        return not np.any(self.epsilon.coords != 0.0)

    @classmethod
    def standard(cls, alg, eta, zeta=1.0, epsilon=None):
        return cls(eta, zeta * ja.identity(alg), epsilon)


@dataclass
class SampleBatch:
    """Draws stored as a ``(n_draws, n)`` coordinate array."""

    coords: np.ndarray
    seed: int
    params: WishartParams
    method: Method
    extra: dict = field(default_factory=dict)

    @property
    def alg(self):
        return self.params.alg

    @property
    def draws(self):
        return [Element(self.alg, row) for row in self.coords]

    def __len__(self):
        return len(self.coords)


# ---------------------------------------------------------------------------
# densities and transforms


def _central_batch(coords, alg, eta, sigma):
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    n, r = alg.ambient_dim, alg.rank
    sig_inv = ja.inverse(sigma)
    weights = ja.backend(alg).weights
    vals = ja.eigenvalues_batch(alg, coords)
    inside = vals[:, -1] > ja.CONE_RTOL * np.maximum(1.0, vals[:, 0])
    logdet = np.sum(np.log(np.where(vals > 0, vals, 1.0)), axis=1)
    lin = coords @ (weights * sig_inv.coords)
    out = (
        -0.5 * eta * r * math.log(2.0)
        - log_gamma_cone(alg, eta / 2.0)
        - 0.5 * eta * math.log(ja.determinant(sigma))
        - 0.5 * lin
        + (eta / 2.0 - n / r) * logdet
    )
    return out, inside


def log_density_central_batch(coords, p):
    """Central log density at many points; points outside the cone raise ``NotInCone``."""
    out, inside = _central_batch(coords, p.alg, p.eta, p.sigma)
    if not np.all(inside):
        raise NotInCone("some points are outside the open cone")
    return out


def log_density_central(x, p):
    if not p.is_central:
        raise DomainError("log_density_central needs epsilon = 0; use log_density_noncentral")
    if x.alg != p.alg:
        raise ja.AlgebraMismatch(f"{x.alg} vs {p.alg}")
    ja.require_cone(x)
    return float(log_density_central_batch(x.coords, p)[0])


def noncentral_argument(x, p):
    """Eigenvalues of ``x * (sigma^{-1} * eps) / 4``, the 0F1 argument."""
    w = ja.star(ja.inverse(p.sigma), p.epsilon)
    return ja.eigenvalues(ja.star(x, w)) / 4.0


def log_density_noncentral(x, p, policy=None, return_series=False):
    """``log w(x | eta, sigma) - tr(eps)/2 + log 0F1(eta/2; x * (sigma^{-1} * eps) / 4)``.

    A ``NotConvergedWarning`` is emitted when the series hits ``max_degree``.
    """
    policy = policy or TruncationPolicy()
    if x.alg != p.alg:
        raise ja.AlgebraMismatch(f"{x.alg} vs {p.alg}")
    ja.require_cone(x)
    base = float(_central_batch(x.coords, p.alg, p.eta, p.sigma)[0][0])
    if p.is_central:
        return (base, None) if return_series else base
    arg = np.maximum(noncentral_argument(x, p), 0.0)
    series = hypergeom(p.alg, [], [p.eta / 2.0], arg, None, policy)
    if not series.converged:
        warnings.warn(
            f"0F1 series stopped at degree {series.degree_used} (tail {series.tail_estimate:.3g})",
            NotConvergedWarning,
            stacklevel=2,
        )
    value = base - 0.5 * ja.trace(p.epsilon) + math.log(series.value)
    return (value, series) if return_series else value


def laplace_transform(z, p):
    """``E[exp(-<z, x>)] = det(e + 2 sigma*z)^(-eta/2) exp(-tr(eps)/2 + <(e + 2 sigma*z)^(-1), eps>/2)``."""
    if z.alg != p.alg:
        raise ja.AlgebraMismatch(f"{z.alg} vs {p.alg}")
    a = ja.identity(p.alg) + 2.0 * ja.star(p.sigma, z)
    if not ja.in_cone(a):
        raise DomainError("e + 2 sigma*z must lie in the open cone")
    out = -0.5 * p.eta * math.log(ja.determinant(a))
    if not p.is_central:
        out += -0.5 * ja.trace(p.epsilon) + 0.5 * ja.inner(ja.inverse(a), p.epsilon)
    return math.exp(out)


def mean(p):
    """``E[x] = eta sigma + sigma * eps``."""
    return p.eta * p.sigma + ja.star(p.sigma, p.epsilon)


# ---------------------------------------------------------------------------
# samplers


def _scalar_scale(sigma):
    vals = ja.eigenvalues(sigma)
    if vals[0] - vals[-1] > 1e-12 * vals[0]:
        raise Unsupported("this family is sampled only for sigma = zeta e")
    return float(vals[0])


def _check_draws(alg, coords):
    vals = ja.eigenvalues_batch(alg, coords)
    if not np.all(vals[:, -1] > ja.CONE_RTOL * np.maximum(1.0, vals[:, 0])):
        raise RuntimeError("sampler produced a point outside the open cone")


def _bartlett_chunk(alg, eta, sigma_root, rng, size):
    b = ja.backend(alg)
    r, d = alg.rank, alg.peirce
    t = np.zeros((size, r, r, d))
    shapes = (eta - np.arange(r) * d) / 2.0
    idx = np.arange(r)
    t[:, idx, idx, 0] = np.sqrt(rng.gamma(shapes, 2.0, size=(size, r)))
    rows, cols = np.tril_indices(r, -1)
    t[:, rows, cols, :] = rng.standard_normal((size, len(rows), d))
    tn = b.dmat_to_native(t)
    w = tn @ np.conj(np.swapaxes(tn, -1, -2))
    w_coords = b.from_native(w)
    return b.quad(sigma_root.coords, w_coords)


def sample_central(p, n_draws, seed=None, threads=1):
    """Draws from ``W(eta, sigma)``.

    Matrix families use the generalized Bartlett decomposition ``w = T T*`` with
    ``T_jj^2 ~ Gamma((eta - (j-1)d)/2, scale 2)`` and standard normal strictly lower
    entries, mapped by ``sigma * w``. Lorentz (``sigma = zeta e``) combines an
    eigenvalue draw with a uniform direction on the sphere.
    """
    if not p.is_central:
        raise DomainError("sample_central needs epsilon = 0")
    n_draws = int(n_draws)
    if n_draws < 1:
        raise ValueError("n_draws must be positive")
    seed = resolve_seed(seed)
    alg = p.alg
    if alg.family in MATRIX_FAMILIES:
        root = ja.sqrt_cone(p.sigma)
        coords = run_chunked(lambda rng, size: _bartlett_chunk(alg, p.eta, root, rng, size), n_draws, seed, threads=threads)
        _check_draws(alg, coords)
        return SampleBatch(coords, seed, p, Method.BARTLETT)
    if alg.family is Family.LORENTZ:
        from .eigen import sample_eigenvalues

        zeta = _scalar_scale(p.sigma)
        eig = sample_eigenvalues(alg, p.eta, zeta, n_draws, seed=derive_seed(seed, 1), threads=threads)

        def directions(rng, size):
            return ja.haar_directions(alg.ambient_dim - 1, size, rng)

        u = run_chunked(directions, n_draws, seed, stream=2, threads=threads)
        xi = eig.values
        coords = np.concatenate([0.5 * (xi[:, :1] + xi[:, 1:]), 0.5 * (xi[:, :1] - xi[:, 1:]) * u], axis=1)
        _check_draws(alg, coords)
        return SampleBatch(coords, seed, p, Method.EIGEN_REJECTION, {"acceptance_rate": eig.acceptance_rate})
    raise Unsupported("element-level draws are not available for the octonion family; use eigenvalue sampling")


def _as_dmatrix(alg, m, rows):
    m = np.asarray(m, dtype=float)
    r, d = alg.rank, alg.peirce
    if d == 1 and m.shape == (rows, r):
        m = m[..., None]
    if d == 2 and np.iscomplexobj(m):
        m = np.stack([m.real, m.imag], axis=-1)
    if m.shape != (rows, r, d):
        raise ValueError(f"mean block must have shape {(rows, r, d)}, got {m.shape}")
    return m


def gaussian_params(alg, n_rows, sigma, mean_mat):
    """Parameters implied by ``Q(v) = v* v``: ``eta = N d`` and ``eps = sigma^{-1} * Q(mu)``."""
    b = ja.backend(alg)
    mu = b.dmat_to_native(_as_dmatrix(alg, mean_mat, n_rows))
    q_mu = Element(alg, b.from_native(np.conj(mu.T) @ mu))
    eps = ja.star(ja.inverse(sigma), q_mu)
    return WishartParams(n_rows * alg.peirce, sigma, eps)


def sample_noncentral(alg, n_rows, sigma, mean_mat, n_draws, seed=None, threads=1):
    """Draws of ``Q(v) = v* v`` for an ``N x r`` matrix ``v`` over the coordinate division algebra.

    Rows of ``v`` are independent with covariance ``sigma`` and means given by
    ``mean_mat``. The law is ``W(N d, sigma, sigma^{-1} * Q(mu))``.
    """
    if alg.family not in MATRIX_FAMILIES:
        raise Unsupported("the Gaussian construction is available for matrix families only")
    n_rows = int(n_rows)
    if n_rows < alg.rank:
        raise DomainError(f"need N >= r, got N={n_rows}, r={alg.rank}")
    n_draws = int(n_draws)
    if n_draws < 1:
        raise ValueError("n_draws must be positive")
    seed = resolve_seed(seed)
    params = gaussian_params(alg, n_rows, sigma, mean_mat)
    b = ja.backend(alg)
    mu = b.dmat_to_native(_as_dmatrix(alg, mean_mat, n_rows))
    root = b.to_native(ja.sqrt_cone(sigma).coords)
    r, d = alg.rank, alg.peirce

    def chunk(rng, size):
        g = b.dmat_to_native(rng.standard_normal((size, n_rows, r, d)))
        v = mu + g @ root
        return b.from_native(np.conj(np.swapaxes(v, -1, -2)) @ v)

    coords = run_chunked(chunk, n_draws, seed, threads=threads)
    _check_draws(alg, coords)
    return SampleBatch(coords, seed, params, Method.GAUSSIAN, {"n_rows": n_rows})


def sample_wishart(p, n_draws, seed=None, threads=1):
    """Dispatch to the appropriate sampler for ``W(eta, sigma, eps)``.

    Non-central draws use the Gaussian construction when ``eta / d`` is an integer
    ``N >= r``, with mean block ``(sigma * eps)^{1/2}`` in the first ``r`` rows.
    """
    if p.is_central:
        return sample_central(p, n_draws, seed, threads)
    alg = p.alg
    if alg.family not in MATRIX_FAMILIES:
        raise Unsupported("non-central draws are available for matrix families only")
    n_rows = p.eta / alg.peirce
    if abs(n_rows - round(n_rows)) > 1e-12 or round(n_rows) < alg.rank:
        raise Unsupported("non-central draws need eta/d to be an integer at least r")
    n_rows = int(round(n_rows))
    target = ja.star(p.sigma, p.epsilon)
    root = ja.spectral_apply(target, lambda v: np.sqrt(np.maximum(v, 0.0)))
    b = ja.backend(alg)
    top = b.to_dmat(root.coords)
    mean_mat = np.zeros((n_rows, alg.rank, alg.peirce))
    mean_mat[: alg.rank] = top
    batch = sample_noncentral(alg, n_rows, p.sigma, mean_mat, n_draws, seed, threads)
    return SampleBatch(batch.coords, batch.seed, p, Method.GAUSSIAN, batch.extra)


# ---------------------------------------------------------------------------
# convolution check


@dataclass
class ConvolutionReport:
    z_grid: list
    empirical: np.ndarray
    standard_errors: np.ndarray
    predicted: np.ndarray

    @property
    def deviations(self):
        return np.abs(self.empirical - self.predicted)

    @property
    def max_deviation(self):
        return float(np.max(self.deviations))

    def within(self, n_se=4.0):
        return bool(np.all(self.deviations <= n_se * self.standard_errors))

    def to_dict(self):
        return {
            "empirical": self.empirical.tolist(),
            "standard_errors": self.standard_errors.tolist(),
            "predicted": self.predicted.tolist(),
            "max_deviation": self.max_deviation,
        }


def convolve_check(p1, p2, z_grid, n_draws=20000, seed=None, threads=1):
    """Compare the empirical Laplace transform of ``x + y`` with the summed-parameter formula."""
    if p1.alg != p2.alg or not np.allclose(p1.sigma.coords, p2.sigma.coords):
        raise ValueError("convolution check needs a shared sigma")
    seed = resolve_seed(seed)
    x = sample_wishart(p1, n_draws, derive_seed(seed, 1), threads)
    y = sample_wishart(p2, n_draws, derive_seed(seed, 2), threads)
    s = x.coords + y.coords
    summed = WishartParams(p1.eta + p2.eta, p1.sigma, p1.epsilon + p2.epsilon)
    weights = ja.backend(p1.alg).weights
    emp, se, pred = [], [], []
    for z in z_grid:
        vals = np.exp(-(s @ (weights * z.coords)))
        emp.append(vals.mean())
        se.append(vals.std(ddof=1) / math.sqrt(len(vals)))
        pred.append(laplace_transform(z, summed))
    return ConvolutionReport(list(z_grid), np.array(emp), np.array(se), np.array(pred))


__all__ = [
    "CHUNK",
    "ConvolutionReport",
    "Method",
    "SampleBatch",
    "WishartParams",
    "convolve_check",
    "gaussian_params",
    "laplace_transform",
    "log_density_central",
    "log_density_central_batch",
    "log_density_noncentral",
    "mean",
    "noncentral_argument",
    "sample_central",
    "sample_noncentral",
    "sample_wishart",
]
