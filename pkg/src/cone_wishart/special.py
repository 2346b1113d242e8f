"""Cone gamma/beta functions, partitions, zonal polynomials and hypergeometric series.

Zonal polynomials are Jack polynomials with parameter ``alpha = 2/d`` in the
C-normalization, so that ``tr(x)^k = sum_{|k|=k} Z_k(x)``. They are computed in
the monomial basis of ``r`` variables by the triangular eigen-recurrence of the
Laplace-Beltrami type operator, then evaluated on eigenvalues.
"""

import math
import threading
from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy.special import gammaln

from .algebra import Element, eigenvalues
from .errors import AlgebraMismatch, DivergentSeries, DomainError, PartitionTooLong


@dataclass(frozen=True)
class TruncationPolicy:
    """Cap on the series degree plus the relative tail tolerance."""

    max_degree: int = 30
    tail_tol: float = 1e-10

    def __post_init__(self):
        if int(self.max_degree) < 1:
            raise ValueError("max_degree must be at least 1")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive")

    def to_dict(self):
        return {"max_degree": int(self.max_degree), "tail_tol": float(self.tail_tol)}


@dataclass(frozen=True)
class SeriesResult:
    value: float
    degree_used: int
    tail_estimate: float
    converged: bool

    def to_dict(self):
        return {
            "value": self.value,
            "degree_used": self.degree_used,
            "tail_estimate": self.tail_estimate,
            "converged": self.converged,
        }


# ---------------------------------------------------------------------------
# gamma, beta, pochhammer


def _power_vector(alg, s):
    s = np.asarray(s, dtype=float)
    if s.ndim == 0:
        return np.full(alg.rank, float(s))
    if s.shape != (alg.rank,):
        raise ValueError(f"power vector must have length {alg.rank}, got shape {s.shape}")
    return s


def log_gamma_cone(alg, s):
    """``log Gamma_Omega(s) = (n-r)/2 log(2 pi) + sum_j log Gamma(s_j - (j-1)d/2)``."""
    s = _power_vector(alg, s)
    shifted = s - np.arange(alg.rank) * alg.peirce / 2.0
    if np.any(shifted <= 0):
        raise DomainError(f"gamma_cone needs s_j > (j-1)d/2; shifted arguments {shifted}")
    return 0.5 * (alg.ambient_dim - alg.rank) * math.log(2.0 * math.pi) + float(np.sum(gammaln(shifted)))


def gamma_cone(alg, s):
    return math.exp(log_gamma_cone(alg, s))


def log_beta_cone(alg, a, b):
    a = _power_vector(alg, a)
    b = _power_vector(alg, b)
    return log_gamma_cone(alg, a) + log_gamma_cone(alg, b) - log_gamma_cone(alg, a + b)


def beta_cone(alg, a, b):
    """``B_Omega(a, b) = Gamma_Omega(a) Gamma_Omega(b) / Gamma_Omega(a + b)``."""
    return math.exp(log_beta_cone(alg, a, b))


def as_partition(parts):
    """Normalize to a weakly decreasing tuple of positive integers."""
    out = tuple(int(p) for p in parts)
    if any(p < 0 for p in out):
        raise ValueError(f"partition parts must be non-negative: {parts}")
    if any(out[i] < out[i + 1] for i in range(len(out) - 1)):
        raise ValueError(f"partition parts must be weakly decreasing: {parts}")
    return tuple(p for p in out if p > 0)


def pochhammer_cone(alg, s, lam):
    """Generalized Pochhammer symbol as the finite product ``prod_j (s - (j-1)d/2)_{lam_j}``."""
    lam = as_partition(lam)
    out = 1.0
    for j, part in enumerate(lam):
        base = s - j * alg.peirce / 2.0
        for i in range(part):
            out *= base + i
    return out


def partitions(k, max_parts):
    """Partitions of ``k`` with at most ``max_parts`` parts, in reverse-lexicographic order."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return [()]
    out = []

    def rec(remaining, cap, prefix):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        if len(prefix) == max_parts:
            return
        for part in range(min(remaining, cap), 0, -1):
            prefix.append(part)
            rec(remaining - part, part, prefix)
            prefix.pop()

    rec(k, k, [])
    return out


# ---------------------------------------------------------------------------
# Jack / zonal polynomials


def _dominates(kappa, lam):
    a = b = 0
    for i in range(max(len(kappa), len(lam))):
        a += kappa[i] if i < len(kappa) else 0
        b += lam[i] if i < len(lam) else 0
        if a < b:
            return False
    return True


def _hook_norm(kappa, alpha):
    """``prod_{s in kappa} (alpha (a(s) + 1) + l(s))`` with arm ``a`` and leg ``l``."""
    conj = [sum(1 for p in kappa if p > j) for j in range(kappa[0])] if kappa else []
    out = 1.0
    for i, row in enumerate(kappa):
        for j in range(row):
            arm = row - j - 1
            leg = conj[j] - i - 1
            out *= alpha * (arm + 1) + leg
    return out


class _ZonalLayer:
    """C-normalized Jack coefficients for all partitions of ``k`` in ``nvars`` variables."""

    def __init__(self, alpha, nvars, k):
        self.alpha, self.nvars, self.k = alpha, nvars, k
        parts = partitions(k, nvars)
        self.parts = parts
        index = {p: i for i, p in enumerate(parts)}
        size = len(parts)
        padded = [tuple(p) + (0,) * (nvars - len(p)) for p in parts]
        eig = np.array(
            [sum(0.5 * alpha * v * (v - 1) + (nvars - 1 - i) * v for i, v in enumerate(p)) for p in padded]
        )
        # lower[l, m]: coefficient of m_l in the operator applied to m_m (m above l)
        lower = np.zeros((size, size))
        for li, p in enumerate(padded):
            for a_pos in range(nvars):
                for b_pos in range(a_pos + 1, nvars):
                    u, v = p[a_pos], p[b_pos]
                    total = u + v
                    for hi in range(max(u, v) + 1, total + 1):
                        lo = total - hi
                        raised = list(p)
                        raised[a_pos], raised[b_pos] = hi, lo
                        mu = as_partition(sorted(raised, reverse=True))
                        lower[li, index[mu]] += hi - lo
        coeffs = np.zeros((size, size))
        for ki, kappa in enumerate(parts):
            c = np.zeros(size)
            c[ki] = 1.0
            for li in range(ki + 1, size):
                if not _dominates(kappa, parts[li]):
                    continue
                c[li] = lower[li, : li] @ c[: li] / (eig[ki] - eig[li])
            coeffs[ki] = c * (alpha ** k * math.factorial(k) / _hook_norm(kappa, alpha))
        self.coeffs = coeffs
        self.exponents = [np.array(sorted(set(permutations(p))), dtype=float) for p in padded]
        self.at_identity = self.evaluate(np.ones(nvars))

    def monomials(self, x):
        x = np.asarray(x, dtype=float)
        return np.stack(
            [np.sum(np.prod(x[..., None, :] ** e, axis=-1), axis=-1) for e in self.exponents], axis=-1
        )

    def evaluate(self, x):
        """All ``Z_kappa(x)`` for the layer; shape ``(..., size)``."""
        return self.monomials(x) @ self.coeffs.T


_LAYER_CACHE = {}
_LAYER_LOCK = threading.Lock()


def zonal_layer(alpha, nvars, k):
    key = (float(alpha), int(nvars), int(k))
    layer = _LAYER_CACHE.get(key)
    if layer is None:
        with _LAYER_LOCK:
            layer = _LAYER_CACHE.get(key)
            if layer is None:
                layer = _ZonalLayer(*key)
                _LAYER_CACHE[key] = layer
    return layer


def _eig_arg(alg, x):
    if x is None:
        return np.ones(alg.rank)
    if isinstance(x, Element):
        if x.alg != alg:
            raise AlgebraMismatch(f"{x.alg} vs {alg}")
        return eigenvalues(x)
    vals = np.asarray(x, dtype=float).reshape(-1)
    if vals.size != alg.rank:
        raise ValueError(f"eigenvalue tuple must have length {alg.rank}, got {vals.size}")
    return vals


def zonal(alg, lam, x):
    """Zonal polynomial ``Z_lam`` evaluated at an element or eigenvalue tuple."""
    lam = as_partition(lam)
    if len(lam) > alg.rank:
        raise PartitionTooLong(f"partition {lam} has more than {alg.rank} parts")
    vals = _eig_arg(alg, x)
    layer = zonal_layer(2.0 / alg.peirce, alg.rank, sum(lam))
    return float(layer.evaluate(vals)[layer.parts.index(lam)])


# ---------------------------------------------------------------------------
# hypergeometric series


def hypergeom(alg, a, b, x, y=None, policy=None):
    """Truncated ``pFq(a; b; x, y)`` summed in layers of equal degree.

    The series stops once two consecutive degree layers are each below
    ``policy.tail_tol`` relative to the partial sum, or at ``policy.max_degree``.
    """
    policy = policy or TruncationPolicy()
    a = [float(v) for v in np.atleast_1d(a)] if a is not None else []
    b = [float(v) for v in np.atleast_1d(b)] if b is not None else []
    if len(a) > len(b) + 1:
        raise DivergentSeries(f"p={len(a)} > q+1={len(b) + 1}")
    xv = _eig_arg(alg, x)
    yv = None if y is None else _eig_arg(alg, y)
    alpha = 2.0 / alg.peirce
    total = 1.0
    prev_layer = None
    tail = float("inf")
    degree = 0
    converged = False
    for k in range(1, int(policy.max_degree) + 1):
        layer = zonal_layer(alpha, alg.rank, k)
        zx = layer.evaluate(xv)
        zy = None if yv is None else layer.evaluate(yv)
        contribution = 0.0
        for i, kappa in enumerate(layer.parts):
            num = 1.0
            for av in a:
                num *= pochhammer_cone(alg, av, kappa)
            if num == 0.0:
                continue
            den = 1.0
            for bv in b:
                den *= pochhammer_cone(alg, bv, kappa)
            if den == 0.0:
                raise DomainError(f"denominator Pochhammer vanishes at partition {kappa}")
            term = zx[i] if zy is None else zx[i] * zy[i] / layer.at_identity[i]
            contribution += num / den * term
        contribution /= math.factorial(k)
        total += contribution
        degree = k
        scale = max(abs(total), np.finfo(float).tiny)
        cur = abs(contribution) / scale
        if prev_layer is not None:
            tail = max(cur, prev_layer)
            if tail < policy.tail_tol:
                converged = True
                break
        prev_layer = cur
    if not converged:
        tail = max(tail if np.isfinite(tail) else 0.0, prev_layer)
    return SeriesResult(float(total), degree, float(tail), converged)


def det_identity_check(alg, b, x):
    """Closed form ``det(e - x)^(-b)``, the sum of ``1F0(b; x)`` for ``Eig(x) < 1``."""
    vals = _eig_arg(alg, x)
    if np.any(vals >= 1.0):
        raise DomainError(f"eigenvalues must be below 1, got {vals}")
    return float(np.exp(-b * np.sum(np.log1p(-vals))))


def k_average_zonal(alg, lam, y, x, n_samples, rng):
    """Monte Carlo average of ``Z_lam(y * (k x))`` over Haar rotations ``k``.

    Returns ``(mean, standard_error)``; the rotation of ``x`` re-expands its
    eigenvalues on a Haar-distributed Jordan frame.
    """
    from .algebra import frame_element, haar_frame, star

    xi = _eig_arg(alg, x)
    vals = np.empty(n_samples)
    for t in range(n_samples):
        kx = frame_element(haar_frame(alg, rng), xi)
        vals[t] = zonal(alg, lam, star(y, kx))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_samples))

