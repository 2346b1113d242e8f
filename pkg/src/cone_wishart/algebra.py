"""Arithmetic, spectral theory and cone geometry for the simple Euclidean Jordan algebras.

Every element is stored as a flat real coordinate vector of length ``n``:

* matrix families (real symmetric, complex Hermitian, quaternion Hermitian):
  the upper triangle in row-major order; a diagonal entry takes one real
  coordinate and an off-diagonal entry takes ``d`` coordinates in the order
  ``1, i, j, k``;
* Lorentz (spin factor) ``R x R^(n-1)``: ``(zeta, x_1, ..., x_(n-1))``;
* octonion Hermitian 3x3 (Albert algebra): ``a11, x12[8], x13[8], a22, x23[8], a33``
  with octonion components in Cayley-Dickson order.

The inner product is the trace form ``<x, y> = tr(x o y)``; in coordinates it
weights diagonal coordinates by 1 and off-diagonal coordinates by 2 (Lorentz:
all coordinates by 2).
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import (
    AlgebraMismatch,
    NonpositiveMinor,
    NotInCone,
    SingularElement,
    Unsupported,
)
from .hypercomplex import oconj, omul

CONE_RTOL = 1e-12
SINGULAR_TOL = 1e-12


class Family(str, Enum):
    REAL_SYM = "real-sym"
    COMPLEX_HERM = "complex-herm"
    QUATERNION_HERM = "quaternion-herm"
    LORENTZ = "lorentz"
    OCTONION = "octonion"


_MATRIX_PEIRCE = {Family.REAL_SYM: 1, Family.COMPLEX_HERM: 2, Family.QUATERNION_HERM: 4}


@dataclass(frozen=True)
class AlgebraDescriptor:
    """One of the five simple Euclidean Jordan algebras, with ``n = r + r(r-1)d/2``."""

    family: Family
    rank: int
    ambient_dim: int
    peirce: int

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        r, n, d = int(self.rank), int(self.ambient_dim), int(self.peirce)
        if r < 1 or n < 1 or d < 1:
            raise ValueError(f"rank, ambient_dim and peirce must be positive, got {(r, n, d)}")
        if fam in _MATRIX_PEIRCE:
            if d != _MATRIX_PEIRCE[fam]:
                raise ValueError(f"{fam.value} requires d={_MATRIX_PEIRCE[fam]}, got {d}")
        elif fam is Family.LORENTZ:
            if r != 2 or n <= 2 or d != n - 2:
                raise ValueError(f"lorentz requires r=2, n>2, d=n-2, got r={r}, n={n}, d={d}")
        elif fam is Family.OCTONION:
            if (r, n, d) != (3, 27, 8):
                raise ValueError(f"octonion requires (r, n, d) = (3, 27, 8), got {(r, n, d)}")
        if n != r + r * (r - 1) * d // 2:
            raise ValueError(f"inconsistent descriptor: n={n} but r + r(r-1)d/2 = {r + r * (r - 1) * d // 2}")

    @property
    def n(self):
        return self.ambient_dim

    @property
    def r(self):
        return self.rank

    @property
    def d(self):
        return self.peirce

    @property
    def n_over_r(self):
        return self.ambient_dim / self.rank

    @classmethod
    def real_sym(cls, r):
        return cls(Family.REAL_SYM, r, r * (r + 1) // 2, 1)

    @classmethod
    def complex_herm(cls, r):
        return cls(Family.COMPLEX_HERM, r, r * r, 2)

    @classmethod
    def quaternion_herm(cls, r):
        return cls(Family.QUATERNION_HERM, r, r * (2 * r - 1), 4)

    @classmethod
    def lorentz(cls, n):
        return cls(Family.LORENTZ, 2, n, n - 2)

    @classmethod
    def octonion(cls):
        return cls(Family.OCTONION, 3, 27, 8)

    @classmethod
    def build(cls, family, rank=None, ambient=None):
        """Construct from a family name plus whichever of rank/ambient is meaningful."""
        fam = Family(family)
        if fam is Family.REAL_SYM:
            alg = cls.real_sym(int(rank))
        elif fam is Family.COMPLEX_HERM:
            alg = cls.complex_herm(int(rank))
        elif fam is Family.QUATERNION_HERM:
            alg = cls.quaternion_herm(int(rank))
        elif fam is Family.LORENTZ:
            if ambient is None:
                raise ValueError("lorentz algebra needs the ambient dimension n")
            alg = cls.lorentz(int(ambient))
        else:
            alg = cls.octonion()
        if rank is not None and int(rank) != alg.rank:
            raise ValueError(f"rank {rank} inconsistent with {fam.value}")
        if ambient is not None and int(ambient) != alg.ambient_dim:
            raise ValueError(f"ambient {ambient} inconsistent with {fam.value} of rank {alg.rank}")
        return alg

    def to_dict(self):
        return {"family": self.family.value, "rank": self.rank, "ambient": self.ambient_dim}

    @classmethod
    def from_dict(cls, data):
        return cls.build(data["family"], data.get("rank"), data.get("ambient"))

    def __str__(self):
        return f"{self.family.value}(r={self.rank}, n={self.ambient_dim}, d={self.peirce})"


@dataclass(frozen=True, eq=False)
class Element:
    """Immutable point of the algebra, stored as flat real coordinates."""

    alg: AlgebraDescriptor
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float).reshape(-1)
        if c.shape != (self.alg.ambient_dim,):
            raise ValueError(f"{self.alg} expects {self.alg.ambient_dim} coordinates, got {c.size}")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def _check(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        if other.alg != self.alg:
            raise AlgebraMismatch(f"{self.alg} vs {other.alg}")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Element(self.alg, self.coords + other.coords)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Element(self.alg, self.coords - other.coords)

    def __neg__(self):
        return Element(self.alg, -self.coords)

    def __mul__(self, scalar):
        if isinstance(scalar, Element):
            return NotImplemented
        return Element(self.alg, float(scalar) * self.coords)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Element(self.alg, self.coords / float(scalar))

    def __repr__(self):
        return f"Element({self.alg}, {np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    frame: tuple | None


# ---------------------------------------------------------------------------
# family backends; all coordinate methods accept batches (..., n)


def quaternion_to_complex(q):
    """Complex embedding of quaternion matrices ``(..., a, b, 4) -> (..., 2a, 2b)``.

    ``z + w j`` maps to ``[[z, w], [-conj(w), conj(z)]]`` blockwise, which is an
    injective *-homomorphism.
    """
    q = np.asarray(q, dtype=float)
    z = q[..., 0] + 1j * q[..., 1]
    w = q[..., 2] + 1j * q[..., 3]
    top = np.concatenate([z, w], axis=-1)
    bottom = np.concatenate([-np.conj(w), np.conj(z)], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def _quaternion_partner(v):
    """Second complex eigenvector spanning the same quaternionic line as ``v``."""
    m = v.shape[0] // 2
    return np.concatenate([np.conj(v[m:]), -np.conj(v[:m])])


class _MatrixBackend:
    has_frames = True

    def __init__(self, alg):
        self.alg = alg
        r, d = alg.rank, alg.peirce
        self.r, self.d = r, d
        diag, off, pairs = [], [], []
        pos = 0
        for i in range(r):
            for j in range(i, r):
                if i == j:
                    diag.append(pos)
                    pos += 1
                else:
                    off.append(list(range(pos, pos + d)))
                    pairs.append((i, j))
                    pos += d
        self.diag_pos = np.array(diag, dtype=int)
        self.off_pos = np.array(off, dtype=int).reshape(-1, d)
        self.pairs = np.array(pairs, dtype=int).reshape(-1, 2)
        w = np.ones(alg.ambient_dim)
        w[self.off_pos.reshape(-1)] = 2.0
        self.weights = w
        self.native_dim = 2 * r if d == 4 else r

    # -- conversions
    def to_dmat(self, coords):
        coords = np.asarray(coords, dtype=float)
        batch = coords.shape[:-1]
        r, d = self.r, self.d
        a = np.zeros(batch + (r, r, d))
        idx = np.arange(r)
        a[..., idx, idx, 0] = coords[..., self.diag_pos]
        if len(self.pairs):
            i, j = self.pairs[:, 0], self.pairs[:, 1]
            vals = coords[..., self.off_pos]
            a[..., i, j, :] = vals
            conj = vals.copy()
            conj[..., 1:] *= -1.0
            a[..., j, i, :] = conj
        return a

    def dmat_to_native(self, a):
        if self.d == 1:
            return a[..., 0]
        if self.d == 2:
            return a[..., 0] + 1j * a[..., 1]
        return quaternion_to_complex(a)

    def to_native(self, coords):
        return self.dmat_to_native(self.to_dmat(coords))

    def from_native(self, m):
        m = np.asarray(m)
        r, d = self.r, self.d
        batch = m.shape[:-2]
        out = np.empty(batch + (self.alg.ambient_dim,))
        idx = np.arange(r)
        if d == 4:
            z = m[..., :r, :r]
            w = m[..., :r, r:]
            out[..., self.diag_pos] = z[..., idx, idx].real
            if len(self.pairs):
                i, j = self.pairs[:, 0], self.pairs[:, 1]
                comps = np.stack([z[..., i, j].real, z[..., i, j].imag, w[..., i, j].real, w[..., i, j].imag], axis=-1)
                out[..., self.off_pos] = comps
            return out
        out[..., self.diag_pos] = np.real(m[..., idx, idx])
        if len(self.pairs):
            i, j = self.pairs[:, 0], self.pairs[:, 1]
            if d == 1:
                out[..., self.off_pos[:, 0]] = np.real(m[..., i, j])
            else:
                vals = m[..., i, j]
                out[..., self.off_pos] = np.stack([vals.real, vals.imag], axis=-1)
        return out

    # -- algebra
    def identity(self):
        c = np.zeros(self.alg.ambient_dim)
        c[self.diag_pos] = 1.0
        return c

    def product(self, x, y):
        a, b = self.to_native(x), self.to_native(y)
        return self.from_native(0.5 * (a @ b + b @ a))

    def quad(self, x, y):
        a, b = self.to_native(x), self.to_native(y)
        return self.from_native(a @ b @ a)

    def trace(self, x):
        return np.sum(np.asarray(x)[..., self.diag_pos], axis=-1)

    def eigvals(self, x):
        vals = np.linalg.eigvalsh(self.to_native(x))
        if self.d == 4:
            vals = vals[..., ::2]
        return vals[..., ::-1]

    def inverse(self, x):
        return self.from_native(np.linalg.inv(self.to_native(x)))

    def apply(self, x, f):
        vals, vecs = np.linalg.eigh(self.to_native(x))
        fv = f(vals)
        m = (vecs * fv[..., None, :]) @ np.conj(np.swapaxes(vecs, -1, -2))
        return self.from_native(m)

    def frame(self, x):
        vals, vecs = np.linalg.eigh(self.to_native(x))
        vals, vecs = vals[::-1], vecs[:, ::-1]
        projectors = []
        if self.d == 4:
            # eigenvalues come in pairs; build each quaternionic line from one
            # vector and its partner, skipping vectors already spanned
            chosen = []
            for k in range(vecs.shape[1]):
                v = vecs[:, k].copy()
                for u in chosen:
                    v = v - u * np.vdot(u, v)
                nrm = np.linalg.norm(v)
                if nrm < 0.5:
                    continue
                v = v / nrm
                w = _quaternion_partner(v)
                for u in chosen:
                    w = w - u * np.vdot(u, w)
                w = w / np.linalg.norm(w)
                chosen.extend([v, w])
                projectors.append(np.outer(v, np.conj(v)) + np.outer(w, np.conj(w)))
                if len(projectors) == self.r:
                    break
            lam = vals[::2].real
        else:
            lam = vals.real
            for k in range(self.r):
                v = vecs[:, k]
                projectors.append(np.outer(v, np.conj(v)))
        return np.asarray(lam, dtype=float), [self.from_native(p) for p in projectors]

    def leading_minor(self, x, j):
        m = self.to_native(x)
        if self.d == 4:
            idx = np.r_[0:j, self.r:self.r + j]
            vals = np.linalg.eigvalsh(m[np.ix_(idx, idx)])[::2]
        else:
            vals = np.linalg.eigvalsh(m[:j, :j])
        return float(np.prod(vals))


class _LorentzBackend:
    has_frames = True

    def __init__(self, alg):
        self.alg = alg
        self.r = 2
        self.weights = np.full(alg.ambient_dim, 2.0)

    def identity(self):
        c = np.zeros(self.alg.ambient_dim)
        c[0] = 1.0
        return c

    def product(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        z0 = x[..., 0] * y[..., 0] + np.sum(x[..., 1:] * y[..., 1:], axis=-1)
        zv = x[..., :1] * y[..., 1:] + y[..., :1] * x[..., 1:]
        return np.concatenate([z0[..., None], zv], axis=-1)

    def quad(self, x, y):
        xy = self.product(x, y)
        return 2.0 * self.product(x, xy) - self.product(self.product(x, x), y)

    def trace(self, x):
        return 2.0 * np.asarray(x)[..., 0]

    def eigvals(self, x):
        x = np.asarray(x, dtype=float)
        nv = np.linalg.norm(x[..., 1:], axis=-1)
        return np.stack([x[..., 0] + nv, x[..., 0] - nv], axis=-1)

    def inverse(self, x):
        x = np.asarray(x, dtype=float)
        det = x[..., 0] ** 2 - np.sum(x[..., 1:] ** 2, axis=-1)
        out = np.concatenate([x[..., :1], -x[..., 1:]], axis=-1)
        return out / det[..., None]

    def _direction(self, x):
        v = np.asarray(x, dtype=float)[1:]
        nv = np.linalg.norm(v)
        if nv == 0.0:
            u = np.zeros_like(v)
            u[0] = 1.0
            return u
        return v / nv

    def frame(self, x):
        u = self._direction(x)
        cp = 0.5 * np.concatenate([[1.0], u])
        cm = 0.5 * np.concatenate([[1.0], -u])
        return self.eigvals(x), [cp, cm]

    def apply(self, x, f):
        lam, (cp, cm) = self.frame(x)
        fl = f(lam)
        return fl[0] * cp + fl[1] * cm

    def leading_minor(self, x, j):
        x = np.asarray(x, dtype=float)
        if j == 1:
            return float(x[0] + x[1])
        return float(x[0] ** 2 - np.sum(x[1:] ** 2))


class _OctonionBackend:
    has_frames = False

    _DIAG = np.array([0, 17, 26])
    _X12 = np.arange(1, 9)
    _X13 = np.arange(9, 17)
    _X23 = np.arange(18, 26)

    def __init__(self, alg):
        self.alg = alg
        self.r = 3
        w = np.full(27, 2.0)
        w[self._DIAG] = 1.0
        self.weights = w

    def to_native(self, coords):
        coords = np.asarray(coords, dtype=float)
        batch = coords.shape[:-1]
        a = np.zeros(batch + (3, 3, 8))
        for k in range(3):
            a[..., k, k, 0] = coords[..., self._DIAG[k]]
        for (i, j), pos in (((0, 1), self._X12), ((0, 2), self._X13), ((1, 2), self._X23)):
            a[..., i, j, :] = coords[..., pos]
            a[..., j, i, :] = oconj(coords[..., pos])
        return a

    def from_native(self, a):
        a = np.asarray(a, dtype=float)
        out = np.empty(a.shape[:-3] + (27,))
        for k in range(3):
            out[..., self._DIAG[k]] = a[..., k, k, 0]
        out[..., self._X12] = a[..., 0, 1, :]
        out[..., self._X13] = a[..., 0, 2, :]
        out[..., self._X23] = a[..., 1, 2, :]
        return out

    def identity(self):
        c = np.zeros(27)
        c[self._DIAG] = 1.0
        return c

    @staticmethod
    def _matmul(a, b):
        # (AB)_ik = sum_j A_ij B_jk with octonion products
        return np.sum(omul(a[..., :, :, None, :], b[..., None, :, :, :]), axis=-3)

    def product(self, x, y):
        a, b = self.to_native(x), self.to_native(y)
        return self.from_native(0.5 * (self._matmul(a, b) + self._matmul(b, a)))

    def quad(self, x, y):
        xy = self.product(x, y)
        return 2.0 * self.product(x, xy) - self.product(self.product(x, x), y)

    def trace(self, x):
        return np.sum(np.asarray(x)[..., self._DIAG], axis=-1)

    def det(self, x):
        x = np.asarray(x, dtype=float)
        a, b, c = (x[..., k] for k in self._DIAG)
        z = x[..., self._X12]
        y = oconj(x[..., self._X13])  # X31
        w = x[..., self._X23]
        nz, ny, nw = (np.sum(t ** 2, axis=-1) for t in (z, y, w))
        re_zwy = omul(omul(z, w), y)[..., 0]
        return a * b * c - a * nw - b * ny - c * nz + 2.0 * re_zwy

    def char_coeffs(self, x):
        x = np.asarray(x, dtype=float)
        t = self.trace(x)
        t2 = np.sum(self.weights * x * x, axis=-1)
        return t, 0.5 * (t * t - t2), self.det(x)

    def eigvals(self, x):
        t, s, det = self.char_coeffs(x)
        # roots of l^3 - t l^2 + s l - det, all real for Hermitian x
        shift = t / 3.0
        p = s - t * t / 3.0
        q = -2.0 * t ** 3 / 27.0 + t * s / 3.0 - det
        p = np.minimum(p, 0.0)
        m = 2.0 * np.sqrt(-p / 3.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            arg = np.where(m > 0, 3.0 * q / (p * m), 0.0)
        theta = np.arccos(np.clip(arg, -1.0, 1.0)) / 3.0
        k = np.arange(3)
        roots = shift[..., None] + m[..., None] * np.cos(theta[..., None] - 2.0 * np.pi * k / 3.0)
        # one Newton polish step per root
        f = ((roots - t[..., None]) * roots + s[..., None]) * roots - det[..., None]
        fp = (3.0 * roots - 2.0 * t[..., None]) * roots + s[..., None]
        safe = np.abs(fp) > 1e-8 * (1.0 + np.abs(roots)) ** 2
        roots = np.where(safe, roots - f / np.where(safe, fp, 1.0), roots)
        return -np.sort(-roots, axis=-1)

    def inverse(self, x):
        x = np.asarray(x, dtype=float)
        t, s, det = self.char_coeffs(x)
        x2 = self.product(x, x)
        num = x2 - t[..., None] * x + s[..., None] * self.identity()
        return num / det[..., None]

    def sqrt(self, x):
        # x generates an associative subalgebra, so sqrt(x) is the Newton
        # interpolation polynomial of sqrt at the eigenvalues; the divided
        # differences of sqrt have closed forms that stay stable near ties
        x = np.asarray(x, dtype=float)
        lam = np.maximum(self.eigvals(x), 0.0)
        s = np.sqrt(lam)
        f12 = 1.0 / (s[0] + s[1])
        f123 = -1.0 / ((s[0] + s[1]) * (s[0] + s[2]) * (s[1] + s[2]))
        e = self.identity()
        a = x - lam[0] * e
        b = x - lam[1] * e
        return s[0] * e + f12 * a + f123 * self.product(a, b)


@lru_cache(maxsize=None)
def backend(alg):
    if alg.family in _MATRIX_PEIRCE:
        return _MatrixBackend(alg)
    if alg.family is Family.LORENTZ:
        return _LorentzBackend(alg)
    return _OctonionBackend(alg)


# ---------------------------------------------------------------------------
# public operations


def _same(a, b):
    if a.alg != b.alg:
        raise AlgebraMismatch(f"{a.alg} vs {b.alg}")


def identity(alg):
    return Element(alg, backend(alg).identity())


def zero(alg):
    return Element(alg, np.zeros(alg.ambient_dim))


def jordan_product(a, b):
    _same(a, b)
    return Element(a.alg, backend(a.alg).product(a.coords, b.coords))


def square(x):
    return jordan_product(x, x)


def inner(a, b):
    """Trace-form inner product ``tr(a o b)``."""
    _same(a, b)
    return float(np.sum(backend(a.alg).weights * a.coords * b.coords))


def norm(x):
    return float(np.sqrt(inner(x, x)))


def eigenvalues(x):
    """Eigenvalues in weakly decreasing order."""
    return np.asarray(backend(x.alg).eigvals(x.coords), dtype=float)


def eigenvalues_batch(alg, coords):
    return np.asarray(backend(alg).eigvals(np.asarray(coords, dtype=float)), dtype=float)


def trace(x):
    return float(backend(x.alg).trace(x.coords))


def determinant(x):
    b = backend(x.alg)
    if x.alg.family is Family.OCTONION:
        return float(b.det(x.coords))
    if x.alg.family is Family.LORENTZ:
        return float(x.coords[0] ** 2 - np.sum(x.coords[1:] ** 2))
    return float(np.prod(eigenvalues(x)))


def log_det_batch(alg, coords):
    vals = eigenvalues_batch(alg, coords)
    return np.sum(np.log(vals), axis=-1)


def rel_eigenvalues_batch(alg, y_coords, x_coords):
    """Rows of ``Eig(y|x)`` (decreasing) for batches of coordinate vectors, ``x`` in the cone."""
    y_coords = np.atleast_2d(np.asarray(y_coords, dtype=float))
    x_coords = np.atleast_2d(np.asarray(x_coords, dtype=float))
    b = backend(alg)
    if alg.family in _MATRIX_PEIRCE:
        chol = np.linalg.cholesky(b.to_native(x_coords))
        left = np.linalg.solve(chol, b.to_native(y_coords))
        m = np.linalg.solve(chol, np.conj(np.swapaxes(left, -1, -2)))
        m = 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))
        vals = np.linalg.eigvalsh(m)
        if alg.peirce == 4:
            vals = vals[..., ::2]
        return vals[..., ::-1]
    if alg.family is Family.LORENTZ:
        # roots of det(l x - y) = A l^2 - 2 B l + C
        a = x_coords[:, 0] ** 2 - np.sum(x_coords[:, 1:] ** 2, axis=1)
        bq = x_coords[:, 0] * y_coords[:, 0] - np.sum(x_coords[:, 1:] * y_coords[:, 1:], axis=1)
        c = y_coords[:, 0] ** 2 - np.sum(y_coords[:, 1:] ** 2, axis=1)
        disc = np.sqrt(np.maximum(bq * bq - a * c, 0.0))
        return np.stack([(bq + disc) / a, (bq - disc) / a], axis=1)
    return np.stack([rel_eigenvalues(Element(alg, yr), Element(alg, xr)) for yr, xr in zip(y_coords, x_coords)])


def in_cone(x, rtol=CONE_RTOL):
    vals = eigenvalues(x)
    return bool(vals[-1] > rtol * max(1.0, vals[0]))


def require_cone(x, name="x"):
    vals = eigenvalues(x)
    if not vals[-1] > CONE_RTOL * max(1.0, vals[0]):
        raise NotInCone(f"{name} is not in the open cone (eigenvalues {vals})")
    return vals


def inverse(x, tol=SINGULAR_TOL):
    if abs(determinant(x)) <= tol:
        raise SingularElement(f"|det| <= {tol}")
    return Element(x.alg, backend(x.alg).inverse(x.coords))


def quad_rep(x, y):
    """``P(x) y = 2 x(xy) - x^2 y``; equals ``x y x`` for the matrix families."""
    _same(x, y)
    return Element(x.alg, backend(x.alg).quad(x.coords, y.coords))


def quad_rep_matrix(x):
    """Matrix of the linear map ``P(x)`` on the coordinate basis."""
    b = backend(x.alg)
    basis = np.eye(x.alg.ambient_dim)
    cols = [b.quad(x.coords, basis[k]) for k in range(x.alg.ambient_dim)]
    return np.stack(cols, axis=1)


def spectral_apply(x, f):
    """Apply a scalar function through the spectral decomposition."""
    if x.alg.family is Family.OCTONION:
        raise Unsupported("functional calculus on the octonion family is limited to sqrt and inverse")
    return Element(x.alg, backend(x.alg).apply(x.coords, f))


def sqrt_cone(x):
    require_cone(x)
    if x.alg.family is Family.OCTONION:
        return Element(x.alg, backend(x.alg).sqrt(x.coords))
    return spectral_apply(x, np.sqrt)


def star(x, y):
    """``x * y = P(x^(1/2)) y`` for ``x`` in the cone."""
    _same(x, y)
    return quad_rep(sqrt_cone(x), y)


def spectral(x):
    b = backend(x.alg)
    if not b.has_frames:
        return SpectralDecomposition(eigenvalues(x), None)
    lam, frame = b.frame(x.coords)
    return SpectralDecomposition(np.asarray(lam, dtype=float), tuple(Element(x.alg, c) for c in frame))


def rel_eigenvalues(y, x):
    """``Eig(y|x)``: roots of ``det(l x - y)``, i.e. eigenvalues of ``x^{-1} * y``."""
    _same(x, y)
    require_cone(x, "x")
    return eigenvalues(star(inverse(x), y))


def principal_power(x, s):
    """Generalized power ``Delta_s(x) = prod_j Delta_j(x)^(s_j - s_(j+1))`` with ``s_(r+1) = 0``."""
    alg = x.alg
    if alg.family is Family.OCTONION:
        raise Unsupported("principal minors are not provided for the octonion family")
    s = np.broadcast_to(np.asarray(s, dtype=float), (alg.rank,))
    b = backend(alg)
    minors = np.array([b.leading_minor(x.coords, j) for j in range(1, alg.rank + 1)])
    if np.any(minors <= 0):
        raise NonpositiveMinor(f"leading principal minors {minors}")
    exps = s - np.append(s[1:], 0.0)
    return float(np.exp(np.sum(exps * np.log(minors))))


def frame_element(frame, values):
    """``sum_j values[j] c_j`` for a Jordan frame."""
    out = np.zeros_like(frame[0].coords)
    for v, c in zip(values, frame):
        out = out + float(v) * c.coords
    return Element(frame[0].alg, out)


def standard_frame(alg):
    """Diagonal frame ``E_11, ..., E_rr`` (Lorentz: ``(1, +-e_1)/2``)."""
    if alg.family is Family.OCTONION:
        b = backend(alg)
        out = []
        for k in range(3):
            c = np.zeros(27)
            c[b._DIAG[k]] = 1.0
            out.append(Element(alg, c))
        return out
    if alg.family is Family.LORENTZ:
        u = np.zeros(alg.ambient_dim - 1)
        u[0] = 1.0
        return [Element(alg, 0.5 * np.r_[1.0, u]), Element(alg, 0.5 * np.r_[1.0, -u])]
    b = backend(alg)
    out = []
    for k in range(alg.rank):
        c = np.zeros(alg.ambient_dim)
        c[b.diag_pos[k]] = 1.0
        out.append(Element(alg, c))
    return out


def _haar_unitary(alg, rng):
    r, d = alg.rank, alg.peirce
    if d == 1:
        g = rng.standard_normal((r, r))
    elif d == 2:
        g = rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))
    else:
        # quaternionic Gram-Schmidt on complex-embedded columns
        g = quaternion_to_complex(rng.standard_normal((r, r, 4)))
        cols = []
        for k in range(r):
            v = g[:, k].copy()
            for u in cols:
                v = v - u * np.vdot(u, v)
            v = v / np.linalg.norm(v)
            w = _quaternion_partner(v)
            for u in cols:
                w = w - u * np.vdot(u, w)
            w = w / np.linalg.norm(w)
            cols.extend([v, w])
        return cols
    q, rr = np.linalg.qr(g)
    ph = np.diagonal(rr)
    ph = ph / np.abs(ph)
    q = q * ph[None, :]
    return [q[:, k] for k in range(r)]


def haar_frame(alg, rng):
    """A Jordan frame drawn from the K-invariant (Haar) law."""
    if alg.family is Family.OCTONION:
        raise Unsupported("Haar sampling on F4 is not provided")
    if alg.family is Family.LORENTZ:
        u = rng.standard_normal(alg.ambient_dim - 1)
        u /= np.linalg.norm(u)
        return [Element(alg, 0.5 * np.r_[1.0, u]), Element(alg, 0.5 * np.r_[1.0, -u])]
    b = backend(alg)
    cols = _haar_unitary(alg, rng)
    if alg.peirce == 4:
        projs = [np.outer(cols[2 * k], np.conj(cols[2 * k])) + np.outer(cols[2 * k + 1], np.conj(cols[2 * k + 1]))
                 for k in range(alg.rank)]
    else:
        projs = [np.outer(c, np.conj(c)) for c in cols]
    return [Element(alg, b.from_native(p)) for p in projs]


def haar_directions(n_minus_1, size, rng):
    """Uniform unit vectors on the sphere ``S^(n-2)``; rows of the returned array."""
    u = rng.standard_normal((size, n_minus_1))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def realify(x):
    """Real symmetric block realification of a complex or quaternion Hermitian element."""
    alg = x.alg
    if alg.family not in (Family.COMPLEX_HERM, Family.QUATERNION_HERM):
        raise Unsupported("realify applies to complex and quaternion Hermitian elements")
    a = backend(alg).to_dmat(x.coords)
    if alg.family is Family.COMPLEX_HERM:
        A, B = a[..., 0], a[..., 1]
        return np.block([[A, -B], [B, A]])
    A, B, C, D = (a[..., k] for k in range(4))
    return np.block([
        [A, -B, -C, -D],
        [B, A, -D, C],
        [C, D, A, -B],
        [D, -C, B, A],
    ])


# ---------------------------------------------------------------------------
# matrix views and random elements


def to_matrix(x):
    """D-valued matrix view: real/complex ``(r, r)``, quaternion ``(r, r, 4)``, octonion ``(3, 3, 8)``.

    Lorentz elements are returned as their coordinate vector.
    """
    alg = x.alg
    b = backend(alg)
    if alg.family is Family.LORENTZ:
        return x.coords.copy()
    if alg.family is Family.OCTONION:
        return b.to_native(x.coords)
    a = b.to_dmat(x.coords)
    if alg.peirce == 1:
        return a[..., 0]
    if alg.peirce == 2:
        return a[..., 0] + 1j * a[..., 1]
    return a


def from_matrix(alg, m, atol=0.0):
    """Inverse of :func:`to_matrix`; rejects non-Hermitian input instead of repairing it."""
    from .errors import SchemaError

    b = backend(alg)
    if alg.family is Family.LORENTZ:
        return Element(alg, np.asarray(m, dtype=float))
    r = alg.rank
    if alg.family is Family.OCTONION:
        a = np.asarray(m, dtype=float)
        comps = 8
    elif alg.peirce == 2:
        m = np.asarray(m)
        if np.iscomplexobj(m) or m.shape == (r, r):
            m = m.astype(complex)
            a = np.stack([m.real, m.imag], axis=-1)
        else:
            a = m.astype(float)
        comps = 2
    elif alg.peirce == 1:
        a = np.asarray(m, dtype=float)[..., None]
        comps = 1
    else:
        a = np.asarray(m, dtype=float)
        comps = 4
    if a.shape != (r, r, comps):
        raise SchemaError(f"expected matrix of shape {(r, r, comps)}, got {a.shape}")
    conj_t = np.swapaxes(a, 0, 1).copy()
    conj_t[..., 1:] *= -1.0
    if np.max(np.abs(a - conj_t)) > atol:
        raise SchemaError("matrix is not Hermitian")
    if alg.family is Family.OCTONION:
        return Element(alg, b.from_native(a))
    return Element(alg, b.from_native(b.dmat_to_native(a)))


def lorentz_element(zeta, x):
    x = np.asarray(x, dtype=float).reshape(-1)
    alg = AlgebraDescriptor.lorentz(x.size + 1)
    return Element(alg, np.r_[float(zeta), x])


def diagonal_element(alg, values):
    """``sum_j values[j] c_j`` over the standard frame."""
    return frame_element(standard_frame(alg), values)


def random_element(alg, rng, scale=1.0):
    return Element(alg, scale * rng.standard_normal(alg.ambient_dim))


def random_cone_element(alg, rng, scale=1.0, shift=0.5):
    """``y^2 + shift e`` for a Gaussian ``y``; always inside the cone."""
    y = random_element(alg, rng, scale)
    return Element(alg, backend(alg).product(y.coords, y.coords) + shift * backend(alg).identity())
