"""Quaternion and octonion arithmetic on trailing-axis component arrays.

Quaternions are arrays ``(..., 4)`` in the order ``1, i, j, k``. Octonions are
arrays ``(..., 8)`` built by Cayley-Dickson doubling of quaternion pairs
``(p, q)`` with product ``(p1, q1)(p2, q2) = (p1 p2 - conj(q2) q1, q1 conj(p2) + q2 p1)``.
"""

import numpy as np


def qmul(a, b):
    a0, a1, a2, a3 = np.moveaxis(np.asarray(a, dtype=float), -1, 0)
    b0, b1, b2, b3 = np.moveaxis(np.asarray(b, dtype=float), -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def qconj(a):
    a = np.array(a, dtype=float, copy=True)
    a[..., 1:] *= -1.0
    return a


def omul(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p1, q1 = a[..., :4], a[..., 4:]
    p2, q2 = b[..., :4], b[..., 4:]
    first = qmul(p1, p2) - qmul(qconj(q2), q1)
    second = qmul(q1, qconj(p2)) + qmul(q2, p1)
    return np.concatenate([first, second], axis=-1)


def oconj(a):
    a = np.array(a, dtype=float, copy=True)
    a[..., 1:] *= -1.0
    return a


def onorm2(a):
    return np.sum(np.asarray(a, dtype=float) ** 2, axis=-1)
