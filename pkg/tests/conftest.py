import math

import numpy as np
import pytest
from scipy import integrate, stats

ACCEPTANCE_LINES = []


def record(criterion, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def chi2_gof_2d(samples, logpdf, edges1, edges2, min_expected=5.0):
    """Chi-square goodness of fit for ordered pairs ``s1 > s2`` on a rectangular grid.

    Cell probabilities come from 2-D quadrature of ``exp(logpdf)`` over each
    rectangle cut by the ordering constraint; sparse cells are pooled (smallest
    expected counts first) until each pooled cell expects ``min_expected`` draws.
    Returns ``(statistic, dof, p_value, total_mass)``.
    """
    samples = np.asarray(samples)
    probs, counts = [], []
    for a, b in zip(edges1[:-1], edges1[1:]):
        in1 = (samples[:, 0] >= a) & (samples[:, 0] < b)
        for c, d in zip(edges2[:-1], edges2[1:]):
            if c >= b:
                continue
            mass = integrate.dblquad(
                lambda u, w: math.exp(logpdf(np.array([w, u]))), a, b, c, lambda w, d=d: min(d, w)
            )[0]
            probs.append(mass)
            counts.append(np.sum(in1 & (samples[:, 1] >= c) & (samples[:, 1] < d)))
    probs = np.array(probs)
    expected = probs * len(samples)
    counts = np.array(counts, dtype=float)
    pooled_e, pooled_o = [], []
    acc_e = acc_o = 0.0
    for k in np.argsort(expected):
        acc_e += expected[k]
        acc_o += counts[k]
        if acc_e >= min_expected:
            pooled_e.append(acc_e)
            pooled_o.append(acc_o)
            acc_e = acc_o = 0.0
    pooled_e[-1] += acc_e
    pooled_o[-1] += acc_o
    pooled_e, pooled_o = np.array(pooled_e), np.array(pooled_o)
    stat = float(np.sum((pooled_o - pooled_e) ** 2 / pooled_e))
    dof = len(pooled_e) - 1
    return stat, dof, float(stats.chi2.sf(stat, dof)), float(probs.sum())


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)
