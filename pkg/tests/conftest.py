"""Shared brute-force oracles, kept deliberately independent of the package
engines they check: plain scipy pmf grids and direct summation only."""

import numpy as np
import pytest
from scipy import stats

from sharp_rosenthal.measures import DiscreteRV, LevyVarianceMeasure
from sharp_rosenthal.poisson import SeriesConfig


@pytest.fixture
def cfg():
    return SeriesConfig(tol=1e-12, max_terms=10**6)


def brute_poisson_abs_central(lam: float, q: float, kmax: int = 200) -> float:
    """Direct summation of E|Pi_lam - lam|^q over k <= kmax via scipy pmf."""
    ks = np.arange(0, kmax + 1)
    return float(stats.poisson.pmf(ks, lam) @ np.abs(ks - lam) ** q)


def brute_skellam_abs(lam1: float, lam2: float, c: float, q: float, kmax: int = 60) -> float:
    """Brute-force double sum of E|c (J - K)|^q over j, k <= kmax."""
    j = np.arange(0, kmax + 1)
    k = np.arange(0, kmax + 1)
    pj = stats.poisson.pmf(j, lam1)
    pk = stats.poisson.pmf(k, lam2)
    vals = np.abs(c * np.subtract.outer(j, k)) ** q
    return float(pj @ vals @ pk)


def brute_triple_poisson_abs(
    c0: float, lam_half: float, c1: float, lam1: float, sign: float, q: float, kmax: int = 40
) -> float:
    """E|c0 (J - K) + sign*c1 (L - lam1)|^q by three nested scipy pmf grids."""
    j = np.arange(0, kmax + 1)
    pj = stats.poisson.pmf(j, lam_half)
    pl = stats.poisson.pmf(j, lam1)
    jj, kk, ll = np.meshgrid(j, j, j, indexing="ij")
    vals = np.abs(c0 * (jj - kk) + sign * c1 * (ll - lam1)) ** q
    w = pj[:, None, None] * pj[None, :, None] * pl[None, None, :]
    return float((w * vals).sum())


def rademacher() -> DiscreteRV:
    return DiscreteRV.rademacher()


def single_atom(u: float, w: float) -> LevyVarianceMeasure:
    return LevyVarianceMeasure([(u, w)])
