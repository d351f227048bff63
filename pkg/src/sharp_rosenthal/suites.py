"""Batch verification suites behind the command-line ``verify`` command.

Each suite returns a list of :class:`CaseReport` rows, one JSONL line per
case; the fuzz suites derive per-case seeds as seed + index so batches can
be reproduced and sharded.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .bounds import even_p_bound, q_scan
from .errors import InfeasiblePath
from .measures import DiscreteRV, SignedAtomMeasure, LevyVarianceMeasure
from .poisson import DEFAULT_CONFIG, SeriesConfig
from .variation import PerturbationPath, first_variation, moment_along_path, second_variation
from .verify import (
    CaseReport,
    RVSequence,
    accompanying_sequence_moment,
    check_domination,
    check_rosenthal,
    random_domination_sequence,
    random_zero_mean_rv,
)

__all__ = [
    "fuzz_suite",
    "domination_suite",
    "tightness_suite",
    "variation_suite",
    "qscan_suite",
    "fd_first_derivative",
    "fd_second_derivative",
    "random_variation_case",
]

#: Finite-difference steps for the variational oracle; Richardson

#: extrapolation combines the two.
FD_STEPS_FIRST = (1e-3, 1e-4)
FD_STEP_SECOND = 1e-2

FIRST_VARIATION_RTOL = 1e-5
SECOND_VARIATION_RTOL = 1e-4


def _random_sequence(seed: int, max_members: int = 4) -> RVSequence:
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, max_members + 1))
    member_seeds = rng.integers(0, 2**62, size=k)
    return RVSequence([random_zero_mean_rv(int(s)) for s in member_seeds])


def fuzz_suite(
    cases: int,
    seed: int,
    p: float,
    q: Optional[float] = None,
    cfg: SeriesConfig = DEFAULT_CONFIG,
) -> list[CaseReport]:
    """Random zero-mean sequences against the exact bound at (p, q)."""
    if q is None:
        q = p
    out = []
    for i in range(cases):
        case_seed = seed + i
        seq = _random_sequence(case_seed)
        out.append(
            check_rosenthal(seq, p, q, cfg=cfg, case_id=f"fuzz-{p}-{q}-{i}", seed=case_seed)
        )
    return out


def domination_suite(
    cases: int, seed: int, q: float, cfg: SeriesConfig = DEFAULT_CONFIG
) -> list[CaseReport]:
    """Random shared-pool sequences against the accompanying-law bound."""
    out = []
    for i in range(cases):
        case_seed = seed + i
        seq = random_domination_sequence(case_seed)
        out.append(check_domination(seq, q, cfg, case_id=f"dom-{q}-{i}", seed=case_seed))
    return out


def tightness_suite(
    p: int,
    A: float = 1.0,
    B: float = 1.0,
    powers: range = range(4, 13),
    gap_budget: float = 0.02,
    cfg: SeriesConfig = DEFAULT_CONFIG,
) -> list[CaseReport]:
    """Near-extremal array moments climbing to the even-p bound.

    One case per n = 2^k plus a trailing monotonicity case; the final gap
    must be under ``gap_budget`` relative and no gap may grow along n.
    """
    bound = even_p_bound(p, A, B).value
    gaps = []
    out = []
    for k in powers:
        n = 2**k
        moment = accompanying_sequence_moment(float(p), A, B, n, cfg)
        gap = bound - moment
        gaps.append(gap)
        status = "pass" if moment <= bound + 1e-10 * bound else "fail"
        out.append(CaseReport(f"tight-{p}-n{n}", n, float(p), float(p), moment, bound, gap, status))
    monotone = all(g2 <= g1 + 1e-10 for g1, g2 in zip(gaps, gaps[1:]))
    final_ok = gaps[-1] < gap_budget * bound
    out.append(
        CaseReport(
            f"tight-{p}-trend",
            0,
            float(p),
            float(p),
            gaps[-1] / bound,
            gap_budget,
            gap_budget - gaps[-1] / bound,
            "pass" if (monotone and final_ok) else "fail",
        )
    )
    return out


def random_variation_case(seed: int, order: int = 1):
    """A seeded (path, q, X) triple with two-sided feasibility near t = 0.

    Single- or two-atom base measures, perturbation directions touching the
    base locations (plus occasionally a Gaussian injection at 0), and
    exponents away from the q = 2 edge where the s-integrand loses
    smoothness.
    """
    rng = np.random.default_rng(seed)
    q = float(rng.uniform(2.6, 8.0)) if order == 1 else float(rng.uniform(4.5, 8.0))
    u0 = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0))
    w0 = float(rng.uniform(0.5, 2.0))
    atoms = [(u0, w0)]
    if rng.random() < 0.4:
        atoms.append((float(-np.sign(u0) * rng.uniform(0.5, 2.0)), float(rng.uniform(0.5, 2.0))))
    base = LevyVarianceMeasure(atoms)
    w_min = min(w for _, w in atoms)
    direction_atoms = [(u, float(rng.uniform(-1.0, 1.0)) * w_min) for u, _ in atoms]
    if rng.random() < 0.3:
        direction_atoms.append((0.0, float(rng.uniform(0.1, 1.0))))
    direction = SignedAtomMeasure(direction_atoms)
    if rng.random() < 0.5:
        X = DiscreteRV.delta(0.0)
    else:
        X = DiscreteRV.two_point_zero_mean(-float(rng.uniform(0.3, 1.5)), float(rng.uniform(0.3, 1.5)))
    path = PerturbationPath(base, direction, t_max=0.4)
    return path, q, X


def fd_first_derivative(
    path: PerturbationPath,
    q: float,
    X: DiscreteRV,
    cfg: SeriesConfig = DEFAULT_CONFIG,
    kind: str = "abs",
) -> float:
    """Richardson-extrapolated finite difference of the path moment at t=0.

    Central differences where H - t*Delta stays nonnegative for the probe
    steps; one-sided forward differences when the path is boundary
    constrained (the identity is a right-hand derivative anyway).
    """
    h1, h2 = FD_STEPS_FIRST

    def f(t: float) -> float:
        return moment_along_path(path, q, X, t, cfg, kind)

    try:
        path.measure_at(-h1)
        two_sided = True
    except InfeasiblePath:
        two_sided = False
    if two_sided:
        d1 = (f(h1) - f(-h1)) / (2.0 * h1)
        d2 = (f(h2) - f(-h2)) / (2.0 * h2)
        r = (h1 / h2) ** 2
    else:
        f0 = f(0.0)
        d1 = (f(h1) - f0) / h1
        d2 = (f(h2) - f0) / h2
        r = h1 / h2
    return (r * d2 - d1) / (r - 1.0)


def fd_second_derivative(
    path: PerturbationPath,
    q: float,
    X: DiscreteRV,
    cfg: SeriesConfig = DEFAULT_CONFIG,
    kind: str = "abs",
) -> float:
    """Richardson-extrapolated one-sided second difference over t in {0, h, 2h}."""
    h = FD_STEP_SECOND

    def f(t: float) -> float:
        return moment_along_path(path, q, X, t, cfg, kind)

    def second(hh: float) -> float:
        return (f(2.0 * hh) - 2.0 * f(hh) + f(0.0)) / (hh * hh)

    return 2.0 * second(h / 2.0) - second(h)


def variation_suite(
    cases: int, seed: int, cfg: SeriesConfig = DEFAULT_CONFIG
) -> list[CaseReport]:
    """Analytic first and second variations against finite differences."""
    out = []
    for i in range(cases):
        case_seed = seed + i
        path, q, X = random_variation_case(case_seed, order=1)
        analytic = first_variation(path, q, X, 0.0, cfg)
        fd = fd_first_derivative(path, q, X, cfg)
        rel = abs(analytic - fd) / max(1.0, abs(fd))
        out.append(
            CaseReport(
                f"der1-{i}",
                case_seed,
                q,
                q,
                analytic,
                fd,
                FIRST_VARIATION_RTOL - rel,
                "pass" if rel < FIRST_VARIATION_RTOL else "fail",
            )
        )
        path2, q2, X2 = random_variation_case(case_seed + 10**9, order=2)
        analytic2 = second_variation(path2, q2, X2, 0.0, cfg)
        fd2 = fd_second_derivative(path2, q2, X2, cfg)
        rel2 = abs(analytic2 - fd2) / max(1.0, abs(fd2))
        out.append(
            CaseReport(
                f"der2-{i}",
                case_seed + 10**9,
                q2,
                q2,
                analytic2,
                fd2,
                SECOND_VARIATION_RTOL - rel2,
                "pass" if rel2 < SECOND_VARIATION_RTOL else "fail",
            )
        )
    return out


def qscan_suite(
    p: float,
    q: float,
    A: float = 1.0,
    B: float = 1.0,
    grid: int = 20,
    cfg: SeriesConfig = DEFAULT_CONFIG,
) -> list[CaseReport]:
    """Grid scan of the two-atom family against the exact bound.

    For p >= 5 the argmax must sit on an axis point (|c1| at the certified
    extremal scale with the second intensity zero).
    """
    result = q_scan(p, q, A, B, grid=grid, cfg=cfg)
    best = result.best_point
    within = result.best_value <= result.reference_bound + 1e-8 * max(1.0, result.reference_bound)
    if p >= 5.0:
        from .bounds import solve_lambda_c

        c = solve_lambda_c(p, A, B).c
        at_axis = (
            abs(abs(best.c1) - c) <= 1e-12 * c
            and best.lambda2 == 0.0
        )
    else:
        at_axis = True
    status = "pass" if (within and at_axis) else "fail"
    return [
        CaseReport(
            f"qscan-{p}-{q}",
            grid,
            p,
            q,
            result.best_value,
            result.reference_bound,
            result.reference_bound - result.best_value,
            status,
        )
    ]
