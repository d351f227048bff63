"""Exact Rosenthal-type bound formulas, the (lambda, c) certificate solver,
best constants, and numerical scans over the two-atom family.

Supported regimes:

* p >= q >= 5, E X = 0: the bound is max over the sign choice of
  E|X +- c (Pi_lam - lam)|^q with c^2 lam = B and c^p lam = A.
* 2 < p <= 3, q = p (no centering needed): the bound is
  A + E|X + sqrt(B) Z|^p.
* even p >= 4 with X = 0: the closed form c^p E|Pi_lam - lam|^p via the
  cumulant recursion.

The ranges p in (3, 4) and (4, 5), and q < 5 when p >= 5, are open problems
and are rejected with :class:`UnsupportedExponents`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .compound import CompoundLaw, cp_abs_moment
from .errors import BoundExceeded, SingularSystem, TailNotConverged, UnsupportedExponents
from .measures import DiscreteRV, LevyVarianceMeasure, rv_mean
from .poisson import (
    DEFAULT_CONFIG,
    SeriesConfig,
    poisson_central_moment_even,
    skellam_abs_moment_about,
)

__all__ = [
    "LambdaC",
    "BoundResult",
    "QPoint",
    "QScanResult",
    "ScanCell",
    "LimitEntry",
    "LimitCompoundResult",
    "solve_lambda_c",
    "exact_bound",
    "even_p_bound",
    "symmetric_bound",
    "combined_bound",
    "best_constant",
    "classical_rosenthal_constant",
    "q_point_from_c",
    "q_scan",
    "limit_compound",
    "require_zero_mean",
    "ZERO_MEAN_TOL",
]

ZERO_MEAN_TOL = 1e-10

REGIME_P_GE_5 = "p_ge_5"
REGIME_P_IN_2_3 = "p_in_2_3"
REGIME_SYMMETRIC = "symmetric"
REGIME_COMBINED = "combined"
REGIME_EVEN_P = "even_p_closed_form"


@dataclass(frozen=True)
class LambdaC:
    """The unique (lambda, c) with c^2 lambda = B and c^p lambda = A."""

    lam: float
    c: float


@dataclass(frozen=True)
class BoundResult:
    """A bound value with its regime tag, certificate, and error budget.

    ``achieved_sign`` records which of the +-c extremal laws attains the
    maximum; ``both`` when the two values agree within the error budget
    (always the case for symmetric X).
    """

    value: float
    regime: str
    certificate: Optional[LambdaC | Tuple[LambdaC, LambdaC]]
    achieved_sign: str
    error_budget: float


def _budget(value: float, cfg: SeriesConfig, n_series: int = 1, n_quad: int = 0) -> float:
    """Aggregate series tolerances, quadrature tolerances, and rounding.

    The rounding term charges one ulp per grid point at a generous fixed
    count, so fuzz-test slacks have a principled floor.
    """
    eps = np.finfo(float).eps
    return n_series * cfg.tol + n_quad * 1e-10 + 4096.0 * eps * max(1.0, abs(value))


def require_zero_mean(X: DiscreteRV, what: str = "X") -> None:
    from .errors import NotZeroMean

    mu = rv_mean(X)
    if abs(mu) > ZERO_MEAN_TOL:
        raise NotZeroMean(f"{what} must have mean 0 within {ZERO_MEAN_TOL}, got {mu}")


def solve_lambda_c(p: float, A: float, B: float) -> LambdaC:
    """lambda = (B^{p/2}/A)^{2/(p-2)} and c = (A/B)^{1/(p-2)}.

    The unique positive solution of c^2 lambda = B, c^p lambda = A; the
    back-substitution residuals are verified below 1e-10 relative.
    """
    if not p > 2.0:
        raise ValueError(f"p must be > 2, got {p}")
    if not (A > 0.0 and B > 0.0):
        raise ValueError(f"A and B must be > 0, got A={A}, B={B}")
    lam = (B ** (p / 2.0) / A) ** (2.0 / (p - 2.0))
    c = (A / B) ** (1.0 / (p - 2.0))
    if not (math.isfinite(lam) and math.isfinite(c)):
        raise ValueError(f"(lambda, c) overflowed for p={p}, A={A}, B={B}")
    if abs(c * c * lam - B) > 1e-10 * B or abs(c**p * lam - A) > 1e-10 * A:
        raise ValueError(f"(lambda, c) residuals too large for p={p}, A={A}, B={B}")
    return LambdaC(lam, c)


def _sign_tag(v_plus: float, v_minus: float, tol: float) -> str:
    if abs(v_plus - v_minus) <= tol:
        return "both"
    return "plus" if v_plus > v_minus else "minus"


def exact_bound(
    p: float,
    q: float,
    A: float,
    B: float,
    X: Optional[DiscreteRV] = None,
    cfg: SeriesConfig = DEFAULT_CONFIG,
) -> BoundResult:
    """The exact supremum of E|X + S|^q over independent zero-mean summand
    sequences with sum E X_i^2 <= B and sum E|X_i|^p <= A.

    Regimes: p >= q >= 5 (max over the +-c centered-Poisson laws; X must be
    zero-mean) and 2 < p <= 3 with q = p (Gaussian limit A + E|X+sqrt(B)Z|^p;
    centering not required).  Everything else raises UnsupportedExponents.
    """
    if X is None:
        X = DiscreteRV.delta(0.0)
    if not (A > 0.0 and B > 0.0):
        raise ValueError(f"A and B must be > 0, got A={A}, B={B}")
    if p >= 5.0 and 5.0 <= q <= p:
        require_zero_mean(X)
        lc = solve_lambda_c(p, A, B)
        law_plus = CompoundLaw(0.0, X, LevyVarianceMeasure([(lc.c, B)]))
        law_minus = CompoundLaw(0.0, X, LevyVarianceMeasure([(-lc.c, B)]))
        v_plus = cp_abs_moment(law_plus, q, cfg)
        v_minus = cp_abs_moment(law_minus, q, cfg)
        value = max(v_plus, v_minus)
        budget = _budget(value, cfg, n_series=2)
        return BoundResult(value, REGIME_P_GE_5, lc, _sign_tag(v_plus, v_minus, budget), budget)
    if 2.0 < p <= 3.0:
        if q != p:
            raise UnsupportedExponents(
                f"for p in (2, 3] only q = p is supported, got q={q}, p={p}"
            )
        law = CompoundLaw(0.0, X, LevyVarianceMeasure([(0.0, B)]))
        value = A + cp_abs_moment(law, p, cfg)
        budget = _budget(value, cfg, n_series=1, n_quad=len(X.atoms))
        return BoundResult(value, REGIME_P_IN_2_3, solve_lambda_c(p, A, B), "both", budget)
    if p > 3.0 and p < 5.0:
        raise UnsupportedExponents(
            f"p={p} lies in the open ranges (3,4) and (4,5); "
            "use even_p_bound for p = 4 with X = 0"
        )
    if p >= 5.0:
        raise UnsupportedExponents(f"q={q} outside [5, p] is an open case for p={p}")
    raise UnsupportedExponents(f"p={p} must exceed 2")


def even_p_bound(p: int, A: float, B: float) -> BoundResult:
    """c^p E|Pi_lam - lam|^p for even p >= 4: exact via the cumulant recursion."""
    if p != int(p) or int(p) < 4 or int(p) % 2 != 0:
        raise ValueError(f"p must be an even integer >= 4, got {p}")
    p = int(p)
    lc = solve_lambda_c(float(p), A, B)
    value = lc.c**p * poisson_central_moment_even(lc.lam, p)
    eps = float(np.finfo(float).eps)
    budget = 8.0 * p * eps * max(1.0, value)
    return BoundResult(value, REGIME_EVEN_P, lc, "both", budget)


def symmetric_bound(
    p: float,
    q: float,
    A: float,
    B: float,
    X: Optional[DiscreteRV] = None,
    cfg: SeriesConfig = DEFAULT_CONFIG,
) -> BoundResult:
    """Exact supremum over *symmetric* summand sequences, p >= q >= 5.

    The extremal law is the scaled Skellam difference
    c (Pi_{lam/2} - Pi'_{lam/2}); X folds in by a shifted double series.
    """
    if X is None:
        X = DiscreteRV.delta(0.0)
    if not (p >= q >= 5.0):
        raise UnsupportedExponents(f"symmetric bound needs p >= q >= 5, got p={p}, q={q}")
    require_zero_mean(X)
    lc = solve_lambda_c(p, A, B)
    value = math.fsum(
        prob * skellam_abs_moment_about(lc.lam / 2.0, lc.lam / 2.0, lc.c, x, q, cfg)
        for x, prob in X.atoms
    )
    budget = _budget(value, cfg, n_series=len(X.atoms))
    return BoundResult(value, REGIME_SYMMETRIC, lc, "both", budget)


def combined_bound(
    p: float,
    q: float,
    A0: float,
    B0: float,
    A1: float,
    B1: float,
    X: Optional[DiscreteRV] = None,
    cfg: SeriesConfig = DEFAULT_CONFIG,
) -> BoundResult:
    """Exact supremum when one block of summands is symmetric, p >= q >= 5.

    max over the sign of E|X + c0 Pi_{lam0/2} - c0 Pi'_{lam0/2} +- c1
    (Pi_lam1 - lam1)|^q, a three-atom compound law per sign.
    """
    if X is None:
        X = DiscreteRV.delta(0.0)
    if not (p >= q >= 5.0):
        raise UnsupportedExponents(f"combined bound needs p >= q >= 5, got p={p}, q={q}")
    require_zero_mean(X)
    lc0 = solve_lambda_c(p, A0, B0)
    lc1 = solve_lambda_c(p, A1, B1)
    values = {}
    for sign in (1.0, -1.0):
        levy = LevyVarianceMeasure(
            [(lc0.c, B0 / 2.0), (-lc0.c, B0 / 2.0), (sign * lc1.c, B1)]
        )
        values[sign] = cp_abs_moment(CompoundLaw(0.0, X, levy), q, cfg)
    value = max(values.values())
    budget = _budget(value, cfg, n_series=2)
    return BoundResult(
        value,
        REGIME_COMBINED,
        (lc0, lc1),
        _sign_tag(values[1.0], values[-1.0], budget),
        budget,
    )


def classical_rosenthal_constant(p: float) -> float:
    """(p/2)^{p/2} 2^{p + p^2/4}, the classical constant in
    E|S|^p <= C_p max(A, B^{p/2})."""
    if not p > 2.0:
        raise ValueError(f"p must be > 2, got {p}")
    return (p / 2.0) ** (p / 2.0) * 2.0 ** (p + p * p / 4.0)


def best_constant(p: float, gamma: float, cfg: SeriesConfig = DEFAULT_CONFIG) -> float:
    """The best constant C_{p;gamma} in the balanced bound
    E|S|^p <= C_{p;gamma} max(gamma A, B^{p/2}); equals the exact bound at
    (A, B) = (1/gamma, 1)."""
    if not gamma > 0.0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if p == int(p) and int(p) >= 4 and int(p) % 2 == 0:
        return even_p_bound(int(p), 1.0 / gamma, 1.0).value
    return exact_bound(p, p, 1.0 / gamma, 1.0, cfg=cfg).value


@dataclass(frozen=True)
class QPoint:
    """A member (c1, c2, lambda1, lambda2) of the two-atom constraint family."""

    c1: float
    c2: float
    lambda1: float
    lambda2: float

    def weights(self) -> tuple[float, float]:
        return self.c1 * self.c1 * self.lambda1, self.c2 * self.c2 * self.lambda2

    def satisfies(self, p: float, A: float, B: float, rel: float = 1e-9) -> bool:
        w1, w2 = self.weights()
        second = w1 + w2
        pth = abs(self.c1) ** p * self.lambda1 + abs(self.c2) ** p * self.lambda2
        return abs(second - B) <= rel * max(1.0, B) and abs(pth - A) <= rel * max(1.0, A)


def q_point_from_c(p: float, A: float, B: float, c1: float, c2: float) -> Optional[QPoint]:
    """Solve the 2x2 system w1 + w2 = B, |c1|^{p-2} w1 + |c2|^{p-2} w2 = A.

    Returns None when a weight is genuinely negative (infeasible direction);
    clamps roundoff-level negatives to 0 so boundary extremizers stay
    representable.  Raises :class:`SingularSystem` when |c1| = |c2| or a
    scale is zero.
    """
    if c1 == 0.0 or c2 == 0.0:
        raise SingularSystem(f"c1 and c2 must be nonzero, got c1={c1}, c2={c2}")
    a1 = abs(c1) ** (p - 2.0)
    a2 = abs(c2) ** (p - 2.0)
    if abs(a1 - a2) <= 1e-14 * max(a1, a2):
        raise SingularSystem(f"|c1|^(p-2) = |c2|^(p-2) is singular: c1={c1}, c2={c2}")
    w2 = (A - a1 * B) / (a2 - a1)
    w1 = B - w2
    lam1 = w1 / (c1 * c1)
    lam2 = w2 / (c2 * c2)
    clamp = 1e-12
    if lam1 < -clamp or lam2 < -clamp:
        return None
    return QPoint(c1, c2, max(lam1, 0.0), max(lam2, 0.0))


@dataclass(frozen=True)
class ScanCell:
    c1: float
    c2: float
    lambda1: float
    lambda2: float
    value: float
    status: str  # evaluated | infeasible | singular | overflow


@dataclass(frozen=True)
class QScanResult:
    best_point: QPoint
    best_value: float
    reference_bound: float
    cells: Tuple[ScanCell, ...]

    def counts(self) -> dict:
        out: dict[str, int] = {}
        for cell in self.cells:
            out[cell.status] = out.get(cell.status, 0) + 1
        return out


def _canonical(point: QPoint) -> QPoint:
    """List the active atom first so degenerate cells report as axis points.

    A cell whose solved weights vanish on one co-ordinate describes the same
    one-atom law regardless of the inactive scale; putting the lambda > 0
    atom first makes those ties compare equal.
    """
    if point.lambda1 == 0.0 and point.lambda2 > 0.0:
        return QPoint(point.c2, point.c1, point.lambda2, point.lambda1)
    return point


def scan_axis(c: float, n: int) -> np.ndarray:
    """Signed log-spaced magnitudes over [c/100, 100c] including +-c exactly."""
    m = max(2, n // 2)
    exponents = np.linspace(-2.0, 2.0, m)
    exponents[np.argmin(np.abs(exponents))] = 0.0
    mags = c * 10.0**exponents
    return np.sort(np.concatenate([-mags, mags]))


def q_scan(
    p: float,
    q: float,
    A: float,
    B: float,
    X: Optional[DiscreteRV] = None,
    grid: int = 20,
    cfg: SeriesConfig = DEFAULT_CONFIG,
) -> QScanResult:
    """Maximize E|X + c1 (Pi_lam1 - lam1) + c2 (Pi_lam2 - lam2)|^q over a
    log-spaced (c1, c2) grid of the two-atom constraint family.

    The lambda's are derived from the (A, B) constraints, never gridded.
    Every evaluated cell is checked against the exact bound: exceeding it by
    more than 1e-8 relative raises :class:`BoundExceeded`.  Ties for the
    maximum resolve to the lexicographically smallest (c1, c2).
    """
    if X is None:
        X = DiscreteRV.delta(0.0)
    reference = exact_bound(p, q, A, B, X, cfg)
    lc = solve_lambda_c(p, A, B)
    axis = scan_axis(lc.c, grid)
    allow = reference.value + 1e-8 * max(1.0, reference.value) + reference.error_budget
    cells: list[ScanCell] = []
    best_point: Optional[QPoint] = None
    best_value = -math.inf
    for c1 in axis:
        for c2 in axis:
            try:
                point = q_point_from_c(p, A, B, float(c1), float(c2))
            except SingularSystem:
                cells.append(ScanCell(float(c1), float(c2), math.nan, math.nan, math.nan, "singular"))
                continue
            if point is None:
                cells.append(ScanCell(float(c1), float(c2), math.nan, math.nan, math.nan, "infeasible"))
                continue
            w1, w2 = point.weights()
            levy = LevyVarianceMeasure([(point.c1, w1), (point.c2, w2)])
            try:
                value = cp_abs_moment(CompoundLaw(0.0, X, levy), q, cfg)
            except TailNotConverged:
                cells.append(
                    ScanCell(point.c1, point.c2, point.lambda1, point.lambda2, math.nan, "overflow")
                )
                continue
            cells.append(ScanCell(point.c1, point.c2, point.lambda1, point.lambda2, value, "evaluated"))
            if value > allow:
                raise BoundExceeded(
                    f"scan value {value!r} at (c1={point.c1}, c2={point.c2}) exceeds "
                    f"exact bound {reference.value!r} beyond tolerance"
                )
            candidate = _canonical(point)
            if value > best_value or (
                value == best_value
                and best_point is not None
                and (candidate.c1, candidate.c2) < (best_point.c1, best_point.c2)
            ):
                best_value = value
                best_point = candidate
    if best_point is None:
        raise SingularSystem("no feasible grid cell; widen the grid")
    return QScanResult(best_point, best_value, reference.value, tuple(cells))


@dataclass(frozen=True)
class LimitEntry:
    c2: float
    moment: float
    gap: float  # limit value minus the moment


@dataclass(frozen=True)
class LimitCompoundResult:
    limit_value: float
    entries: Tuple[LimitEntry, ...]
    gaps_decreasing: bool


def limit_compound(
    p: float,
    q: float,
    A: float,
    B: float,
    b: float,
    a: float,
    c2_sequence: Sequence[float],
    X: Optional[DiscreteRV] = None,
    cfg: SeriesConfig = DEFAULT_CONFIG,
) -> LimitCompoundResult:
    """Two-atom laws H = w1 delta_b + w2 delta_{c2} drifting to the
    one-atom-plus-constant limit a + E|X + Y_{B delta_b}|^q.

    Along the sequence w2 = a / |c2|^{q-2} and w1 = B - w2, so
    |c2|^{q-2} w2 = a is held exactly; the gaps to the limit should shrink
    as |c2| grows.
    """
    if X is None:
        X = DiscreteRV.delta(0.0)
    if not q > 2.0:
        raise ValueError(f"q must be > 2, got {q}")
    if not 0.0 <= a <= A:
        raise ValueError(f"a must lie in [0, A], got a={a}, A={A}")
    c = solve_lambda_c(p, A, B).c
    if abs(b) > c * (1.0 + 1e-12):
        raise ValueError(f"b must lie in [-c, c] with c={c}, got {b}")
    limit_law = CompoundLaw(0.0, X, LevyVarianceMeasure([(b, B)]))
    limit_value = a + cp_abs_moment(limit_law, q, cfg)
    entries: list[LimitEntry] = []
    for c2 in c2_sequence:
        if c2 == 0.0:
            raise ValueError("c2 values must be nonzero")
        w2 = a / abs(c2) ** (q - 2.0)
        w1 = B - w2
        if w1 < 0.0:
            raise ValueError(f"w1 = B - a/|c2|^(q-2) is negative at c2={c2}")
        levy = LevyVarianceMeasure([(b, w1), (float(c2), w2)])
        moment = cp_abs_moment(CompoundLaw(0.0, X, levy), q, cfg)
        entries.append(LimitEntry(float(c2), moment, limit_value - moment))
    gaps = [abs(e.gap) for e in entries]
    decreasing = all(g2 <= g1 + 1e-12 for g1, g2 in zip(gaps, gaps[1:]))
    return LimitCompoundResult(limit_value, tuple(entries), decreasing)
