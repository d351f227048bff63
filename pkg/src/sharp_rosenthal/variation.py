"""Calculus of variations of moments with respect to Lévy-measure
perturbations.

For H_t = H + t*Delta (nonnegative on [0, t_max]) the moment
t -> E|Y + Y_{H_t}|^q has right-hand derivatives

  d/dt   = q(q-1)   sum_j d_j  int_0^1 (1-s)  E|s u_j + Y + Y_{H_t}|^{q-2} ds
  d2/dt2 = q(q-1)(q-2)(q-3) sum_{j,k} d_j d_k
           iint (1-s1)(1-s2) E|s1 u_j + s2 u_k + Y + Y_{H_t}|^{q-4} ds1 ds2

(q > 2 resp. q > 4), and the same identities hold with positive- or
negative-part moments in place of absolute moments.  The positivity kernel
h''(u a s) - u^{p-4} h''(a s), with h''(x) = q(q-1)(q-2)(q-3)
E|x + X + Y_H|^{q-4}, is strictly positive for p >= q > 5; its double
integral is the quantity whose sign rules out two atoms on one side of the
origin in the extremal measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .compound import CompoundLaw, ShiftedMomentEvaluator, cp_abs_moment
from .errors import ExponentTooSmall, InfeasiblePath
from .measures import DiscreteRV, LevyVarianceMeasure, SignedAtomMeasure, rv_mean
from .poisson import DEFAULT_CONFIG, SeriesConfig
from .quadrature import gauss_legendre_01

__all__ = [
    "PerturbationPath",
    "h_kernel",
    "first_variation",
    "second_variation",
    "positivity_kernel",
    "variational_F",
    "moment_along_path",
]

#: Gauss-Legendre refinement: start order and hard caps.  The s-integrands
#: are smooth except for isolated algebraic kinks inherited from |.|^{q-2},
#: where doubling stalls near the cap instead of converging to tol; the cap
#: value is then the best available estimate.  The tensor rule squares the
#: node count, hence the lower cap.
_GL_START = 32
_GL_MAX = 4096
_GL_MAX_TENSOR = 512


@dataclass(frozen=True)
class PerturbationPath:
    """H_t = base + t * direction, nonnegative for all t in [0, t_max]."""

    base: LevyVarianceMeasure
    direction: SignedAtomMeasure
    t_max: float

    def __post_init__(self):
        if not self.t_max > 0.0:
            raise ValueError(f"t_max must be > 0, got {self.t_max}")
        base_w = dict(self.base.atoms)
        for u, d in self.direction.atoms:
            end = base_w.get(u, 0.0) + self.t_max * d
            if end < -1e-15 * max(1.0, abs(d) * self.t_max):
                raise InfeasiblePath(
                    f"H + t*Delta becomes negative at location {u} for t={self.t_max}"
                )

    def measure_at(self, t: float) -> LevyVarianceMeasure:
        """The measure H + t*Delta; InfeasiblePath if it leaves the cone."""
        weights = dict(self.base.atoms)
        for u, d in self.direction.atoms:
            w = weights.get(u, 0.0) + t * d
            if w < -1e-12 * max(1.0, abs(t) * abs(d)):
                raise InfeasiblePath(f"negative weight {w} at location {u} for t={t}")
            weights[u] = max(w, 0.0)
        return LevyVarianceMeasure(weights.items())


def moment_along_path(
    path: PerturbationPath,
    q: float,
    X: DiscreteRV,
    t: float,
    cfg: SeriesConfig = DEFAULT_CONFIG,
    kind: str = "abs",
) -> float:
    """E f(X + Y_{H_t}) along the path; the function the variations differentiate."""
    law = CompoundLaw(0.0, X, path.measure_at(t))
    from .compound import cp_part_moment_series

    if kind == "abs":
        return cp_abs_moment(law, q, cfg)
    side = {"pos": "positive", "neg": "negative"}[kind]
    return cp_part_moment_series(law, q, side, cfg)


def h_kernel(
    x: float,
    q: float,
    X: DiscreteRV,
    H: LevyVarianceMeasure,
    cfg: SeriesConfig = DEFAULT_CONFIG,
) -> float:
    """h(x) = q(q-1) E|x + X + Y_H|^{q-2}, the first-variation integrand."""
    if not q > 2.0:
        raise ExponentTooSmall(f"h kernel requires q > 2, got {q}")
    return q * (q - 1.0) * cp_abs_moment(CompoundLaw(x, X, H), q - 2.0, cfg)


def _refine(gl_sum, tol: float, max_nodes: int = _GL_MAX):
    """Double Gauss-Legendre order until the estimate moves less than tol."""
    n = _GL_START
    prev = gl_sum(n)
    while n < max_nodes:
        n *= 2
        cur = gl_sum(n)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    return prev


def first_variation(
    path: PerturbationPath,
    q: float,
    X: DiscreteRV,
    t: float = 0.0,
    cfg: SeriesConfig = DEFAULT_CONFIG,
    kind: str = "abs",
) -> float:
    """Right-hand derivative of E f(X + Y_{H_t}) in t, f = |.|^q / (.)_+^q / (.)_-^q."""
    if not q > 2.0:
        raise ExponentTooSmall(f"first variation requires q > 2, got {q}")
    if not 0.0 <= t < path.t_max:
        raise InfeasiblePath(f"t={t} outside [0, t_max={path.t_max})")
    delta = path.direction.atoms
    if not delta:
        return 0.0
    law = CompoundLaw(0.0, X, path.measure_at(t))
    u_max = max(abs(u) for u, _ in delta)
    inner_cfg = SeriesConfig(tol=cfg.tol / 8.0, max_terms=cfg.max_terms)
    evaluate = ShiftedMomentEvaluator(law, q - 2.0, u_max, inner_cfg, kind)
    us = np.array([u for u, _ in delta])
    ds = np.array([d for _, d in delta])

    def gl_sum(n: int) -> float:
        s, w = gauss_legendre_01(n)
        shifts = np.multiply.outer(s, us)  # (n, n_atoms)
        moments = evaluate(shifts.ravel()).reshape(shifts.shape)
        return float(ds @ (moments.T @ (w * (1.0 - s))))

    return q * (q - 1.0) * _refine(gl_sum, cfg.tol)


def second_variation(
    path: PerturbationPath,
    q: float,
    X: DiscreteRV,
    t: float = 0.0,
    cfg: SeriesConfig = DEFAULT_CONFIG,
    kind: str = "abs",
) -> float:
    """Second right-hand derivative of E f(X + Y_{H_t}) in t, for q > 4."""
    if not q > 4.0:
        raise ExponentTooSmall(f"second variation requires q > 4, got {q}")
    if not 0.0 <= t < path.t_max:
        raise InfeasiblePath(f"t={t} outside [0, t_max={path.t_max})")
    delta = path.direction.atoms
    if not delta:
        return 0.0
    law = CompoundLaw(0.0, X, path.measure_at(t))
    u_max = max(abs(u) for u, _ in delta)
    inner_cfg = SeriesConfig(tol=cfg.tol / 8.0, max_terms=cfg.max_terms)
    evaluate = ShiftedMomentEvaluator(law, q - 4.0, 2.0 * u_max, inner_cfg, kind)
    us = np.array([u for u, _ in delta])
    ds = np.array([d for _, d in delta])

    def gl_sum(n: int) -> float:
        s, w = gauss_legendre_01(n)
        wt = w * (1.0 - s)
        # shifts s1*u_j + s2*u_k over the tensor rule and all atom pairs
        su = np.multiply.outer(s, us)  # (n, J)
        shifts = su[:, None, :, None] + su[None, :, None, :]  # (n, n, J, J)
        moments = evaluate(shifts.ravel()).reshape(shifts.shape)
        inner = np.einsum("a,b,abjk->jk", wt, wt, moments)
        return float(ds @ inner @ ds)

    return q * (q - 1.0) * (q - 2.0) * (q - 3.0) * _refine(gl_sum, cfg.tol, _GL_MAX_TENSOR)


def _hpp_evaluator(
    q: float,
    X: DiscreteRV,
    H: LevyVarianceMeasure,
    shift_bound: float,
    cfg: SeriesConfig,
) -> ShiftedMomentEvaluator:
    """h''(x) = q(q-1)(q-2)(q-3) E|x + X + Y_H|^{q-4} as a vectorized map."""
    law = CompoundLaw(0.0, X, H)
    return ShiftedMomentEvaluator(law, q - 4.0, shift_bound, cfg, "abs")


def positivity_kernel(
    u: float,
    alpha: float,
    s: float,
    p: float,
    q: float,
    X: DiscreteRV,
    H: LevyVarianceMeasure,
    cfg: SeriesConfig = DEFAULT_CONFIG,
) -> float:
    """h''(u*alpha*s) - u^{p-4} h''(alpha*s); strictly positive for p >= q > 5.

    Requires u, alpha, s in (0, 1], a zero-mean X, and a nonzero H; the
    value is returned (not just its sign) so callers can assert positivity.
    """
    if not (p >= q > 5.0):
        raise ValueError(f"need p >= q > 5, got p={p}, q={q}")
    for name, val in (("u", u), ("alpha", alpha), ("s", s)):
        if not 0.0 < val <= 1.0:
            raise ValueError(f"{name} must be in (0, 1], got {val}")
    if abs(rv_mean(X)) > 1e-10:
        raise ValueError(f"X must be zero-mean, got mean {rv_mean(X)}")
    if not H.atoms:
        raise ValueError("H must be nonzero")
    evaluate = _hpp_evaluator(q, X, H, abs(alpha * s), cfg)
    prefactor = q * (q - 1.0) * (q - 2.0) * (q - 3.0)
    m_small, m_big = evaluate(np.array([u * alpha * s, alpha * s]))
    return prefactor * (m_small - u ** (p - 4.0) * m_big)


def variational_F(
    b: float,
    s: float,
    p: float,
    q: float,
    X: DiscreteRV,
    H: LevyVarianceMeasure,
    cfg: SeriesConfig = DEFAULT_CONFIG,
) -> float:
    """s^2 int_b^1 du int_0^1 da a [h''(u a s) - u^{p-4} h''(a s)].

    The marginal direction of moving mass from an interior atom toward the
    support edge; strictly positive for p >= q > 5.  The second term
    factorizes, with int_b^1 u^{p-4} du = (1 - b^{p-3})/(p - 3) analytic.
    """
    if not (p >= q > 5.0):
        raise ValueError(f"need p >= q > 5, got p={p}, q={q}")
    if not 0.0 <= b < 1.0:
        raise ValueError(f"b must be in [0, 1), got {b}")
    if not 0.0 < s <= 1.0:
        raise ValueError(f"s must be in (0, 1], got {s}")
    if abs(rv_mean(X)) > 1e-10:
        raise ValueError(f"X must be zero-mean, got mean {rv_mean(X)}")
    inner_cfg = SeriesConfig(tol=cfg.tol / 8.0, max_terms=cfg.max_terms)
    evaluate = _hpp_evaluator(q, X, H, s, inner_cfg)
    prefactor = q * (q - 1.0) * (q - 2.0) * (q - 3.0)
    u_weight = (1.0 - b ** (p - 3.0)) / (p - 3.0)

    def gl_sum(n: int) -> float:
        a, wa = gauss_legendre_01(n)
        us = b + (1.0 - b) * a
        wu = (1.0 - b) * wa
        cross = np.multiply.outer(us, a) * s  # (n_u, n_a) arguments u*a*s
        m_cross = evaluate(cross.ravel()).reshape(cross.shape)
        term1 = float(wu @ m_cross @ (wa * a))
        term2 = u_weight * float((wa * a) @ evaluate(a * s))
        return term1 - term2

    return s * s * prefactor * _refine(gl_sum, cfg.tol)
