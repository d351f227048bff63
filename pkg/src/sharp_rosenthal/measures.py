"""Foundational value types: discrete laws and atomic measures on the real line.

Everything here is exact desk-scale arithmetic on finitely supported objects:
a :class:`DiscreteRV` is a finitely supported probability law, a
:class:`LevyVarianceMeasure` is a finite nonnegative atomic measure whose
weights carry units of variance (an atom at 0 encodes a Gaussian variance
component), and a :class:`SignedAtomMeasure` is a finite signed atomic
measure used as a perturbation direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Optional, Sequence, Tuple

import numpy as np

#: Absolute tolerance for merging atom locations/values.
ATOM_MERGE_TOL = 1e-12

#: Tolerance on sum(prob) - 1 before probabilities are renormalized.
PROB_DRIFT_TOL = 1e-12


def _merge_atoms(pairs: Iterable[Tuple[float, float]], tol: float) -> list[tuple[float, float]]:
    """Sort (position, mass) pairs and merge positions closer than ``tol``."""
    items = sorted((float(x), float(m)) for x, m in pairs)
    merged: list[tuple[float, float]] = []
    for x, m in items:
        if merged and abs(x - merged[-1][0]) <= tol:
            x0, m0 = merged[-1]
            merged[-1] = (x0, m0 + m)
        else:
            merged.append((x, m))
    return merged


@dataclass(frozen=True)
class DiscreteRV:
    """A finitely supported probability distribution on the reals.

    ``atoms`` is an ordered tuple of (value, prob) pairs with strictly
    increasing values, every prob > 0, and sum(prob) = 1 within 1e-12.
    Values closer than :data:`ATOM_MERGE_TOL` are merged at construction;
    nonpositive probabilities are rejected rather than dropped so that
    constructor bugs surface early.
    """

    atoms: Tuple[Tuple[float, float], ...]

    def __init__(self, atoms: Iterable[Tuple[float, float]]):
        pairs = list(atoms)
        if not pairs:
            raise ValueError("DiscreteRV needs at least one atom")
        for _, prob in pairs:
            if not prob > 0.0:
                raise ValueError(f"atom probability must be > 0, got {prob}")
        merged = _merge_atoms(pairs, ATOM_MERGE_TOL)
        total = math.fsum(m for _, m in merged)
        if abs(total - 1.0) > PROB_DRIFT_TOL:
            raise ValueError(f"probabilities must sum to 1 within {PROB_DRIFT_TOL}, got {total!r}")
        object.__setattr__(self, "atoms", tuple(merged))

    @classmethod
    def delta(cls, value: float = 0.0) -> "DiscreteRV":
        """Point mass at ``value``."""
        return cls([(value, 1.0)])

    @classmethod
    def rademacher(cls) -> "DiscreteRV":
        """Fair +-1 random variable."""
        return cls([(-1.0, 0.5), (1.0, 0.5)])

    @classmethod
    def two_point_zero_mean(cls, a: float, b: float) -> "DiscreteRV":
        """The unique zero-mean law on {a, b} with a < 0 < b."""
        if not (a < 0.0 < b):
            raise ValueError(f"need a < 0 < b, got a={a}, b={b}")
        p = b / (b - a)
        return cls([(a, p), (b, 1.0 - p)])

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.atoms])

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms])

    def reflected(self) -> "DiscreteRV":
        """Law of -X."""
        return DiscreteRV([(-v, p) for v, p in self.atoms])

    def shifted(self, offset: float) -> "DiscreteRV":
        """Law of X + offset."""
        return DiscreteRV([(v + offset, p) for v, p in self.atoms])

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        """Whether the law is invariant under x -> -x within ``tol``."""
        rev = self.atoms[::-1]
        return all(
            abs(v + rv) <= tol and abs(p - rp) <= tol
            for (v, p), (rv, rp) in zip(self.atoms, rev)
        )

    def to_json_dict(self) -> dict:
        return {"atoms": [[v, p] for v, p in self.atoms]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "DiscreteRV":
        return cls([(float(v), float(p)) for v, p in data["atoms"]])


def rv_mean(x: DiscreteRV) -> float:
    """E X = sum of value * prob."""
    return math.fsum(v * p for v, p in x.atoms)


def rv_abs_moment(x: DiscreteRV, q: float) -> float:
    """E|X|^q = sum of |value|^q * prob, for q > 0."""
    if not q > 0.0:
        raise ValueError(f"moment order must be > 0, got {q}")
    return math.fsum(abs(v) ** q * p for v, p in x.atoms)


def rv_second_moment(x: DiscreteRV) -> float:
    return math.fsum(v * v * p for v, p in x.atoms)


def rv_convolve(x: DiscreteRV, y: DiscreteRV) -> DiscreteRV:
    """Exact law of X + Y for independent X, Y.

    Atoms whose sums collide within :data:`ATOM_MERGE_TOL` are merged;
    probabilities are renormalized only if their sum drifts from 1 by more
    than :data:`PROB_DRIFT_TOL`, so that convolutions of dyadic inputs stay
    exact.
    """
    xv, xp = x.values, x.probs
    yv, yp = y.values, y.probs
    sums = np.add.outer(xv, yv).ravel()
    masses = np.multiply.outer(xp, yp).ravel()
    merged = _merge_atoms(zip(sums, masses), ATOM_MERGE_TOL)
    total = math.fsum(m for _, m in merged)
    if abs(total - 1.0) > PROB_DRIFT_TOL:
        merged = [(v, m / total) for v, m in merged]
    return DiscreteRV(merged)


def rv_center(x: DiscreteRV) -> DiscreteRV:
    """Shift all values by -E X so the result has mean 0 within 1e-12."""
    mu = rv_mean(x)
    centered = DiscreteRV([(v - mu, p) for v, p in x.atoms])
    resid = rv_mean(centered)
    if abs(resid) > 1e-12:
        centered = DiscreteRV([(v - resid, p) for v, p in centered.atoms])
    return centered


@dataclass(frozen=True)
class LevyVarianceMeasure:
    """A finite nonnegative atomic measure H with variance-unit weights.

    Weight w at location u means H({u}) = w.  An atom at location 0 encodes
    a Gaussian component of variance w; an atom at u != 0 encodes the scaled
    centered Poisson component u * (Pi_{w/u^2} - w/u^2).  Duplicate locations
    are merged (weights add) and zero-weight atoms are dropped, which matches
    the additivity of independent components at the same scale.
    """

    atoms: Tuple[Tuple[float, float], ...]

    def __init__(self, atoms: Iterable[Tuple[float, float]] = ()):
        merged = _merge_atoms(atoms, ATOM_MERGE_TOL)
        for u, w in merged:
            if w < 0.0:
                raise ValueError(f"weight at location {u} must be >= 0, got {w}")
        object.__setattr__(self, "atoms", tuple((u, w) for u, w in merged if w > 0.0))

    @property
    def locations(self) -> np.ndarray:
        return np.array([u for u, _ in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms])

    def total_weight(self) -> float:
        """Integral of H: the total variance carried by the measure."""
        return math.fsum(w for _, w in self.atoms)

    def p_moment(self, p: float) -> float:
        """Integral of |x|^{p-2} H(dx)."""
        return math.fsum(abs(u) ** (p - 2.0) * w for u, w in self.atoms if u != 0.0)

    def gaussian_variance(self) -> float:
        """Weight sitting at location 0."""
        return math.fsum(w for u, w in self.atoms if u == 0.0)

    def nonzero_atoms(self) -> Tuple[Tuple[float, float], ...]:
        return tuple((u, w) for u, w in self.atoms if u != 0.0)

    def max_abs_location(self) -> float:
        return max((abs(u) for u, _ in self.atoms), default=0.0)

    def reflected(self) -> "LevyVarianceMeasure":
        """The measure H^- with H^-(du) = H(-du); governs -Y_H."""
        return LevyVarianceMeasure([(-u, w) for u, w in self.atoms])

    def scaled(self, kappa: float) -> "LevyVarianceMeasure":
        """Locations scaled by kappa, weights by kappa^2: the measure of kappa*Y_H."""
        return LevyVarianceMeasure([(kappa * u, kappa * kappa * w) for u, w in self.atoms])

    def to_json_dict(self) -> dict:
        return {"atoms": [[u, w] for u, w in self.atoms]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "LevyVarianceMeasure":
        return cls([(float(u), float(w)) for u, w in data["atoms"]])


@dataclass(frozen=True)
class SignedAtomMeasure:
    """A finite signed atomic measure; the perturbation direction Delta.

    Atoms at duplicate locations are merged by summing their signed weights;
    exact cancellations are dropped.
    """

    atoms: Tuple[Tuple[float, float], ...]

    def __init__(self, atoms: Iterable[Tuple[float, float]] = ()):
        merged = _merge_atoms(atoms, ATOM_MERGE_TOL)
        object.__setattr__(self, "atoms", tuple((u, d) for u, d in merged if d != 0.0))

    @property
    def locations(self) -> np.ndarray:
        return np.array([u for u, _ in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([d for _, d in self.atoms])

    def total_variation(self) -> float:
        return math.fsum(abs(d) for _, d in self.atoms)

    def scaled(self, beta: float) -> "SignedAtomMeasure":
        return SignedAtomMeasure([(u, beta * d) for u, d in self.atoms])


@dataclass(frozen=True)
class MomentConstraints:
    """The triple (p, A, B): sum E X_i^2 = B and sum E|X_i|^p = A with p > 2."""

    p: float
    A: float
    B: float

    def __post_init__(self):
        if not self.p > 2.0:
            raise ValueError(f"p must be > 2, got {self.p}")
        if not (self.A > 0.0 and self.B > 0.0):
            raise ValueError(f"A and B must be > 0, got A={self.A}, B={self.B}")


def measure_in_class(
    h: LevyVarianceMeasure,
    c: MomentConstraints,
    mode: Literal["exact", "dominated"] = "exact",
    M: Optional[float] = None,
) -> bool:
    """Membership of H in the (p; A, B) measure class.

    ``exact`` tests total weight = B and the |x|^{p-2} moment = A, both within
    1e-9 relative; ``dominated`` tests <= with the same slack.  If ``M`` is
    given, the support must also lie in [-M, M].
    """
    if mode not in ("exact", "dominated"):
        raise ValueError(f"mode must be 'exact' or 'dominated', got {mode!r}")
    rel = 1e-9
    total = h.total_weight()
    pmom = h.p_moment(c.p)
    if mode == "exact":
        ok = abs(total - c.B) <= rel * max(1.0, abs(c.B)) and abs(pmom - c.A) <= rel * max(
            1.0, abs(c.A)
        )
    else:
        ok = total <= c.B * (1.0 + rel) and pmom <= c.A * (1.0 + rel)
    if ok and M is not None:
        ok = h.max_abs_location() <= M * (1.0 + 1e-12)
    return ok
