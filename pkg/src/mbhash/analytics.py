"""Closed-form entropies, yields and noise thresholds.

Two conventions convert an LDN parameter ``q`` into a Werner fidelity:
``exact`` is the two-sided channel ``(3q^2 + 1)/4``; ``paper_product``
multiplies per-particle fidelities, ``((3q + 1)/4)^2``.  The quoted
``q_min ~ 0.8672`` for Bell pairs matches the product form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .noise import q_from_fidelity_exact, q_from_fidelity_paper

PAPER_PRODUCT = "paper_product"
EXACT = "exact"
CONVENTIONS = (PAPER_PRODUCT, EXACT)
TARGETS = ("bell", "cluster1d", "cluster2d")
DIMENSIONS = ("1D", "2D")

BISECT_TOL = 1e-8
BISECT_MAX_ITER = 200


def bisect(f: Callable[[float], float], lo: float, hi: float, tol: float = BISECT_TOL, max_iter: int = BISECT_MAX_ITER) -> float:
    """Root of ``f`` on ``[lo, hi]``; ``f(lo)`` and ``f(hi)`` must differ in sign."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or hi - lo < tol:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _xlog2x(x: float) -> float:
    return 0.0 if x == 0.0 else x * math.log2(x)


def binary_entropy(a0: float, a1: float) -> float:
    if a0 < 0 or a1 < 0:
        raise ValueError("probabilities must be non-negative")
    if abs(a0 + a1 - 1.0) > 1e-12:
        raise ValueError(f"probabilities must sum to 1, got {a0 + a1}")
    return -_xlog2x(a0) - _xlog2x(a1)


def werner_entropy(F: float) -> float:
    """``S(W) = -F log2 F - (1-F) log2((1-F)/3)``."""
    if not 0.25 <= F <= 1.0:
        raise ValueError(f"F must lie in [1/4, 1], got {F}")
    rest = 1.0 - F
    return -_xlog2x(F) - (0.0 if rest == 0.0 else rest * math.log2(rest / 3.0))


def hashing_yield(F: float) -> float:
    """Asymptotic yield ``1 - S(W)`` (negative below threshold)."""
    return 1.0 - werner_entropy(F)


def f_min_hashing() -> float:
    """Werner fidelity at which the hashing yield vanishes."""
    return bisect(lambda F: werner_entropy(F) - 1.0, 0.25 + 1e-12, 1.0)


def q_from_fidelity(F: float, convention: str) -> float:
    if convention == PAPER_PRODUCT:
        return q_from_fidelity_paper(F)
    if convention == EXACT:
        return q_from_fidelity_exact(F)
    raise ValueError(f"convention must be one of {CONVENTIONS}")


def q_min_bell(convention: str = PAPER_PRODUCT, F_min: float | None = None) -> float:
    return q_from_fidelity(f_min_hashing() if F_min is None else F_min, convention)


def feasibility(p: float, q: float, q_min: float) -> bool:
    """Purification works iff ``p q > q_min`` and ``p > q``."""
    for name, v in (("p", p), ("q", q), ("q_min", q_min)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1]")
    return p * q > q_min and p > q


@dataclass(frozen=True)
class ThresholdReport:
    target: str
    q_min: float
    p_min: float
    tolerable_noise: float
    convention: str

    def __post_init__(self) -> None:
        if not 0.0 <= self.tolerable_noise <= 1.0:
            raise ValueError("tolerable noise must lie in [0, 1]")

    def as_dict(self) -> dict:
        return {
            "target": self.target,
            "convention": self.convention,
            "q_min": self.q_min,
            "p_min": self.p_min,
            "tolerable_noise": self.tolerable_noise,
        }


def p_min_from_qmin(q_min: float, target: str = "bell", convention: str = PAPER_PRODUCT) -> ThresholdReport:
    """``p_min = sqrt(q_min)`` and the tolerable per-particle noise ``1 - p_min``."""
    if not 0.0 < q_min <= 1.0:
        raise ValueError("q_min must lie in (0, 1]")
    p_min = math.sqrt(q_min)
    return ThresholdReport(target, q_min, p_min, 1.0 - p_min, convention)


# -- cluster states -------------------------------------------------------------

def p_tilde(q: float) -> float:
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    return (3.0 * q + 1.0) / 4.0


def a1_1d(q: float) -> float:
    """Probability that a 1D cluster vertex's graph-basis index is flipped."""
    pt = p_tilde(q)
    e = (1.0 - pt) / 3.0
    return 2.0 * e * (pt**2 + 2.0 * pt * e + e**2) + (pt + e) * (4.0 * e * (pt + e))


def a1_2d(q: float) -> float:
    """Same for the 2D cluster (coordination number four)."""
    pt = p_tilde(q)
    e = (1.0 - pt) / 3.0
    first = (
        pt**4
        + 4.0 * pt**3 * e
        + 4.0 * pt * e**3
        + 6.0 * pt**2 * e**2
        + e**4
        + 24.0 * e**2 * (2.0 * e * pt + pt**2 + e**2)
        + 16.0 * e**4
    )
    second = 8.0 * e * (3.0 * e * pt**2 + 3.0 * e**2 * pt + pt**3 + e**3) + 32.0 * (pt + e) * e**3
    return 2.0 * e * first + (pt + e) * second


def p_example_2d(q: float) -> float:
    """A ``Z`` error on a 2D vertex with a clean neighbourhood: ``((1 - p~)/3) p~^4``."""
    pt = p_tilde(q)
    return (1.0 - pt) / 3.0 * pt**4


@dataclass(frozen=True)
class ClusterCoefficients:
    q: float
    p_tilde: float
    a0: float
    a1: float
    dimension: str

    def __post_init__(self) -> None:
        if abs(self.a0 + self.a1 - 1.0) > 1e-12:
            raise ValueError("a0 + a1 must equal 1")
        if not 0.0 <= self.a1 <= 1.0:
            raise ValueError("a1 must lie in [0, 1]")


def cluster_coefficients(q: float, dimension: str) -> ClusterCoefficients:
    if dimension == "1D":
        a1 = a1_1d(q)
    elif dimension == "2D":
        a1 = a1_2d(q)
    else:
        raise ValueError(f"dimension must be one of {DIMENSIONS}")
    return ClusterCoefficients(q, p_tilde(q), 1.0 - a1, a1, dimension)


def cluster_yield_raw(q: float, dimension: str) -> float:
    """``D = 1 - 2 S(a0, a1)`` for a translation-invariant two-colorable cluster."""
    c = cluster_coefficients(q, dimension)
    return 1.0 - 2.0 * binary_entropy(c.a0, c.a1)


def cluster_yield(q: float, dimension: str) -> tuple[float, float]:
    """``(raw, clamped)`` yield; raw may be negative."""
    raw = cluster_yield_raw(q, dimension)
    return raw, max(raw, 0.0)


def q_min_cluster(dimension: str) -> float:
    return bisect(lambda q: cluster_yield_raw(q, dimension), 0.8, 1.0)


def bell_yield(q: float, convention: str = EXACT) -> tuple[float, float]:
    """``(raw, clamped)`` hashing yield of Werner pairs made by LDN(q) on both particles."""
    if convention == EXACT:
        F = (3.0 * q * q + 1.0) / 4.0
    elif convention == PAPER_PRODUCT:
        F = ((3.0 * q + 1.0) / 4.0) ** 2
    else:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    raw = hashing_yield(F)
    return raw, max(raw, 0.0)


def yield_curve(target: str, q: float, convention: str = EXACT) -> tuple[float, float]:
    if target == "bell":
        return bell_yield(q, convention)
    if target == "cluster1d":
        return cluster_yield(q, "1D")
    if target == "cluster2d":
        return cluster_yield(q, "2D")
    raise ValueError(f"target must be one of {TARGETS}")


def threshold_report(target: str, convention: str = PAPER_PRODUCT) -> ThresholdReport:
    """``q_min`` and ``p_min`` for a target; cluster thresholds do not depend on the convention."""
    if target == "bell":
        q_min = q_min_bell(convention)
    elif target == "cluster1d":
        q_min = q_min_cluster("1D")
    elif target == "cluster2d":
        q_min = q_min_cluster("2D")
    else:
        raise ValueError(f"target must be one of {TARGETS}")
    return p_min_from_qmin(q_min, target, convention)
