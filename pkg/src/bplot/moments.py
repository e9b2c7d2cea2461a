"""
Exact null moments of the unweighted process ``P_hat`` and of the ROC-type
process ``U_hat``, together with a brute-force enumeration that checks them.

Closed forms (F = G continuous, ``eta^2 = mn/N``)::

    E U_hat(p)   = eta (p - ceil(pm)/(m+1))
    Var U_hat(p) = eta^2 ceil(pm)(m - ceil(pm) + 1)(N+1) / ((m+1)^2 (m+2) n)
    E P_hat(p)   = 0
    Var P_hat(p) = eta^2 ceil(pN)(N - ceil(pN)) / (mn(N-1))

Each function accepts ``exact=True`` to work in rational arithmetic; the mean
of ``U_hat`` is irrational through ``eta``, so the exact path exposes its
rational factor ``E U_hat / eta`` via :func:`mean_u_over_eta`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Literal, Sequence

import numpy as np

from .core import _ceil_mul
from .errors import POutOfRange, TooLargeToEnumerate

ENUMERATION_LIMIT = 10**6


def _check_p(p, closed_right: bool = True) -> None:
    ok = 0 < p <= 1 if closed_right else 0 < p < 1
    if not ok:
        raise POutOfRange(f"p={p} outside {'(0, 1]' if closed_right else '(0, 1)'}")


def _ceil(p, k: int) -> int:
    return _ceil_mul(p, k)


def eta_squared(m: int, n: int) -> Fraction:
    return Fraction(m * n, m + n)


def mean_u_over_eta(m: int, n: int, p) -> Fraction:
    _check_p(p)
    return Fraction(p) - Fraction(_ceil(p, m), m + 1)


def exact_mean_u(m: int, n: int, p) -> float:
    return math.sqrt(m * n / (m + n)) * float(mean_u_over_eta(m, n, p))


def exact_mean_p(m: int, n: int, p) -> float:
    _check_p(p)
    return 0.0


def exact_var_u(m: int, n: int, p, exact: bool = False):
    _check_p(p)
    N = m + n
    c = _ceil(p, m)
    v = eta_squared(m, n) * Fraction(c * (m - c + 1) * (N + 1), (m + 1) ** 2 * (m + 2) * n)
    return v if exact else float(v)


def exact_var_p(m: int, n: int, p, exact: bool = False):
    _check_p(p)
    N = m + n
    c = _ceil(p, N)
    v = eta_squared(m, n) * Fraction(c * (N - c), m * n * (N - 1))
    return v if exact else float(v)


def delta_curve(m: int, n: int, p) -> float:
    """Excess of Var U_hat over Var P_hat relative to the limiting variance p(1-p)."""
    _check_p(p, closed_right=False)
    return (exact_var_u(m, n, p) - exact_var_p(m, n, p)) / (float(p) * (1 - float(p)))


@dataclass(frozen=True)
class MomentCurve:
    m: int
    n: int
    process: Literal["u_hat", "p_hat"]
    kind: Literal["mean", "variance"]

    @property
    def evaluator(self) -> Callable[[float], float]:
        table = {
            ("u_hat", "mean"): exact_mean_u,
            ("u_hat", "variance"): exact_var_u,
            ("p_hat", "mean"): exact_mean_p,
            ("p_hat", "variance"): exact_var_p,
        }
        fn = table[(self.process, self.kind)]
        return lambda p: fn(self.m, self.n, p)

    def __call__(self, p) -> float:
        return self.evaluator(p)


# -- enumeration oracle -------------------------------------------------------------

@dataclass(frozen=True)
class EnumeratedMoments:
    """Exact moments at one p from all C(N, m) label assignments.

    Means are stored divided by eta so that everything stays rational.
    """

    p: Fraction
    mean_u_over_eta: Fraction
    var_u: Fraction
    mean_p_over_eta: Fraction
    var_p: Fraction
    configurations: int

    def as_floats(self, m: int, n: int) -> dict[str, float]:
        eta = math.sqrt(m * n / (m + n))
        return {
            "p": float(self.p),
            "mean_u": eta * float(self.mean_u_over_eta),
            "var_u": float(self.var_u),
            "mean_p": eta * float(self.mean_p_over_eta),
            "var_p": float(self.var_p),
        }


def configurations(m: int, n: int) -> Iterable[tuple[int, ...]]:
    """Pooled positions (0-based) of the first sample, all C(N, m) of them."""
    return combinations(range(m + n), m)


def enumerate_null_moments(m: int, n: int, p_list: Sequence) -> list[EnumeratedMoments]:
    """Exhaust every equally likely interleaving and return exact moments.

    For each configuration the unscaled processes are
    ``P_hat/eta = S_i/m - T_i/n`` at ``i = ceil(pN)`` and
    ``U_hat/eta = p - (R_k - k)/n`` at ``k = ceil(pm)``.
    """
    N = m + n
    total = math.comb(N, m)
    if total > ENUMERATION_LIMIT:
        raise TooLargeToEnumerate(f"C({N},{m}) = {total} exceeds {ENUMERATION_LIMIT}")
    ps = [Fraction(p) for p in p_list]
    for p in ps:
        _check_p(p)
    i_idx = [max(1, math.ceil(p * N)) for p in ps]
    k_idx = [max(1, math.ceil(p * m)) for p in ps]

    # sums of the integer numerators; denominators are folded in at the end
    # P_hat/eta = (n S_i - m T_i)/(mn) = (N S_i - m i)/(mn)
    # U_hat/eta = p - (R_k - k)/n
    sp = [0] * len(ps)
    sp2 = [0] * len(ps)
    su = [0] * len(ps)
    su2 = [0] * len(ps)
    for pos in configurations(m, n):
        # R_k = pos[k-1] + 1; S_i = #{pos < i}
        for j, (i, k) in enumerate(zip(i_idx, k_idx)):
            s_i = sum(1 for q in pos if q < i)
            a = N * s_i - m * i
            sp[j] += a
            sp2[j] += a * a
            g = pos[k - 1] + 1 - k
            su[j] += g
            su2[j] += g * g

    eta2 = eta_squared(m, n)
    out = []
    for j, p in enumerate(ps):
        mean_p = Fraction(sp[j], total * m * n)
        e2_p = Fraction(sp2[j], total * (m * n) ** 2)
        mean_g = Fraction(su[j], total * n)
        e2_g = Fraction(su2[j], total * n * n)
        out.append(EnumeratedMoments(
            p=p,
            mean_u_over_eta=p - mean_g,
            var_u=eta2 * (e2_g - mean_g * mean_g),
            mean_p_over_eta=mean_p,
            var_p=eta2 * (e2_p - mean_p * mean_p),
            configurations=total,
        ))
    return out


def s_distribution(m: int, n: int, k: int) -> dict[int, Fraction]:
    """Enumerated law of S_k (first-sample count among the k smallest)."""
    N = m + n
    total = math.comb(N, m)
    if total > ENUMERATION_LIMIT:
        raise TooLargeToEnumerate(f"C({N},{m}) = {total} exceeds {ENUMERATION_LIMIT}")
    counts: dict[int, int] = {}
    for pos in configurations(m, n):
        s = sum(1 for q in pos if q < k)
        counts[s] = counts.get(s, 0) + 1
    return {s: Fraction(c, total) for s, c in sorted(counts.items())}


def hypergeom_pmf(N: int, k: int, m: int, s: int) -> Fraction:
    """P(S_k = s) for S_k ~ Hypergeometric(N, k, m), exactly."""
    n = N - m
    if s < 0 or s > min(k, m) or k - s > n:
        return Fraction(0)
    return Fraction(math.comb(m, s) * math.comb(n, k - s), math.comb(N, k))


def variance_table(m: int, n: int, points: np.ndarray) -> dict[str, np.ndarray]:
    return {
        "p": points,
        "var_u": np.array([exact_var_u(m, n, p) for p in points]),
        "var_p": np.array([exact_var_p(m, n, p) for p in points]),
        "asymptotic": points * (1 - points),
    }
