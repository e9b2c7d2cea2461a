"""
Alternative models F/G used for power studies and CCC curve plots.

Parameter conventions
---------------------
* ``N(mu, s)``: the second parameter is the standard deviation, except in
  A16 where ``N(1.7, 1.7)`` is read with variance 1.7 so that it matches the
  mean and variance of ``Gamma(1.7, 1)``.
* ``LN(mu, sigma)``: ``exp(N(mu, sigma**2))``, sigma is the log-scale sd.
* ``Laplace(mu, b)`` and ``Cauchy(mu, b)``: location and scale.
* ``Pareto(a)``: cdf ``1 - x**-a`` on ``x >= 1``.
* ``Gamma(k, theta)``: shape and scale.
* ``Anderson(t)``: ``X |X|**t`` with ``X ~ N(0, 1)``.
* ``Lehmann(t)``: cdf ``Phi(x)**t``.

Four families are defined only by citation (Fan, LNC, Subbotin,
Mason-Schuenemeyer).  They are implemented here from their usual textbook
forms and flagged ``fully_specified=False``; power figures for them are
reference-dependent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special, stats

from . import mc
from .core import labels_from_samples, s_from_labels
from .errors import ModelNotFullySpecified, POutOfRange, UnknownModel

Sampler = Callable[[np.random.Generator, int], np.ndarray]
Cdf = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Dist:
    name: str
    sampler: Sampler
    cdf: Cdf | None = None
    fully_specified: bool = True

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        shape = (size,) if np.isscalar(size) else tuple(size)
        return self.sampler(rng, int(np.prod(shape))).reshape(shape)


def normal(mu: float, sd: float, name: str | None = None) -> Dist:
    return Dist(name or f"N({mu:g},{sd:g})", lambda rng, k: rng.normal(mu, sd, k), stats.norm(mu, sd).cdf)


def uniform(a: float = 0.0, b: float = 1.0) -> Dist:
    return Dist(f"U({a:g},{b:g})", lambda rng, k: rng.uniform(a, b, k), stats.uniform(a, b - a).cdf)


def beta(a: float, b: float) -> Dist:
    return Dist(f"Beta({a:g},{b:g})", lambda rng, k: rng.beta(a, b, k), stats.beta(a, b).cdf)


def pareto(a: float) -> Dist:
    return Dist(
        f"Pareto({a:g})",
        lambda rng, k: (1.0 - rng.random(k)) ** (-1.0 / a),
        stats.pareto(a).cdf,
    )


def laplace(loc: float, scale: float) -> Dist:
    return Dist(
        f"Laplace({loc:g},{scale:g})",
        lambda rng, k: rng.laplace(loc, scale, k),
        stats.laplace(loc, scale).cdf,
    )


def lognormal(mu: float, sigma: float) -> Dist:
    return Dist(
        f"LN({mu:g},{sigma:g})",
        lambda rng, k: np.exp(rng.normal(mu, sigma, k)),
        stats.lognorm(s=sigma, scale=math.exp(mu)).cdf,
    )


def anderson(theta: float) -> Dist:
    def draw(rng, k):
        x = rng.standard_normal(k)
        return x * np.abs(x) ** theta

    def cdf(y):
        y = np.asarray(y, dtype=float)
        return special.ndtr(np.sign(y) * np.abs(y) ** (1.0 / (1.0 + theta)))

    return Dist(f"Anderson({theta:g})", draw, cdf)


def chi2(df: float) -> Dist:
    return Dist(f"chi2({df:g})", lambda rng, k: rng.chisquare(df, k), stats.chi2(df).cdf)


def lehmann(theta: float) -> Dist:
    return Dist(
        f"Lehmann({theta:g})",
        lambda rng, k: special.ndtri(rng.random(k) ** (1.0 / theta)),
        lambda x: special.ndtr(np.asarray(x, dtype=float)) ** theta,
    )


def cauchy(loc: float, scale: float) -> Dist:
    return Dist(
        f"Cauchy({loc:g},{scale:g})",
        lambda rng, k: loc + scale * rng.standard_cauchy(k),
        stats.cauchy(loc, scale).cdf,
    )


def exponential(shift: float = 0.0) -> Dist:
    name = "Exp(1)" if shift == 0 else f"Exp(1)+{shift:g}"
    return Dist(name, lambda rng, k: shift + rng.standard_exponential(k), stats.expon(loc=shift).cdf)


def gamma(shape: float, scale: float) -> Dist:
    return Dist(
        f"Gamma({shape:g},{scale:g})",
        lambda rng, k: rng.gamma(shape, scale, k),
        stats.gamma(shape, scale=scale).cdf,
    )


# -- families defined by citation only ----------------------------------------

def fan(theta: float) -> Dist:
    """Local departure from U(-1, 1): density ``(1 + theta cos(2 pi x)) / 2`` on ``|x| <= 1/2``."""
    if not 0 <= theta <= 1:
        raise ValueError("Fan(theta) needs 0 <= theta <= 1")

    def draw(rng, k):
        out = np.empty(k)
        filled = 0
        while filled < k:
            x = rng.uniform(-1.0, 1.0, 2 * (k - filled) + 16)
            bump = np.where(np.abs(x) <= 0.5, theta * np.cos(2 * np.pi * x), 0.0)
            keep = x[rng.random(x.size) * (1.0 + theta) <= 1.0 + bump]
            take = min(keep.size, k - filled)
            out[filled: filled + take] = keep[:take]
            filled += take
        return out

    def cdf(x):
        x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
        inner = np.where(np.abs(x) <= 0.5, theta * np.sin(2 * np.pi * x) / (4 * np.pi), 0.0)
        return (x + 1.0) / 2.0 + inner

    return Dist(f"Fan({theta:g})", draw, cdf, fully_specified=False)


def lnc(sigma1: float, sigma2: float) -> Dist:
    """Two-piece log-normal with median 1: log X is a half-normal of scale sigma1
    below 0 and of scale sigma2 above 0, each half carrying probability 1/2."""

    def draw(rng, k):
        z = rng.standard_normal(k)
        return np.exp(np.where(z < 0, sigma1 * z, sigma2 * z))

    def cdf(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            lx = np.log(np.maximum(x, 0.0))
        return special.ndtr(np.where(lx < 0, lx / sigma1, lx / sigma2))

    return Dist(f"LNC({sigma1:g},{sigma2:g})", draw, cdf, fully_specified=False)


def subbotin(beta_: float) -> Dist:
    """Density proportional to ``exp(-|x|**beta / beta)``; beta = 2 gives N(0, 1)."""
    scale = beta_ ** (1.0 / beta_)

    def draw(rng, k):
        g = rng.gamma(1.0 / beta_, 1.0, k)
        sign = np.where(rng.random(k) < 0.5, -1.0, 1.0)
        return sign * scale * g ** (1.0 / beta_)

    return Dist(f"Subbotin({beta_:g})", draw, stats.gennorm(beta_, scale=scale).cdf, fully_specified=False)


def mason_schuenemeyer(beta_: float, theta: float) -> Dist:
    """Tail contamination of U(0, 1): ``(1-theta) x + theta/2 [x**(1/beta) + 1 - (1-x)**(1/beta)]``."""

    def draw(rng, k):
        u = rng.random(k)
        c = rng.random(k)
        tail = u ** beta_
        return np.where(c < 1 - theta, u, np.where(c < 1 - theta / 2, tail, 1.0 - tail))

    def cdf(x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        t = 1.0 / beta_
        return (1 - theta) * x + theta / 2 * (x ** t + 1.0 - (1.0 - x) ** t)

    return Dist(f"Mason-Schuenemeyer({beta_:g},{theta:g})", draw, cdf, fully_specified=False)


# -- mixtures --------------------------------------------------------------------

def _mix_draw(weights, comps, rng, k):
    which = rng.choice(len(weights), size=k, p=weights)
    out = np.empty(k)
    for c, comp in enumerate(comps):
        sel = which == c
        out[sel] = comp.sampler(rng, int(sel.sum()))
    return out, which


@dataclass(frozen=True)
class Mixture(Dist):
    """Finite mixture, sampled by component selection then component draw."""

    weights: tuple[float, ...] = ()
    components: tuple[Dist, ...] = ()

    def sample_with_components(self, rng: np.random.Generator, k: int) -> tuple[np.ndarray, np.ndarray]:
        return _mix_draw(self.weights, self.components, rng, k)


def mixture(parts: Sequence[tuple[float, Dist]]) -> Mixture:
    weights = tuple(float(w) for w, _ in parts)
    comps = tuple(d for _, d in parts)
    if abs(sum(weights) - 1.0) > 1e-12:
        raise ValueError("mixture weights must sum to 1")

    def mix_cdf(x):
        return sum(w * c.cdf(x) for w, c in zip(weights, comps))

    cdf = mix_cdf if all(c.cdf is not None for c in comps) else None

    return Mixture(
        name="+".join(f"({w:g}){c.name}" for w, c in zip(weights, comps)),
        sampler=lambda rng, k: _mix_draw(weights, comps, rng, k)[0],
        cdf=cdf,
        fully_specified=all(c.fully_specified for c in comps),
        weights=weights,
        components=comps,
    )


# -- registry ----------------------------------------------------------------------

@dataclass(frozen=True)
class AlternativeModel:
    id: str
    description: str
    f: Dist
    g: Dist
    table_power: tuple[int, int] | None = None  # printed (Max, AD) power in percent

    @property
    def fully_specified(self) -> bool:
        return self.f.fully_specified and self.g.fully_specified

    def side(self, side: str) -> Dist:
        if side not in ("F", "G"):
            raise ValueError("side must be 'F' or 'G'")
        return self.f if side == "F" else self.g

    def parameters(self) -> dict:
        return {"F": self.f.name, "G": self.g.name}


def _registry() -> dict[str, AlternativeModel]:
    n01 = normal(0, 1)
    rows = [
        ("NULL", "U(0,1)/U(0,1)", uniform(), uniform(), None),
        ("A1", "N(0,1)/N(0.45,1)", n01, normal(0.45, 1), (76, 86)),
        ("A2", "Pareto(1)/Pareto(1.6)", pareto(1), pareto(1.6), (77, 84)),
        ("A3", "Laplace(0,1)/Laplace(0.4,1.6)", laplace(0, 1), laplace(0.4, 1.6), (75, 79)),
        ("A4", "U[0,1]/[(0.58)U[0,1]+(0.42)Beta(50,50)]", uniform(),
         mixture([(0.58, uniform()), (0.42, beta(50, 50))]), (78, 79)),
        ("A5", "LN(0.92,0.5)/LN(1.08,0.4)", lognormal(0.92, 0.5), lognormal(1.08, 0.4), (77, 77)),
        ("A6", "N(0,1)/[(0.6)N(-0.9,0.37)+(0.4)N(1,0.7)]", n01,
         mixture([(0.6, normal(-0.9, 0.37)), (0.4, normal(1, 0.7))]), (76, 73)),
        ("A7", "N(0,1)/N(0,1.55)", n01, normal(0, 1.55), (75, 69)),
        ("A8", "Fan(0.66)/Uniform(-1,1)", fan(0.66), uniform(-1, 1), (75, 63)),
        ("A9", "N(0,1)/Anderson(1.5)", n01, anderson(1.5), (77, 61)),
        ("A10", "[(0.52)N(0.4,1)+(0.48)chi2_1]/N(0.4,1)",
         mixture([(0.52, normal(0.4, 1)), (0.48, chi2(1))]), normal(0.4, 1), (79, 59)),
        ("A11", "N(0,1)/[(0.8)N(0,1)+(0.2)Lehmann(0.16)]", n01,
         mixture([(0.8, n01), (0.2, lehmann(0.16))]), (75, 57)),
        ("A12", "LN(0,1)/LNC(1,1.8)", lognormal(0, 1), lnc(1, 1.8), (77, 52)),
        ("A13", "Lehmann(1.2)/Subbotin(8)", lehmann(1.2), subbotin(8), (75, 41)),
        ("A14", "N(0,1)/[(0.35)N(0,1)+(0.65)Cauchy(0,1)]", n01,
         mixture([(0.35, n01), (0.65, cauchy(0, 1))]), (75, 38)),
        ("A15", "Exp(1)/[Exp(1)+0.11]", exponential(), exponential(0.11), (75, 38)),
        ("A16", "N(1.7,1.7)/Gamma(1.7,1)", normal(1.7, math.sqrt(1.7), "N(1.7,var=1.7)"), gamma(1.7, 1), (75, 38)),
        ("A17", "N(0,1)/Cauchy(0,0.7)", n01, cauchy(0, 0.7), (79, 26)),
        ("A18", "[U(0,1)]/Mason-Schuenemeyer(20,0.1)", uniform(), mason_schuenemeyer(20, 0.1), (75, 11)),
    ]
    return {r[0]: AlternativeModel(*r) for r in rows}


MODELS: dict[str, AlternativeModel] = _registry()
TABLE_IDS = tuple(f"A{i}" for i in range(1, 19))


def get_model(model: str | AlternativeModel) -> AlternativeModel:
    if isinstance(model, AlternativeModel):
        return model
    try:
        return MODELS[model.upper()]
    except KeyError:
        raise UnknownModel(f"unknown model {model!r}; known: {', '.join(MODELS)}") from None


def catalog() -> list[dict]:
    """Machine-readable model table."""
    return [
        {
            "id": m.id,
            "description": m.description,
            "fully_specified": m.fully_specified,
            "F": m.f.name,
            "G": m.g.name,
            "table_power_max": m.table_power[0] if m.table_power else None,
            "table_power_ad": m.table_power[1] if m.table_power else None,
        }
        for m in MODELS.values()
    ]


def _strict_check(model: AlternativeModel, strict: bool) -> None:
    if strict and not model.fully_specified:
        raise ModelNotFullySpecified(f"{model.id} relies on an externally defined family")


def sample(model, side: str, size: int, seed: int, strict: bool = False) -> np.ndarray:
    """i.i.d. draws from one side of a model, deterministic in ``seed``."""
    model = get_model(model)
    _strict_check(model, strict)
    if size < 1:
        raise ValueError("size must be >= 1")
    stream = 0 if side == "F" else 1
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))
    return model.side(side).sample(rng, size)


# -- CCC curves ----------------------------------------------------------------------

@dataclass(frozen=True)
class CccCurve:
    model: str
    points: np.ndarray
    values: np.ndarray
    replicates: int
    m: int
    n: int
    seed: int | None = None
    se: np.ndarray | None = None

    @property
    def lam(self) -> float:
        return self.m / (self.m + self.n)


_CCC_CHUNK = 25  # rows per draw; m + n can be 10^4 columns


def ccc_grid(size: int = 999, lo: float = 0.0001, hi: float = 0.9999) -> np.ndarray:
    return np.linspace(lo, hi, size)


def _ccc_from_s(s: np.ndarray, m: int, n: int, points: np.ndarray) -> np.ndarray:
    N = m + n
    # ceil(p N) with a guard for products that land a hair above an integer
    idx = np.maximum(1, np.ceil(points * N - 1e-9).astype(int))
    si = s[:, idx - 1]
    return (si / m - (idx[None, :] - si) / n) / np.sqrt(points * (1 - points))[None, :]


def estimate_ccc_curve(
    model,
    points: np.ndarray | None = None,
    replicates: int = 1000,
    m: int = 5000,
    n: int = 5000,
    seed: int = 0,
    workers: int = 1,
) -> CccCurve:
    """Average of ``replicates`` empirical CCC curves at sample sizes (m, n)."""
    model = get_model(model)
    _strict_check(model, True)
    points = ccc_grid() if points is None else np.asarray(points, dtype=float)
    if np.any((points <= 0) | (points >= 1)):
        raise POutOfRange("CCC evaluation points must lie in (0, 1)")

    def block(rng, size):
        acc = np.zeros(points.size)
        acc2 = np.zeros(points.size)
        for start in range(0, size, _CCC_CHUNK):
            k = min(_CCC_CHUNK, size - start)
            x = model.f.sample(rng, (k, m))
            y = model.g.sample(rng, (k, n))
            c = _ccc_from_s(s_from_labels(labels_from_samples(x, y)), m, n, points)
            acc += c.sum(axis=0)
            acc2 += (c * c).sum(axis=0)
        return acc, acc2

    parts = mc.run_blocks(replicates, seed, block, workers)
    total = sum(p[0] for p in parts)
    total2 = sum(p[1] for p in parts)
    mean = total / replicates
    var = np.maximum(total2 / replicates - mean * mean, 0.0)
    se = np.sqrt(var / max(replicates - 1, 1))
    return CccCurve(model.id, points, mean, replicates, m, n, seed, se)


def ccc_analytic(model, points: Sequence[float], lam: float = 0.5) -> np.ndarray:
    """Population CCC from the analytic cdfs, by root-finding ``H(z) = p``."""
    from scipy.optimize import brentq

    model = get_model(model)
    F, G = model.f.cdf, model.g.cdf
    if F is None or G is None:
        raise ModelNotFullySpecified(f"{model.id} lacks an analytic cdf")

    def H(z):
        return lam * float(F(z)) + (1 - lam) * float(G(z))

    out = []
    for p in points:
        lo, hi = -1.0, 1.0
        while H(lo) > p:
            lo *= 2
        while H(hi) < p:
            hi *= 2
        z = brentq(lambda t: H(t) - p, lo, hi, xtol=1e-14, rtol=1e-14, maxiter=500)
        out.append((float(F(z)) - float(G(z))) / math.sqrt(p * (1 - p)))
    return np.array(out)
