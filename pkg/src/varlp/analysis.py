"""Reflexivity classification, lattice estimates, and the ω-LUR counterexample."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .duality import DualFunctional, holder_pairing
from .embeddings import build_embedding, op_norm_2d
from .errors import BudgetOutOfRange, NotDisjoint, SearchHorizonExceeded, TailMetadataMissing
from .exponents import INF, Enumerated, ExponentSeq, as_exponent
from .norm import boxplus, phi_norm
from .vectors import SeqVector

__all__ = [
    "SUPERREFLEXIVE",
    "NON_REFLEXIVE",
    "ReflexivityVerdict",
    "classify_reflexivity",
    "EstimateCheck",
    "check_upper_estimate",
    "check_lower_estimate",
    "random_disjoint_family",
    "WlurWitness",
    "WlurReport",
    "build_wlur_counterexample",
    "evaluate_wlur_witness",
]

SUPERREFLEXIVE = "Superreflexive"
NON_REFLEXIVE = "NonReflexive"
ESTIMATE_SLACK = 1e-10


# --------------------------------------------------------------------------
# reflexivity
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ReflexivityVerdict:
    verdict: str
    liminf: float
    limsup: float
    p0: Optional[float] = None
    q0: Optional[float] = None
    k0: Optional[int] = None
    sides: tuple = ()  # "l1" when liminf = 1, "linf" when limsup = inf
    seeds: tuple = ()  # (side, first host indices of the contained copy)

    @property
    def superreflexive(self) -> bool:
        return self.verdict == SUPERREFLEXIVE

    def holds_at(self, p: ExponentSeq, n: int) -> bool:
        """Check the evidence claim p(n) in [p0, q0] at a queried n >= k0."""
        if not self.superreflexive or self.k0 is None or n < self.k0:
            raise ValueError("no membership claim at this index")
        return self.p0 <= p.value(n) <= self.q0

    def to_dict(self) -> dict:
        d = {"verdict": self.verdict, "liminf": self.liminf, "limsup": self.limsup}
        if self.superreflexive:
            d.update(p0=self.p0, q0=self.q0, k0=self.k0)
        else:
            d["sides"] = list(self.sides)
            d["seeds"] = {side: list(idx) for side, idx in self.seeds}
        return d


def _evidence(p: ExponentSeq) -> tuple[float, float, Optional[int]]:
    if not p.prefix and hasattr(p.tail, "lower") and hasattr(p.tail, "upper"):
        lo, hi = p.tail.lower, p.tail.upper
        if 1.0 < lo and hi < INF:
            return float(lo), float(hi), 1

    def ok(k):
        lo, hi = p.tail_range(k)
        return lo > 1.0 and hi < INF

    try:
        if ok(1):
            k = 1
        else:
            # tail ranges shrink with k: double, then bisect for the first good k0
            hi_k = 2
            while not ok(hi_k):
                hi_k *= 2
                if hi_k > 1 << 40:
                    raise TailMetadataMissing("tail range never leaves the boundary")
            lo_k = hi_k // 2
            while hi_k - lo_k > 1:
                mid = (lo_k + hi_k) // 2
                lo_k, hi_k = (lo_k, mid) if ok(mid) else (mid, hi_k)
            k = hi_k
        lo, hi = p.tail_range(k)
        return float(lo), float(hi), k
    except TailMetadataMissing:
        # only liminf/limsup declared: the bounds are not checkable pointwise
        return float(p.liminf()), float(p.limsup()), None


def classify_reflexivity(p: ExponentSeq, seed_horizon: int = 10**5) -> ReflexivityVerdict:
    """Superreflexive iff liminf p(n) > 1 and limsup p(n) < inf.

    Superreflexive verdicts carry (p0, q0, k0) with p(n) in [p0, q0] for
    n >= k0. Non-reflexive ones name the violated side and the first indices
    of an embedding of l^1 (resp. l^inf) into l^{p(.)}.
    """
    lo, hi = p.liminf(), p.limsup()
    if lo > 1.0 and hi < INF:
        p0, q0, k0 = _evidence(p)
        return ReflexivityVerdict(SUPERREFLEXIVE, lo, hi, p0, q0, k0)
    sides, seeds = [], []
    for side, exponent, bad in (("l1", 1.0, lo == 1.0), ("linf", INF, hi == INF)):
        if not bad:
            continue
        sides.append(side)
        try:
            emb = build_embedding(
                ExponentSeq.constant(exponent), p, epsilon=0.5, horizon=seed_horizon, length=3
            )
            seeds.append((side, emb.selected))
        except SearchHorizonExceeded:
            pass
    return ReflexivityVerdict(NON_REFLEXIVE, lo, hi, sides=tuple(sides), seeds=tuple(seeds))


# --------------------------------------------------------------------------
# upper / lower estimates on disjoint families
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EstimateCheck:
    kind: str  # "upper" or "lower"
    exponent: float
    lhs: float  # ||sum x_i||
    rhs: float  # (sum ||x_i||^r)^(1/r)
    margin: float
    counterexample: Optional[tuple] = None

    @property
    def violated(self) -> bool:
        return self.margin < -ESTIMATE_SLACK

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "exponent": self.exponent,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "violated": self.violated,
        }
        if self.counterexample is not None:
            d["counterexample"] = [v.to_dict() for v in self.counterexample]
        return d


def _check_disjoint(family: Sequence[SeqVector]) -> None:
    seen: set[int] = set()
    for v in family:
        idx = set(v.indices.tolist())
        if seen & idx:
            raise NotDisjoint(f"supports overlap at {sorted(seen & idx)[:5]}")
        seen |= idx


def _sum(family):
    total = SeqVector()
    for v in family:
        total = total + v
    return total


def _margin(family, p, r, kind):
    lhs = phi_norm(_sum(family), p).lower
    norms = [phi_norm(v, p).lower for v in family]
    if r == INF:
        rhs = max(norms, default=0.0)
    else:
        big = max(norms, default=0.0)
        rhs = 0.0 if big == 0.0 else big * math.fsum((t / big) ** r for t in norms) ** (1.0 / r)
    margin = rhs - lhs if kind == "upper" else lhs - rhs
    return lhs, rhs, margin


def _shrink(family: list, violates: Callable[[list], bool]) -> tuple:
    """Greedy shrink: drop whole vectors, then single coefficients, while still violating."""
    fam = list(family)
    progress = True
    while progress:
        progress = False
        for i in range(len(fam)):
            trial = fam[:i] + fam[i + 1 :]
            if trial and violates(trial):
                fam, progress = trial, True
                break
        if progress:
            continue
        for i, v in enumerate(fam):
            if v.indices.size <= 1:
                continue
            for j in range(v.indices.size):
                keep = np.arange(v.indices.size) != j
                w = SeqVector(v.indices[keep], v.coefficients[keep])
                trial = fam[:i] + [w] + fam[i + 1 :]
                if violates(trial):
                    fam, progress = trial, True
                    break
            if progress:
                break
    return tuple(fam)


def _check(family, p, r, kind, shrink):
    family = list(family)
    _check_disjoint(family)
    r = as_exponent(r)
    if not family:
        return EstimateCheck(kind, r, 0.0, 0.0, 0.0)
    lhs, rhs, margin = _margin(family, p, r, kind)
    result = EstimateCheck(kind, r, lhs, rhs, margin)
    if result.violated:
        cex = tuple(family)
        if shrink:
            cex = _shrink(family, lambda fam: _margin(fam, p, r, kind)[2] < -ESTIMATE_SLACK)
        result = EstimateCheck(kind, r, lhs, rhs, margin, cex)
    return result


def check_upper_estimate(family, p: ExponentSeq, p0, shrink: bool = True) -> EstimateCheck:
    """margin = (sum ||x_i||^p0)^(1/p0) - ||sum x_i|| for disjoint x_i (constant 1).

    Holds when p(n) >= p0 wherever the family lives; a margin below
    -1e-10 is reported together with a greedily shrunk counterexample.
    """
    return _check(family, p, p0, "upper", shrink)


def check_lower_estimate(family, p: ExponentSeq, q0, shrink: bool = True) -> EstimateCheck:
    """margin = ||sum x_i|| - (sum ||x_i||^q0)^(1/q0); mirror of the upper check."""
    return _check(family, p, q0, "lower", shrink)


def random_disjoint_family(count: int, max_support: int, seed=0, max_start: int = 16) -> tuple:
    """``count`` vectors on a random index window, dealt out round-robin."""
    if count < 1 or max_support < 1:
        raise ValueError("count and max_support must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    start = int(rng.integers(1, max_start + 1))
    length = int(rng.integers(count, count * max_support + 1))
    window = np.arange(start, start + length)
    coef = rng.normal(size=length)
    coef[coef == 0.0] = 1.0
    return tuple(SeqVector(window[i::count], coef[i::count]) for i in range(count))


# --------------------------------------------------------------------------
# ω-LUR failure
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class WlurWitness:
    budget: float
    c: float
    exponents: ExponentSeq
    indices: tuple
    functional: DualFunctional
    product_value: float

    def pair_norms(self) -> tuple:
        """||(1-2^-i, 1-2^-i)|| in l^{p*(n_i)}_2 for each recorded i."""
        dual = self.exponents.dual()
        return tuple(
            boxplus(1.0 - 2.0**-i, 1.0 - 2.0**-i, dual.value(n)) for i, n in enumerate(self.indices, start=1)
        )


def build_wlur_counterexample(budget: float, depth: int = 20, horizon: int = 10**4) -> WlurWitness:
    """p(k) = 1/(1 - c 2^-k) with 2^c = budget, so prod_k ||I: l^{p(k)}_2 -> l^1_2|| = budget.

    n_i is the smallest index after n_{i-1} with
    ||(1-2^-i, 1-2^-i)||_{p*(n_i)} <= 1 - 2^-(i+1); the functional has
    coefficient 1-2^-i at n_i + 1 and vanishes at 1.
    """
    budget = float(budget)
    if not 1.0 < budget < 2.0:
        raise BudgetOutOfRange(f"budget must lie in (1, 2), got {budget}")
    c = math.log2(budget)
    p = ExponentSeq((), Enumerated("wlur", {"c": c}))
    dual = p.dual()
    indices = []
    n = 0
    for i in range(1, depth + 1):
        a = 1.0 - 2.0**-i
        target = 1.0 - 2.0 ** -(i + 1)
        n += 1
        while boxplus(a, a, dual.value(n)) > target:
            n += 1
            if n > horizon:
                raise SearchHorizonExceeded(f"no admissible n_{i} below {horizon}", indices, i)
        indices.append(n)
    coeffs = SeqVector([n + 1 for n in indices], [1.0 - 2.0**-i for i in range(1, depth + 1)])
    return WlurWitness(budget, c, p, tuple(indices), DualFunctional(coeffs, dual), 2.0**c)


@dataclass(frozen=True)
class WlurReport:
    depth: int
    indices: tuple
    norms: tuple  # ||e_1 + e_{n_i+1}||
    functional_values: tuple  # f(e_{n_i+1})
    functional_at_e1: float
    functional_norm: float  # ||f||_{p*(.)} on the recorded section
    holder_ok: bool
    product_value: float
    partial_product: float  # prod_{k<=60} 2^(1-1/p(k)), numerically
    residual_products: tuple  # prod_{k>n} ||I: l^{p(k)}_2 -> l^1_2|| = 2^(c 2^-n), n = 0..depth

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "indices": list(self.indices),
            "norms": list(self.norms),
            "functional_values": list(self.functional_values),
            "functional_at_e1": self.functional_at_e1,
            "functional_norm": self.functional_norm,
            "holder_ok": self.holder_ok,
            "product_value": self.product_value,
            "partial_product": self.partial_product,
            "residual_products": list(self.residual_products),
        }


def evaluate_wlur_witness(w: WlurWitness, depth: Optional[int] = None) -> WlurReport:
    depth = len(w.indices) if depth is None else int(depth)
    if depth > len(w.indices):
        raise ValueError(f"witness only records {len(w.indices)} indices")
    p = w.exponents
    e1 = SeqVector.unit(1)
    norms, fvals, holder_ok = [], [], True
    for n in w.indices[:depth]:
        x = SeqVector([1, n + 1], [1.0, 1.0])
        norms.append(phi_norm(x, p).lower)
        fvals.append(w.functional(SeqVector.unit(n + 1)))
        holder_ok &= holder_pairing(x, w.functional.coefficients, p).holds
    fnorm = phi_norm(w.functional.coefficients, w.functional.exponents).upper
    partial = math.prod(op_norm_2d(p.value(k), 1.0) for k in range(1, 61))
    residuals = tuple(2.0 ** (w.c * 2.0**-n) for n in range(depth + 1))
    return WlurReport(
        depth,
        w.indices[:depth],
        tuple(norms),
        tuple(fvals),
        w.functional(e1),
        fnorm,
        bool(holder_ok),
        w.product_value,
        partial,
        residuals,
    )
