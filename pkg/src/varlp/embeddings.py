"""Almost isometric embeddings between variable-exponent spaces.

The distortion of the identity l^{q(.)} -> l^{p(n_.)} is bounded by the product
of the two-dimensional identity norms ||I: l^{q(k)}_2 -> l^{p(n_k)}_2||, one
factor per fold step. :func:`build_embedding` picks host indices greedily so
that both products stay within the budget.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels
from .duality import SubspaceMap, extract_subspace, lift_vector
from .errors import InvalidExponent, InvalidRateSide, SearchHorizonExceeded, TailMetadataMissing
from .exponents import (
    INF,
    Constant,
    Enumerated,
    ExponentSeq,
    as_exponent,
    inverse,
)
from .norm import phi_norm
from .vectors import SeqVector

__all__ = [
    "op_norm_2d",
    "op_norm_2d_grid",
    "EmbeddingMap",
    "build_embedding",
    "universal_exponents",
    "ClusterPoint",
    "convergent_subsequence",
    "pathological_exponents",
    "DistortionReport",
    "certify_distortion",
    "step_budget",
    "DEFAULT_SEARCH_HORIZON",
]

DEFAULT_SEARCH_HORIZON = 10**7


def op_norm_2d(p_from, q_to) -> float:
    """||I: l^{p_from}_2 -> l^{q_to}_2|| = 2^max(0, 1/q_to - 1/p_from)."""
    p, q = as_exponent(p_from), as_exponent(q_to)
    return 2.0 ** max(0.0, inverse(q) - inverse(p))


def op_norm_2d_grid(p_from, q_to, angles: int = 10_001) -> float:
    """Grid-plus-refinement maximum of ||v||_q / ||v||_p over the unit circle.

    Independent of the closed form: only the two-term fold is evaluated.
    """
    p, q = as_exponent(p_from), as_exponent(q_to)
    theta = np.linspace(0.0, 0.5 * np.pi, angles)

    def ratio(t):
        pts = np.abs(np.stack([np.cos(t), np.sin(t)], axis=1))
        num = kernels.fold_rows(pts, np.full(pts.shape, q))
        den = kernels.fold_rows(pts, np.full(pts.shape, p))
        return num / den

    vals = ratio(theta)
    i = int(np.argmax(vals))
    h = theta[1] - theta[0]
    res = minimize_scalar(
        lambda t: -ratio(np.array([t]))[0],
        bounds=(max(theta[i] - h, 0.0), min(theta[i] + h, 0.5 * np.pi)),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return max(float(vals[i]), float(-res.fun))


def step_budget(epsilon: float, k: int) -> float:
    """1 + delta_k = (1+eps)^(2^-k); the product over k >= 1 is 1 + eps."""
    return (1.0 + epsilon) ** (2.0**-k)


@dataclass(frozen=True)
class EmbeddingMap:
    selected: tuple
    source: ExponentSeq
    host: ExponentSeq
    epsilon: float
    forward_factors: tuple
    backward_factors: tuple

    @property
    def forward_bound(self) -> float:
        return math.prod(self.forward_factors)

    @property
    def backward_bound(self) -> float:
        return math.prod(self.backward_factors)

    @property
    def dimension(self) -> int:
        return len(self.selected) + 1

    @property
    def subspace(self) -> SubspaceMap:
        return extract_subspace(self.host, self.selected)

    def apply(self, y: SeqVector) -> SeqVector:
        return lift_vector(y, self.subspace)

    def residual_products(self) -> tuple:
        """prod_{k >= j} forward_k * backward_k for j = 1..K (a distortion bound on the Q-tail)."""
        steps = [f * b for f, b in zip(self.forward_factors, self.backward_factors)]
        out, acc = [], 1.0
        for s in reversed(steps):
            acc *= s
            out.append(acc)
        return tuple(reversed(out))

    def to_dict(self) -> dict:
        return {
            "selected": list(self.selected),
            "source_values": [self.source.value(k) for k in range(1, len(self.selected) + 1)],
            "host_values": list(self.subspace.q_values),
            "targets": list(self.subspace.targets),
            "forward_factors": list(self.forward_factors),
            "backward_factors": list(self.backward_factors),
            "forward_bound": self.forward_bound,
            "backward_bound": self.backward_bound,
            "epsilon": self.epsilon,
        }


def build_embedding(
    q_target: ExponentSeq,
    p_host: ExponentSeq,
    epsilon: float,
    horizon: int = DEFAULT_SEARCH_HORIZON,
    length: Optional[int] = None,
) -> EmbeddingMap:
    """Greedily embed the first ``length`` steps of l^{q(.)} into l^{p(.)}.

    Step k takes the smallest host index n_k > n_{k-1} whose exponent puts
    both two-dimensional identity norms under (1+eps)^(2^-k). ``length``
    defaults to the length of the target's explicit prefix; a selection of K
    indices embeds K+1 coordinates.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    K = len(q_target.prefix) if length is None else int(length)
    if K < 1:
        raise ValueError("nothing to embed: give a target prefix or a length >= 1")

    selected, fwd, bwd = [], [], []
    n_prev = 0
    for k in range(1, K + 1):
        qk = q_target.value(k)
        bound = step_budget(epsilon, k)
        start, block = n_prev + 1, 1024
        n = -1
        while n < 0:
            if start > horizon:
                raise SearchHorizonExceeded(
                    f"no admissible host index for step {k} (q={qk}) below {horizon}",
                    selected,
                    k,
                )
            stop = min(start + block, horizon + 1)
            i = kernels.first_admissible(p_host.inverse_values(start, stop), inverse(qk), bound)
            if i >= 0:
                n = start + i
            else:
                start, block = stop, min(2 * block, 1 << 20)
        pn = p_host.value(n)
        f, b = op_norm_2d(qk, pn), op_norm_2d(pn, qk)
        assert f <= bound and b <= bound, "scan and closed form disagree"
        selected.append(n)
        fwd.append(f)
        bwd.append(b)
        n_prev = n
    return EmbeddingMap(tuple(selected), q_target, p_host, float(epsilon), tuple(fwd), tuple(bwd))


def universal_exponents() -> ExponentSeq:
    """Q ∩ [1, inf) enumerated breadth-first: by a+b, then a, over reduced a/b."""
    return ExponentSeq((), Enumerated("universal-rationals"))


@dataclass(frozen=True)
class ClusterPoint:
    limit: float
    indices: tuple
    oscillation: float  # spread of the witnesses in the chart t -> 1/t


def convergent_subsequence(
    q: ExponentSeq,
    probe_depth: int,
    start: int = 1,
    around=None,
    min_count: int = 8,
) -> ClusterPoint:
    """A convergent subsequence of q inside the window [start, start+probe_depth).

    When q is known to converge (liminf == limsup) the whole window past the
    prefix is the witness. Otherwise bisect the chart [0, 1] of [1, inf],
    keeping the half with more window points (or the half holding
    ``around``), until fewer than ``min_count`` points would remain.
    """
    if probe_depth < 1:
        raise ValueError("probe_depth must be >= 1")
    stop = start + probe_depth
    if around is None:
        try:
            lo, hi = q.liminf(), q.limsup()
        except TailMetadataMissing:
            lo = hi = None
        if lo is not None and lo == hi:
            first = max(start, len(q.prefix) + 1)
            if first < stop:
                inv = q.inverse_values(first, stop)
                osc = float(np.max(np.abs(inv - inverse(lo))))
                return ClusterPoint(lo, tuple(range(first, stop)), osc)

    vals = q.values(start, stop)
    u = q.inverse_values(start, stop)
    idx = np.arange(start, stop)
    mask = np.ones(u.size, dtype=bool)
    a, b = 0.0, 1.0
    target = None if around is None else inverse(as_exponent(around))
    for _ in range(64):
        mid = 0.5 * (a + b)
        left = mask & (u <= mid)
        right = mask & (u > mid)
        if target is not None:
            take_left = target <= mid
        else:
            take_left = left.sum() >= right.sum()
        chosen = left if take_left else right
        if chosen.sum() < min_count:
            break
        mask = chosen
        a, b = (a, mid) if take_left else (mid, b)
        if b - a < 1e-15:
            break
    wu = u[mask]
    umin, umax = float(wu.min()), float(wu.max())
    if umin == umax:
        limit = float(vals[mask][0])
    else:
        c = 0.5 * (umin + umax)
        limit = INF if c == 0.0 else 1.0 / c
    return ClusterPoint(limit, tuple(int(n) for n in idx[mask]), umax - umin)


Schedule = Union[Sequence[float], Callable[[int], float], None]


def _check_rates(p: float, rates: Sequence[float]) -> None:
    below = p <= 2.0
    for i, r in enumerate(rates, start=1):
        if not r > 1.0:
            raise InvalidRateSide(f"r_{i} = {r} must exceed 1")
        if below and not r < p:
            raise InvalidRateSide(f"p = {p} <= 2 needs r_i < p; r_{i} = {r}")
        if not below and not r > p:
            raise InvalidRateSide(f"p = {p} > 2 needs r_i > p; r_{i} = {r}")
    for i in range(1, len(rates)):
        if below and rates[i] < rates[i - 1] or not below and rates[i] > rates[i - 1]:
            raise InvalidRateSide(f"rates must approach p = {p} monotonically (at i = {i + 1})")


def pathological_exponents(p, block_lengths: Schedule = None, rates: Schedule = None) -> ExponentSeq:
    """Blocks of constant exponent r_l, the l-th block of length j_l, with r_l -> p.

    With no schedules the registered ``blocks`` enumeration is used: j_l = l and
    r_l = p - (p-1) 2^-l for p <= 2, r_l = p + 2^-l for p > 2. Finite schedules
    give a prefix followed by the constant p; callables (1-based) give an
    infinite block sequence. Rates are checked on the side of p that the
    type/cotype argument needs.
    """
    p = as_exponent(p)
    if not 1.0 < p < INF:
        raise InvalidExponent("pathological exponents need 1 < p < inf")
    if block_lengths is None and rates is None:
        return ExponentSeq((), Enumerated("blocks", {"limit": p}))
    if block_lengths is None:
        block_lengths = lambda l: l  # noqa: E731
    if rates is None:
        raise ValueError("rates are required when block lengths are given")

    if callable(block_lengths) != callable(rates):
        raise ValueError("block lengths and rates must both be finite lists or both callables")
    if callable(rates):
        rate, length = rates, block_lengths
        _check_rates(p, [rate(l) for l in range(1, 65)])

        def gen(n):
            l, end = 1, int(length(1))
            while end < n:
                l += 1
                end += int(length(l))
            return rate(l)

        return ExponentSeq((), Enumerated("custom-blocks", generator=gen, declared_liminf=p, declared_limsup=p))

    rates, block_lengths = [float(r) for r in rates], [int(j) for j in block_lengths]
    if len(rates) != len(block_lengths):
        raise ValueError("rates and block lengths differ in length")
    if any(j < 1 for j in block_lengths):
        raise ValueError("block lengths must be positive")
    _check_rates(p, rates)
    prefix = [r for r, j in zip(rates, block_lengths) for _ in range(j)]
    return ExponentSeq(tuple(prefix), Constant(p))


@dataclass(frozen=True)
class DistortionReport:
    max_ratio: float
    min_ratio: float
    residual_products: tuple
    forward_bound: float
    backward_bound: float
    samples: int = 0
    ratios: tuple = field(default=(), repr=False, compare=False)

    @property
    def respects_bounds(self) -> bool:
        return (
            self.max_ratio <= self.forward_bound + 1e-9
            and self.min_ratio >= 1.0 / self.backward_bound - 1e-9
        )

    def to_dict(self):
        return {
            "samples": self.samples,
            "max_ratio": self.max_ratio,
            "min_ratio": self.min_ratio,
            "forward_bound": self.forward_bound,
            "backward_bound": self.backward_bound,
            "residual_products": list(self.residual_products),
        }


def certify_distortion(emb: EmbeddingMap, samples: int = 1000, seed: int = 0) -> DistortionReport:
    """Empirical ||phi(y)|| / ||y|| over random y, next to the product certificate."""
    rng = np.random.default_rng(seed)
    d = emb.dimension
    smap = emb.subspace
    ratios = []
    for _ in range(samples):
        keep = rng.random(d) < 0.7
        if not keep.any():
            keep[rng.integers(d)] = True
        coef = rng.normal(size=d) * 10.0 ** rng.uniform(-2, 2, size=d)
        y = SeqVector(np.arange(1, d + 1)[keep], coef[keep])
        src = phi_norm(y, emb.source).lower
        img = phi_norm(lift_vector(y, smap), emb.host).lower
        ratios.append(img / src)
    return DistortionReport(
        max(ratios),
        min(ratios),
        emb.residual_products(),
        emb.forward_bound,
        emb.backward_bound,
        samples,
        tuple(ratios),
    )
