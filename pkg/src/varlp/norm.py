"""The recursive variable-exponent norm.

|||x|||_(1) = |x_1| ⊞_{p(1)} |x_2| and |||x|||_(k) = |||x|||_(k-1) ⊞_{p(k)} |x_{k+1}|;
the norm is the (nondecreasing) limit in k. Coordinate n >= 2 therefore enters
through the exponent p(n-1). Since ``t ⊞ 0 == t`` exactly in floating point, a
finite vector is folded over its support only, with the same result bit for bit
as the dense recursion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import HorizonExceeded, InvalidTailCertificate, TailBoundMissing
from .exponents import INF, ExponentSeq, as_exponent
from .vectors import SeqVector

__all__ = [
    "boxplus",
    "NormEnclosure",
    "coordinate_exponents",
    "seminorm_prefix",
    "seminorms",
    "phi_norm",
    "norm",
    "dual_exponent",
    "DEFAULT_TOL",
    "DEFAULT_HORIZON",
]

DEFAULT_TOL = 1e-9
DEFAULT_HORIZON = 10**6

_EPS = np.finfo(float).eps


def boxplus(t: float, s: float, p) -> float:
    """(t^p + s^p)^(1/p), or max(t, s) for p = inf.

    The larger argument is factored out so huge finite p cannot overflow.
    """
    if t < 0 or s < 0:
        raise ValueError("boxplus takes nonnegative arguments")
    return kernels.boxplus(t, s, as_exponent(p))


@dataclass(frozen=True)
class NormEnclosure:
    lower: float
    upper: float
    k_used: int
    converged: bool = True
    tail_bound: float = 0.0

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def value(self) -> float:
        """Midpoint; equals the norm when the enclosure is exact."""
        return self.lower if self.exact else 0.5 * (self.lower + self.upper)

    def __contains__(self, v: float) -> bool:
        return self.lower <= v <= self.upper

    def to_dict(self):
        return {
            "lower": self.lower,
            "upper": self.upper,
            "k_used": self.k_used,
            "exact": self.exact,
            "converged": self.converged,
        }


def coordinate_exponents(indices, p: ExponentSeq) -> np.ndarray:
    """Exponent that combines each coordinate into the fold: p(n-1), and inf for n = 1.

    Coordinate 1 is always folded into a zero accumulator, where every
    exponent gives the same result.
    """
    idx = np.asarray(indices, dtype=np.int64)
    out = np.full(idx.size, INF)
    rest = idx >= 2
    if rest.any():
        out[rest] = p.values_at(idx[rest] - 1)
    return out


def seminorm_prefix(x: SeqVector, p: ExponentSeq, k: int) -> float:
    """|||x|||_(k): the fold over coordinates 1..k+1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if x.is_finite:
        keep = x.indices <= k + 1
        idx = x.indices[keep]
        return kernels.fold(np.abs(x.coefficients[keep]), coordinate_exponents(idx, p))
    mags = np.abs(x.block(1, k + 2))
    return kernels.fold(mags, coordinate_exponents(np.arange(1, k + 2), p))


def seminorms(x: SeqVector, p: ExponentSeq, kmax: int) -> np.ndarray:
    """[|||x|||_(1), ..., |||x|||_(kmax)]."""
    mags = np.abs(x.block(1, kmax + 2))
    running = kernels.fold_running(mags, coordinate_exponents(np.arange(1, kmax + 2), p))
    # running[j] has consumed coordinates 1..j+1, i.e. it is |||x|||_(j)
    return running[1:]


def phi_norm(
    x: SeqVector,
    p: ExponentSeq,
    tol: float = DEFAULT_TOL,
    horizon: int = DEFAULT_HORIZON,
    strict: bool = False,
) -> NormEnclosure:
    """Enclose the norm of ``x`` in ``l^{p(.)}``.

    Finite vectors give an exact enclosure. Generator-backed vectors need a
    tail certificate (k0, pmin, bound): replacing every combining exponent past
    k0 by pmin can only increase the fold, so
    ``|||x|||_(K) <= norm <= |||x|||_(K) ⊞_pmin R_K`` with R_K the certified
    pmin-norm of the coordinates beyond K+1. K grows until the relative width
    drops to ``tol`` or K reaches ``horizon``; in the latter case the
    enclosure comes back with ``converged=False`` (or raises when ``strict``).
    """
    if x.is_finite:
        if x.indices.size == 0:
            return NormEnclosure(0.0, 0.0, 1)
        val = kernels.fold(np.abs(x.coefficients), coordinate_exponents(x.indices, p))
        return NormEnclosure(val, val, max(x.max_index - 1, 1))

    cert = x.certificate
    if cert is None:
        raise TailBoundMissing("infinitely supported vector without a tail certificate")
    k0, pmin = cert.k0, cert.pmin
    try:
        inf_tail, _ = p.tail_range(k0)
    except Exception:  # no metadata; every used exponent is still checked below
        inf_tail = None
    if inf_tail is not None and inf_tail < pmin:
        raise InvalidTailCertificate(f"pmin={pmin} exceeds inf_(n>={k0}) p(n) = {inf_tail}")

    if pmin != INF:
        tail_mass = cert.bound**pmin
        guard = 8.0 * _EPS * tail_mass
        powers = []  # |x_n|^pmin for k0 < n <= consumed

    acc = 0.0
    consumed = 0  # coordinates 1..consumed are folded in
    target = max(k0 + 1, 64)
    limit = horizon + 1  # depth K uses coordinates 1..K+1
    lower = upper = rem_norm = 0.0
    while True:
        target = min(target, limit)
        idx = np.arange(consumed + 1, target + 1)
        mags = np.abs(x.block(consumed + 1, target + 1))
        exps = coordinate_exponents(idx, p)
        past = idx - 1 >= k0
        if np.any(exps[past] < pmin):
            bad = int(idx[past][np.argmax(exps[past] < pmin)]) - 1
            raise InvalidTailCertificate(f"p({bad}) = {p.value(bad)} < pmin = {pmin}")
        acc = kernels.fold(mags, exps, acc)
        if pmin != INF:
            powers.extend((mags[idx > k0] ** pmin).tolist())
        consumed = target

        if consumed >= k0:
            if pmin == INF:
                rem_norm = cert.bound
            else:
                rem = max(tail_mass - math.fsum(powers), 0.0) + guard
                rem_norm = float(rem ** (1.0 / pmin))
            lower = acc
            upper = math.nextafter(kernels.boxplus(acc, rem_norm, pmin), INF)
            if upper == 0.0 or upper - lower <= tol * upper:
                return NormEnclosure(lower, upper, consumed - 1, True, rem_norm)
        if consumed >= limit:
            enc = NormEnclosure(lower, upper if consumed >= k0 else INF, consumed - 1, False, rem_norm)
            if strict:
                raise HorizonExceeded(
                    f"enclosure width {enc.width:.3g} above tol at depth {horizon}", enc
                )
            return enc
        target = 2 * consumed


def norm(x: SeqVector, p: ExponentSeq) -> float:
    """Exact norm of a finitely supported vector."""
    enc = phi_norm(x, p)
    return enc.lower


def dual_exponent(p: ExponentSeq) -> ExponentSeq:
    """Pointwise conjugate p* with 1/p + 1/p* = 1 (1 <-> inf)."""
    return p.dual()
