"""Exponent sequences p: N -> [1, inf].

An :class:`ExponentSeq` is a finite prefix followed by a tail descriptor. Tails
are indexed by the *global* position ``n`` (a prefix only overrides the first
entries), and each tail knows its liminf/limsup and bounds on its values past
any index, which is what the classification and certificate code relies on.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import InvalidExponent, TailMetadataMissing

INF = math.inf

__all__ = [
    "INF",
    "as_exponent",
    "dual_value",
    "inverse",
    "Tail",
    "Constant",
    "ConvergentTo",
    "Enumerated",
    "Clamped",
    "DualTail",
    "ExponentSeq",
    "rational_at",
    "CONVERGENT_RULES",
    "ENUMERATIONS",
]


def as_exponent(value) -> float:
    """Validate and convert to a float in [1, inf]; accepts the string ``"inf"``."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "+inf"):
            return INF
        try:
            value = float(text)
        except ValueError:
            raise InvalidExponent(f"not an exponent: {value!r}") from None
    try:
        p = float(value)
    except (TypeError, ValueError):
        raise InvalidExponent(f"not an exponent: {value!r}") from None
    if math.isnan(p) or p < 1.0:
        raise InvalidExponent(f"exponent must lie in [1, inf], got {value!r}")
    return p


def dual_value(p: float) -> float:
    if p == 1.0:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def inverse(p: float) -> float:
    """Chart of [1, inf] onto [0, 1]; inf is an ordinary point here."""
    return 0.0 if p == INF else 1.0 / p


def _inverse_array(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        out = 1.0 / values
    out[np.isinf(values)] = 0.0
    return out


def _clamp(v: float, lo: float, hi: float) -> float:
    return min(hi, max(v, lo))


# --------------------------------------------------------------------------
# rational enumeration
# --------------------------------------------------------------------------


class _RationalTable:
    """Reduced fractions a/b >= 1 ordered by a+b, then a.

    ``cum[s]`` is the number of such fractions with a+b <= s. For s >= 3 the
    count with a+b == s is phi(s)/2; the single fraction 1/1 has sum 2.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._cum = np.zeros(3, dtype=np.int64)
        self._cum[2] = 1

    def _extend(self, smax: int) -> None:
        phi = np.arange(smax + 1, dtype=np.int64)
        for i in range(2, smax + 1):
            if phi[i] == i:
                phi[i::i] -= phi[i::i] // i
        counts = phi // 2
        counts[:2] = 0
        counts[2] = 1
        self._cum = np.cumsum(counts)

    def _ensure(self, n: int) -> np.ndarray:
        cum = self._cum
        if cum[-1] >= n:
            return cum
        with self._lock:
            smax = len(self._cum) - 1
            while self._cum[-1] < n:
                smax = max(2 * smax, 64)
                self._extend(smax)
            return self._cum

    @staticmethod
    def _numerators(s: int) -> np.ndarray:
        a = np.arange((s + 1) // 2, s, dtype=np.int64)
        return a[np.gcd(a, s) == 1]

    def at(self, n: int) -> tuple[int, int]:
        if n < 1:
            raise ValueError("index must be >= 1")
        cum = self._ensure(n)
        s = int(np.searchsorted(cum, n))
        a = int(self._numerators(s)[n - cum[s - 1] - 1])
        return a, s - a

    def block(self, start: int, stop: int) -> np.ndarray:
        """Float values at indices start..stop-1."""
        if stop <= start:
            return np.empty(0)
        cum = self._ensure(stop - 1)
        s_lo = int(np.searchsorted(cum, start))
        s_hi = int(np.searchsorted(cum, stop - 1))
        parts = []
        for s in range(s_lo, s_hi + 1):
            a = self._numerators(s)
            parts.append(a / (s - a))
        vals = np.concatenate(parts)
        offset = start - cum[s_lo - 1] - 1
        return vals[offset : offset + (stop - start)]


_RATIONALS = _RationalTable()


def rational_at(n: int) -> Fraction:
    """The n-th term (1-based) of the breadth-first enumeration of Q ∩ [1, inf)."""
    a, b = _RATIONALS.at(n)
    return Fraction(a, b)


# --------------------------------------------------------------------------
# tails
# --------------------------------------------------------------------------


class Tail:
    """Base tail descriptor; subclasses override what they can compute."""

    def value(self, n: int) -> float:
        raise NotImplementedError

    def values(self, start: int, stop: int) -> np.ndarray:
        return np.array([self.value(n) for n in range(start, stop)], dtype=np.float64)

    def values_at(self, idx) -> np.ndarray:
        return np.array([self.value(int(n)) for n in idx], dtype=np.float64)

    def liminf(self) -> float:
        raise TailMetadataMissing(f"{self!r} has no liminf metadata")

    def limsup(self) -> float:
        raise TailMetadataMissing(f"{self!r} has no limsup metadata")

    def tail_range(self, k: int) -> tuple[float, float]:
        """(lower, upper) bounds on the values at indices n >= k."""
        raise TailMetadataMissing(f"{self!r} has no range metadata")

    def dual(self) -> "Tail":
        return DualTail(self)

    def to_dict(self) -> dict:
        raise TypeError(f"{type(self).__name__} is not serializable")


@dataclass(frozen=True)
class Constant(Tail):
    exponent: float

    def __post_init__(self):
        object.__setattr__(self, "exponent", as_exponent(self.exponent))

    def value(self, n):
        return self.exponent

    def values(self, start, stop):
        return np.full(max(stop - start, 0), self.exponent)

    def values_at(self, idx):
        return np.full(len(idx), self.exponent)

    def liminf(self):
        return self.exponent

    def limsup(self):
        return self.exponent

    def tail_range(self, k):
        return self.exponent, self.exponent

    def dual(self):
        return Constant(dual_value(self.exponent))

    def to_dict(self):
        return {"kind": "constant", "value": self.exponent}


@dataclass(frozen=True)
class _Rule:
    func: Callable
    limit: Callable
    tail_range: Callable
    check: Callable


def _approach_check(limit, scale, power):
    as_exponent(limit)
    if limit == INF:
        raise InvalidExponent("'approach' needs a finite limit; use 'linear' for divergence")
    if power <= 0:
        raise InvalidExponent("'approach' needs power > 0")
    as_exponent(limit + min(scale, 0.0))


def _approach(n, limit, scale, power):
    return limit + scale * n ** (-power)


def _linear_check(offset, slope):
    if slope <= 0:
        raise InvalidExponent("'linear' needs slope > 0")
    as_exponent(offset + slope)


CONVERGENT_RULES: dict[str, _Rule] = {
    # p(n) = limit + scale * n**-power
    "approach": _Rule(
        func=_approach,
        limit=lambda limit, scale, power: float(limit),
        tail_range=lambda k, limit, scale, power: (
            min(limit, _approach(k, limit, scale, power)),
            max(limit, _approach(k, limit, scale, power)),
        ),
        check=_approach_check,
    ),
    # p(n) = offset + slope * n, diverging to inf
    "linear": _Rule(
        func=lambda n, offset, slope: offset + slope * n,
        limit=lambda offset, slope: INF,
        tail_range=lambda k, offset, slope: (offset + slope * k, INF),
        check=_linear_check,
    ),
}


def _freeze_params(params) -> tuple:
    if params is None:
        return ()
    if isinstance(params, dict):
        items = params.items()
    else:
        items = params
    out = []
    for k, v in sorted(items):
        if isinstance(v, list):
            v = tuple(v)
        out.append((k, v))
    return tuple(out)


@dataclass(frozen=True)
class ConvergentTo(Tail):
    """Tail given by a registered closed-form rule with a known limit."""

    rule: str
    params: tuple = ()

    def __post_init__(self):
        if self.rule not in CONVERGENT_RULES:
            raise InvalidExponent(f"unknown convergent rule {self.rule!r}")
        object.__setattr__(self, "params", _freeze_params(self.params))
        CONVERGENT_RULES[self.rule].check(**self.kwargs)

    @property
    def kwargs(self) -> dict:
        return dict(self.params)

    @property
    def limit(self) -> float:
        return CONVERGENT_RULES[self.rule].limit(**self.kwargs)

    def value(self, n):
        return float(CONVERGENT_RULES[self.rule].func(n, **self.kwargs))

    def liminf(self):
        return self.limit

    def limsup(self):
        return self.limit

    def tail_range(self, k):
        return CONVERGENT_RULES[self.rule].tail_range(k, **self.kwargs)

    def to_dict(self):
        return {"kind": "convergent", "rule": self.rule, "params": dict(self.params)}


# --- registered enumerations ---------------------------------------------


def _wlur_value(n, c):
    return 1.0 / (1.0 - c * 2.0 ** (-n))


def _block_rate(l, limit):
    if limit <= 2.0:
        return limit - (limit - 1.0) * 2.0 ** (-l)
    return limit + 2.0 ** (-l)


def _block_of(n):
    # block l has length l and covers l(l-1)/2 < n <= l(l+1)/2
    l = math.isqrt(8 * n) // 2
    while l * (l + 1) // 2 < n:
        l += 1
    while l > 1 and (l - 1) * l // 2 >= n:
        l -= 1
    return l


@dataclass(frozen=True)
class _Enumeration:
    func: Callable
    liminf: Callable
    limsup: Callable
    tail_range: Callable
    block: Optional[Callable] = None
    check: Optional[Callable] = None


def _wlur_check(c):
    if not 0.0 < c < 2.0:
        raise InvalidExponent("'wlur' needs 0 < c < 2")


def _cycle_check(values):
    if not values:
        raise InvalidExponent("'cycle' needs at least one value")
    for v in values:
        as_exponent(v)


def _blocks_check(limit):
    if not 1.0 < limit < INF:
        raise InvalidExponent("'blocks' needs 1 < limit < inf")


ENUMERATIONS: dict[str, _Enumeration] = {
    "universal-rationals": _Enumeration(
        func=lambda n: (lambda ab: ab[0] / ab[1])(_RATIONALS.at(n)),
        liminf=lambda: 1.0,
        limsup=lambda: INF,
        tail_range=lambda k: (1.0, INF),
        block=lambda start, stop: _RATIONALS.block(start, stop),
    ),
    # p(n) = 1 / (1 - c 2^-n); prod_n ||I: l^p(n)_2 -> l^1_2|| = 2^c
    "wlur": _Enumeration(
        func=_wlur_value,
        liminf=lambda c: 1.0,
        limsup=lambda c: 1.0,
        tail_range=lambda k, c: (1.0, _wlur_value(k, c)),
        check=_wlur_check,
    ),
    "cycle": _Enumeration(
        func=lambda n, values: as_exponent(values[(n - 1) % len(values)]),
        liminf=lambda values: min(as_exponent(v) for v in values),
        limsup=lambda values: max(as_exponent(v) for v in values),
        tail_range=lambda k, values: (
            min(as_exponent(v) for v in values),
            max(as_exponent(v) for v in values),
        ),
        check=_cycle_check,
    ),
    # block l (length l) carries the rate r_l -> limit from the side fixed by limit <= 2
    "blocks": _Enumeration(
        func=lambda n, limit: _block_rate(_block_of(n), limit),
        liminf=lambda limit: float(limit),
        limsup=lambda limit: float(limit),
        tail_range=lambda k, limit: (
            min(limit, _block_rate(_block_of(k), limit)),
            max(limit, _block_rate(_block_of(k), limit)),
        ),
        check=_blocks_check,
    ),
}


@dataclass(frozen=True)
class Enumerated(Tail):
    """A deterministic generator tail.

    Either a registered ``name`` (serializable) or an arbitrary ``generator``
    callable; in the latter case liminf/limsup must be declared for the
    sequence to be classifiable.
    """

    name: str
    params: tuple = ()
    declared_liminf: Optional[float] = None
    declared_limsup: Optional[float] = None
    generator: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "params", _freeze_params(self.params))
        if self.generator is None:
            if self.name not in ENUMERATIONS:
                raise InvalidExponent(f"unknown enumeration {self.name!r}")
            spec = ENUMERATIONS[self.name]
            if spec.check is not None:
                spec.check(**self.kwargs)
        for attr in ("declared_liminf", "declared_limsup"):
            v = getattr(self, attr)
            if v is not None:
                object.__setattr__(self, attr, as_exponent(v))

    @property
    def kwargs(self) -> dict:
        return dict(self.params)

    @property
    def _spec(self) -> Optional[_Enumeration]:
        return None if self.generator is not None else ENUMERATIONS[self.name]

    def value(self, n):
        if self.generator is not None:
            return as_exponent(self.generator(n))
        return float(self._spec.func(n, **self.kwargs))

    def values(self, start, stop):
        spec = self._spec
        if spec is not None and spec.block is not None:
            return spec.block(start, stop)
        return super().values(start, stop)

    def liminf(self):
        if self.declared_liminf is not None:
            return self.declared_liminf
        if self._spec is None:
            return super().liminf()
        return self._spec.liminf(**self.kwargs)

    def limsup(self):
        if self.declared_limsup is not None:
            return self.declared_limsup
        if self._spec is None:
            return super().limsup()
        return self._spec.limsup(**self.kwargs)

    def tail_range(self, k):
        if self._spec is None:
            return super().tail_range(k)
        return self._spec.tail_range(k, **self.kwargs)

    def to_dict(self):
        if self.generator is not None:
            raise TypeError("enumerations backed by a Python callable are not serializable")
        d = {"kind": "enumerated", "name": self.name, "params": dict(self.params)}
        if self.declared_liminf is not None:
            d["liminf"] = self.declared_liminf
        if self.declared_limsup is not None:
            d["limsup"] = self.declared_limsup
        return d


@dataclass(frozen=True)
class Clamped(Tail):
    """min(upper, max(inner(n), lower)) for every n, prefix of ``inner`` included."""

    inner: "ExponentSeq"
    lower: float
    upper: float

    def __post_init__(self):
        object.__setattr__(self, "lower", as_exponent(self.lower))
        object.__setattr__(self, "upper", as_exponent(self.upper))
        if self.lower > self.upper:
            raise InvalidExponent("clamp needs lower <= upper")

    def value(self, n):
        return _clamp(self.inner.value(n), self.lower, self.upper)

    def values(self, start, stop):
        return np.clip(self.inner.values(start, stop), self.lower, self.upper)

    def values_at(self, idx):
        return np.clip(self.inner.values_at(idx), self.lower, self.upper)

    def liminf(self):
        return _clamp(self.inner.liminf(), self.lower, self.upper)

    def limsup(self):
        return _clamp(self.inner.limsup(), self.lower, self.upper)

    def tail_range(self, k):
        try:
            lo, hi = self.inner.tail_range(k)
        except TailMetadataMissing:
            return self.lower, self.upper
        return _clamp(lo, self.lower, self.upper), _clamp(hi, self.lower, self.upper)

    def to_dict(self):
        return {
            "kind": "clamped",
            "inner": self.inner.to_dict(),
            "lower": self.lower,
            "upper": self.upper,
        }


@dataclass(frozen=True)
class DualTail(Tail):
    """Pointwise Hölder conjugate of another tail."""

    inner: Tail

    def value(self, n):
        return dual_value(self.inner.value(n))

    def values(self, start, stop):
        return _dual_array(self.inner.values(start, stop))

    def values_at(self, idx):
        return _dual_array(self.inner.values_at(idx))

    def liminf(self):
        return dual_value(self.inner.limsup())

    def limsup(self):
        return dual_value(self.inner.liminf())

    def tail_range(self, k):
        lo, hi = self.inner.tail_range(k)
        return dual_value(hi), dual_value(lo)

    def dual(self):
        return self.inner

    def to_dict(self):
        return {"kind": "dual", "inner": self.inner.to_dict()}


def _dual_array(values: np.ndarray) -> np.ndarray:
    return np.array([dual_value(float(v)) for v in values], dtype=np.float64)


def _tail_from_dict(d: dict) -> Tail:
    kind = d.get("kind")
    if kind == "constant":
        return Constant(d["value"])
    if kind == "convergent":
        return ConvergentTo(d["rule"], d.get("params") or {})
    if kind == "enumerated":
        return Enumerated(
            d["name"],
            d.get("params") or {},
            declared_liminf=d.get("liminf"),
            declared_limsup=d.get("limsup"),
        )
    if kind == "clamped":
        return Clamped(ExponentSeq.from_dict(d["inner"]), d["lower"], d["upper"])
    if kind == "dual":
        return DualTail(_tail_from_dict(d["inner"]))
    raise InvalidExponent(f"unknown tail kind {kind!r}")


# --------------------------------------------------------------------------
# the sequence
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentSeq:
    prefix: tuple = ()
    tail: Tail = Constant(2.0)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(as_exponent(v) for v in self.prefix))
        if not isinstance(self.tail, Tail):
            raise TypeError("tail must be a Tail descriptor")

    # -- constructors
    @classmethod
    def constant(cls, value, prefix=()) -> "ExponentSeq":
        return cls(tuple(prefix), Constant(value))

    @classmethod
    def finite(cls, values, tail_value=None) -> "ExponentSeq":
        """Explicit values; the last one repeats unless ``tail_value`` is given."""
        values = tuple(values)
        if not values:
            raise InvalidExponent("need at least one value")
        return cls(values, Constant(values[-1] if tail_value is None else tail_value))

    @classmethod
    def convergent(cls, rule, prefix=(), **params) -> "ExponentSeq":
        return cls(tuple(prefix), ConvergentTo(rule, params))

    @classmethod
    def enumerated(cls, name, prefix=(), **params) -> "ExponentSeq":
        return cls(tuple(prefix), Enumerated(name, params))

    # -- evaluation
    def value(self, n: int) -> float:
        if n < 1:
            raise IndexError("exponent sequences are indexed from 1")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        return self.tail.value(n)

    def __call__(self, n: int) -> float:
        return self.value(n)

    def values(self, start: int, stop: int) -> np.ndarray:
        """Values at indices start..stop-1 as a float64 array."""
        if start < 1:
            raise IndexError("exponent sequences are indexed from 1")
        if stop <= start:
            return np.empty(0)
        m = len(self.prefix)
        head = np.array(self.prefix[start - 1 : min(stop - 1, m)], dtype=np.float64)
        if stop - 1 <= m:
            return head
        rest = self.tail.values(max(start, m + 1), stop)
        return np.concatenate([head, rest]) if head.size else np.asarray(rest, dtype=np.float64)

    def values_at(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        if idx.size == 0:
            return np.empty(0)
        if idx.min() < 1:
            raise IndexError("exponent sequences are indexed from 1")
        out = np.empty(idx.size, dtype=np.float64)
        m = len(self.prefix)
        in_prefix = idx <= m
        if in_prefix.any():
            out[in_prefix] = np.array(self.prefix, dtype=np.float64)[idx[in_prefix] - 1]
        if (~in_prefix).any():
            out[~in_prefix] = self.tail.values_at(idx[~in_prefix])
        return out

    def inverse_values(self, start: int, stop: int) -> np.ndarray:
        return _inverse_array(self.values(start, stop))

    # -- metadata
    def liminf(self) -> float:
        return self.tail.liminf()

    def limsup(self) -> float:
        return self.tail.limsup()

    def tail_range(self, k: int) -> tuple[float, float]:
        k = max(k, 1)
        m = len(self.prefix)
        lo, hi = self.tail.tail_range(max(k, m + 1))
        if k <= m:
            pre = self.prefix[k - 1 :]
            lo, hi = min(lo, min(pre)), max(hi, max(pre))
        return lo, hi

    # -- derived sequences
    def dual(self) -> "ExponentSeq":
        return ExponentSeq(tuple(dual_value(v) for v in self.prefix), self.tail.dual())

    def clamp(self, lower, upper) -> "ExponentSeq":
        return ExponentSeq((), Clamped(self, lower, upper))

    def with_prefix(self, prefix) -> "ExponentSeq":
        return ExponentSeq(tuple(prefix), self.tail)

    # -- serialization
    def to_dict(self) -> dict:
        return {"prefix": list(self.prefix), "tail": self.tail.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "ExponentSeq":
        if not isinstance(d, dict) or "tail" not in d:
            raise InvalidExponent("exponent descriptor needs a 'tail'")
        return cls(tuple(d.get("prefix") or ()), _tail_from_dict(d["tail"]))
