"""Real sequences: finitely supported, or generator-backed with a tail certificate."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import TailBoundMissing
from .exponents import INF, as_exponent

__all__ = [
    "TailCertificate",
    "SeqVector",
    "GENERATORS",
    "project_head",
    "project_tail",
    "sign_flip",
]


@dataclass(frozen=True)
class TailCertificate:
    """Claims ``pmin <= p(n)`` for n >= k0 and ``(sum_{n>k0} |x_n|^pmin)^(1/pmin) <= bound``.

    For ``pmin = inf`` the bound is on ``sup_{n>k0} |x_n|``.
    """

    k0: int
    pmin: float
    bound: float

    def __post_init__(self):
        if int(self.k0) < 1:
            raise ValueError("k0 must be >= 1")
        object.__setattr__(self, "k0", int(self.k0))
        object.__setattr__(self, "pmin", as_exponent(self.pmin))
        b = float(self.bound)
        if not b >= 0.0:
            raise ValueError("tail bound must be >= 0")
        object.__setattr__(self, "bound", b)

    def to_dict(self):
        return {"k0": self.k0, "pmin": self.pmin, "bound": self.bound}


# Named generators are the serializable ones; each takes (n, **params).
GENERATORS: dict[str, Callable] = {
    "geometric": lambda n, scale, ratio: scale * ratio**n,
    "power": lambda n, scale, decay: scale * n ** (-decay),
}


def _geometric_certificate(scale, ratio, k0, pmin):
    if not 0.0 <= abs(ratio) < 1.0:
        raise ValueError("geometric tail needs |ratio| < 1")
    a, r = abs(scale), abs(ratio)
    if pmin == INF:
        return math.nextafter(a * r ** (k0 + 1), INF)
    # sum_{n>k0} (a r^n)^q = a^q r^(q(k0+1)) / (1 - r^q)
    rq = r**pmin
    bound = a * r ** (k0 + 1) / (1.0 - rq) ** (1.0 / pmin)
    return math.nextafter(bound, INF)


class SeqVector:
    """An immutable real sequence indexed from 1.

    Finite vectors store a strictly increasing support and nonzero
    coefficients. Infinite vectors carry ``generator`` (n -> x_n) and an
    optional :class:`TailCertificate`; without one their norm cannot be
    enclosed.
    """

    __slots__ = ("_idx", "_coef", "generator", "certificate", "source")

    def __init__(self, indices=(), coefficients=(), *, generator=None, certificate=None, source=None):
        idx = np.asarray(indices, dtype=np.int64).reshape(-1)
        coef = np.asarray(coefficients, dtype=np.float64).reshape(-1)
        if idx.shape != coef.shape:
            raise ValueError("indices and coefficients differ in length")
        if idx.size:
            if idx[0] < 1 or np.any(np.diff(idx) <= 0):
                raise ValueError("support indices must be >= 1 and strictly increasing")
            if not np.all(np.isfinite(coef)):
                raise ValueError("coefficients must be finite")
        keep = coef != 0.0
        idx, coef = idx[keep], coef[keep]
        idx.flags.writeable = False
        coef.flags.writeable = False
        self._idx = idx
        self._coef = coef
        self.generator: Optional[Callable] = generator
        self.certificate: Optional[TailCertificate] = certificate
        self.source: Optional[dict] = source

    # -- constructors
    @classmethod
    def from_dense(cls, values) -> "SeqVector":
        values = np.asarray(values, dtype=np.float64).reshape(-1)
        return cls(np.arange(1, values.size + 1), values)

    @classmethod
    def from_support(cls, pairs) -> "SeqVector":
        pairs = sorted((int(i), float(c)) for i, c in pairs)
        if not pairs:
            return cls()
        idx, coef = zip(*pairs)
        return cls(idx, coef)

    @classmethod
    def unit(cls, n: int) -> "SeqVector":
        return cls([n], [1.0])

    @classmethod
    def zero(cls) -> "SeqVector":
        return cls()

    @classmethod
    def from_generator(cls, func, certificate=None, source=None) -> "SeqVector":
        return cls(generator=func, certificate=certificate, source=source)

    @classmethod
    def named(cls, name: str, certificate=None, **params) -> "SeqVector":
        if name not in GENERATORS:
            raise ValueError(f"unknown generator {name!r}")
        func = GENERATORS[name]
        params = {k: float(v) for k, v in params.items()}
        return cls(
            generator=lambda n: func(n, **params),
            certificate=certificate,
            source={"name": name, **params},
        )

    @classmethod
    def geometric(cls, scale, ratio, k0=None, pmin=1.0) -> "SeqVector":
        """x_n = scale * ratio**n with a closed-form tail certificate at ``k0``."""
        cert = None
        if k0 is not None:
            pmin = as_exponent(pmin)
            cert = TailCertificate(k0, pmin, _geometric_certificate(scale, ratio, k0, pmin))
        return cls.named("geometric", certificate=cert, scale=scale, ratio=ratio)

    # -- access
    @property
    def is_finite(self) -> bool:
        return self.generator is None

    @property
    def indices(self) -> np.ndarray:
        self._require_finite()
        return self._idx

    @property
    def coefficients(self) -> np.ndarray:
        self._require_finite()
        return self._coef

    @property
    def max_index(self) -> int:
        self._require_finite()
        return int(self._idx[-1]) if self._idx.size else 0

    def _require_finite(self):
        if self.generator is not None:
            raise TailBoundMissing("operation needs a finitely supported vector")

    def coef(self, n: int) -> float:
        if self.generator is not None:
            return float(self.generator(n))
        pos = int(np.searchsorted(self._idx, n))
        if pos < self._idx.size and self._idx[pos] == n:
            return float(self._coef[pos])
        return 0.0

    def block(self, start: int, stop: int) -> np.ndarray:
        """Dense coefficients at indices start..stop-1."""
        if self.generator is not None:
            return np.array([float(self.generator(n)) for n in range(start, stop)], dtype=np.float64)
        out = np.zeros(max(stop - start, 0))
        mask = (self._idx >= start) & (self._idx < stop)
        out[self._idx[mask] - start] = self._coef[mask]
        return out

    def dense(self, length: Optional[int] = None) -> np.ndarray:
        if length is None:
            length = self.max_index
        return self.block(1, length + 1)

    def support(self) -> list[tuple[int, float]]:
        return [(int(i), float(c)) for i, c in zip(self.indices, self.coefficients)]

    # -- arithmetic on finite vectors
    def __add__(self, other: "SeqVector") -> "SeqVector":
        if not isinstance(other, SeqVector):
            return NotImplemented
        acc: dict[int, float] = {}
        for i, c in self.support() + other.support():
            acc[i] = acc.get(i, 0.0) + c
        return SeqVector.from_support(acc.items())

    def __mul__(self, scalar: float) -> "SeqVector":
        scalar = float(scalar)
        if self.generator is not None:
            g = self.generator
            cert = self.certificate
            if cert is not None:
                cert = TailCertificate(cert.k0, cert.pmin, abs(scalar) * cert.bound)
            return SeqVector.from_generator(lambda n: scalar * g(n), cert)
        return SeqVector(self._idx, scalar * self._coef)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __eq__(self, other):
        if not isinstance(other, SeqVector):
            return NotImplemented
        if not (self.is_finite and other.is_finite):
            return self is other
        return np.array_equal(self._idx, other._idx) and np.array_equal(self._coef, other._coef)

    def __hash__(self):
        if not self.is_finite:
            return id(self)
        return hash((self._idx.tobytes(), self._coef.tobytes()))

    def __repr__(self):
        if self.generator is not None:
            return f"SeqVector(generator={self.source or self.generator!r}, certificate={self.certificate})"
        return f"SeqVector({self.support()})"

    def to_dict(self) -> dict:
        if self.generator is not None:
            if self.source is None:
                raise TypeError("vectors backed by an anonymous callable are not serializable")
            d = {"generator": dict(self.source)}
            if self.certificate is not None:
                d["certificate"] = self.certificate.to_dict()
            return d
        return {"support": [[i, c] for i, c in self.support()]}

    @classmethod
    def from_dict(cls, d: dict) -> "SeqVector":
        if "coefficients" in d:
            return cls.from_dense([float(v) for v in d["coefficients"]])
        if "support" in d:
            return cls.from_support((int(i), float(c)) for i, c in d["support"])
        if "generator" in d:
            g = dict(d["generator"])
            name = g.pop("name")
            cert = d.get("certificate")
            if cert is not None:
                cert = TailCertificate(int(cert["k0"]), cert["pmin"], float(cert["bound"]))
            return cls.named(name, certificate=cert, **g)
        raise ValueError("vector needs 'coefficients', 'support' or 'generator'")


def project_head(x: SeqVector, k: int) -> SeqVector:
    """Keep coordinates 1..k."""
    if x.is_finite:
        keep = x.indices <= k
        return SeqVector(x.indices[keep], x.coefficients[keep])
    return SeqVector.from_dense(x.block(1, k + 1))


def project_tail(x: SeqVector, k: int) -> SeqVector:
    """Keep coordinates > k."""
    if x.is_finite:
        keep = x.indices > k
        return SeqVector(x.indices[keep], x.coefficients[keep])
    g = x.generator
    # zeroing a head only shrinks the tail sum, so the certificate stays valid
    return SeqVector.from_generator(lambda n: g(n) if n > k else 0.0, x.certificate)


def sign_flip(x: SeqVector, theta) -> SeqVector:
    """Coefficientwise product with a sign sequence.

    ``theta`` is either a callable n -> ±1 or a sequence with theta[n-1]
    the sign of coordinate n.
    """
    if callable(theta):
        sign = theta
    else:
        signs = list(theta)

        def sign(n):
            if n > len(signs):
                raise IndexError(f"sign sequence shorter than index {n}")
            return signs[n - 1]

    def checked(n):
        s = sign(n)
        if s not in (-1, 1):
            raise ValueError(f"signs must be ±1, got {s!r}")
        return float(s)

    if x.is_finite:
        flips = np.array([checked(int(n)) for n in x.indices], dtype=np.float64)
        return SeqVector(x.indices, flips * x.coefficients)
    g = x.generator
    return SeqVector.from_generator(lambda n: checked(n) * g(n), x.certificate)
