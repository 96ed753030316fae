"""Hölder pairing, a brute-force dual norm oracle, and coordinate subspaces."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import kernels
from .errors import DimensionTooLarge, NonIncreasingIndices
from .exponents import Constant, ExponentSeq
from .norm import DEFAULT_HORIZON, DEFAULT_TOL, coordinate_exponents, phi_norm
from .vectors import SeqVector

__all__ = [
    "HolderCheck",
    "holder_pairing",
    "DualFunctional",
    "dual_norm_bruteforce",
    "SubspaceMap",
    "extract_subspace",
    "lift_vector",
]

HOLDER_SLACK = 1e-12


@dataclass(frozen=True)
class HolderCheck:
    sum: float
    bound: float
    remainder: float = 0.0

    @property
    def holds(self) -> bool:
        return self.sum + self.remainder <= self.bound * (1.0 + HOLDER_SLACK)


def holder_pairing(
    x: SeqVector,
    y: SeqVector,
    p: ExponentSeq,
    tol: float = DEFAULT_TOL,
    horizon: int = DEFAULT_HORIZON,
) -> HolderCheck:
    """sum |x_n y_n| against ||x||_{p(.)} ||y||_{p*(.)}.

    For generator-backed inputs the sum runs to the deeper of the two
    enclosure depths and the rest is bounded by the product of the two
    certified tail norms (Hölder applied to the tails).
    """
    ex = phi_norm(x, p, tol, horizon)
    ey = phi_norm(y, p.dual(), tol, horizon)
    bound = ex.upper * ey.upper
    if x.is_finite and y.is_finite:
        common, ix, iy = np.intersect1d(x.indices, y.indices, assume_unique=True, return_indices=True)
        s = math.fsum(np.abs(x.coefficients[ix] * y.coefficients[iy]).tolist())
        return HolderCheck(s, bound)

    depth = max(ex.k_used, ey.k_used) + 1
    for v in (x, y):
        if v.is_finite:
            depth = max(depth, v.max_index)
    s = math.fsum(np.abs(x.block(1, depth + 1) * y.block(1, depth + 1)).tolist())
    if (x.is_finite and x.max_index <= depth) or (y.is_finite and y.max_index <= depth):
        remainder = 0.0
    else:
        remainder = ex.tail_bound * ey.tail_bound
    return HolderCheck(s, bound, remainder)


@dataclass(frozen=True)
class DualFunctional:
    """f(x) = sum_n c_n x_n, represented in l^{p*(.)} by its coefficients."""

    coefficients: SeqVector
    exponents: ExponentSeq  # the dual sequence p*

    @classmethod
    def on(cls, coefficients, p: ExponentSeq) -> "DualFunctional":
        if not isinstance(coefficients, SeqVector):
            coefficients = SeqVector.from_dense(coefficients)
        return cls(coefficients, p.dual())

    def __call__(self, x: SeqVector) -> float:
        c = self.coefficients
        common, ic, ix = np.intersect1d(c.indices, x.indices, assume_unique=True, return_indices=True)
        return math.fsum((c.coefficients[ic] * x.coefficients[ix]).tolist())

    def norm(self, tol: float = DEFAULT_TOL, horizon: int = DEFAULT_HORIZON):
        return phi_norm(self.coefficients, self.exponents, tol, horizon)


# --------------------------------------------------------------------------
# brute-force oracle
# --------------------------------------------------------------------------

MAX_ORACLE_DIM = 6
_GRID = {3: 201, 4: 41, 5: 17, 6: 9}
_ANGLES_2D = 10_001
_STARTS = 8


def _sphere(angles: np.ndarray) -> np.ndarray:
    """Hyperspherical coordinates: (N, m-1) angles -> (N, m) unit vectors."""
    n, d = angles.shape
    out = np.ones((n, d + 1))
    sin_acc = np.ones(n)
    for j in range(d):
        out[:, j] = sin_acc * np.cos(angles[:, j])
        sin_acc = sin_acc * np.sin(angles[:, j])
    out[:, d] = sin_acc
    return out


def _ratio(points: np.ndarray, absf: np.ndarray, exps: np.ndarray) -> np.ndarray:
    mags = np.abs(points)
    norms = kernels.fold_rows(mags, np.broadcast_to(exps, mags.shape))
    return (mags @ absf) / norms


def dual_norm_bruteforce(f: Union[DualFunctional, SeqVector], p: ExponentSeq, m: int, return_point: bool = False):
    """Maximize |f(x)| over the unit sphere of span(e_1..e_m) in l^{p(.)}.

    Works from the primal fold only: a dense angular grid (m = 2) or a coarse
    hyperspherical grid followed by Nelder-Mead from the best grid points
    (3 <= m <= 6). Sign symmetry of the norm lets the search use |f| and |x|.
    """
    if m > MAX_ORACLE_DIM:
        raise DimensionTooLarge(f"oracle supports m <= {MAX_ORACLE_DIM}, got {m}")
    if m < 1:
        raise ValueError("m must be >= 1")
    coeffs = f.coefficients if isinstance(f, DualFunctional) else f
    if coeffs.max_index > m:
        raise ValueError(f"functional has support beyond coordinate {m}")
    absf = np.abs(coeffs.dense(m))
    exps = coordinate_exponents(np.arange(1, m + 1), p)

    if m == 1:
        best, point = float(absf[0]), np.array([1.0])
    elif m == 2:
        theta = np.linspace(0.0, 0.5 * np.pi, _ANGLES_2D)
        vals = _ratio(_sphere(theta[:, None]), absf, exps)
        i = int(np.argmax(vals))
        h = theta[1] - theta[0]
        res = minimize_scalar(
            lambda t: -_ratio(_sphere(np.array([[t]])), absf, exps)[0],
            bounds=(theta[max(i - 1, 0)] - h, theta[min(i + 1, theta.size - 1)] + h),
            method="bounded",
            options={"xatol": 1e-13},
        )
        best, point = float(vals[i]), _sphere(theta[[i], None])[0]
        if -res.fun > best:
            best, point = float(-res.fun), _sphere(np.array([[res.x]]))[0]
    else:
        g = np.linspace(0.0, 0.5 * np.pi, _GRID[m])
        mesh = np.stack(np.meshgrid(*([g] * (m - 1)), indexing="ij"), axis=-1).reshape(-1, m - 1)
        vals = _ratio(_sphere(mesh), absf, exps)
        order = np.argsort(-vals, kind="stable")[:_STARTS]
        i0 = int(order[0])
        best, point = float(vals[i0]), _sphere(mesh[[i0]])[0]
        objective = lambda a: -_ratio(_sphere(a[None, :]), absf, exps)[0]  # noqa: E731
        for i in order:
            res = minimize(
                objective,
                mesh[i],
                method="Nelder-Mead",
                options={"xatol": 1e-11, "fatol": 1e-14, "maxiter": 20000, "maxfev": 40000},
            )
            if -res.fun > best:
                best, point = float(-res.fun), _sphere(res.x[None, :])[0]

    if return_point:
        x = np.abs(point) * np.sign(coeffs.dense(m) + (coeffs.dense(m) == 0))
        return best, x / kernels.fold(np.abs(x), exps)
    return best


# --------------------------------------------------------------------------
# coordinate subspaces
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SubspaceMap:
    """Coordinates {n_1, n_1+1, n_2+1, ...} of l^{p(.)}, isometric to l^{q(.)}, q(k) = p(n_k).

    Source coordinate 1 goes to n_1 and source coordinate k+1 to n_k+1, so a
    selection of K indices carries K+1 source coordinates.
    """

    selected: tuple
    host: ExponentSeq
    q_values: tuple

    @property
    def dimension(self) -> int:
        return len(self.selected) + 1

    @property
    def source_exponents(self) -> ExponentSeq:
        # only q(1..K) ever enter a fold of a liftable vector
        return ExponentSeq(self.q_values, Constant(self.q_values[-1]))

    def target_index(self, j: int) -> int:
        if not 1 <= j <= self.dimension:
            raise IndexError(f"source coordinate {j} outside 1..{self.dimension}")
        return self.selected[0] if j == 1 else self.selected[j - 2] + 1

    @property
    def targets(self) -> tuple:
        return (self.selected[0],) + tuple(n + 1 for n in self.selected)


def extract_subspace(p: ExponentSeq, selected) -> SubspaceMap:
    sel = tuple(int(n) for n in selected)
    if not sel:
        raise NonIncreasingIndices("selection is empty")
    if sel[0] < 1 or any(b <= a for a, b in zip(sel, sel[1:])):
        raise NonIncreasingIndices(f"indices must be positive and strictly increasing: {sel}")
    q = tuple(float(v) for v in p.values_at(np.array(sel)))
    return SubspaceMap(sel, p, q)


def lift_vector(y: SeqVector, smap: SubspaceMap) -> SeqVector:
    """Place y_j at target_index(j)."""
    if y.max_index > smap.dimension:
        raise ValueError(f"vector has coordinate {y.max_index} beyond map dimension {smap.dimension}")
    targets = np.array(smap.targets, dtype=np.int64)
    return SeqVector(targets[y.indices - 1], y.coefficients)
