"""Pure-Python fold kernels.

Reference twin of ``_kernels.pyx``. Both must produce bit-identical results:
every operation here maps onto one IEEE operation or one libm ``pow`` call,
the same sequence the compiled version performs.
"""
import math

INF = math.inf


def boxplus(t, s, p):
    if p == INF:
        return t if t >= s else s
    if t >= s:
        big, small = t, s
    else:
        big, small = s, t
    if big == 0.0:
        return 0.0
    if small == 0.0:
        return big
    if p == 1.0:
        return big + small
    r = small / big
    return big * (1.0 + r ** p) ** (1.0 / p)


def fold(mags, exps, acc=0.0):
    for t, p in zip(mags, exps):
        acc = boxplus(acc, t, p)
    return acc


def fold_running(mags, exps, acc=0.0):
    out = []
    for t, p in zip(mags, exps):
        acc = boxplus(acc, t, p)
        out.append(acc)
    return out


def fold_rows(mags, exps):
    """Fold every row of ``mags`` against the matching row of ``exps``."""
    return [fold(row, erow) for row, erow in zip(mags, exps)]


def first_admissible(inv_p, inv_q, bound, start=0):
    """First position ``i >= start`` with ``2**|inv_q - inv_p[i]| <= bound``, else -1."""
    for i in range(start, len(inv_p)):
        d = inv_q - inv_p[i]
        if d < 0.0:
            d = -d
        if 2.0 ** d <= bound:
            return i
    return -1
