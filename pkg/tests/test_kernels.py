import math
from decimal import MAX_EMAX, MIN_EMIN, Decimal, localcontext

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varlp import kernels
from varlp.exponents import INF

needs_compiled = pytest.mark.skipif(not kernels.compiled_available(), reason="extension not built")

mags = st.floats(min_value=0.0, max_value=1e300, allow_nan=False)
exps = st.one_of(st.floats(min_value=1.0, max_value=1e6), st.just(INF))


@given(mags, mags, exps)
def test_boxplus_python_reference(t, s, p):
    got = kernels.python_backend.boxplus(t, s, p)
    big, small = max(t, s), min(t, s)
    assert big <= got
    if p == INF:
        assert got == big
    elif p == 1.0:
        assert got == t + s
    elif big > 0:
        with localcontext() as ctx:
            ctx.prec, ctx.Emax, ctx.Emin = 60, MAX_EMAX, MIN_EMIN
            D = Decimal
            ref = float((D(big) ** D(p) + D(small) ** D(p)) ** (D(1) / D(p)))
        assert math.isclose(got, ref, rel_tol=1e-12)


def test_boxplus_no_overflow():
    assert kernels.python_backend.boxplus(1e300, 1e300, 2.0) == pytest.approx(math.sqrt(2) * 1e300)
    assert kernels.python_backend.boxplus(3.0, 4.0, 1e9) == pytest.approx(4.0)


@needs_compiled
@settings(max_examples=300)
@given(mags, mags, exps)
def test_boxplus_parity(t, s, p):
    assert kernels.compiled_backend.boxplus(t, s, p) == kernels.python_backend.boxplus(t, s, p)


@needs_compiled
def test_fold_parity_random():
    rng = np.random.default_rng(0)
    for _ in range(500):
        n = int(rng.integers(0, 40))
        m = np.abs(rng.normal(size=n)) * 10.0 ** rng.uniform(-5, 5, n)
        e = rng.uniform(1, 10, n)
        e[rng.random(n) < 0.1] = INF
        e[rng.random(n) < 0.1] = 1.0
        acc = float(rng.random())
        py, cy = kernels.python_backend, kernels.compiled_backend
        assert cy.fold(m, e, acc) == py.fold(m, e, acc)
        assert np.array_equal(cy.fold_running(m, e, acc), py.fold_running(m, e, acc))


@needs_compiled
def test_fold_rows_parity():
    rng = np.random.default_rng(1)
    m = np.abs(rng.normal(size=(64, 5)))
    e = rng.uniform(1, 5, 5)
    assert np.array_equal(kernels.compiled_backend.fold_rows(m, e), kernels.python_backend.fold_rows(m, e))


@needs_compiled
def test_first_admissible_parity():
    rng = np.random.default_rng(2)
    inv = rng.random(5000)
    for q in (0.0, 0.3, 0.99, 1.0):
        for bound in (1.0001, 1.01, 1.5):
            for start in (0, 17, 4999):
                a = kernels.compiled_backend.first_admissible(inv, q, bound, start)
                b = kernels.python_backend.first_admissible(inv, q, bound, start)
                assert a == b


def test_first_admissible_none():
    assert kernels.python_backend.first_admissible([0.5, 0.5], 0.0, 1.01) == -1


def test_fold_identity_of_zero():
    # t ⊞ 0 == t exactly, so zero coordinates can be skipped
    e = [2.0, 3.0, 1.5]
    assert kernels.python_backend.fold([1.0, 0.0, 2.0], e) == kernels.python_backend.fold([1.0, 2.0], [2.0, 1.5])
