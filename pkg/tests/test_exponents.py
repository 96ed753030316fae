from fractions import Fraction

import numpy as np
import pytest

from varlp import ExponentSeq
from varlp.errors import InvalidExponent, TailMetadataMissing
from varlp.exponents import INF, Enumerated, as_exponent, dual_value, rational_at


def test_as_exponent():
    assert as_exponent("inf") == INF
    assert as_exponent(" Infinity ") == INF
    assert as_exponent(2) == 2.0
    for bad in (0.99, -1, "abc", float("nan"), None):
        with pytest.raises(InvalidExponent):
            as_exponent(bad)


def test_dual_values():
    assert dual_value(1.0) == INF
    assert dual_value(INF) == 1.0
    assert dual_value(2.0) == 2.0
    assert dual_value(3.0) == 1.5


def test_dual_sequence_pointwise():
    p = ExponentSeq((1.0, 3.0, INF), ExponentSeq.constant(4.0).tail)
    d = p.dual()
    assert [d(n) for n in range(1, 5)] == [INF, 1.5, 1.0, 4.0 / 3.0]
    for n in range(1, 5):
        a, b = p(n), d(n)
        s = (0.0 if a == INF else 1 / a) + (0.0 if b == INF else 1 / b)
        assert s == pytest.approx(1.0)


def test_rational_enumeration_prefix():
    # sum 2: 1/1; sum 3: 2/1; sum 4: 3/1; sum 5: 3/2, 4/1; sum 6: 5/1
    assert [rational_at(n) for n in range(1, 7)] == [
        Fraction(1),
        Fraction(2),
        Fraction(3),
        Fraction(3, 2),
        Fraction(4),
        Fraction(5),
    ]


def test_rational_enumeration_no_repeats_and_block_matches_scalar():
    u = ExponentSeq.enumerated("universal-rationals")
    vals = [rational_at(n) for n in range(1, 10_001)]
    assert len(set(vals)) == len(vals)
    assert all(v >= 1 for v in vals)
    block = u.values(1, 10_001)
    assert np.array_equal(block, np.array([float(v) for v in vals]))
    assert np.array_equal(u.values(5000, 5100), block[4999:5099])
    assert u.values_at([7, 3, 9000]).tolist() == [block[6], block[2], block[8999]]


def test_universal_metadata():
    u = ExponentSeq.enumerated("universal-rationals")
    assert u.liminf() == 1.0 and u.limsup() == INF


def test_convergent_rules():
    p = ExponentSeq.convergent("approach", limit=2.0, scale=1.0, power=1.0)
    assert p(1) == 3.0 and p(4) == 2.25
    assert p.liminf() == p.limsup() == 2.0
    assert p.tail_range(4) == (2.0, 2.25)
    q = ExponentSeq.convergent("linear", offset=0.0, slope=1.0)
    assert q(5) == 5.0 and q.limsup() == INF
    with pytest.raises(InvalidExponent):
        ExponentSeq.convergent("approach", limit=1.0, scale=-0.5, power=1.0)
    with pytest.raises(InvalidExponent):
        ExponentSeq.convergent("nope")


def test_clamp_pointwise():
    inner = ExponentSeq.finite([1.0, 5.0, 2.0, INF])
    c = inner.clamp(1.5, 3.0)
    assert [c(n) for n in range(1, 6)] == [1.5, 3.0, 2.0, 3.0, 3.0]
    assert c.tail_range(1) == (1.5, 3.0)


def test_cycle_and_blocks():
    c = ExponentSeq.enumerated("cycle", values=[1.5, 2.5])
    assert [c(n) for n in range(1, 5)] == [1.5, 2.5, 1.5, 2.5]
    assert (c.liminf(), c.limsup()) == (1.5, 2.5)
    b = ExponentSeq.enumerated("blocks", limit=2.0)
    assert [b(n) for n in range(1, 7)] == [1.5, 1.75, 1.75, 1.875, 1.875, 1.875]


def test_prefix_overrides_tail():
    p = ExponentSeq.constant(2.0, prefix=[7.0, INF])
    assert [p(1), p(2), p(3)] == [7.0, INF, 2.0]
    assert p.values(1, 4).tolist() == [7.0, INF, 2.0]
    with pytest.raises(IndexError):
        p(0)


def test_generator_without_metadata():
    e = ExponentSeq((), Enumerated("custom", generator=lambda n: 2.0))
    assert e(10) == 2.0
    with pytest.raises(TailMetadataMissing):
        e.liminf()
    d = ExponentSeq((), Enumerated("custom", declared_liminf=2.0, declared_limsup=2.0, generator=lambda n: 2.0))
    assert d.liminf() == 2.0


@pytest.mark.parametrize(
    "seq",
    [
        ExponentSeq.constant(3.0, prefix=[1.0, INF]),
        ExponentSeq.convergent("approach", limit=2.0, scale=1.0, power=0.5),
        ExponentSeq.enumerated("universal-rationals").clamp(1.5, 3.0),
        ExponentSeq.enumerated("wlur", c=0.5).dual(),
        ExponentSeq.enumerated("cycle", values=[1.0, INF]),
    ],
)
def test_dict_round_trip(seq):
    back = ExponentSeq.from_dict(seq.to_dict())
    assert back == seq
    assert back.values(1, 50).tolist() == seq.values(1, 50).tolist()
