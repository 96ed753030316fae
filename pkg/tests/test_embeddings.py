import math

import pytest

from varlp import (
    ExponentSeq,
    SeqVector,
    build_embedding,
    certify_distortion,
    convergent_subsequence,
    extract_subspace,
    pathological_exponents,
    universal_exponents,
)
from varlp.embeddings import op_norm_2d, op_norm_2d_grid, step_budget
from varlp.errors import InvalidExponent, InvalidRateSide, SearchHorizonExceeded
from varlp.exponents import INF

GRID = (1.0, 1.1, 1.5, 2.0, 3.0, 10.0, INF)


def test_op_norm_examples():
    assert op_norm_2d(3.0, 3.0) == 1.0
    assert op_norm_2d(INF, 1.0) == 2.0
    assert op_norm_2d(2.0, 1.0) == math.sqrt(2)
    assert op_norm_2d(1.0, INF) == 1.0
    assert op_norm_2d_grid(INF, 1.0) == pytest.approx(2.0, abs=1e-6)


@pytest.mark.parametrize("p", GRID)
@pytest.mark.parametrize("q", GRID)
def test_op_norm_round_trip_at_least_one(p, q):
    prod = op_norm_2d(p, q) * op_norm_2d(q, p)
    assert prod >= 1.0
    assert (prod == 1.0) == (p == q)


def test_step_budget_product():
    eps = 0.3
    assert math.prod(step_budget(eps, k) for k in range(1, 60)) == pytest.approx(1 + eps, rel=1e-15)


def test_identical_exponents_embed_identically():
    emb = build_embedding(ExponentSeq.constant(2.0), ExponentSeq.constant(2.0), 0.1, length=6)
    assert emb.selected == (1, 2, 3, 4, 5, 6)
    assert emb.forward_bound == emb.backward_bound == 1.0
    rep = certify_distortion(emb, samples=50)
    assert rep.max_ratio == rep.min_ratio == 1.0


def test_l1_into_one_plus_one_over_n():
    host = ExponentSeq.convergent("approach", limit=1.0, scale=1.0, power=1.0)
    emb = build_embedding(ExponentSeq.constant(1.0), host, 0.5, length=8)
    assert list(emb.selected) == sorted(set(emb.selected))
    assert emb.forward_bound <= 1.5 and emb.backward_bound <= 1.5
    assert certify_distortion(emb, samples=200, seed=1).respects_bounds


def test_embedding_composes_with_subspace():
    q = ExponentSeq.finite([3.0, INF, 1.5, 2.0])
    host = universal_exponents()
    emb = build_embedding(q, host, 0.2, horizon=10**6)
    smap = extract_subspace(host, emb.selected)
    assert smap.q_values == tuple(host(n) for n in emb.selected)
    assert emb.subspace == smap


def test_pi_target():
    emb = build_embedding(ExponentSeq.constant(math.pi), universal_exponents(), 0.2, length=4, horizon=10**6)
    assert emb.forward_bound <= 1.2 and emb.backward_bound <= 1.2


def test_search_horizon():
    with pytest.raises(SearchHorizonExceeded) as info:
        build_embedding(ExponentSeq.constant(1.0), ExponentSeq.constant(2.0), 0.1, length=3, horizon=5000)
    assert info.value.step == 1 and info.value.selected == ()


def test_universal_first_terms():
    u = universal_exponents()
    assert u(1) == 1.0
    assert all(v >= 1.0 for v in u.values(1, 2000))


def test_convergent_subsequence_examples():
    c = convergent_subsequence(ExponentSeq.constant(3.0), 20)
    assert c.limit == 3.0 and c.indices[:3] == (1, 2, 3) and c.oscillation == 0.0

    alt = ExponentSeq.enumerated("cycle", values=[1.5, 2.5])
    c = convergent_subsequence(alt, 100)
    assert c.limit in (1.5, 2.5)
    parity = {n % 2 for n in c.indices}
    assert len(parity) == 1 and alt(c.indices[0]) == c.limit

    c = convergent_subsequence(ExponentSeq.convergent("linear", offset=0.0, slope=1.0), 50)
    assert c.limit == INF


def test_universal_cluster_points_cover_grid():
    u = universal_exponents()
    for target in (1.0, 1.25, math.e, 7.0, 19.5):
        c = convergent_subsequence(u, 200_000, around=target)
        assert abs(1 / target - 1 / c.limit) <= c.oscillation + 1e-12
        assert c.oscillation < 1e-2
    # inf is reached slowly (the largest value among n terms grows like sqrt(n))
    gaps = [1 / convergent_subsequence(u, 10**k, around=INF).limit for k in (3, 4, 5, 6)]
    assert all(a > b for a, b in zip(gaps, gaps[1:])) and gaps[-1] < 1e-3


def test_pathological_examples():
    q = pathological_exponents(2.0, [1, 2, 3], [1.5, 1.75, 1.875])
    assert [q(n) for n in range(1, 8)] == [1.5, 1.75, 1.75, 1.875, 1.875, 1.875, 2.0]
    r = [1.2, 1.4, 1.6]
    q = pathological_exponents(1.8, [1, 1, 1], r)
    assert [q(n) for n in (1, 2, 3)] == r
    default = pathological_exponents(2.0)
    assert [default(n) for n in range(1, 7)] == [1.5, 1.75, 1.75, 1.875, 1.875, 1.875]
    above = pathological_exponents(3.0)
    assert above(1) == 3.5 and above.liminf() == 3.0


def test_pathological_callables():
    q = pathological_exponents(4.0, lambda l: 2, lambda l: 4.0 + 1.0 / l)
    assert [q(n) for n in range(1, 6)] == [5.0, 5.0, 4.5, 4.5, 4.0 + 1.0 / 3]
    assert q.liminf() == q.limsup() == 4.0


def test_pathological_rate_side():
    with pytest.raises(InvalidRateSide):
        pathological_exponents(2.0, [1, 1], [1.5, 2.5])
    with pytest.raises(InvalidRateSide):
        pathological_exponents(3.0, [1, 1], [3.5, 2.9])
    with pytest.raises(InvalidRateSide):
        pathological_exponents(2.0, [1, 1], [1.8, 1.6])
    with pytest.raises(InvalidExponent):
        pathological_exponents(INF)


def test_target_embeds_into_pathological():
    host = pathological_exponents(2.0)
    emb = build_embedding(ExponentSeq.constant(2.0), host, 0.1, length=5, horizon=10**6)
    assert emb.forward_bound <= 1.1 and emb.backward_bound <= 1.1


def test_certifier_samples_are_seeded():
    emb = build_embedding(ExponentSeq.finite([2.0, 3.0, 1.5]), universal_exponents(), 0.3, horizon=10**6)
    a, b = certify_distortion(emb, 100, seed=5), certify_distortion(emb, 100, seed=5)
    assert a.ratios == b.ratios
    assert a.respects_bounds
    y = SeqVector.from_dense([1.0, 2.0, 3.0, 4.0])
    assert emb.apply(y).indices.tolist() == list(emb.subspace.targets)
