"""Constructions: deletion repair and the two baselines.

Greedy sizes and the parabola's density value act as regression pins;
triple-freeness of every construction is the load-bearing property and
is asserted by the exact counter (brute force where cheap).
"""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from no3l.construct import (
    delete_max_of_triples,
    density_profile,
    greedy_construct,
    modular_parabola,
)
from no3l.geom import norm_lex_key
from no3l.sampling import PointSet, SamplerConfig, sample_window
from no3l.triples import (
    count_collinear_triples,
    count_collinear_triples_bruteforce,
    prefix_triple_counts,
)

GREEDY_SIZES = {1: 1, 2: 4, 3: 8, 4: 20, 5: 46, 6: 84, 7: 162}


def test_delete_max_on_a_hand_case():
    # (1,1),(2,2),(3,3) are collinear; (3,3) and (3,1) are each the largest
    # member of a triple and must go, nothing else
    ps = PointSet([(1, 1), (2, 2), (3, 3), (1, 2), (3, 1)])
    # (3,1): collinear with (1,2)? need a third: (1,2),(2,2)? not collinear with (3,1)
    out = delete_max_of_triples(ps)
    survivors = set(out.points)
    assert (3, 3) not in survivors
    assert count_collinear_triples(out) == 0
    assert out.meta["kind"] == "constructed"


def test_delete_max_deletes_exactly_prefix_positives():
    q = sample_window(SamplerConfig(seed=21, c=0.7, window_exponent=6))
    s = delete_max_of_triples(q)
    ordered = sorted(q.points, key=norm_lex_key)
    counts = prefix_triple_counts(ordered)
    want = tuple(p for p, k in zip(ordered, counts) if k == 0)
    assert s.points == want
    assert s.meta["seed"] == q.meta["seed"]
    assert s.meta["c"] == q.meta["c"]
    assert s.meta["window_exponent"] == q.meta["window_exponent"]


@given(st.integers(min_value=0, max_value=2**32))
@settings(max_examples=20, deadline=None)
def test_delete_max_output_is_triple_free(seed):
    q = sample_window(SamplerConfig(seed=seed, c=0.8, window_exponent=6))
    s = delete_max_of_triples(q)
    assert count_collinear_triples(s) == 0
    assert set(s.points) <= set(q.points)


def test_modular_parabola_small_sets():
    assert modular_parabola(2).points == ((1, 1), (2, 2))
    assert modular_parabola(3).points == ((1, 1), (2, 1), (3, 3))
    assert modular_parabola(5).points == ((1, 1), (2, 4), (3, 4), (4, 1), (5, 5))


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13, 31, 101])
def test_modular_parabola_is_triple_free_bruteforce(p):
    ps = modular_parabola(p)
    assert len(ps) == p
    assert ps.meta["kind"] == "baseline"
    assert count_collinear_triples_bruteforce(ps) == 0


def test_modular_parabola_larger_prime_fast_counter():
    ps = modular_parabola(257)
    assert len(ps) == 257
    assert count_collinear_triples(ps) == 0


def test_modular_parabola_rejects_composites_and_huge_moduli():
    with pytest.raises(ValueError, match="prime"):
        modular_parabola(100)
    with pytest.raises(ValueError, match="prime"):
        modular_parabola(1)
    with pytest.raises(ValueError):
        modular_parabola(2**32 + 15)  # prime, but past the supported range


def test_greedy_sizes_and_triple_freeness():
    for w, size in GREEDY_SIZES.items():
        ps = greedy_construct(w)
        assert len(ps) == size
        assert count_collinear_triples(ps) == 0
        assert ps.meta["window_exponent"] == w


def test_greedy_smallest_windows():
    assert greedy_construct(1).points == ((1, 1),)
    assert greedy_construct(2).points == ((1, 1), (1, 2), (2, 1), (2, 2))


def test_greedy_rejects_oversized_window():
    with pytest.raises(ValueError):
        greedy_construct(14)


def test_density_profile_values():
    ps = PointSet([(1, 1), (2, 2), (5, 3)])
    rows = density_profile(ps, [2, 4])
    assert rows[0] == (2, 2, 2 * math.sqrt(math.log(2)) / 2)
    assert rows[1] == (4, 2, 2 * math.sqrt(math.log(4)) / 4)


def test_density_profile_validation():
    ps = PointSet([(1, 1)], {"window_exponent": 4})
    with pytest.raises(ValueError):
        density_profile(ps, [1])
    with pytest.raises(ValueError):
        density_profile(ps, [16])  # box reaches past the covered window half
    density_profile(ps, [8])


def test_parabola_density_pin():
    rows = density_profile(modular_parabola(101), [101])
    assert rows[0][1] == 101
    assert rows[0][2] == pytest.approx(2.148283155648077, rel=1e-12)
