from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ribetkit.rings import (QQ, ZZ, RingError, RingSpec, ideal_in_ring, is_prime,
                            make_ring, prime_power)

SPECS = [RingSpec.integers(), RingSpec.rationals(), RingSpec.prime_field(5), RingSpec.integers_mod(12),
         RingSpec.truncated_dvr(2, 4), RingSpec.truncated_dvr(3, 2),
         RingSpec.product(RingSpec.truncated_dvr(2, 2), RingSpec.prime_field(3)),
         RingSpec.fiber_product(RingSpec.truncated_dvr(2, 2), RingSpec.truncated_dvr(2, 2), 2)]

local_rings = st.sampled_from([(2, 1), (2, 3), (2, 4), (3, 2), (5, 2)]).map(
    lambda pn: make_ring(RingSpec.truncated_dvr(*pn)))


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_spec_json_roundtrip(spec):
    assert RingSpec.from_json(spec.to_json()) == spec
    assert make_ring(spec.to_json()) == make_ring(spec)


def test_is_prime_and_prime_power():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert prime_power(16) == (2, 4)
    assert prime_power(12) is None
    assert prime_power(1) is None


def test_invalid_specs_rejected():
    with pytest.raises((RingError, ValueError)):
        make_ring(RingSpec.prime_field(6))
    with pytest.raises((RingError, ValueError)):
        make_ring(RingSpec.truncated_dvr(4, 2))


@given(local_rings, st.data())
def test_ring_axioms_mod(R, data):
    x, y, z = (data.draw(st.integers(0, R.modulus - 1)) for _ in range(3))
    assert R.mul(x, R.add(y, z)) == R.add(R.mul(x, y), R.mul(x, z))
    assert R.add(x, R.neg(x)) == 0
    assert R.sub(x, y) == R.add(x, R.neg(y))
    inv = R.try_invert(x)
    assert (inv is not None) == (x % R.p != 0)
    if inv is not None:
        assert R.mul(x, inv) == 1


@given(local_rings, st.integers(1, 10_000))
def test_valuation_and_unit_split(R, x):
    x = R(x)
    if x == 0:
        return
    v = R.valuation(x)
    u, k = R.split_unit(x)
    assert k == v and R.is_unit(u) and R.mul(R.pow(R.p, v), u) == x


def test_rational_field_reads_fractions():
    assert QQ(Fraction(3, 6)) == Fraction(1, 2)
    assert make_ring(RingSpec.prime_field(7))(Fraction(1, 2)) == 4


def test_fiber_product_elements_and_projections():
    base = RingSpec.truncated_dvr(2, 2)
    T = make_ring(RingSpec.fiber_product(base, base, 2))
    elems = list(T.elements())
    # pairs (a, b) in ZZ/4 x ZZ/4 with a = b mod 2
    assert len(elems) == T.size() == 8
    assert all((a - b) % 2 == 0 for a, b in elems)
    x = T((1, 3))
    assert T.project_left(x) == 1 and T.project_right(x) == 3
    with pytest.raises((RingError, ValueError)):
        T((1, 2))


@given(local_rings, st.lists(st.integers(0, 200), min_size=1, max_size=3),
       st.lists(st.integers(0, 200), min_size=1, max_size=3))
def test_principal_ideal_lattice(R, g1, g2):
    I, J = ideal_in_ring(R, g1), ideal_in_ring(R, g2)
    assert I <= I + J and J <= I + J
    assert I * J <= I
    # brute-force span of the generators
    span = {0}
    for g in g1:
        span = {R.add(s, R.mul(g, y)) for s in span for y in range(R.modulus)}
    assert {x for x in range(R.modulus) if I.contains(x)} == span


def test_ideal_equality_is_canonical():
    R = make_ring(RingSpec.truncated_dvr(2, 3))
    assert ideal_in_ring(R, [6]) == ideal_in_ring(R, [2])
    assert ideal_in_ring(R, [3]).is_unit_ideal()
    assert ideal_in_ring(R, [0, 8]).is_zero()
    assert ideal_in_ring(ZZ, [4, 6]) == ideal_in_ring(ZZ, [2])
