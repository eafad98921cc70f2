from __future__ import annotations

import math

import mpmath as mp
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mbhash import analytics as an

mp.mp.dps = 40


def mp_werner_entropy(F):
    F = mp.mpf(F)
    return -F * mp.log(F, 2) - (1 - F) * mp.log((1 - F) / 3, 2)


def mp_binary_entropy(x):
    x = mp.mpf(x)
    return -x * mp.log(x, 2) - (1 - x) * mp.log(1 - x, 2)


def mp_fmin():
    return mp.findroot(lambda F: mp_werner_entropy(F) - 1, (mp.mpf("0.8"), mp.mpf("0.82")), solver="anderson")


def test_binary_entropy_examples():
    assert an.binary_entropy(0.5, 0.5) == 1.0
    assert an.binary_entropy(1.0, 0.0) == 0.0
    # mpmath at 40 digits: 0.50021751468324...
    assert an.binary_entropy(0.8899, 0.1101) == pytest.approx(float(mp_binary_entropy("0.1101")), rel=1e-13)
    assert an.binary_entropy(0.8899, 0.1101) == pytest.approx(0.5002175146832445, rel=1e-13)
    with pytest.raises(ValueError):
        an.binary_entropy(0.6, 0.6)
    with pytest.raises(ValueError):
        an.binary_entropy(-0.1, 1.1)


@given(st.floats(0.0, 1.0))
def test_binary_entropy_bounds_and_symmetry(x):
    h = an.binary_entropy(x, 1 - x)
    assert -1e-15 <= h <= 1.0 + 1e-15
    assert h == pytest.approx(an.binary_entropy(1 - x, x), abs=1e-12)


def test_werner_entropy():
    assert an.werner_entropy(1.0) == 0.0
    assert an.werner_entropy(0.25) == pytest.approx(2.0)
    assert an.werner_entropy(0.95) == pytest.approx(float(mp_werner_entropy("0.95")), rel=1e-13)
    assert an.hashing_yield(0.95) == pytest.approx(0.634354917847986, abs=1e-14)
    with pytest.raises(ValueError):
        an.werner_entropy(0.2)


def test_f_min():
    assert an.f_min_hashing() == pytest.approx(float(mp_fmin()), abs=1e-8)
    assert an.f_min_hashing() == pytest.approx(0.8107, abs=1e-4)
    assert an.werner_entropy(0.8107) > 1.0  # just below the root


def test_q_min_bell_conventions():
    fmin = mp_fmin()
    q_product = float((4 * mp.sqrt(fmin) - 1) / 3)
    q_exact = float(mp.sqrt((4 * fmin - 1) / 3))
    assert an.q_min_bell(an.PAPER_PRODUCT) == pytest.approx(q_product, abs=1e-8)
    assert an.q_min_bell(an.EXACT) == pytest.approx(q_exact, abs=1e-8)
    assert an.q_min_bell(an.PAPER_PRODUCT) == pytest.approx(0.8672, abs=1e-4)
    with pytest.raises(ValueError):
        an.q_min_bell("other")


def test_bell_threshold_report():
    rep = an.threshold_report("bell", an.PAPER_PRODUCT)
    assert rep.p_min == pytest.approx(math.sqrt(rep.q_min))
    assert rep.tolerable_noise == pytest.approx(0.068768151794, abs=1e-9)
    assert round(100 * rep.tolerable_noise, 1) == 6.9
    assert an.threshold_report("bell", an.EXACT).tolerable_noise == pytest.approx(0.070136218382, abs=1e-9)
    with pytest.raises(ValueError):
        an.threshold_report("ghz")


def test_feasibility():
    q_min = an.q_min_bell()
    assert an.feasibility(0.99, 0.95, q_min)
    assert not an.feasibility(0.95, 0.99, q_min)  # p must exceed q
    assert not an.feasibility(0.9, 0.89, q_min)  # product below q_min
    assert not an.feasibility(0.5, 0.5, 0.25)  # strict inequalities
    with pytest.raises(ValueError):
        an.feasibility(1.2, 0.5, 0.5)


def test_p_min_from_qmin():
    rep = an.p_min_from_qmin(0.81)
    assert rep.p_min == pytest.approx(0.9) and rep.tolerable_noise == pytest.approx(0.1)
    with pytest.raises(ValueError):
        an.p_min_from_qmin(0.0)


def mp_pt(q):
    return (3 * mp.mpf(q) + 1) / 4


def test_p_tilde_and_example():
    assert an.p_tilde(0.9515) == pytest.approx(0.963625, abs=1e-15)
    pt = mp_pt("0.9515")
    assert an.p_example_2d(0.9515) == pytest.approx(float((1 - pt) / 3 * pt**4), rel=1e-13)
    assert an.p_example_2d(0.9515) == pytest.approx(0.010454757939568384, rel=1e-13)
    with pytest.raises(ValueError):
        an.p_tilde(1.5)


def test_cluster_coefficients_frozen():
    assert an.a1_1d(0.9204) == pytest.approx(0.110084894376, abs=1e-12)
    assert an.a1_2d(0.9515) == pytest.approx(0.110045472102035, abs=1e-13)
    assert an.a1_1d(1.0) == 0.0 and an.a1_2d(1.0) == 0.0
    c = an.cluster_coefficients(0.95, "2D")
    assert c.a0 + c.a1 == pytest.approx(1.0)
    with pytest.raises(ValueError):
        an.cluster_coefficients(0.95, "3D")


def test_cluster_thresholds():
    q1 = an.q_min_cluster("1D")
    q2 = an.q_min_cluster("2D")
    assert q1 == pytest.approx(0.92044496240572, abs=1e-8)
    assert q2 == pytest.approx(0.95150859248359, abs=1e-8)
    assert round(q1, 4) == 0.9204 and round(q2, 4) == 0.9515
    assert round(100 * (1 - math.sqrt(q1)), 1) == 4.1
    assert round(100 * (1 - math.sqrt(q2)), 1) == 2.5
    assert an.cluster_yield_raw(q1, "1D") == pytest.approx(0.0, abs=1e-7)


def test_cluster_yield_values():
    assert an.cluster_yield(0.98, "2D")[0] == pytest.approx(0.4439795472554167, rel=1e-12)
    raw, clamped = an.cluster_yield(0.9, "2D")
    assert raw < 0 and clamped == 0.0
    assert an.cluster_yield(1.0, "1D") == (1.0, 1.0)


@pytest.mark.parametrize("dimension", an.DIMENSIONS)
def test_cluster_yield_monotone(dimension):
    qs = [0.9 + 0.001 * k for k in range(101)]
    ys = [an.cluster_yield_raw(q, dimension) for q in qs]
    assert all(y2 > y1 for y1, y2 in zip(ys, ys[1:]))


def test_two_d_harder_than_one_d():
    for q in (0.93, 0.96, 0.99):
        assert an.cluster_yield_raw(q, "2D") < an.cluster_yield_raw(q, "1D")


def test_bell_yield():
    # q=0.95 exact convention: F = (3 q^2 + 1)/4 = 0.926875
    raw, clamped = an.bell_yield(0.95, an.EXACT)
    assert raw == pytest.approx(float(1 - mp_werner_entropy("0.926875")), rel=1e-12)
    assert raw == pytest.approx(0.5066208316547129, rel=1e-12)
    assert clamped == raw
    assert an.bell_yield(0.8, an.EXACT)[1] == 0.0
    assert an.yield_curve("cluster1d", 0.95) == an.cluster_yield(0.95, "1D")
    with pytest.raises(ValueError):
        an.yield_curve("ghz", 0.9)


def test_bisect():
    assert an.bisect(lambda x: x * x - 2, 0, 2, tol=1e-12) == pytest.approx(math.sqrt(2), abs=1e-11)
    with pytest.raises(ValueError):
        an.bisect(lambda x: x * x + 1, 0, 1)
