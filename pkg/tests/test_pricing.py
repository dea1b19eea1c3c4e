import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smileasym.blackscholes import bs_call_price, bs_log_otm, bs_put_price
from smileasym.errors import DomainError
from smileasym.models import RARE_JUMP_MERTON, BlackScholes, CarrWu, Heston, Merton
from smileasym.pricing import (exact_price, fourier_call, mc_price, mc_prices,
                               merton_series_price, put_from_call)

HESTON = Heston(lambda_h=1.5, theta=0.04, eta=0.5, sigma0=0.04, rho=-0.5)
CW = CarrWu(0.2, 1.5)


@pytest.mark.parametrize("damping", [None, 0.5, 1.5, -0.5])
def test_fourier_matches_black_scholes(damping):
    r = fourier_call(BlackScholes(0.2), 0.1, 1.0, damping=damping)
    assert r.price == pytest.approx(bs_call_price(0.1, 0.2), abs=1e-8)
    assert r.method == "fourier"


@pytest.mark.parametrize("kappa", [-1.5, -0.2, 0.05, 0.5, 3.0, 12.0])
def test_fourier_black_scholes_log_price_in_the_wings(kappa):
    r = fourier_call(BlackScholes(0.25), kappa, 0.5)
    assert r.log_price == pytest.approx(bs_log_otm(kappa, 0.25 * math.sqrt(0.5)), rel=1e-10)


def test_fourier_matches_merton_series():
    a = fourier_call(RARE_JUMP_MERTON, 0.5, 0.25)
    b = merton_series_price(RARE_JUMP_MERTON, 0.5, 0.25)
    assert a.price == pytest.approx(b.price, abs=1e-7)
    assert a.log_price == pytest.approx(b.log_price, rel=1e-10)


@pytest.mark.parametrize("kappa", [-0.8, -0.1, 0.2, 1.0])
def test_fourier_matches_series_busy_merton(kappa):
    m = Merton(0.15, 4.0, -0.1, 0.2)
    a = fourier_call(m, kappa, 0.5)
    b = merton_series_price(m, kappa, 0.5, M=128)
    assert a.price == pytest.approx(b.price, rel=1e-10, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(-1.0, 1.0), st.floats(0.02, 2.0),
       st.sampled_from(["bs", "merton", "heston", "carrwu"]))
def test_parity(kappa, t, name):
    m = {"bs": BlackScholes(0.3), "merton": RARE_JUMP_MERTON, "heston": HESTON, "carrwu": CW}[name]
    r = fourier_call(m, kappa, t)
    p = put_from_call(r)
    # the put computed by its own contour closes the parity loop
    if name != "carrwu":
        nu = -0.5 if kappa >= 0.0 else 1.5
        other = fourier_call(m, kappa, t, damping=nu)
        assert abs(other.price - r.price) <= 1e-10
    assert abs(r.price - p + math.expm1(kappa)) <= 1e-10


@pytest.mark.parametrize("m", [BlackScholes(0.2), RARE_JUMP_MERTON, HESTON, CW])
def test_call_bounds_and_monotonicity(m):
    t = 0.3
    ks = [-0.6, -0.2, 0.0, 0.2, 0.6, 1.2]
    calls = [fourier_call(m, k, t).price for k in ks]
    for k, c in zip(ks, calls):
        assert max(0.0, -math.expm1(k)) <= c < 1.0
    assert all(b < a for a, b in zip(calls, calls[1:]))
    assert fourier_call(m, 0.2, 0.1).price < fourier_call(m, 0.2, 0.3).price < fourier_call(m, 0.2, 1.0).price


@pytest.mark.parametrize("m", [BlackScholes(0.2), RARE_JUMP_MERTON, HESTON, CW])
def test_wing_prices_decrease(m):
    t = 0.2
    calls = [fourier_call(m, k, t).log_price for k in (0.5, 1.0, 2.0, 4.0)]
    puts = [fourier_call(m, -k, t).log_price for k in (0.5, 1.0, 2.0, 4.0)]
    assert all(b < a for a, b in zip(calls, calls[1:]))
    assert all(b < a for a, b in zip(puts, puts[1:]))


def test_damping_outside_strip():
    with pytest.raises(DomainError):
        fourier_call(HESTON, 0.1, 1.0, damping=1e3)
    with pytest.raises(DomainError):
        fourier_call(CW, 0.1, 1.0, damping=-0.5)
    with pytest.raises(DomainError):
        fourier_call(BlackScholes(0.2), 0.1, 1.0, damping=1.0)


def test_merton_zero_jump_limit():
    m = Merton(0.2, 1e-14, 0.1, 0.3)
    for k in (-0.3, 0.0, 0.4):
        r = merton_series_price(m, k, 0.5, M=4)
        assert r.price == pytest.approx(bs_call_price(k, 0.2 * math.sqrt(0.5)), abs=1e-12)


@pytest.mark.parametrize("kappa", [-0.5, 0.3, 1.5])
@pytest.mark.parametrize("M", [2, 4, 8])
def test_merton_doubling_within_bound(kappa, M):
    m = Merton(0.2, 2.0, 0.1, 0.3)
    a = merton_series_price(m, kappa, 0.5, M)
    b = merton_series_price(m, kappa, 0.5, 2 * M)
    assert abs(a.price - b.price) <= a.abs_error_bound


def test_merton_series_rejects_bad_m():
    with pytest.raises(DomainError):
        merton_series_price(RARE_JUMP_MERTON, 0.1, 1.0, M=0)


def test_exact_price_routes():
    assert exact_price(BlackScholes(0.2), 0.1, 1.0).method == "closed-sum"
    r = exact_price(Merton(0.2, 50.0, -0.05, 0.1), 0.2, 1.0)
    assert r.method == "closed-sum"
    assert r.abs_error_bound <= 1e-10 * r.price
    assert exact_price(HESTON, 0.1, 1.0).method == "fourier"


def test_put_from_call_keeps_tiny_puts():
    r = exact_price(BlackScholes(0.1), -1.0, 0.5)
    assert put_from_call(r) == pytest.approx(bs_put_price(-1.0, 0.1 * math.sqrt(0.5)), rel=1e-12)
    assert 0.0 < put_from_call(r) < 1e-30  # parity would give 0


# ---------------------------------------------------------------- Monte Carlo

def test_mc_black_scholes_within_four_se():
    r = mc_price(BlackScholes(0.2), 0.1, 1.0, 1_000_000, seed=5)
    assert abs(r.price - bs_call_price(0.1, 0.2)) <= 4 * r.mc_std_error
    assert r.method == "monte-carlo" and r.seed == 5


def test_mc_carrwu_against_fourier():
    r = mc_price(CW, 0.3, 0.25, 1_000_000, seed=2)
    assert abs(r.price - fourier_call(CW, 0.3, 0.25).price) <= 4 * r.mc_std_error


@pytest.mark.parametrize("kappa", [-0.3, 0.2])
def test_mc_merton_against_series(kappa):
    m = Merton(0.2, 3.0, -0.1, 0.2)
    r = mc_price(m, kappa, 0.5, 1_000_000, seed=8)
    assert abs(r.price - merton_series_price(m, kappa, 0.5).price) <= 4 * r.mc_std_error


def test_mc_heston_against_fourier():
    rs = mc_prices(HESTON, [-0.1, 0.1], 0.5, 200_000, seed=4)
    for r in rs:
        assert abs(r.price - fourier_call(HESTON, r.kappa, 0.5).price) <= 4 * r.mc_std_error


def test_mc_heston_step_halving():
    a = mc_price(HESTON, 0.05, 0.5, 100_000, seed=9, steps=256)
    b = mc_price(HESTON, 0.05, 0.5, 100_000, seed=10, steps=512)
    assert abs(a.price - b.price) < 3 * math.hypot(a.mc_std_error, b.mc_std_error)


def test_mc_deterministic_and_block_independent():
    a = mc_prices(RARE_JUMP_MERTON, [0.0, 0.2], 0.3, 150_000, seed=1)
    b = mc_prices(RARE_JUMP_MERTON, [0.0, 0.2], 0.3, 150_000, seed=1)
    assert [r.price for r in a] == [r.price for r in b]
    # one strike at a time reproduces the shared-path result
    assert mc_price(RARE_JUMP_MERTON, 0.2, 0.3, 150_000, seed=1).price == a[1].price
    c = mc_prices(RARE_JUMP_MERTON, [0.0, 0.2], 0.3, 150_000, seed=2)
    assert c[0].price != a[0].price


def test_mc_rejects_empty():
    with pytest.raises(DomainError):
        mc_price(BlackScholes(0.2), 0.0, 1.0, 0, seed=0)
