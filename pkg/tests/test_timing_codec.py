import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from readtime_channel.errors import ParamError
from readtime_channel.timing_codec import (
    ChannelParams,
    OutcomeKind,
    TimingFrame,
    bad_code_wait,
    decode,
    encode,
    error_wait,
    frame,
    is_bad_code,
    mean_read_time,
)

from oracles import brute_force_decode, cyclic_gap

P = ChannelParams(alpha=30.0, delta=7.0, scale=0.25, lam=32)


@pytest.mark.parametrize("w,mu", [(0, 25.0), (500, 245.0), (1500, 685.0)])
def test_mean_read_time(w, mu):
    assert mean_read_time(w) == pytest.approx(mu, abs=1e-12)


def test_frame_scaled_mean():
    f = frame(1500, 0.0, P)
    assert f.mu_s == pytest.approx(171.25)
    assert f.sigma == f.mu_s
    assert f.rho == 0.0
    assert f.beta == pytest.approx(3 * 171.25 + 30)
    assert f.nu == pytest.approx(3 * 171.25 / 32)


def test_frame_rho_at_mean():
    f = frame(1500, 1 - math.exp(-1), P)
    assert f.rho == pytest.approx(f.mu_s, rel=1e-12)


def test_frame_rejects_r_out_of_range():
    with pytest.raises(ValueError):
        frame(100, 1.0, P)


def test_bad_code_below_threshold():
    # lambda*delta/3 = 74.67; nu = 3*74/32 = 6.9375 < 7
    f = TimingFrame.build(74.0, 10.0, P)
    assert f.nu == pytest.approx(6.9375)
    assert is_bad_code(f, P)
    assert P.bad_code_threshold == pytest.approx(224 / 3)


def test_good_frame_above_threshold():
    f = TimingFrame.build(171.25, 10.0, P)
    assert f.nu == pytest.approx(16.0546875)
    assert not is_bad_code(f, P)


def test_rho_past_beta_is_bad():
    f = TimingFrame.build(171.25, 600.0, P)
    assert is_bad_code(f, P)


def test_encode_examples():
    f = TimingFrame.build(100.0, 50.0, P)
    assert f.nu == 9.375
    out = encode(3, f, P)
    assert out.kind is OutcomeKind.CODE
    assert out.wait == pytest.approx(78.125)
    assert encode(0, f, P).wait == pytest.approx(50.0)


def test_encode_wraps_below_rho():
    f = TimingFrame.build(100.0, 320.0, P)
    assert encode(5, f, P).wait == pytest.approx(66.875)


def test_encode_rejects_bad_code_value():
    f = TimingFrame.build(100.0, 50.0, P)
    for c in (-1, 32):
        with pytest.raises(ValueError):
            encode(c, f, P)


def test_decode_examples():
    assert decode(78.125, TimingFrame.build(100.0, 50.0, P), P) == 3
    assert decode(66.875, TimingFrame.build(100.0, 320.0, P), P) == 5
    assert decode(365.0, TimingFrame.build(100.0, 50.0, P), P) is OutcomeKind.BAD_CODE
    assert decode(12.0, TimingFrame.build(100.0, 50.0, P), P) is OutcomeKind.ERROR


def test_decode_when_rho_below_alpha():
    # code 0 wraps to rho + 3*mu_s, just under beta
    f = TimingFrame.build(100.0, 10.0, P)
    assert encode(0, f, P).wait == pytest.approx(310.0)
    assert decode(310.0, f, P) == 0
    assert decode(encode(2, f, P).wait, f, P) == 2
    assert decode(encode(3, f, P).wait, f, P) == 3


def test_error_wait_examples():
    assert error_wait(0.0, P).wait == 7.0
    assert error_wait(0.5, P).wait == pytest.approx(11.0)
    assert error_wait(0.5, P).kind is OutcomeKind.ERROR


def test_bad_code_wait_examples():
    f = TimingFrame.build(100.0, 50.0, P)
    assert f.beta == 330.0
    assert bad_code_wait(0.0, f, P).wait == 330.0
    assert bad_code_wait(0.9, f, P).wait == pytest.approx(360.0)


@given(st.floats(0, 1, exclude_max=True))
def test_error_wait_range(r):
    assert P.delta <= error_wait(r, P).wait < P.alpha


@given(st.floats(0, 1, exclude_max=True))
def test_bad_code_wait_range(r):
    f = TimingFrame.build(100.0, 50.0, P)
    assert f.beta <= bad_code_wait(r, f, P).wait < f.beta + P.z


@pytest.mark.parametrize("kw", [
    dict(alpha=5.0, delta=7.0),
    dict(alpha=7.0, delta=7.0),
    dict(lam=1),
    dict(scale=0.0),
    dict(z=-1.0),
    dict(delta=float("nan")),
    dict(seed=-1),
])
def test_params_validation(kw):
    with pytest.raises(ParamError):
        ChannelParams(**kw)


@st.composite
def channels(draw):
    delta = draw(st.floats(0.5, 20))
    alpha = delta + draw(st.floats(0.5, 60))
    return ChannelParams(
        alpha=alpha,
        delta=delta,
        scale=draw(st.floats(0.05, 2.0)),
        lam=draw(st.integers(2, 256)),
        z=draw(st.floats(1, 200)),
    )


@st.composite
def good_frames(draw):
    params = draw(channels())
    w = draw(st.integers(0, 20000))
    r = draw(st.floats(0, 1, exclude_max=True))
    f = frame(w, r, params)
    assume(not is_bad_code(f, params))
    return params, f


@settings(max_examples=300)
@given(good_frames(), st.data())
def test_roundtrip_zero_delay(pf, data):
    params, f = pf
    c = data.draw(st.integers(0, params.lam - 1))
    assert decode(encode(c, f, params).wait, f, params) == c


@settings(max_examples=300)
@given(good_frames(), st.data())
def test_roundtrip_under_delay(pf, data):
    params, f = pf
    c = data.draw(st.integers(0, params.lam - 1))
    bound = min(params.delta, f.nu - params.delta)
    d = data.draw(st.floats(0, 0.999)) * bound
    assert decode(encode(c, f, params).wait + d, f, params) == c


@settings(max_examples=200)
@given(good_frames())
def test_window_partition(pf):
    params, f = pf
    waits = [encode(c, f, params).wait for c in range(params.lam)]
    assert all(params.alpha <= t < f.beta for t in waits)
    ordered = sorted(waits)
    gaps = [b - a for a, b in zip(ordered, ordered[1:])] + [ordered[0] + f.span - ordered[-1]]
    assert min(gaps) >= f.nu - 1e-9


@settings(max_examples=200)
@given(good_frames(), st.data())
def test_matches_brute_force(pf, data):
    params, f = pf
    c = data.draw(st.integers(0, params.lam - 1))
    d = data.draw(st.floats(0, 0.999)) * min(params.delta, f.nu - params.delta)
    tau = encode(c, f, params).wait + d
    assert decode(tau, f, params) == brute_force_decode(tau, f, params) == c


@given(channels(), st.floats(0.1, 5000))
def test_slot_arithmetic(params, mu_s):
    f = TimingFrame.build(mu_s, 0.0, params)
    assert f.beta - params.alpha == pytest.approx(params.lam * f.nu, rel=1e-15, abs=1e-12)
    assert f.beta == pytest.approx(3 * mu_s + params.alpha)


def test_cyclic_gap_helper():
    assert cyclic_gap(1.0, 299.0, 300.0) == pytest.approx(2.0)


def test_wrapped_top_code_collision():
    # nu < 2 delta: a delay of nu - delta + eps pulls the wrapped top code into |tau - rho| < delta
    f = frame(900, 0.9, P)
    assert P.delta <= f.nu < 2 * P.delta
    top = encode(P.lam - 1, f, P).wait
    assert top < f.rho
    assert decode(top + f.nu - P.delta - 0.01, f, P) == P.lam - 1
    assert decode(top + f.nu - P.delta + 0.01, f, P) == 0
