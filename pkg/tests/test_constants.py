import math

import mpmath as mp
import pytest

from fou.constants import (
    ModelParams,
    alpha_h,
    b_t_closed_form,
    delta_h,
    rate_exponent,
    sigma2_h,
    skorohod_correction,
    stationary_variance,
)

mp.mp.dps = 30


def mp_sigma2(h):
    h = mp.mpf(h)
    return float((4*h - 1) * (1 + mp.gamma(3 - 4*h) * mp.gamma(4*h - 1)
                              / (mp.gamma(2*h) * mp.gamma(2 - 2*h))))


def mp_delta(h):
    h = mp.mpf(h)
    return float(h**2 * (4*h - 1) * (mp.gamma(2*h)**2 + mp.gamma(2*h)
                 * mp.gamma(3 - 4*h) * mp.gamma(4*h - 1) / mp.gamma(2 - 2*h)))


def test_gamma_binding_accuracy():
    # the bound gamma function must be good to >= 12 significant digits
    assert math.gamma(1.0) == pytest.approx(1.0, rel=1e-13)
    assert math.gamma(1.5) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-13)
    assert math.gamma(2.0) == pytest.approx(1.0, rel=1e-13)


def test_alpha_h_values():
    assert alpha_h(0.5) == 0.0
    assert alpha_h(0.75) == pytest.approx(0.375, rel=1e-14)
    assert alpha_h(0.6) == pytest.approx(0.12, rel=1e-14)


@pytest.mark.parametrize("h", [0.49, 0.76, -1.0, 2.0])
def test_hurst_domain_errors(h):
    for fn in (alpha_h, sigma2_h, delta_h, rate_exponent):
        with pytest.raises(ValueError):
            fn(h)


def test_sigma2_h_values():
    assert sigma2_h(0.5) == pytest.approx(2.0, rel=1e-13)
    assert sigma2_h(0.75) == pytest.approx(4.0 / math.pi, rel=1e-13)
    # independent gamma oracle (mpmath): 3.1304951684997052
    assert sigma2_h(0.6) == pytest.approx(mp_sigma2(0.6), rel=1e-12)
    assert sigma2_h(0.6) == pytest.approx(3.1304951684997052, rel=1e-12)


def test_delta_h_values():
    assert delta_h(0.5) == pytest.approx(0.5, rel=1e-13)
    assert delta_h(0.75) == pytest.approx(0.5625, rel=1e-14)
    # independent gamma oracle (mpmath): 0.95008081013963427
    assert delta_h(0.6) == pytest.approx(mp_delta(0.6), rel=1e-12)
    assert delta_h(0.6) == pytest.approx(0.95008081013963427, rel=1e-12)


def test_delta_sigma_identity_at_half():
    # delta_{1/2} = sigma^2_{1/2} / 4, i.e. 0.5 = 2/4
    assert delta_h(0.5) == pytest.approx(sigma2_h(0.5) / 4.0, rel=1e-14)


def test_stationary_variance_values():
    assert stationary_variance(ModelParams(1.0, 0.5, 1.0)) == pytest.approx(0.5, rel=1e-13)
    # 0.75 * Gamma(1.5) * 2^(-1.5) via the gamma oracle
    expect = float(mp.mpf("0.75") * mp.gamma(mp.mpf("1.5")) * mp.mpf(2) ** mp.mpf("-1.5"))
    assert expect == pytest.approx(0.2349964007466563, rel=1e-13)
    assert stationary_variance(ModelParams(2.0, 0.75, 1.0)) == pytest.approx(expect, rel=1e-12)
    assert stationary_variance(ModelParams(1.0, 0.75, 1.0)) == pytest.approx(
        0.66467019408956851, rel=1e-12)


def test_rate_exponent_branches():
    r = rate_exponent(0.55)
    assert r.beta == 0.5 and not r.log_corrected
    r = rate_exponent(0.7)
    assert r.beta == pytest.approx(0.2, rel=1e-12) and not r.log_corrected
    r = rate_exponent(0.625, epsilon=0.01)
    assert r.beta == pytest.approx(0.365, rel=1e-12)
    assert r.epsilon == 0.01
    r = rate_exponent(0.75)
    assert r.log_corrected


def test_rate_exponent_monotone_away_from_borderline():
    # nonincreasing across the two closed-form branches; the isolated
    # H = 5/8 value sits below its left limit (the table is not monotone
    # through that single borderline point)
    hs = [0.5, 0.55, 0.6, 0.63, 0.66, 0.68, 0.7, 0.72, 0.74]
    betas = [rate_exponent(h).beta for h in hs]
    assert all(b1 >= b2 for b1, b2 in zip(betas, betas[1:]))
    assert rate_exponent(0.625).beta <= 0.5


def test_constants_positive():
    for h in (0.55, 0.6, 0.7, 0.75):
        assert sigma2_h(h) > 0
        assert delta_h(h) > 0
        assert alpha_h(h) > 0
        assert stationary_variance(ModelParams(1.0, h, 1.0)) > 0
    assert alpha_h(0.5) == 0.0


def test_b_t_elementary_branch():
    p = ModelParams(theta=1.0, hurst=0.5, horizon=10.0)
    assert b_t_closed_form(p) == pytest.approx(0.5 - (1 - math.exp(-20)) / 40, rel=1e-13)
    # long-horizon limit is the stationary variance
    p = ModelParams(theta=1.0, hurst=0.5, horizon=1e6)
    assert b_t_closed_form(p) == pytest.approx(0.5, rel=1e-6)


def test_b_t_fractional_against_quadrature_oracle():
    # frozen mpmath values of the same three-integral closed form
    frozen = {
        (1.0, 0.6, 50.0): 0.54318862800369836,
        (1.0, 0.6, 100.0): 0.54704493672177736,
        (1.0, 0.75, 50.0): 0.65137679020777714,
        (2.0, 0.6, 50.0): 0.23811513890571794,
        (1.0, 0.55, 25.0): 0.51068509326454081,
    }
    for (theta, h, t), expect in frozen.items():
        got = b_t_closed_form(ModelParams(theta, h, t))
        assert got == pytest.approx(expect, rel=1e-9), (theta, h, t)


def test_b_t_converges_at_rate_one_over_t():
    # T |b_T - a| should not vary by more than a factor 2 across T doublings
    for h in (0.5, 0.6, 0.75):
        a = stationary_variance(ModelParams(1.0, h, 1.0))
        scaled = [t * abs(b_t_closed_form(ModelParams(1.0, h, t)) - a)
                  for t in (50.0, 100.0, 200.0)]
        assert max(scaled) / min(scaled) < 2.0, h


def test_skorohod_correction_values():
    assert skorohod_correction(ModelParams(1.0, 0.5, 10.0)) == 0.0
    # frozen mpmath quadrature of alpha_H int_0^T (T-u) e^{-theta u} u^{2H-2} du
    assert skorohod_correction(ModelParams(1.0, 0.7, 10.0)) == pytest.approx(
        5.9624157330407187, rel=1e-9)
    assert skorohod_correction(ModelParams(1.0, 0.6, 50.0)) == pytest.approx(
        27.434882022904847, rel=1e-9)


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(theta=0.0, hurst=0.6, horizon=1.0)
    with pytest.raises(ValueError):
        ModelParams(theta=1.0, hurst=0.8, horizon=1.0)
    with pytest.raises(ValueError):
        ModelParams(theta=1.0, hurst=0.6, horizon=0.0)
