import pytest

from cachesec import (McSettings, SchemeId, cop, mc_cop, mc_sop, sop,
                      sop_bsr_approx)
from cachesec.montecarlo import _mc_disc_radii
from helpers import standard_layout, standard_params, within_3_sigma


def test_settings_validation():
    with pytest.raises(ValueError):
        McSettings(trials=0, seed=1)
    with pytest.raises(ValueError):
        McSettings(trials=10, seed=-1)
    with pytest.raises(ValueError):
        McSettings(trials=10, seed=1, eve_disc_radius=0.0)
    with pytest.raises(ValueError):
        McSettings(trials=10, seed=1, bsr_serving="random")


def test_mc_cop_zero_threshold_exact_zero():
    lay = standard_layout(2)
    params = standard_params()
    settings = McSettings(trials=2000, seed=3)
    for scheme in SchemeId:
        assert mc_cop(scheme, lay, params, 0.0, settings).value == 0.0


def test_mc_cop_k1_schemes_agree():
    # at K = 1 all three decoding conditions are the same law
    lay = standard_layout(1)
    params = standard_params(Ps_dBw=0.0)
    settings = McSettings(trials=100_000, seed=4)
    estimates = [mc_cop(s, lay, params, 1.0, settings) for s in SchemeId]
    for a in estimates:
        for b in estimates:
            sigma = max(a.std_error, b.std_error)
            assert abs(a.value - b.value) <= 3 * sigma


def test_mc_cop_reproducible_across_runs_and_threads():
    lay = standard_layout(3)
    params = standard_params()
    settings = McSettings(trials=300_000, seed=5)
    one = mc_cop(SchemeId.DBF, lay, params, 1.0, settings)
    two = mc_cop(SchemeId.DBF, lay, params, 1.0, settings)
    four = mc_cop(SchemeId.DBF, lay, params, 1.0, settings, threads=4)
    assert one.value == two.value == four.value


def test_mc_sop_reproducible_across_runs_and_threads():
    lay = standard_layout(3)
    params = standard_params()
    settings = McSettings(trials=5000, seed=6)
    one = mc_sop(SchemeId.BSR, lay, params, 1.0, settings)
    two = mc_sop(SchemeId.BSR, lay, params, 1.0, settings)
    four = mc_sop(SchemeId.BSR, lay, params, 1.0, settings, threads=4)
    assert one.value == two.value == four.value


def test_mc_sop_zero_density_exact_zero():
    lay = standard_layout(2)
    params = standard_params(lambda_e=0.0)
    settings = McSettings(trials=500, seed=7)
    for scheme in SchemeId:
        assert mc_sop(scheme, lay, params, 1.0, settings).value == 0.0


def test_mc_sop_rejects_small_window():
    lay = standard_layout(2)
    params = standard_params()
    with pytest.raises(ValueError):
        mc_sop(SchemeId.DBF, lay, params, 1.0,
               McSettings(trials=100, seed=8, eve_disc_radius=0.5))


def test_mc_sop_window_doubling_negligible():
    # the eavesdropper field inside the base radius is drawn before any
    # annulus point, so widening the window only adds tail contributions
    lay = standard_layout(3)
    params = standard_params()
    base_radius, _ = _mc_disc_radii(SchemeId.DBF, lay, params, 1.0,
                                    McSettings(trials=1, seed=0))
    small = mc_sop(SchemeId.DBF, lay, params, 1.0,
                   McSettings(trials=20_000, seed=9))
    big = mc_sop(SchemeId.DBF, lay, params, 1.0,
                 McSettings(trials=20_000, seed=9,
                            eve_disc_radius=2.0 * base_radius))
    assert abs(small.value - big.value) <= max(small.std_error, 1e-12)


def test_mc_against_analytic_grid():
    # 5 powers x 3 thresholds per scheme for both outage kinds
    powers = [0.0, 5.0, 10.0, 15.0, 20.0]
    betas = [0.5, 1.0, 2.0]
    lay = standard_layout(3)
    cop_trials, sop_trials = 200_000, 20_000
    for scheme in SchemeId:
        ok = total = 0
        for i, ps in enumerate(powers):
            params = standard_params(Ps_dBw=ps)
            for j, beta in enumerate(betas):
                est = mc_cop(scheme, lay, params, beta,
                             McSettings(trials=cop_trials,
                                        seed=1000 + 31 * i + j))
                an = cop(scheme, lay, params, beta).value
                ok += within_3_sigma(an, est.value, est.std_error, cop_trials)
                total += 1
        assert ok >= 0.95 * total, f"{scheme} cop grid: {ok}/{total}"
    for scheme in SchemeId:
        ok = total = 0
        for i, ps in enumerate(powers):
            params = standard_params(Ps_dBw=ps)
            for j, beta in enumerate(betas):
                est = mc_sop(scheme, lay, params, beta,
                             McSettings(trials=sop_trials,
                                        seed=2000 + 31 * i + j))
                an = sop(scheme, lay, params, beta).value
                ok += within_3_sigma(an, est.value, est.std_error, sop_trials)
                total += 1
        assert ok >= 0.95 * total, f"{scheme} sop grid: {ok}/{total}"


def test_mc_validates_simplex_integration_at_k5():
    # the quasi-random simplex route has no closed-form cross-check beyond
    # K = 2, so pin it against direct simulation on a 5-SBS layout
    lay = standard_layout(5)
    trials = 10 ** 6
    for i, (ps, beta) in enumerate([(5.0, 1.0), (10.0, 3.0), (0.0, 0.5)]):
        params = standard_params(Ps_dBw=ps)
        an = cop(SchemeId.DBF, lay, params, beta).value
        est = mc_cop(SchemeId.DBF, lay, params, beta,
                     McSettings(trials=trials, seed=3000 + i))
        assert within_3_sigma(an, est.value, est.std_error, trials), \
            f"Ps={ps} beta={beta}: {an} vs {est.value}"


def test_mc_validates_quadrature_at_slow_decay_exponent():
    # alpha barely above 2 stretches the truncation radius; make sure the
    # certified quadrature still tracks simulation there
    lay = standard_layout(3)
    params = standard_params(Ps_dBw=5.0, alpha=2.5, lambda_e=0.05)
    trials = 30_000
    for j, scheme in enumerate(SchemeId):
        an = sop(scheme, lay, params, 1.0).value
        est = mc_sop(scheme, lay, params, 1.0,
                     McSettings(trials=trials, seed=4000 + j))
        assert within_3_sigma(an, est.value, est.std_error, trials), \
            f"{scheme}: {an} vs {est.value}"


def test_mc_sop_bsr_independent_hops_matches_closed_form():
    lay = standard_layout(3)
    params = standard_params(Ps_dBw=5.0)
    trials = 40_000
    est = mc_sop(SchemeId.BSR, lay, params, 1.0,
                 McSettings(trials=trials, seed=12, independent_hops=True))
    an = sop_bsr_approx(params, 1.0).value
    assert within_3_sigma(an, est.value, est.std_error, trials)


def test_mc_sop_bsr_shared_field_matches_quadrature():
    lay = standard_layout(3)
    params = standard_params(Ps_dBw=5.0)
    trials = 40_000
    est = mc_sop(SchemeId.BSR, lay, params, 1.0,
                 McSettings(trials=trials, seed=13, independent_hops=False))
    an = sop(SchemeId.BSR, lay, params, 1.0).value
    assert within_3_sigma(an, est.value, est.std_error, trials)


def test_mc_sop_bsr_nearest_serving_convention():
    # the fixed-serving analytic convention should agree with Monte Carlo
    # under either serving rule at these parameters
    lay = standard_layout(5)
    params = standard_params(Ps_dBw=10.0, Pm_dBw=0.0)
    trials = 40_000
    an = sop(SchemeId.BSR, lay, params, 1.0).value
    for serving in ("fading", "nearest"):
        est = mc_sop(SchemeId.BSR, lay, params, 1.0,
                     McSettings(trials=trials, seed=14, bsr_serving=serving))
        assert within_3_sigma(an, est.value, est.std_error, trials)


def test_mc_rejects_bad_thresholds():
    lay = standard_layout(2)
    params = standard_params()
    settings = McSettings(trials=10, seed=1)
    with pytest.raises(ValueError):
        mc_cop(SchemeId.DBF, lay, params, -1.0, settings)
    with pytest.raises(ValueError):
        mc_sop(SchemeId.DBF, lay, params, 0.0, settings)
