from fractions import Fraction

import numpy as np
import pytest

from loewner_virasoro.sle import (
    Observable,
    SleParams,
    as_fraction,
    capacity_fit,
    charge_weight,
    deterministic_check,
    deterministic_map,
    drift_operator,
    driftless_power,
    martingale_test,
    path_rng,
    simulate_chordal,
)


@pytest.mark.parametrize("kappa,c,h", [(2, -2, 1), ("8/3", 0, Fraction(5, 8)), (6, 0, 0), (4, 1, Fraction(1, 4))])
def test_charge_weight_exact(kappa, c, h):
    cw = charge_weight(kappa)
    assert (cw.c, cw.h) == (c, h)
    assert isinstance(cw.c, Fraction)


def test_charge_weight_rejects_nonpositive():
    with pytest.raises(ValueError):
        charge_weight(0)


def test_float_kappa_snaps_to_fraction():
    assert as_fraction(8 / 3) == Fraction(8, 3)
    assert as_fraction(0.1) == Fraction(1, 10)
    assert as_fraction("8/3") == Fraction(8, 3)


def test_deterministic_map_branch():
    assert deterministic_map(2j, 0) == 2j
    assert abs(deterministic_map(2j, 1.0)) < 1e-12
    assert deterministic_map(1 + 1j, 0.5).imag > 0


def test_rk4_matches_closed_form_away_from_singularity():
    chk = deterministic_check(2j, 0.9, 1e-3)
    assert chk.max_error < 1e-10


def test_rk4_error_concentrates_at_singular_time():
    # at z = 2i the exact map reaches 0 at t = 1, where dg/dt = 2/g is singular
    chk = deterministic_check(2j, 1.0, 1e-3)
    assert chk.error_at == pytest.approx(1.0)
    assert chk.max_error > 1e-10


def test_rk4_generic_point_full_interval():
    assert deterministic_check(1 + 2j, 1.0, 1e-3).max_error < 1e-10


def test_capacity_normalization():
    a = capacity_fit(0.1)
    assert abs(a - 0.2) <= 0.01 * 0.2


def test_observable_json_round_trip():
    F = Observable.from_json([[-1, 1], ["-1/2", [0, 2]]])
    assert Observable.from_json(F.to_json()) == F
    assert F(np.array([1.0]))[0] == 1 + 2j


def test_drift_operator():
    assert drift_operator(Observable.monomial(0, 3.0), 2).is_zero()
    assert drift_operator(Observable.monomial(-1), 2).is_zero()
    assert drift_operator(Observable.monomial("-1/2"), "8/3").is_zero()
    # z^2: (kappa/2)*2 + (2/z)*2z = kappa + 4
    d = drift_operator(Observable.monomial(2), 2)
    assert d.terms == {Fraction(0): 6.0}
    assert driftless_power(4) == 0


def test_params_validation():
    with pytest.raises(ValueError):
        SleParams(kappa=-1, dt=1e-3, T=1, n_paths=1, seed=0)
    with pytest.raises(ValueError):
        SleParams(kappa=2, dt=0, T=1, n_paths=0, seed=0)


def test_substreams_documented_rule():
    a = path_rng(7, 3).standard_normal(4)
    b = np.random.Generator(np.random.PCG64(np.random.SeedSequence([7, 3]))).standard_normal(4)
    assert np.array_equal(a, b)


def test_noise_free_limit():
    p = SleParams(2, 1e-3, 0.5, 3, 0, noise_scale=0.0)
    ens = simulate_chordal(p, 2j, record_every=100)
    exact = np.array([deterministic_map(2j, t) for t in ens.times])
    assert np.max(np.abs(ens.k - exact)) < 10 * p.dt
    assert np.all(ens.xi == 0)


def test_imaginary_part_non_increasing():
    p = SleParams(4, 1e-3, 0.5, 200, 3)
    ens = simulate_chordal(p, 1j)
    assert np.all(ens.max_im_increase <= 1e-12)


def test_thread_count_does_not_change_results():
    p = SleParams(2, 1e-3, 0.2, 2500, 42)
    a = simulate_chordal(p, 2j, 50, threads=1, chunk=700)
    b = simulate_chordal(p, 2j, 50, threads=4, chunk=300)
    assert np.array_equal(a.k, b.k) and np.array_equal(a.swallowed_at, b.swallowed_at)


def test_path_view():
    p = SleParams(2, 1e-2, 0.1, 2, 1)
    ens = simulate_chordal(p, 2j, 1)
    path = ens.path(1)
    assert len(path.times) == 11 and not path.terminated


def test_constant_observable_zero_deviation():
    rep = martingale_test(Observable.monomial(0, 2.0), SleParams(2, 1e-3, 0.1, 100, 0), 2j)
    assert rep.deviation_sigma == 0


def test_martingale_rejects_drifting_observable():
    with pytest.raises(ValueError):
        martingale_test(Observable.monomial(2), SleParams(2, 1e-3, 0.1, 10, 0), 2j)


def test_non_martingale_detected():
    # z^2 drifts by (kappa + 4) t; the test must see it
    rep = martingale_test(Observable.monomial(2), SleParams(2, 1e-3, 0.2, 2000, 0), 2j,
                          require_driftless=False)
    assert rep.deviation_sigma > 5


def test_kappa_8_3_inverse_square_root():
    rep = martingale_test(Observable.monomial("-1/2"), SleParams("8/3", 1e-3, 0.5, 4000, 9), 2j)
    assert rep.deviation_sigma <= 3
    assert rep.swallowed_fraction < 0.01


def test_swallow_warning():
    with pytest.warns(RuntimeWarning):
        martingale_test(Observable.monomial(-1), SleParams(2, 1e-2, 1.0, 300, 0, eps=0.3), 0.3j)
