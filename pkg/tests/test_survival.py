"""Exact survival integral, rotated-axis route, and asymptotic models."""

import math

import numpy as np
import pytest

from tailsurv.errors import DomainError, ToleranceError
from tailsurv.specfun import gamma
from tailsurv.survival import (SurvivalSeries, asymptote_one_term,
                               asymptote_series, spectral_mass,
                               survival_exact, survival_laplace_axis)

from conftest import WINDOW, make_density


# ------------------------------------------------------------------ #
# series container                                                   #
# ------------------------------------------------------------------ #

def test_series_container_validates_shapes():
    with pytest.raises(DomainError):
        SurvivalSeries(times=np.array([1.0, 2.0]),
                       probability=np.array([1.0]),
                       amplitudes=None, method="exact", meta={})


# ------------------------------------------------------------------ #
# exact evaluation                                                   #
# ------------------------------------------------------------------ #

def test_survival_starts_at_unity(density_for):
    s = survival_exact(density_for(0.3), np.array([0.0]))
    assert s.probability[0] == pytest.approx(1.0, abs=1.0e-6)
    assert s.amplitudes[0] == pytest.approx(1.0, abs=1.0e-6)


def test_survival_bounded_by_unity(density_for):
    times = np.concatenate(([0.0], np.geomspace(0.1, 2000.0, 40)))
    s = survival_exact(density_for(0.3), times)
    assert np.all(s.probability <= 1.0 + 1.0e-12)
    assert np.all(s.probability >= 0.0)


def test_survival_rejects_negative_times(density_for):
    with pytest.raises(DomainError):
        survival_exact(density_for(0.3), np.array([-1.0, 2.0]))


def test_survival_unreachable_tolerance_raises(density_for):
    with pytest.raises(ToleranceError):
        survival_exact(density_for(0.3), np.array([500.0]), abs_tol=1.0e-16)


def test_survival_reports_accuracy_metadata(density_for):
    s = survival_exact(density_for(0.3), np.array([50.0, 100.0]))
    assert s.method == "exact"
    assert s.meta["max_error_estimate"] <= 1.0e-8
    assert s.meta["e_max"] > 4.0
    s_small = survival_exact(density_for(0.3), np.array([100.0]), e_max=100.0)
    assert s_small.meta["e_max"] == 100.0
    with pytest.raises(DomainError):
        survival_exact(density_for(0.3), np.array([100.0]), e_max=2.0)


def test_spectral_mass_accounts_for_everything(density_for):
    assert spectral_mass(density_for(0.3)) == pytest.approx(1.0, abs=1.0e-6)


# ------------------------------------------------------------------ #
# rotated-axis (Laplace) route                                       #
# ------------------------------------------------------------------ #

def test_laplace_matches_exact_in_the_tail_window(density_for,
                                                  exact_series_for):
    # the rotated-contour route omits the resonance-pole contribution;
    # deep in the window that part has decayed for every reference tail,
    # fastest for the narrow-resonance case beta = 0.7 where a residual
    # ~1 percent imprint remains
    devs = {}
    for beta in (-0.4, -0.1, 0.3, 0.7):
        exact = exact_series_for(beta, n=21)
        lap = survival_laplace_axis(density_for(beta), exact.times)
        devs[beta] = float(np.max(np.abs(lap.probability / exact.probability
                                         - 1.0)))
        assert devs[beta] < 5.0e-2
    assert devs[0.3] < 1.0e-4
    assert devs[0.7] == pytest.approx(9.5e-3, rel=0.1)
    assert devs[0.7] > devs[0.3]


def test_pole_part_negligible_past_t300(density_for):
    for beta in (-0.1, 0.3, 0.7):
        den = density_for(beta)
        t = np.array([300.0])
        exact = survival_exact(den, t).probability[0]
        lap = survival_laplace_axis(den, t).probability[0]
        assert abs(lap / exact - 1.0) < 1.0e-2


def test_pole_part_still_visible_at_t250_for_narrow_resonance(density_for):
    # just before the crossover the pole and power-law parts interfere
    # destructively for beta = 0.7; the pole-free route misses that dip
    den = density_for(0.7)
    t = np.array([250.0])
    exact = survival_exact(den, t).probability[0]
    lap = survival_laplace_axis(den, t).probability[0]
    assert abs(lap / exact - 1.0) > 0.2


def test_tail_window_scaling_exponent(density_for):
    # P(2t)/P(t) -> 2^{-(2 beta + 3)} once the power law dominates
    den = density_for(0.7)
    s = survival_exact(den, np.array([500.0, 1000.0]))
    ratio = s.probability[1] / s.probability[0]
    assert ratio == pytest.approx(2.0**-4.4, rel=2.0e-2)


def test_laplace_threshold_form_close_in_window(density_for,
                                                exact_series_for):
    exact = exact_series_for(-0.4)
    lap = survival_laplace_axis(density_for(-0.4), exact.times,
                                form="threshold")
    dev = np.max(np.abs(lap.probability / exact.probability - 1.0))
    assert dev < 0.10


def test_laplace_validation(density_for):
    den = density_for(0.3)
    with pytest.raises(DomainError):
        survival_laplace_axis(den, np.array([500.0]), form="bogus")
    with pytest.raises(DomainError):
        survival_laplace_axis(den, np.array([0.0]))


# ------------------------------------------------------------------ #
# asymptotic models                                                  #
# ------------------------------------------------------------------ #

def test_one_term_model_structure(density_for):
    for beta in (0.7, 1.0):
        th = (density_for(beta) if beta != 1.0
              else make_density(1.0)).threshold
        model = asymptote_one_term(th)
        nu = beta + 0.5
        assert model.space == "probability"
        assert list(model.exponents) == [pytest.approx(2.0 * beta + 3.0)]
        predicted = (th.density_scale * gamma(1.0 + nu))**2
        assert model.coefficients[0] == pytest.approx(predicted, rel=1.0e-12)


def test_series_model_structure(density_for):
    th = density_for(-0.4).threshold
    model = asymptote_series(th, n_terms=4)
    nu = th.nu
    series = th.require_series()
    assert model.space == "amplitude"
    for m, (c, s) in enumerate(zip(model.coefficients, model.exponents)):
        assert s == pytest.approx(1.0 + nu * (m + 1), rel=1.0e-12)
        assert c == pytest.approx(series[m] * gamma(1.0 + nu * (m + 1)),
                                  rel=1.0e-12)


def test_series_first_term_reproduces_one_term(density_for):
    th = density_for(-0.4).threshold
    t = np.geomspace(10.0, 1000.0, 7)
    one = asymptote_one_term(th).evaluate(t).probability
    s1 = asymptote_series(th, n_terms=1).evaluate(t).probability
    assert np.allclose(s1, one, rtol=1.0e-12, atol=0.0)


def test_series_magnitude_invariant_under_phase_branch(density_for):
    # the model's fixed branch of (i t)^{-s} only rotates the complex
    # amplitude; the resulting magnitude matches the opposite branch
    th = density_for(-0.4).threshold
    model = asymptote_series(th, n_terms=4)
    t = np.geomspace(50.0, 2000.0, 9)
    branch_down = np.zeros(t.shape, dtype=complex)
    branch_up = np.zeros(t.shape, dtype=complex)
    for c, s in zip(model.coefficients, model.exponents):
        branch_down += c * t**-s * np.exp(-0.5j * math.pi * s)
        branch_up += c * t**-s * np.exp(+0.5j * math.pi * s)
    assert np.allclose(np.abs(branch_down), np.abs(branch_up),
                       rtol=1.0e-13, atol=0.0)
    assert np.allclose(np.abs(branch_down)**2,
                       model.evaluate(t).probability, rtol=1.0e-12)


def test_longer_series_is_uniformly_closer(density_for, exact_series_for):
    exact = exact_series_for(-0.4)
    th = density_for(-0.4).threshold
    dev2 = np.abs(asymptote_series(th, n_terms=2).evaluate(exact.times)
                  .probability / exact.probability - 1.0)
    dev4 = np.abs(asymptote_series(th, n_terms=4).evaluate(exact.times)
                  .probability / exact.probability - 1.0)
    assert np.all(dev4 < dev2)
    assert np.max(dev2) == pytest.approx(0.504, rel=5.0e-2)
    assert np.max(dev4) == pytest.approx(0.103, rel=5.0e-2)


def test_series_depth_validation(density_for):
    th = density_for(-0.4).threshold
    with pytest.raises(DomainError):
        asymptote_series(th, n_terms=0)
    with pytest.raises(DomainError):
        asymptote_series(th, n_terms=7)


def test_series_blocked_at_integer_order():
    th = make_density(0.5).threshold
    with pytest.raises(DomainError):
        asymptote_series(th)
    # the one-term model only needs the leading scale and still works
    model = asymptote_one_term(th)
    assert np.isfinite(model.evaluate(np.array([100.0])).probability[0])


def test_models_reject_nonpositive_times(density_for):
    model = asymptote_one_term(density_for(-0.4).threshold)
    with pytest.raises(DomainError):
        model.evaluate(np.array([0.0, 10.0]))
