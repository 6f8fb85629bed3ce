"""Shared fixtures: the reference parameter set and memoized pipelines.

The expensive objects (densities, exact survival series, power-law
fits, the repulsive-branch sweep) are cached per session so that the
module tests and the acceptance tests share one computation.
"""
from __future__ import annotations

import time

import numpy as np
import pytest

from tailsurv import (InitialState, SpectralDensity, WBPotential, beta_sweep,
                      fit_power_law, survival_exact)

SESSION_T0 = time.time()

#: The reference well-barrier geometry used throughout the test suite.
REFERENCE = {"v0": 0.5, "vb": 1.8, "r_a": 3.0, "r_d": 3.4}

#: Tail strengths of the four reference density curves.
REFERENCE_BETAS = (-0.4, -0.1, 0.3, 0.7)

#: Default fitting window for long-time exponent fits.
WINDOW = (400.0, 800.0)


def make_potential(beta: float, **overrides) -> WBPotential:
    params = dict(REFERENCE)
    params.update(overrides)
    return WBPotential(beta=beta, **params)


def make_density(beta: float, **overrides) -> SpectralDensity:
    pot = make_potential(beta, **overrides)
    return SpectralDensity(pot, InitialState.from_potential(pot))


@pytest.fixture(scope="session")
def density_for():
    """Memoized density factory keyed by tail strength and overrides."""
    cache: dict = {}

    def get(beta: float, **overrides) -> SpectralDensity:
        key = (beta, tuple(sorted(overrides.items())))
        if key not in cache:
            cache[key] = make_density(beta, **overrides)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def exact_series_for(density_for):
    """Memoized exact survival series on a uniform time window."""
    cache: dict = {}

    def get(beta: float, t_lo: float = WINDOW[0], t_hi: float = WINDOW[1],
            n: int = 50, **overrides):
        key = (beta, t_lo, t_hi, n, tuple(sorted(overrides.items())))
        if key not in cache:
            times = np.linspace(t_lo, t_hi, n)
            cache[key] = survival_exact(density_for(beta, **overrides), times)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def power_fit_for(exact_series_for):
    """Memoized power-law fit of the exact curve on a window."""
    cache: dict = {}

    def get(beta: float, t_lo: float = WINDOW[0], t_hi: float = WINDOW[1],
            n: int = 50, **overrides):
        key = (beta, t_lo, t_hi, n, tuple(sorted(overrides.items())))
        if key not in cache:
            series = exact_series_for(beta, t_lo, t_hi, n, **overrides)
            cache[key] = fit_power_law(series, t_lo, t_hi)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def width_series_for(density_for):
    """Memoized exact survival curve on the exponential-stage window."""
    cache: dict = {}

    def get(beta: float):
        if beta not in cache:
            times = np.linspace(20.0, 100.0, 40)
            cache[beta] = survival_exact(density_for(beta), times)
        return cache[beta]

    return get


@pytest.fixture(scope="session")
def repulsive_sweep_rows():
    """One sweep of the non-negative tail-strength grid, shared."""
    betas = np.round(np.arange(0.0, 1.0001, 0.05), 10)
    return beta_sweep(make_potential(0.0), betas)


@pytest.fixture(scope="session")
def attractive_sweep_rows():
    """One sweep of the attractive branch close to the -1/2 wall."""
    return beta_sweep(make_potential(0.0), betas=(-0.45, -0.40, -0.35, -0.30))


@pytest.fixture(scope="session")
def suite_elapsed():
    """Callable returning seconds since test collection started."""
    return lambda: time.time() - SESSION_T0


def pytest_collection_modifyitems(items):
    """Run the acceptance gate last so its wall-clock and budget checks
    cover the full suite and its fixtures are already warm."""
    items.sort(key=lambda item: item.fspath.basename == "test_acceptance.py")


#: Verdict lines filled in by the acceptance gate, one per criterion.
ACCEPTANCE_SCORECARD: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_SCORECARD:
        terminalreporter.section("acceptance scorecard")
        for line in ACCEPTANCE_SCORECARD:
            terminalreporter.write_line(line)
