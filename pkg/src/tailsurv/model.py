"""Well-barrier potential with an inverse-square exterior tail.

Geometry, in reduced units (hbar = 2m = 1, energy = k^2):

* inner well of depth v0 on 0 < r < r_a,
* flat barrier of height vb on r_a < r < r_d,
* tail beta(beta+1)/r^2 for r > r_d.

The regular radial solution u(k; r) (u(0) = 0, u'(0) = 1) has closed
piecewise-trigonometric forms inside r_d; `regular_boundary` evaluates
its value and slope at the matching radius as analytic functions of
k^2, so complex momenta and the barrier-top crossing k^2 = vb need no
special casing by the caller.

The initial state is the lowest modes of the well region with an
infinite-wall cutoff at r_a: u_i(r) = sqrt(2/r_a) sin(n_a pi r / r_a)
for r <= r_a, zero outside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

# Taylor switchover for sin(s L)/s and the removable kappa -> 0 point.
_SINC_SERIES_CUT = 1.0e-4


@dataclass(frozen=True)
class WBPotential:
    """Validated well-barrier-tail potential parameters.

    Construction rejects parameter sets that support a bound state,
    since the survival formalism assumes a purely continuous spectrum:
    the zero-energy regular solution is integrated out to 10 r_d and
    must have no nodes.
    """

    v0: float
    vb: float
    r_a: float
    r_d: float
    beta: float

    def __post_init__(self) -> None:
        for name in ("v0", "vb", "r_a", "r_d", "beta"):
            val = getattr(self, name)
            if not isinstance(val, (int, float)) or isinstance(val, bool) or not math.isfinite(val):
                raise ConfigError(f"{name} must be a finite real number, got {val!r}")
            object.__setattr__(self, name, float(val))
        if self.v0 < 0.0:
            raise ConfigError(f"well depth v0 must be >= 0, got {self.v0:g}")
        if self.vb < 0.0:
            raise ConfigError(f"barrier height vb must be >= 0, got {self.vb:g}")
        if not 0.0 < self.r_a < self.r_d:
            raise ConfigError(
                f"radii must satisfy 0 < r_a < r_d, got r_a = {self.r_a:g}, r_d = {self.r_d:g}")
        if self.beta <= -0.5:
            raise ConfigError(f"tail exponent beta must exceed -1/2, got {self.beta:g}")
        n_bound = self._count_zero_energy_nodes()
        if n_bound > 0:
            raise ConfigError(
                f"potential supports {n_bound} bound state(s); "
                "the survival formalism requires none")

    @property
    def r_b(self) -> float:
        """Barrier width r_d - r_a."""
        return self.r_d - self.r_a

    @property
    def tail_strength(self) -> float:
        """Coefficient beta(beta+1) of the 1/r^2 exterior."""
        return self.beta * (self.beta + 1.0)

    def v(self, r):
        """Potential profile; scalar or array radius, r > 0."""
        arr = np.asarray(r, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        if np.any(arr <= 0.0):
            raise DomainError("potential profile requires r > 0")
        out = np.where(arr < self.r_a, -self.v0, self.vb)
        tail = arr >= self.r_d
        out = np.where(tail, self.tail_strength / np.maximum(arr, 1e-300) ** 2, out)
        return float(out[0]) if scalar else out

    def _count_zero_energy_nodes(self) -> int:
        from .oracle import count_nodes_zero_energy  # deferred: oracle needs numpy only

        return count_nodes_zero_energy(self)


@dataclass(frozen=True)
class InitialState:
    """Sine mode confined to the well region, unit L2 norm."""

    r_a: float
    n_a: int = 1

    def __post_init__(self) -> None:
        if not isinstance(self.n_a, int) or isinstance(self.n_a, bool) or self.n_a < 1:
            raise ConfigError(f"mode index n_a must be a positive integer, got {self.n_a!r}")
        if not math.isfinite(self.r_a) or self.r_a <= 0.0:
            raise ConfigError(f"r_a must be positive and finite, got {self.r_a!r}")
        object.__setattr__(self, "r_a", float(self.r_a))

    @classmethod
    def from_potential(cls, pot: WBPotential, n_a: int = 1) -> "InitialState":
        return cls(r_a=pot.r_a, n_a=n_a)

    @property
    def k_a(self) -> float:
        """Interior wavenumber n_a pi / r_a of the mode."""
        return self.n_a * math.pi / self.r_a

    def wavefunction(self, r):
        """u_i(r); vanishes beyond r_a."""
        arr = np.asarray(r, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        amp = math.sqrt(2.0 / self.r_a)
        out = np.where(arr <= self.r_a, amp * np.sin(self.k_a * arr), 0.0)
        return float(out[0]) if scalar else out


@dataclass(frozen=True)
class RegularSolutionBoundary:
    """Regular solution value and slope at the matching radius r_d."""

    k: complex | float
    u: complex | float
    du: complex | float


def _cos_sqrt(z):
    """cos(sqrt(z)), entire in z; handles negative real z as cosh."""
    if np.iscomplexobj(z):
        return np.cos(np.sqrt(z))
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0.0
    out[pos] = np.cos(np.sqrt(z[pos]))
    out[~pos] = np.cosh(np.sqrt(-z[~pos]))
    return out


def _sinc_sqrt(z, length):
    """sin(sqrt(z) L)/sqrt(z), entire in z; series near the origin.

    The series branch covers the removable point z = 0 (for real
    barriers this is the k^2 = vb crossing of the barrier momentum).
    """
    z = np.asarray(z)
    small = np.abs(z) * length * length < _SINC_SERIES_CUT * _SINC_SERIES_CUT
    if np.iscomplexobj(z):
        s = np.sqrt(np.where(small, 1.0, z))
        out = np.sin(s * length) / s
    elif z.ndim == 0:
        return _sinc_sqrt(z[None], length)[0]
    else:
        out = np.empty_like(z, dtype=float)
        pos = ~small & (z > 0.0)
        neg = ~small & (z <= 0.0)
        sp = np.sqrt(z[pos])
        out[pos] = np.sin(sp * length) / sp
        sn = np.sqrt(-z[neg])
        out[neg] = np.sinh(sn * length) / np.where(sn == 0.0, 1.0, sn)
    if np.any(small):
        w = z * (length * length)
        series = length * (1.0 - w / 6.0 * (1.0 - w / 20.0 * (1.0 - w / 42.0)))
        out = np.where(small, series, out)
    return out


def regular_boundary_sq(pot: WBPotential, k_sq):
    """(u, u') of the regular solution at r_d as functions of k^2.

    Vectorized over k_sq (real or complex array).  Both outputs are
    entire in k^2; all square roots appear only through even
    combinations, so no branch choice is involved.
    """
    w = np.atleast_1d(np.asarray(k_sq))
    scalar = np.asarray(k_sq).ndim == 0
    if not np.all(np.isfinite(w)):
        raise DomainError("k^2 must be finite")
    ki_sq = w + pot.v0          # interior momentum squared
    kap_sq = pot.vb - w         # barrier momentum squared (decaying side)
    sin_a = _sinc_sqrt(ki_sq, pot.r_a)        # sin(k_I r_a)/k_I
    cos_a = _cos_sqrt(ki_sq * pot.r_a ** 2)   # cos(k_I r_a)
    cosh_b = _cos_sqrt(-kap_sq * pot.r_b ** 2)    # cosh(kappa r_b)
    sinh_b = _sinc_sqrt(-kap_sq, pot.r_b)         # sinh(kappa r_b)/kappa
    u = sin_a * cosh_b + cos_a * sinh_b
    du = kap_sq * sin_a * sinh_b + cos_a * cosh_b
    if scalar:
        return u[0], du[0]
    return u, du


def regular_boundary(pot: WBPotential, k) -> RegularSolutionBoundary:
    """Closed-form boundary data of the regular solution at r_d."""
    if isinstance(k, (np.floating, np.integer)):
        k = float(k)
    elif isinstance(k, np.complexfloating):
        k = complex(k)
    if not isinstance(k, (int, float, complex)):
        raise DomainError(f"k must be a scalar, got {type(k).__name__}")
    if not np.isfinite(k):
        raise DomainError(f"k must be finite, got {k!r}")
    w = complex(k) ** 2
    if isinstance(k, complex):
        u, du = regular_boundary_sq(pot, w)
        return RegularSolutionBoundary(k=k, u=complex(u), du=complex(du))
    u, du = regular_boundary_sq(pot, w.real)
    return RegularSolutionBoundary(k=float(k), u=float(u), du=float(du))


def zero_energy_boundary(pot: WBPotential) -> RegularSolutionBoundary:
    """Boundary data at threshold (k = 0); seeds the threshold laws."""
    u, du = regular_boundary_sq(pot, 0.0)
    return RegularSolutionBoundary(k=0.0, u=float(u), du=float(du))
