"""Superpotential algebra: partner potentials, ladder operators B/B^dag,
zero modes and the eta-parametrized barrier family.

Conventions (trap units, hbar = m = omega = 1):

    B^dag = (W(x) - d/dx) / sqrt(2)
    B     = (W(x) + d/dx) / sqrt(2)
    H1    = B B^dag  ->  V1 = W^2/2 + W'/2
    H2    = B^dag B  ->  V2 = W^2/2 - W'/2

so the normalizable zero mode, when it exists, is exp(-Omega) with
Omega = integral of W, lives in H2 and is annihilated by B.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .grid import Grid1D, Wavefunction, spectral_derivative


class Superpotential:
    """Base: evaluates W(x), W'(x) and the asymptotic signs of W."""

    def w(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def w_prime(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def asymptotic_signs(self) -> tuple[int, int]:
        """(sign W(-inf), sign W(+inf))."""
        raise NotImplementedError

    def antiderivative(self, x: np.ndarray) -> np.ndarray:
        """Omega(x) = integral_0^x W(u) du.  Default: high-order numeric."""
        return _cumulative_integral(self.w, x)


def _cumulative_integral(f, x):
    # composite Simpson on a refined grid, anchored at Omega(0) = 0
    fine = np.linspace(x[0], x[-1], 4 * len(x) + 1)
    vals = f(fine)
    h = fine[1] - fine[0]
    # cumulative trapezoid with Richardson touch-up via Simpson pairs
    from scipy.integrate import cumulative_simpson

    cum = cumulative_simpson(vals, dx=h, initial=0.0)
    interp = CubicSpline(fine, cum)
    return interp(x) - interp(0.0)


@dataclass(frozen=True)
class HarmonicGaussian(Superpotential):
    """W = x + A exp(-x^2 / (4 sigma^2)): harmonic trap plus localized barrier."""

    amplitude: float
    sigma: float = 0.5

    def w(self, x):
        return x + self.amplitude * np.exp(-x ** 2 / (4 * self.sigma ** 2))

    def w_prime(self, x):
        g = np.exp(-x ** 2 / (4 * self.sigma ** 2))
        return 1.0 - self.amplitude * x / (2 * self.sigma ** 2) * g

    def asymptotic_signs(self):
        return (-1, 1)

    def antiderivative(self, x):
        from scipy.special import erf

        s = self.sigma
        return x ** 2 / 2 + self.amplitude * s * np.sqrt(np.pi) * erf(x / (2 * s))


@dataclass(frozen=True)
class Monomial(Superpotential):
    """W = c x^n, n a positive integer."""

    c: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("monomial power must be >= 1")

    def w(self, x):
        return self.c * x ** self.n

    def w_prime(self, x):
        return self.c * self.n * x ** (self.n - 1)

    def asymptotic_signs(self):
        s = 1 if self.c > 0 else -1
        if self.n % 2 == 0:
            return (s, s)
        return (-s, s)

    def antiderivative(self, x):
        return self.c * x ** (self.n + 1) / (self.n + 1)


@dataclass(frozen=True)
class TanhQuadratic(Superpotential):
    """W = sqrt(2) (x^2/x1^2 + c tanh(x/x2)).

    W -> +inf on both sides, so supersymmetry is broken: no normalizable
    zero mode on either branch.
    """

    x1: float
    x2: float
    c: float

    def w(self, x):
        return np.sqrt(2.0) * (x ** 2 / self.x1 ** 2 + self.c * np.tanh(x / self.x2))

    def w_prime(self, x):
        return np.sqrt(2.0) * (2 * x / self.x1 ** 2 + self.c / self.x2 / np.cosh(x / self.x2) ** 2)

    def asymptotic_signs(self):
        return (1, 1)


class Tabulated(Superpotential):
    """W sampled on a grid; cubic interpolation for W, spectral W'.

    The spectral derivative keeps the factorization identities accurate to
    the sampling bandwidth.  Asymptotic signs must be supplied since the
    samples cannot speak for the tails.
    """

    def __init__(self, grid: Grid1D, samples: np.ndarray, signs: tuple[int, int]):
        samples = np.asarray(samples, dtype=float)
        if samples.shape != (grid.n,):
            raise ValueError("sample count must match the grid")
        self.grid = grid
        self.samples = samples
        self._signs = signs
        self._spline = CubicSpline(grid.x, samples)
        wp = np.fft.ifft(1j * grid.k * np.fft.fft(samples)).real
        self._wp_spline = CubicSpline(grid.x, wp)

    def w(self, x):
        return self._spline(x)

    def w_prime(self, x):
        return self._wp_spline(x)

    def asymptotic_signs(self):
        return self._signs


@dataclass(frozen=True)
class PotentialPair:
    """V1 and V2 on a common grid; V1 - V2 = W' pointwise."""

    v1: np.ndarray
    v2: np.ndarray
    source: Superpotential
    grid: Grid1D


@dataclass(frozen=True)
class SusyClass:
    broken: bool
    witten_index: int

    def __post_init__(self):
        if self.broken != (self.witten_index == 0):
            raise ValueError("broken SUSY must carry Witten index 0")


def classify(w: Superpotential) -> SusyClass:
    lo, hi = w.asymptotic_signs()
    unbroken = lo != hi and lo != 0 and hi != 0
    return SusyClass(broken=not unbroken, witten_index=1 if unbroken else 0)


def partner_potentials(w: Superpotential, grid: Grid1D) -> PotentialPair:
    """V(1/2) = W^2/2 +- W'/2 in trap units."""
    x = grid.x
    wv = w.w(x)
    wp = w.w_prime(x)
    if not (np.all(np.isfinite(wv)) and np.all(np.isfinite(wp))):
        raise ValueError("superpotential not finite on the grid")
    base = 0.5 * wv ** 2
    return PotentialPair(base + 0.5 * wp, base - 0.5 * wp, w, grid)


def apply_b_dagger(w: Superpotential, psi: Wavefunction) -> Wavefunction:
    """(W psi - psi') / sqrt(2).  For W = x this is the harmonic creation
    operator: B^dag chi_0 = chi_1 exactly."""
    dpsi = spectral_derivative(psi, 1)
    amp = (w.w(psi.grid.x) * psi.amp - dpsi.amp) / np.sqrt(2.0)
    return Wavefunction(psi.grid, amp, dpsi.flags)


def apply_b(w: Superpotential, psi: Wavefunction) -> Wavefunction:
    """(W psi + psi') / sqrt(2); annihilates the unbroken zero mode."""
    dpsi = spectral_derivative(psi, 1)
    amp = (w.w(psi.grid.x) * psi.amp + dpsi.amp) / np.sqrt(2.0)
    return Wavefunction(psi.grid, amp, dpsi.flags)


def zero_mode(w: Superpotential, grid: Grid1D) -> Wavefunction | None:
    """Normalized exp(-Omega) zero mode of H2, or None when SUSY is broken.

    When W(+-inf) = -+inf (the mirrored unbroken case) the normalizable
    solution is exp(+Omega); it then solves B^dag phi = 0, i.e. it is a
    zero mode of H1, which the result records via an 'h1-sector' flag.
    """
    lo, hi = w.asymptotic_signs()
    if lo == hi:
        return None
    omega = w.antiderivative(grid.x)
    sign = -1.0 if (lo, hi) == (-1, 1) else +1.0
    expo = sign * omega
    expo -= expo.max()  # scale out the overflow before exponentiating
    amp = np.exp(expo)
    nrm = np.sqrt(np.sum(amp ** 2) * grid.dx)
    if not np.isfinite(nrm) or nrm == 0.0:
        raise ArithmeticError("zero mode not normalizable despite asymptotics metadata")
    psi = Wavefunction(grid, amp / nrm + 0j)
    if not psi.boundary_decayed(1e-8):
        raise ArithmeticError("zero mode has not decayed at the box edge")
    if sign > 0:
        psi = psi.with_flag("h1-sector")
    return psi


def eta_potential(eta: float, amplitude: float, grid: Grid1D) -> np.ndarray:
    """Barrier family V_eta = x^2/2 + (A^2/2) e^(-2 x^2) + 2 eta A x e^(-x^2).

    The Gaussian widths are those of the sigma = x0/2 barrier.  V_0 equals
    V1 minus the constant hbar*omega/2, and V_1 equals V2 plus the same
    constant; the offsets only ever contribute global phases.
    """
    x = grid.x
    return 0.5 * x ** 2 + 0.5 * amplitude ** 2 * np.exp(-2 * x ** 2) \
        + 2.0 * eta * amplitude * x * np.exp(-x ** 2)
