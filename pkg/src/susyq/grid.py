"""Uniform 1D grid, wavefunctions and the elementary operators on them.

Everything downstream works in trap units: hbar = m = omega = 1, so the
oscillator length x0 = 1 and one trap period is 2*pi.  Grids are periodic
(FFT convention, x_max itself is not a sample point); states are expected
to decay below ~1e-10 before the box edge, which the derivative and ladder
operators check and flag.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

BOUNDARY_DECAY = 1e-10

# flag strings carried on Wavefunction.flags
FLAG_BOUNDARY = "boundary-amplitude"


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid on [x_min, x_max) with n a power of two."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 16 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"grid size must be a power of two >= 16, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def k(self) -> np.ndarray:
        """Angular wavenumbers matching numpy's FFT layout."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, self.dx)


def default_grid() -> Grid1D:
    """Production grid: x in [-16, 16) x0 with 1024 points.

    Wide enough that a packet displaced by 5 x0 (energy ~ x_bar^2/2) stays
    below 1e-10 amplitude at the walls.
    """
    return Grid1D(-16.0, 16.0, 1024)


@dataclass(frozen=True)
class Wavefunction:
    """Complex amplitudes on a Grid1D.  Values are immutable by convention:
    operations return new instances and never write into ``amp``."""

    grid: Grid1D
    amp: np.ndarray
    flags: tuple = field(default_factory=tuple)

    def __post_init__(self):
        amp = np.asarray(self.amp, dtype=complex)
        if amp.shape != (self.grid.n,):
            raise ValueError(f"amplitude shape {amp.shape} does not match grid n={self.grid.n}")
        object.__setattr__(self, "amp", amp)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amp) ** 2) * self.grid.dx))

    def normalized(self) -> "Wavefunction":
        n = self.norm()
        if n == 0.0:
            raise ZeroDivisionError("cannot normalize the zero wavefunction")
        return Wavefunction(self.grid, self.amp / n, self.flags)

    def with_flag(self, flag: str) -> "Wavefunction":
        if flag in self.flags:
            return self
        return Wavefunction(self.grid, self.amp, self.flags + (flag,))

    def boundary_decayed(self, tol: float = BOUNDARY_DECAY) -> bool:
        a = np.abs(self.amp)
        scale = a.max() if a.max() > 0 else 1.0
        return bool(a[0] <= tol * max(scale, 1.0) and a[-1] <= tol * max(scale, 1.0))


def _check_same_grid(a: Wavefunction, b: Wavefunction):
    if a.grid != b.grid:
        raise ValueError("wavefunctions live on different grids")


def inner_product(a: Wavefunction, b: Wavefunction) -> complex:
    """<a|b> = sum conj(a) * b * dx.  Hard error on grid mismatch."""
    _check_same_grid(a, b)
    return complex(np.vdot(a.amp, b.amp) * a.grid.dx)


def spectral_derivative(psi: Wavefunction, order: int = 1) -> Wavefunction:
    """Fourier derivative, exact for band-limited inputs.

    A state that has not decayed below 1e-10 at the box edge picks up the
    'boundary-amplitude' flag instead of raising: the result is then only
    as trustworthy as the periodic continuation.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    k = psi.grid.k
    mult = (1j * k) if order == 1 else -(k ** 2)
    damp = np.fft.ifft(mult * np.fft.fft(psi.amp))
    out = Wavefunction(psi.grid, damp, psi.flags)
    if not psi.boundary_decayed():
        out = out.with_flag(FLAG_BOUNDARY)
    return out


def displace(psi: Wavefunction, x_bar: float) -> Wavefunction:
    """Shift the state by x_bar, snapped to an integer number of grid points.

    Integer shifts are exactly unitary.  Shifting support into the outer
    10% of the box is refused.
    """
    grid = psi.grid
    span = grid.x_max - grid.x_min
    if abs(x_bar) >= span / 4:
        raise ValueError(f"displacement {x_bar} exceeds a quarter of the box {span}")
    shift = int(round(x_bar / grid.dx))
    if shift == 0:
        return psi
    rolled = np.roll(psi.amp, shift)
    # flag support entering the outer 10% of the box
    edge = max(1, int(0.1 * grid.n))
    prob = np.abs(rolled) ** 2 * grid.dx
    outer = prob[:edge].sum() + prob[-edge:].sum()
    if outer > 1e-6 * max(prob.sum(), 1e-300):
        raise ValueError("displacement pushes support into the outer 10% of the box")
    return Wavefunction(grid, rolled, psi.flags)


def ground_state(grid: Grid1D) -> Wavefunction:
    """Harmonic oscillator ground state chi_0 = pi^(-1/4) exp(-x^2/2)."""
    x = grid.x
    return Wavefunction(grid, np.pi ** -0.25 * np.exp(-x ** 2 / 2.0) + 0j)


def fock_state(grid: Grid1D, n: int) -> Wavefunction:
    """Harmonic oscillator eigenstate chi_n via the stable normalized
    Hermite recurrence chi_{n+1} = sqrt(2/(n+1)) x chi_n - sqrt(n/(n+1)) chi_{n-1}."""
    if n < 0:
        raise ValueError("n must be >= 0")
    x = grid.x
    prev = np.zeros_like(x)
    cur = np.pi ** -0.25 * np.exp(-x ** 2 / 2.0)
    for m in range(n):
        nxt = np.sqrt(2.0 / (m + 1)) * x * cur - np.sqrt(m / (m + 1.0)) * prev
        prev, cur = cur, nxt
    return Wavefunction(grid, cur + 0j)


def save_wavefunction(psi: Wavefunction, path) -> None:
    """Columnar text format: '# grid x_min x_max n' header, rows 'x re im'."""
    g = psi.grid
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# grid {g.x_min!r} {g.x_max!r} {g.n}\n")
        for flag in psi.flags:
            fh.write(f"# flag {flag}\n")
        x = g.x
        for i in range(g.n):
            fh.write(f"{x[i]!r} {psi.amp[i].real!r} {psi.amp[i].imag!r}\n")


def load_wavefunction(path) -> Wavefunction:
    flags = []
    grid = None
    re, im = [], []
    opener = open(path, "r", encoding="utf-8") if not isinstance(path, io.IOBase) else path
    with opener as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if parts and parts[0] == "grid":
                    grid = Grid1D(float(parts[1]), float(parts[2]), int(parts[3]))
                elif parts and parts[0] == "flag":
                    flags.append(parts[1])
                continue
            cols = line.split()
            re.append(float(cols[1]))
            im.append(float(cols[2]))
    if grid is None:
        raise ValueError("missing '# grid' header")
    return Wavefunction(grid, np.array(re) + 1j * np.array(im), tuple(flags))
