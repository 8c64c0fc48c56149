"""Stationary analysis: bound-state eigensolvers, isospectrality reports,
eta-spectrum sweeps and eigenstate mapping through B.

The workhorse is the second-order central finite-difference Hamiltonian
(tridiagonal, Dirichlet box edges).  Its eigenvalues carry an O(dx^2)
bias, so quantitative comparisons go through ``eigensolve_refined`` which
Richardson-extrapolates a full-grid and a half-grid solve; the plain
matrix stays available as the oracle target.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .grid import Grid1D, Wavefunction, inner_product
from .susy import PotentialPair, SusyClass, apply_b, classify, eta_potential

DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class SpectrumResult:
    energies: np.ndarray          # ascending, hbar*omega units
    states: list[Wavefunction]
    potential_id: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        if np.any(np.diff(e) < -DEGENERACY_TOL):
            raise ValueError("energies must ascend (within degeneracy tolerance)")
        object.__setattr__(self, "energies", e)


def _fd_tridiagonal(v: np.ndarray, dx: float, kin: float):
    diag = 2.0 * kin / dx ** 2 + v
    off = np.full(len(v) - 1, -kin / dx ** 2)
    return diag, off


def eigensolve(v: np.ndarray, grid: Grid1D, k: int, kin: float = 0.5,
               potential_id: str = "") -> SpectrumResult:
    """Lowest k eigenpairs of -kin d^2/dx^2 + V with Dirichlet box edges.

    kin = 1/2 is the trap-unit Schroedinger operator; kin = 1 realizes the
    hbar^2/(2m) = 1 convention used for the box-potential example.
    """
    v = np.asarray(v, dtype=float)
    if k > grid.n // 4:
        raise ValueError(f"k = {k} exceeds n/4 = {grid.n // 4}; high states are unreliable")
    diag, off = _fd_tridiagonal(v, grid.dx, kin)
    w, vec = eigh_tridiagonal(diag, off, select="i", select_range=(0, k - 1))
    states = []
    for i in range(k):
        amp = vec[:, i] / np.sqrt(grid.dx)
        # sign convention: first significant lobe positive
        j = np.argmax(np.abs(amp) > 0.05 * np.abs(amp).max())
        if amp[j] < 0:
            amp = -amp
        states.append(Wavefunction(grid, amp + 0j))
    return SpectrumResult(w, states, potential_id, {"kin": kin, "n": grid.n})


def dense_hamiltonian(v: np.ndarray, grid: Grid1D, kin: float = 0.5) -> np.ndarray:
    """The same finite-difference operator as a dense matrix (oracle use)."""
    diag, off = _fd_tridiagonal(np.asarray(v, dtype=float), grid.dx, kin)
    h = np.diag(diag)
    h += np.diag(off, 1) + np.diag(off, -1)
    return h


def _coarse(grid: Grid1D) -> Grid1D:
    return Grid1D(grid.x_min, grid.x_max, grid.n // 2)


def eigensolve_refined(v_of_x, grid: Grid1D, k: int, kin: float = 0.5,
                       potential_id: str = "") -> SpectrumResult:
    """Richardson-extrapolated energies: (4 E_dx - E_2dx) / 3 removes the
    O(dx^2) finite-difference bias.  ``v_of_x`` must be callable so the
    potential can be re-sampled on the half grid.  States come from the
    fine grid.
    """
    fine = eigensolve(v_of_x(grid.x), grid, k, kin, potential_id)
    cg = _coarse(grid)
    coarse = eigensolve(v_of_x(cg.x), cg, k, kin, potential_id)
    energies = (4.0 * fine.energies - coarse.energies) / 3.0
    meta = dict(fine.metadata)
    meta["richardson"] = True
    return SpectrumResult(energies, fine.states, potential_id, meta)


@dataclass(frozen=True)
class IsospectralReport:
    pairs: np.ndarray             # (n_paired, 2) energies [E1_n, E2_{n+w}]
    max_abs_mismatch: float
    unpaired_zero_mode: float | None
    susy_class: SusyClass
    within_tol: bool


def isospectral_report(pair: PotentialPair, k: int, tol: float = 1e-4) -> IsospectralReport:
    """Pair the H1 spectrum against the H2 spectrum shifted by the Witten
    index and report the worst level mismatch.  A mismatch beyond tol is
    reported, not raised."""
    grid = pair.grid
    cls = classify(pair.source)
    w_idx = cls.witten_index
    spec1 = eigensolve_refined(lambda x: _resample(pair.v1, grid, x), grid, k,
                               potential_id="V1")
    spec2 = eigensolve_refined(lambda x: _resample(pair.v2, grid, x), grid, k + w_idx,
                               potential_id="V2")
    e1 = spec1.energies
    e2 = spec2.energies
    unpaired = float(e2[0]) if w_idx == 1 else None
    paired = np.column_stack([e1[: k - w_idx], e2[w_idx: k]])
    mism = float(np.max(np.abs(paired[:, 0] - paired[:, 1])))
    return IsospectralReport(paired, mism, unpaired, cls, mism <= tol)


def _resample(v: np.ndarray, grid: Grid1D, x: np.ndarray) -> np.ndarray:
    if len(x) == grid.n:
        return v
    # half grid samples sit on every other fine point
    step = grid.n // len(x)
    return v[::step]


def eta_spectrum_sweep(amplitude: float, eta_range: np.ndarray, k: int,
                       grid: Grid1D | None = None) -> np.ndarray:
    """energies(eta, n) for the barrier family V_eta, lowest k levels.

    At eta = 1 the spectrum reproduces the eta = 0 spectrum shifted up by
    one trap quantum, plus one additional ground state.
    """
    from .grid import default_grid

    grid = grid or default_grid()
    eta_range = np.asarray(eta_range, dtype=float)
    if eta_range.size and (eta_range.min() < -3 or eta_range.max() > 3):
        raise ValueError("eta range restricted to [-3, 3]")
    rows = []
    for eta in eta_range:
        spec = eigensolve_refined(
            lambda x, e=eta: eta_potential_on(x, e, amplitude), grid, k,
            potential_id=f"V_eta({eta:g})")
        rows.append(spec.energies)
    return np.array(rows)


def eta_potential_on(x: np.ndarray, eta: float, amplitude: float) -> np.ndarray:
    return 0.5 * x ** 2 + 0.5 * amplitude ** 2 * np.exp(-2 * x ** 2) \
        + 2.0 * eta * amplitude * x * np.exp(-x ** 2)


def eta_pairing_mismatch(sweep: np.ndarray, eta_range: np.ndarray, levels: int = 8) -> np.ndarray:
    """max_n |E_{n+1}(eta) - E_n(0) - 1| over the lowest ``levels`` paired
    states, for each eta; the SUSY point eta = 1 minimizes it."""
    eta_range = np.asarray(eta_range, dtype=float)
    i0 = int(np.argmin(np.abs(eta_range)))
    if abs(eta_range[i0]) > 1e-12:
        raise ValueError("eta range must contain 0 for the reference column")
    ref = sweep[i0]
    out = np.empty(len(eta_range))
    for i in range(len(eta_range)):
        out[i] = np.max(np.abs(sweep[i, 1: levels + 1] - ref[:levels] - 1.0))
    return out


def map_eigenstate(w_sp, psi: Wavefunction, partner_states: list[Wavefunction] | None = None
                   ) -> Wavefunction:
    """Normalized B psi: maps an H2 eigenstate onto its H1 partner.

    Raises when psi is (numerically) the zero mode, which B annihilates.
    """
    mapped = apply_b(w_sp, psi)
    nrm = mapped.norm()
    if nrm < 1e-6 * psi.norm():
        raise ValueError("state is annihilated by B (zero mode has no partner)")
    return mapped.normalized()


def overlap_with_best(psi: Wavefunction, states: list[Wavefunction]) -> float:
    return max(abs(inner_product(psi, s)) for s in states)


# -- App. B box example (hbar^2/(2m) = 1 convention) ------------------------

def box_grids(n: int) -> np.ndarray:
    """Interior points i/n, i = 1..n-1, of the unit box; Dirichlet walls at
    0 and 1 keep the sin^-2 partner's singular endpoints off the grid."""
    return np.arange(1, n) / n


def box_potential(x: np.ndarray) -> np.ndarray:
    return np.full_like(x, -np.pi ** 2)


def box_partner_potential(x: np.ndarray) -> np.ndarray:
    return np.pi ** 2 * (2.0 / np.sin(np.pi * x) ** 2 - 1.0)


def box_spectrum(n: int, k: int, side: int = 1) -> tuple[np.ndarray, dict]:
    """Lowest k levels of the box (side=1) or its sin^-2 partner (side=2).

    Box levels are pi^2 (m^2 - 1), m = 1, 2, ...; the partner drops the
    zero-energy state.  Returns (energies, metadata).
    """
    x = box_grids(n)
    v = box_potential(x) if side == 1 else box_partner_potential(x)
    h = 1.0 / n
    diag = 2.0 / h ** 2 + v
    off = np.full(len(x) - 1, -1.0 / h ** 2)
    w = eigh_tridiagonal(diag, off, select="i", select_range=(0, k - 1))[0]
    return w, {"convention": "hbar^2/(2m) = 1", "n": n, "side": side}
