"""Split-operator time propagation under schedules of ramped barriers and
shaken traps, plus the intertwining-relation check.

Strang splitting, exp(-i V dt/2) exp(-i T dt) exp(-i V dt/2), with the
potential sampled at step midpoints.  Each factor is unit modulus so the
norm is conserved to rounding; the method is second order in dt including
for moving traps.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Grid1D, Wavefunction
from .susy import Superpotential, apply_b_dagger, partner_potentials

DEFAULT_DT = 2 * np.pi / 1024
RAMP_DEFAULT = 3 * 2 * np.pi          # linear A ramp, three trap periods
NORM_DRIFT_FLAG = 1e-6

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class PulseShake:
    """Trap-center drive x_c(t) = delta_x cos(Omega t + phi) tau(t) with a
    Gaussian envelope tau = exp(-(t-t0)^2 / (2 sigma_t^2)), t local to the
    segment."""

    delta_x: float
    sigma_t: float
    phase: float
    omega: float = 1.0
    t0: float | None = None            # defaults to 5 sigma_t

    @property
    def center(self) -> float:
        return 5 * self.sigma_t if self.t0 is None else self.t0

    @property
    def duration(self) -> float:
        return 10 * self.sigma_t

    def offset(self, t: float) -> float:
        env = np.exp(-((t - self.center) ** 2) / (2 * self.sigma_t ** 2))
        return self.delta_x * np.cos(self.omega * t + self.phase) * env


@dataclass(frozen=True)
class Segment:
    """One piece of a Schedule: barrier amplitude interpolates linearly from
    a_start to a_end; an optional shake moves the trap center."""

    duration: float
    a_start: float = 0.0
    a_end: float = 0.0
    shake: PulseShake | None = None

    def amplitude(self, t_local: float) -> float:
        if self.duration <= 0:
            return self.a_end
        f = t_local / self.duration
        return self.a_start + (self.a_end - self.a_start) * f


@dataclass(frozen=True)
class Schedule:
    """Time-dependent potential V_eta(x - x_c(t); A(t)) assembled from
    segments.  A is zero outside the evolution window and continuous across
    segment boundaries; shaking segments must keep A = 0."""

    segments: tuple
    eta: float
    amplitude: float                  # peak barrier amplitude A

    def __post_init__(self):
        prev_end = 0.0
        for seg in self.segments:
            if abs(seg.a_start - prev_end) > 1e-12:
                raise ValueError("barrier amplitude must be continuous across segments")
            if seg.shake is not None and (seg.a_start != 0.0 or seg.a_end != 0.0):
                raise ValueError("barriers stay off while the trap is shaken")
            prev_end = seg.a_end
        if prev_end != 0.0:
            raise ValueError("barrier amplitude must return to zero at the end")

    @property
    def duration(self) -> float:
        return sum(seg.duration for seg in self.segments)


def barrier_schedule(eta: float, amplitude: float, t_hold: float,
                     ramp_up: float = RAMP_DEFAULT, ramp_down: float = RAMP_DEFAULT
                     ) -> Schedule:
    """Fig.-2 style intrinsic evolution: ramp A up, hold for t_hold, ramp down."""
    segs = (
        Segment(ramp_up, 0.0, amplitude),
        Segment(t_hold, amplitude, amplitude),
        Segment(ramp_down, amplitude, 0.0),
    )
    return Schedule(segs, eta, amplitude)


@dataclass(frozen=True)
class PropagationReport:
    final: Wavefunction
    norm_drift: float
    energy_trace: np.ndarray           # (t, <H>) samples
    flags: tuple = ()
    snapshots: list = field(default_factory=list)   # (t, |psi|^2) pairs


def _eta_potential_shifted(x, eta, a, x_c):
    u = x - x_c
    return 0.5 * u ** 2 + 0.5 * a ** 2 * np.exp(-2 * u ** 2) \
        + 2.0 * eta * a * u * np.exp(-u ** 2)


def split_step(psi: Wavefunction, v_of_t, dt: float, steps: int,
               t_start: float = 0.0, energy_every: int = 0,
               snapshot_every: int = 0) -> PropagationReport:
    """Propagate ``steps`` Strang steps under V(t).  ``v_of_t`` is either a
    static potential array or a callable t -> array sampled at midpoints."""
    if dt > TWO_PI / 64:
        raise ValueError("dt must not exceed one sixty-fourth of a trap period")
    grid = psi.grid
    k2 = grid.k ** 2
    kin = np.exp(-0.5j * dt * k2)
    static = not callable(v_of_t)
    if static:
        half = np.exp(-0.5j * dt * np.asarray(v_of_t))
    amp = psi.amp.copy()
    n0 = np.sqrt(np.sum(np.abs(amp) ** 2))
    energies = []
    snaps = []
    t = t_start
    for s in range(steps):
        if not static:
            half = np.exp(-0.5j * dt * v_of_t(t + dt / 2))
        amp = half * np.fft.ifft(kin * np.fft.fft(half * amp))
        t += dt
        if energy_every and (s + 1) % energy_every == 0:
            v_now = v_of_t(t) if not static else v_of_t
            energies.append((t, _energy(amp, grid, v_now)))
        if snapshot_every and (s + 1) % snapshot_every == 0:
            snaps.append((t, np.abs(amp) ** 2))
    n1 = np.sqrt(np.sum(np.abs(amp) ** 2))
    drift = abs(n1 / n0 - 1.0) if n0 > 0 else 0.0
    flags = psi.flags
    if drift > NORM_DRIFT_FLAG:
        flags = flags + ("norm-drift",)
    return PropagationReport(Wavefunction(grid, amp, flags), drift,
                             np.array(energies), flags, snaps)


def _energy(amp, grid, v):
    ft = np.fft.fft(amp)
    kin = np.sum(0.5 * grid.k ** 2 * np.abs(ft) ** 2) * grid.dx / len(amp)
    pot = np.sum(v * np.abs(amp) ** 2) * grid.dx
    nrm = np.sum(np.abs(amp) ** 2) * grid.dx
    return float((kin + pot) / nrm)


def evolve_schedule(psi: Wavefunction, schedule: Schedule, dt: float = DEFAULT_DT,
                    snapshot_every: int = 0) -> PropagationReport:
    """Run a full Schedule; snapshots (if requested) are |psi(x, t)|^2 rows
    for density-carpet plots."""
    grid = psi.grid
    x = grid.x
    report = None
    amp_state = psi
    t_global = 0.0
    drift_total = 0.0
    snaps = []
    flags = psi.flags
    for seg in schedule.segments:
        if seg.duration <= 0:
            continue
        steps = max(1, int(round(seg.duration / dt)))
        dt_seg = seg.duration / steps

        def v_of_t(t_abs, seg=seg, t_off=t_global):
            tl = t_abs - t_off
            a = seg.amplitude(tl)
            xc = seg.shake.offset(tl) if seg.shake is not None else 0.0
            return _eta_potential_shifted(x, schedule.eta, a, xc)

        report = split_step(amp_state, v_of_t, dt_seg, steps, t_start=t_global,
                            snapshot_every=snapshot_every)
        amp_state = report.final
        drift_total += report.norm_drift
        snaps.extend(report.snapshots)
        t_global += seg.duration
    if drift_total > NORM_DRIFT_FLAG:
        flags = flags + ("norm-drift",)
    merged = list(amp_state.flags)
    merged.extend(f for f in flags if f not in merged)
    final = Wavefunction(grid, amp_state.amp, tuple(merged))
    return PropagationReport(final, drift_total, np.array([]), final.flags, snaps)


def intertwining_residual(w_sp: Superpotential, psi: Wavefunction, t_final: float,
                          dt: float = TWO_PI / 4096, v2_override: np.ndarray | None = None
                          ) -> float:
    """|| B^dag U1(t) psi - U2(t) B^dag psi || / || B^dag psi ||.

    Both arms use the same static potential pair derived from ``w_sp``;
    ``v2_override`` substitutes the second arm's potential for negative
    controls (e.g. the eta = 2 member of the barrier family).
    """
    pair = partner_potentials(w_sp, psi.grid)
    steps = max(1, int(round(t_final / dt)))
    left = apply_b_dagger(w_sp, split_step(psi, pair.v1, t_final / steps, steps).final)
    bpsi = apply_b_dagger(w_sp, psi)
    v2 = pair.v2 if v2_override is None else v2_override
    right = split_step(bpsi, v2, t_final / steps, steps).final
    diff = left.amp - right.amp
    return float(np.sqrt(np.sum(np.abs(diff) ** 2)) / np.sqrt(np.sum(np.abs(bpsi.amp) ** 2)))
