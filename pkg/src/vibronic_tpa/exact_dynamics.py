"""Exact benchmark: direct integration of the discretized pair-molecule dynamics.

The photon field is discretized onto M modes per photon (spacing
delta_k), giving three coupled amplitude blocks

    psi2p[k, k']   two photons, molecule in g        (M x M, symmetric)
    psi1pm[k, nu]  one photon, molecule in m_nu      (M x N_m)
    psie[alpha]    no photons, molecule in e_alpha   (N_e,)

evolved by dPsi/dt = -i H Psi with the same couplings as the closed-form
engine, so the two routes are directly comparable.  The total norm
sum dk^2 |psi2p|^2 + sum dk |psi1pm|^2 + sum |psie|^2 is conserved.

Integration runs in a rotating frame: the diagonal phases e^{-i(k+k')t},
e^{-i(k+omega_m)t}, e^{-i omega_e t} are factored out analytically,
leaving couplings that oscillate at detuning scale only.  The factored
phases are exactly equivalent to the lab frame for this linear system
(validated against a closed-form three-level oracle in the tests), and
they lift the step-size limit from optical frequencies to bandwidths.
The stepper itself is classical fixed-step RK4, so wall-clock and memory
scale cleanly with M for the cost comparison.
"""

import math
import time
import tracemalloc
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, CoverageError, StepSizeError
from .molecule import MolecularSystem
from .photons import PhotonFieldConfig, jsa_value
from .units import ghz_to_ev

__all__ = [
    "DiscretizationConfig",
    "CouplingMatrices",
    "ExactState",
    "Trajectory",
    "mode_count_for",
    "discretization_for",
    "init_state",
    "rhs",
    "integrate",
    "suggest_dt",
    "total_norm",
    "energy_expectation",
    "benchmark",
    "BenchmarkRecord",
]

# modes per photon published for each correlation degree (full scale)
_FULL_SCALE_MODES = {
    "uncorrelated": 2001,
    1.0: 2001,
    0.5: 3001,
    0.25: 5001,
    0.1: 6001,
    0.05: 7001,
}
FULL_SCALE_DELTA_K_EV = ghz_to_ev(100.0)


def mode_count_for(sigma_s_ratio, reduction=1):
    """Modes per photon for a correlation degree, optionally desk-scaled.

    A reduction factor divides the mode count and widens delta_k by the
    same factor, preserving the spectral span.
    """
    if sigma_s_ratio not in _FULL_SCALE_MODES:
        raise ConfigError(
            f"no mode budget for sigma_s ratio {sigma_s_ratio!r}; "
            f"known: {sorted(map(str, _FULL_SCALE_MODES))}"
        )
    if reduction < 1 or int(reduction) != reduction:
        raise ConfigError("reduction must be a positive integer")
    full = _FULL_SCALE_MODES[sigma_s_ratio]
    m = full // int(reduction)
    if m % 2 == 0:
        m += 1
    return m


@dataclass(frozen=True)
class DiscretizationConfig:
    """Photon-mode grid and integrator step for one exact run."""

    modes: int  # M per photon, odd
    delta_k: float  # eV
    k_center: float  # eV
    dt: float = None  # 1/eV; None = suggest from the phase rates

    def __post_init__(self):
        if self.modes % 2 == 0 or self.modes < 1:
            raise ConfigError("mode count must be odd and >= 1")
        if self.delta_k <= 0.0:
            raise ConfigError("delta_k must be positive")

    @property
    def k_axis(self):
        half = (self.modes - 1) // 2
        return self.k_center + self.delta_k * np.arange(-half, half + 1)


def discretization_for(cfg: PhotonFieldConfig, sigma_s_ratio, reduction=1, span=None):
    """Mode grid matching the published per-correlation budgets.

    With a reduction factor the count shrinks and delta_k grows, keeping
    the span; an explicit span (in sigma) instead fixes the window and
    spends the modes on resolution.
    """
    m = mode_count_for(sigma_s_ratio, reduction)
    if span is None:
        dk = FULL_SCALE_DELTA_K_EV * reduction
    else:
        dk = 2.0 * span * cfg.sigma / (m - 1)
    return DiscretizationConfig(modes=m, delta_k=dk, k_center=cfg.k0)


@dataclass
class ExactState:
    """Rotating-frame amplitudes of the three blocks at one instant."""

    two_photon: np.ndarray  # (M, M) complex, symmetric
    one_photon_m: np.ndarray  # (M, N_m) complex
    excited: np.ndarray  # (N_e,) complex
    time: float


@dataclass
class CouplingMatrices:
    """Field-molecule couplings entering the discretized equations."""

    gamma_gm: np.ndarray  # (N_m,)   sqrt(gamma) F_nu / sqrt(2) style weights
    gamma_me: np.ndarray  # (N_m, N_e)

    @classmethod
    def build(cls, sys: MolecularSystem, gamma: float):
        gs = math.sqrt(gamma)
        return cls(gamma_gm=gs * sys.fc_gm, gamma_me=gs * sys.fc_me)


def init_state(cfg: PhotonFieldConfig, disc: DiscretizationConfig) -> ExactState:
    """Gridded JSA in the two-photon block, everything else empty.

    In the rotating frame at t = r0 the propagation phase e^{-i(k+k')r0}
    cancels exactly, so the stored initial block is the bare envelope.
    The gridded norm must capture >= 99% of the continuum JSA; it is then
    renormalized to exactly one.
    """
    k = disc.k_axis
    psi = jsa_value(k[:, None], k[None, :], cfg) * np.exp(
        1j * (k[:, None] + k[None, :]) * cfg.r0
    )
    norm = float(np.sum(np.abs(psi) ** 2)) * disc.delta_k**2
    if norm < 0.99:
        raise CoverageError(
            f"mode grid captures {norm:.4f} of the pair norm; widen span/modes"
        )
    psi = (psi / math.sqrt(norm)).astype(complex)
    m = disc.modes
    return ExactState(
        two_photon=psi,
        one_photon_m=np.zeros((m, 0), dtype=complex),  # sized by rhs context
        excited=np.zeros(0, dtype=complex),
        time=cfg.r0,
    )


def _sized(state: ExactState, sys: MolecularSystem):
    m = state.two_photon.shape[0]
    if state.one_photon_m.shape != (m, sys.n_intermediate):
        state.one_photon_m = np.zeros((m, sys.n_intermediate), dtype=complex)
    if state.excited.shape != (sys.n_excited,):
        state.excited = np.zeros(sys.n_excited, dtype=complex)
    return state


def rhs(state: ExactState, sys, coup: CouplingMatrices, disc, t=None):
    """Rotating-frame derivative blocks at time t (defaults to state.time).

    All optical-frequency diagonals are already factored out; what is
    left are the coupling terms dressed with detuning-scale phases, built
    from separable phase vectors so each block update is one rank-style
    dense product, plus one matrix-vector contraction over k'.
    """
    if t is None:
        t = state.time
    state = _sized(state, sys)
    k = disc.k_axis
    dk = disc.delta_k
    u = np.exp(1j * k * t)  # e^{+i k t}
    wm = np.exp(-1j * sys.energies_m * t)  # e^{-i omega_m t}
    we = np.exp(-1j * sys.energies_e * t)
    psi2p = state.two_photon
    psi1pm = state.one_photon_m
    psie = state.excited

    # d psi2p: -i gamma_s/sqrt(2) sum_nu F_nu [psi1pm(k) e^{i(k'-w_m)t} + (k <-> k')]
    c = psi1pm @ (coup.gamma_gm * wm)  # (M,)
    d2p = (-1j / math.sqrt(2.0)) * (c[:, None] * u[None, :] + u[:, None] * c[None, :])

    # d psi1pm: -i sqrt(2) gamma_s F_nu e^{i w_m t} sum_k' dk e^{-i k' t} psi2p
    #           -i gamma_s sum_alpha F_na e^{i(k + w_m - w_e)t} psie
    row = psi2p @ np.conj(u) * dk  # (M,)
    d1pm = (-1j * math.sqrt(2.0)) * row[:, None] * (coup.gamma_gm * np.conj(wm))[None, :]
    d1pm += -1j * u[:, None] * (np.conj(wm) * (coup.gamma_me @ (we * psie)))[None, :]

    # d psie: -i gamma_s sum_nu F_na e^{-i(k + w_m - w_e)t} sum_k dk psi1pm
    col = (np.conj(u) @ psi1pm) * dk  # (N_m,)
    de = -1j * np.conj(we) * (coup.gamma_me.T @ (wm * col))

    return d2p, d1pm, de


def total_norm(state: ExactState, disc) -> float:
    dk = disc.delta_k
    return float(
        np.sum(np.abs(state.two_photon) ** 2) * dk * dk
        + np.sum(np.abs(state.one_photon_m) ** 2) * dk
        + np.sum(np.abs(state.excited) ** 2)
    )


def energy_expectation(state: ExactState, sys, coup: CouplingMatrices, disc) -> complex:
    """<H> in the lab frame; real and time-invariant for a sound integrator."""
    state = _sized(state, sys)
    k = disc.k_axis
    dk = disc.delta_k
    t = state.time
    psi2p, psi1pm, psie = state.two_photon, state.one_photon_m, state.excited
    diag = (
        np.sum((k[:, None] + k[None, :]) * np.abs(psi2p) ** 2) * dk * dk
        + np.sum((k[:, None] + sys.energies_m[None, :]) * np.abs(psi1pm) ** 2) * dk
        + np.sum(sys.energies_e * np.abs(psie) ** 2)
    )
    d2p, d1pm, de = rhs(state, sys, coup, disc, t)
    # <psi| H_int |psi> = <psi| i * d(coupling part)/dt |psi>
    cross = (
        np.sum(np.conj(psi2p) * (1j * d2p)) * dk * dk
        + np.sum(np.conj(psi1pm) * (1j * d1pm)) * dk
        + np.sum(np.conj(psie) * (1j * de))
    )
    return diag + cross


def suggest_dt(sys, disc, cfg: PhotonFieldConfig, phase_budget=0.25) -> float:
    """Step so the fastest rotating-frame coupling phase advances <= budget."""
    k = disc.k_axis
    r1 = float(np.max(np.abs(k[:, None] - sys.energies_m[None, :])))
    r2 = float(
        np.max(
            np.abs(
                k[:, None, None]
                + sys.energies_m[None, :, None]
                - sys.energies_e[None, None, :]
            )
        )
    )
    return phase_budget / max(r1, r2, 1e-12)


@dataclass
class Trajectory:
    """Sampled populations along one exact integration."""

    times_sigma: np.ndarray
    excited: np.ndarray  # (n_samples, N_e)
    intermediate: np.ndarray  # (n_samples, N_m)
    norm_drift: float
    final_state: ExactState = field(repr=False, default=None)

    def steady_excited(self):
        n_tail = max(2, len(self.times_sigma) // 10)
        return self.excited[-n_tail:].mean(axis=0)

    def steady_intermediate(self):
        n_tail = max(2, len(self.times_sigma) // 10)
        return self.intermediate[-n_tail:].mean(axis=0)


def integrate(
    state: ExactState,
    sys,
    coup: CouplingMatrices,
    disc,
    cfg: PhotonFieldConfig,
    t_end,
    dt=None,
    n_samples=160,
    norm_tol=1e-4,
) -> Trajectory:
    """Fixed-step RK4 from state.time to t_end with population sampling.

    Raises StepSizeError (with a suggested dt) if the conserved norm
    drifts by more than norm_tol over the run.
    """
    state = _sized(state, sys)
    if dt is None:
        dt = suggest_dt(sys, disc, cfg)
    t0 = state.time
    if t_end <= t0:
        raise ConfigError("t_end must exceed the state time")
    n_steps = int(math.ceil((t_end - t0) / dt))
    dt = (t_end - t0) / n_steps
    sample_every = max(1, n_steps // max(1, n_samples - 1))
    dk = disc.delta_k

    y2, y1, ye = state.two_photon, state.one_photon_m, state.excited
    norm0 = total_norm(state, disc)
    times, pops_e, pops_m = [], [], []

    def record(t):
        times.append(t * cfg.sigma)
        pops_e.append(np.abs(ye) ** 2)
        pops_m.append(np.sum(np.abs(y1) ** 2, axis=0) * dk)

    record(t0)
    t = t0
    snap = ExactState(y2, y1, ye, t)
    for step in range(n_steps):
        k1 = rhs(ExactState(y2, y1, ye, t), sys, coup, disc, t)
        k2 = rhs(
            ExactState(y2 + 0.5 * dt * k1[0], y1 + 0.5 * dt * k1[1], ye + 0.5 * dt * k1[2], t),
            sys,
            coup,
            disc,
            t + 0.5 * dt,
        )
        k3 = rhs(
            ExactState(y2 + 0.5 * dt * k2[0], y1 + 0.5 * dt * k2[1], ye + 0.5 * dt * k2[2], t),
            sys,
            coup,
            disc,
            t + 0.5 * dt,
        )
        k4 = rhs(
            ExactState(y2 + dt * k3[0], y1 + dt * k3[1], ye + dt * k3[2], t),
            sys,
            coup,
            disc,
            t + dt,
        )
        y2 = y2 + (dt / 6.0) * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0])
        y1 = y1 + (dt / 6.0) * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1])
        ye = ye + (dt / 6.0) * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2])
        t = t0 + (step + 1) * dt
        if (step + 1) % sample_every == 0 or step == n_steps - 1:
            record(t)

    snap = ExactState(y2, y1, ye, t)
    drift = abs(total_norm(snap, disc) - norm0)
    if drift > norm_tol:
        raise StepSizeError(
            f"norm drifted by {drift:.3e} (> {norm_tol:g}); reduce dt",
            suggested_dt=0.5 * dt,
        )
    return Trajectory(
        times_sigma=np.array(times),
        excited=np.array(pops_e),
        intermediate=np.array(pops_m),
        norm_drift=drift,
        final_state=snap,
    )


# ---------------------------------------------------------------------------
# cost measurement
# ---------------------------------------------------------------------------

@dataclass
class BenchmarkRecord:
    engine: str
    modes: int
    sigma_s_ratio: str
    wall_seconds: float
    peak_mem_bytes: int


def benchmark(run_exact, run_analytic, modes, sigma_s_ratio) -> list:
    """Wall time and Python-heap peak for one physics spec on both engines.

    The two callables must encode the identical physics; this function
    only wraps them with timing and allocation tracking.
    """
    out = []
    for engine, fn in (("exact", run_exact), ("analytic", run_analytic)):
        tracemalloc.start()
        start = time.perf_counter()
        fn()
        wall = time.perf_counter() - start
        _, peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()
        out.append(
            BenchmarkRecord(
                engine=engine,
                modes=modes,
                sigma_s_ratio=str(sigma_s_ratio),
                wall_seconds=wall,
                peak_mem_bytes=int(peak),
            )
        )
    return out
