"""Morse-potential vibrational structure and Franck-Condon factors.

A three-electronic-level diatomic molecule (ground / intermediate /
excited), each level an anharmonic Morse well with closed-form bound
spectrum and Laguerre-polynomial eigenfunctions.  All quadrature and
wavefunction work runs in Hartree atomic units; energies cross the API
boundary in eV and lengths in Bohr radii.

The Morse well of depth D, range a, equilibrium x0 supports bound states
xi_beta(x) = N exp(-y/2) y^(j/2 - beta) L_beta^(j - 2 beta)(y) with
y(x) = (j+1) exp(-(x-x0)/a) and j = 2 a sqrt(2 mu D) - 1; for the
parameters used here j reaches ~280, so normalization constants and the
y^(j/2-beta) prefactor are assembled in log space.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import yaml

from .errors import ConfigError, DomainError, GridMismatchError, ResolutionError
from .specfun import laguerre_generalized, log_gamma_real
from .units import HARTREE_EV

__all__ = [
    "MorsePotentialParams",
    "MolecularSystem",
    "VibrationalWavefunction",
    "morse_frequency",
    "morse_anharmonicity",
    "eigenenergy",
    "bound_state_max",
    "eigenfunction",
    "franck_condon",
    "build_system",
    "pair_grid",
    "load_molecule_file",
    "na2_system",
    "NA2_PRESET",
]

# log-amplitude below which the wavefunction is treated as exactly zero;
# avoids running the Laguerre recurrence into overflow territory at the
# repulsive wall where exp(-y/2) has already killed the state
_DEAD_LOG = -600.0


@dataclass(frozen=True)
class MorsePotentialParams:
    """One Morse well: minimum energy, depth, range, equilibrium position."""

    epsilon: float  # potential minimum, eV
    depth: float  # well depth D, eV
    range: float  # range a, Bohr radii
    equilibrium: float  # x0, Bohr radii

    def __post_init__(self):
        if self.depth <= 0.0:
            raise ConfigError(f"Morse depth must be positive, got {self.depth}")
        if self.range <= 0.0:
            raise ConfigError(f"Morse range must be positive, got {self.range}")

    @property
    def depth_ha(self):
        return self.depth / HARTREE_EV

    def exponent_j(self, mu):
        """Morse index j = 2 a sqrt(2 mu D) - 1 (atomic units)."""
        return 2.0 * self.range * math.sqrt(2.0 * mu * self.depth_ha) - 1.0

    def potential(self, x):
        """V(x) in eV on a grid of Bohr positions."""
        u = 1.0 - np.exp(-(np.asarray(x) - self.equilibrium) / self.range)
        return self.depth * (u * u - 1.0) + self.epsilon


def morse_frequency(p: MorsePotentialParams, mu: float) -> float:
    """Harmonic frequency omega = sqrt(2 D / (a^2 mu)) in eV."""
    return math.sqrt(2.0 * p.depth_ha / (p.range**2 * mu)) * HARTREE_EV


def morse_anharmonicity(p: MorsePotentialParams, mu: float) -> float:
    """Anharmonicity chi = 1 / sqrt(8 a^2 D mu), dimensionless."""
    return 1.0 / math.sqrt(8.0 * p.range**2 * p.depth_ha * mu)


def bound_state_max(p: MorsePotentialParams, mu: float) -> int:
    """Largest beta with j/2 - beta strictly positive.

    States with j/2 - beta in (0, 0.5] sit at the dissociation edge; they
    are kept (the strict inequality is the only boundary used) but
    `eigenfunction` flags them as near-dissociation.
    """
    j = p.exponent_j(mu)
    if j <= 0.0:
        return 0
    half = 0.5 * j
    top = math.ceil(half) - 1
    if half == math.floor(half):  # j/2 integer: beta = j/2 is not bound
        top = int(half) - 1
    return max(int(top), 0)


def eigenenergy(p: MorsePotentialParams, mu: float, beta: int) -> float:
    """Bound-state energy epsilon + omega (beta+1/2) - omega chi (beta+1/2)^2, eV."""
    if beta < 0 or beta > bound_state_max(p, mu):
        raise DomainError(
            f"beta={beta} outside the bound Morse spectrum (max {bound_state_max(p, mu)})"
        )
    w = morse_frequency(p, mu)
    chi = morse_anharmonicity(p, mu)
    h = beta + 0.5
    return p.epsilon + w * h - w * chi * h * h


@dataclass
class VibrationalWavefunction:
    """A bound Morse eigenfunction sampled on a quadrature grid."""

    level: str  # electronic label, e.g. "g", "m", "e"
    index: int  # vibrational quantum number beta
    grid: np.ndarray  # positions, Bohr
    values: np.ndarray  # real amplitudes, Bohr^(-1/2)
    weights: np.ndarray  # quadrature weights belonging to the grid
    near_dissociation: bool = False


def pair_grid(p1, p2, points_per_panel=64, panels=40):
    """Composite Gauss-Legendre grid covering both wells.

    Window [x0 - 8a, x0 + 25a] per potential (asymmetric: the Morse well
    is soft on the outer side), union over the two potentials involved.
    Returns (positions, weights).
    """
    lo = min(p1.equilibrium - 8.0 * p1.range, p2.equilibrium - 8.0 * p2.range)
    hi = max(p1.equilibrium + 25.0 * p1.range, p2.equilibrium + 25.0 * p2.range)
    nodes, wts = np.polynomial.legendre.leggauss(points_per_panel)
    edges = np.linspace(lo, hi, panels + 1)
    xs = []
    ws = []
    for a, b in zip(edges[:-1], edges[1:]):
        xs.append(0.5 * (b - a) * nodes + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * wts)
    return np.concatenate(xs), np.concatenate(ws)


def eigenfunction(p, mu, beta, grid, weights=None) -> VibrationalWavefunction:
    """Sampled Morse eigenfunction, normalized on its quadrature grid.

    The analytic normalization is checked first (deviation beyond 1e-6
    raises ResolutionError), then the samples are renormalized exactly so
    downstream overlaps see unit norm.
    """
    top = bound_state_max(p, mu)
    if beta < 0 or beta > top:
        raise DomainError(f"beta={beta} outside bound spectrum (max {top})")
    if weights is None:
        raise GridMismatchError("eigenfunction needs the grid's quadrature weights")
    j = p.exponent_j(mu)
    x = np.asarray(grid, dtype=float)
    y = (j + 1.0) * np.exp(-(x - p.equilibrium) / p.range)
    # log N_{j,beta} = 0.5 [ log(beta!) + log(j - 2 beta) - log(a) - logGamma(j - beta + 1) ]
    log_norm = 0.5 * (
        log_gamma_real(beta + 1.0)
        + math.log(j - 2.0 * beta)
        - math.log(p.range)
        - log_gamma_real(j - beta + 1.0)
    )
    log_pref = log_norm - 0.5 * y + (0.5 * j - beta) * np.log(y)
    vals = np.zeros_like(x)
    alive = log_pref > _DEAD_LOG
    if np.any(alive):
        lag = laguerre_generalized(beta, j - 2.0 * beta, y[alive])
        vals[alive] = np.exp(log_pref[alive]) * lag
    norm2 = float(np.sum(weights * vals * vals))
    if abs(norm2 - 1.0) > 1e-6:
        raise ResolutionError(
            f"grid under-resolves beta={beta} (norm^2 deviates by {norm2 - 1.0:.2e})"
        )
    vals /= math.sqrt(norm2)
    return VibrationalWavefunction(
        level="",
        index=beta,
        grid=x,
        values=vals,
        weights=np.asarray(weights, dtype=float),
        near_dissociation=(0.5 * j - beta) <= 0.5,
    )


def franck_condon(wf1: VibrationalWavefunction, wf2: VibrationalWavefunction) -> float:
    """Franck-Condon factor |<xi_1 | xi_2>|^2 on the common grid."""
    if wf1.grid.shape != wf2.grid.shape or not np.allclose(
        wf1.grid, wf2.grid, rtol=0, atol=1e-12
    ):
        raise GridMismatchError(
            "wavefunctions sampled on different grids; evaluate both on a shared pair_grid"
        )
    overlap = float(np.sum(wf1.weights * wf1.values * wf2.values))
    return overlap * overlap


@dataclass
class MolecularSystem:
    """Three Morse levels with precomputed energies and FC amplitude matrices.

    fc_gm[nu] = sqrt(F^gm_{0 nu} / pi) couples the ground vibrational
    origin to intermediate level nu; fc_me[nu, alpha] = sqrt(F^me_{nu alpha} / pi)
    couples intermediate nu to excited alpha.  The raw squared-overlap
    matrices are kept alongside for diagnostics.
    """

    ground: MorsePotentialParams
    intermediate: MorsePotentialParams
    excited: MorsePotentialParams
    reduced_mass: float
    n_intermediate: int
    n_excited: int
    energies_m: np.ndarray  # eV, shape (n_intermediate,)
    energies_e: np.ndarray  # eV, shape (n_excited,)
    fc_gm: np.ndarray  # sqrt(F/pi) convention, shape (n_intermediate,)
    fc_me: np.ndarray  # shape (n_intermediate, n_excited)
    raw_fc_gm: np.ndarray = field(repr=False, default=None)
    raw_fc_me: np.ndarray = field(repr=False, default=None)

    def excited_energy(self, alpha):
        return float(self.energies_e[alpha])


def build_system(
    ground,
    intermediate,
    excited,
    mu,
    n_m=30,
    n_e=46,
    points_per_panel=64,
    panels=40,
) -> MolecularSystem:
    """Assemble a MolecularSystem from Table-style Morse parameters.

    Only the ground vibrational origin is populated, so the g-m block is
    the single row F^gm_{0 nu}.  The 1/pi convention and square root are
    applied here once; everything downstream consumes fc_gm / fc_me.
    """
    for count, p, name in ((n_m, intermediate, "intermediate"), (n_e, excited, "excited")):
        top = bound_state_max(p, mu)
        if count - 1 > top:
            raise ConfigError(
                f"{name} level count {count} exceeds bound spectrum ({top + 1} states)"
            )
    grid_gm, w_gm = pair_grid(ground, intermediate, points_per_panel, panels)
    grid_me, w_me = pair_grid(intermediate, excited, points_per_panel, panels)

    xi_g0 = eigenfunction(ground, mu, 0, grid_gm, w_gm)
    xi_m_gm = [eigenfunction(intermediate, mu, v, grid_gm, w_gm) for v in range(n_m)]
    xi_m_me = [eigenfunction(intermediate, mu, v, grid_me, w_me) for v in range(n_m)]
    xi_e = [eigenfunction(excited, mu, a, grid_me, w_me) for a in range(n_e)]
    flagged = [wf.index for wf in xi_m_me + xi_e if wf.near_dissociation]
    if flagged:
        warnings.warn(
            f"near-dissociation vibrational states requested (beta={sorted(set(flagged))}); "
            "their FC factors carry larger quadrature error"
        )

    raw_gm = np.array([franck_condon(xi_g0, wf) for wf in xi_m_gm])
    raw_me = np.empty((n_m, n_e))
    for v, wfm in enumerate(xi_m_me):
        for a, wfe in enumerate(xi_e):
            raw_me[v, a] = franck_condon(wfm, wfe)

    return MolecularSystem(
        ground=ground,
        intermediate=intermediate,
        excited=excited,
        reduced_mass=mu,
        n_intermediate=n_m,
        n_excited=n_e,
        energies_m=np.array([eigenenergy(intermediate, mu, v) for v in range(n_m)]),
        energies_e=np.array([eigenenergy(excited, mu, a) for a in range(n_e)]),
        fc_gm=np.sqrt(raw_gm / math.pi),
        fc_me=np.sqrt(raw_me / math.pi),
        raw_fc_gm=raw_gm,
        raw_fc_me=raw_me,
    )


# ---------------------------------------------------------------------------
# molecule description files
# ---------------------------------------------------------------------------

# Na2 Morse constants (ground 1^1Sigma_g+, intermediate 1^1Sigma_u+,
# excited 2^1Pi_g) and reduced mass in electron masses.
NA2_PRESET = {
    "ground": {
        "epsilon_eV": 0.0,
        "depth_eV": 0.7466,
        "range_bohr": 2.2951,
        "equilibrium_bohr": 5.82,
    },
    "intermediate": {
        "epsilon_eV": 1.8201,
        "depth_eV": 1.0303,
        "range_bohr": 3.6591,
        "equilibrium_bohr": 6.87,
    },
    "excited": {
        "epsilon_eV": 3.7918,
        "depth_eV": 0.5718,
        "range_bohr": 3.1226,
        "equilibrium_bohr": 7.08,
    },
    "reduced_mass_me": 19800.0,
    "n_intermediate": 30,
    "n_excited": 46,
}

_BLOCK_KEYS = ("epsilon_eV", "depth_eV", "range_bohr", "equilibrium_bohr")


def _params_from_block(block, name):
    missing = [k for k in _BLOCK_KEYS if k not in block]
    if missing:
        raise ConfigError(f"molecule block {name!r} missing keys {missing}")
    return MorsePotentialParams(
        epsilon=float(block["epsilon_eV"]),
        depth=float(block["depth_eV"]),
        range=float(block["range_bohr"]),
        equilibrium=float(block["equilibrium_bohr"]),
    )


def parse_molecule_mapping(doc):
    """Build a MolecularSystem from a parsed molecule description mapping."""
    for key in ("ground", "intermediate", "excited", "reduced_mass_me"):
        if key not in doc:
            raise ConfigError(f"molecule description missing key {key!r}")
    return build_system(
        _params_from_block(doc["ground"], "ground"),
        _params_from_block(doc["intermediate"], "intermediate"),
        _params_from_block(doc["excited"], "excited"),
        mu=float(doc["reduced_mass_me"]),
        n_m=int(doc.get("n_intermediate", 30)),
        n_e=int(doc.get("n_excited", 46)),
    )


def load_molecule_file(path):
    """Load a molecule description (YAML key-value blocks) into a system."""
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise ConfigError(f"molecule file {path} does not contain a mapping")
    return parse_molecule_mapping(doc)


def na2_system(n_m=30, n_e=46) -> MolecularSystem:
    """The bundled Na2 preset."""
    doc = dict(NA2_PRESET)
    doc["n_intermediate"] = n_m
    doc["n_excited"] = n_e
    return parse_molecule_mapping(doc)
