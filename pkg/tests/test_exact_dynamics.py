"""Exact-solver tests: unitarity, the closed-form three-level oracle,
discretization plumbing, and a desk-scale cross-check against the
closed-form engine.
"""

import math

import numpy as np
import pytest

from vibronic_tpa import exact_dynamics as ex
from vibronic_tpa import molecule as mol
from vibronic_tpa import photons as ph
from vibronic_tpa import pt_engine as pt
from vibronic_tpa.errors import ConfigError, CoverageError, StepSizeError
from vibronic_tpa.units import thz_to_ev

SIGMA = thz_to_ev(10.0)
MU = 19800.0


@pytest.fixture(scope="module")
def na2():
    return mol.na2_system()


@pytest.fixture(scope="module")
def ip():
    return pt.InteractionParams()


def toy_system():
    """One intermediate and one excited level with synthetic energies."""
    sys_ = mol.na2_system(n_m=1, n_e=1)
    sys_.energies_m = np.array([2.0])
    sys_.energies_e = np.array([4.0])
    sys_.fc_gm = np.array([0.21])
    sys_.fc_me = np.array([[0.17]])
    return sys_


def toy_state(dk):
    psi = np.array([[1.0 / dk]], dtype=complex)  # unit norm: dk^2 |psi|^2 = 1
    return ex.ExactState(
        two_photon=psi,
        one_photon_m=np.zeros((1, 1), dtype=complex),
        excited=np.zeros(1, dtype=complex),
        time=0.0,
    )


class TestModeCounts:
    def test_published_table(self):
        assert ex.mode_count_for("uncorrelated") == 2001
        assert ex.mode_count_for(1.0) == 2001
        assert ex.mode_count_for(0.5) == 3001
        assert ex.mode_count_for(0.25) == 5001
        assert ex.mode_count_for(0.1) == 6001
        assert ex.mode_count_for(0.05) == 7001

    def test_reduction_preserves_span(self, na2):
        cfg = ph.PhotonFieldConfig(k0=2.0, sigma=SIGMA, kind="uncorrelated")
        full = ex.discretization_for(cfg, "uncorrelated", reduction=1)
        desk = ex.discretization_for(cfg, "uncorrelated", reduction=5)
        assert desk.modes == 401
        assert desk.delta_k == pytest.approx(5 * full.delta_k)
        span_full = full.delta_k * (full.modes - 1)
        span_desk = desk.delta_k * (desk.modes - 1)
        assert span_desk == pytest.approx(span_full, rel=2e-3)

    def test_unknown_ratio(self):
        with pytest.raises(ConfigError):
            ex.mode_count_for(0.3)

    def test_bad_discretization(self):
        with pytest.raises(ConfigError):
            ex.DiscretizationConfig(modes=100, delta_k=1e-3, k_center=2.0)


class TestInitState:
    def test_blocks_and_norm(self, na2):
        cfg = ph.PhotonFieldConfig(k0=2.0, sigma=SIGMA, sigma_s=0.25 * SIGMA)
        disc = ex.discretization_for(cfg, 0.25, reduction=5, span=8.0)
        st = ex.init_state(cfg, disc)
        assert st.excited.size == 0 or np.all(st.excited == 0.0)
        assert np.all(st.one_photon_m == 0.0)
        assert ex.total_norm(st, disc) == pytest.approx(1.0, abs=1e-10)
        assert np.allclose(st.two_photon, st.two_photon.T, rtol=0, atol=0)

    def test_coverage_guard(self, na2):
        cfg = ph.PhotonFieldConfig(k0=2.0, sigma=SIGMA, sigma_s=0.25 * SIGMA)
        disc = ex.DiscretizationConfig(modes=101, delta_k=0.02 * SIGMA, k_center=2.0)
        with pytest.raises(CoverageError):
            ex.init_state(cfg, disc)


class TestRhs:
    def test_zero_state_zero_derivative(self, na2):
        disc = ex.DiscretizationConfig(modes=11, delta_k=1e-3, k_center=2.0)
        st = ex.ExactState(
            two_photon=np.zeros((11, 11), dtype=complex),
            one_photon_m=np.zeros((11, na2.n_intermediate), dtype=complex),
            excited=np.zeros(na2.n_excited, dtype=complex),
            time=0.3,
        )
        coup = ex.CouplingMatrices.build(na2, 1e-6)
        for block in ex.rhs(st, na2, coup, disc):
            assert np.all(block == 0.0)

    def test_zero_couplings_freeze_moduli(self):
        sys_ = toy_system()
        coup = ex.CouplingMatrices(
            gamma_gm=np.zeros(1), gamma_me=np.zeros((1, 1))
        )
        disc = ex.DiscretizationConfig(modes=1, delta_k=0.01, k_center=2.0)
        st = toy_state(0.01)
        st.one_photon_m[0, 0] = 0.3 + 0.1j
        st.excited[0] = 0.2j
        cfg = ph.PhotonFieldConfig(k0=2.0, sigma=SIGMA, kind="uncorrelated")
        traj = ex.integrate(st, sys_, coup, disc, cfg, t_end=50.0, dt=0.05)
        # rotating-frame amplitudes are constant without couplings
        assert traj.excited[-1, 0] == pytest.approx(abs(0.2j) ** 2, rel=1e-12)
        assert traj.intermediate[-1, 0] == pytest.approx(
            0.01 * abs(0.3 + 0.1j) ** 2, rel=1e-12
        )

    def test_three_level_oracle(self):
        # single resonant mode: the weighted blocks form a real symmetric
        # 3x3 Hamiltonian solved exactly by the matrix exponential
        import scipy.linalg as sla

        sys_ = toy_system()
        gamma = 1e-4
        coup = ex.CouplingMatrices.build(sys_, gamma)
        dk = 0.01
        disc = ex.DiscretizationConfig(modes=1, delta_k=dk, k_center=2.0)
        cfg = ph.PhotonFieldConfig(k0=2.0, sigma=SIGMA, kind="uncorrelated")
        c1 = math.sqrt(2.0) * coup.gamma_gm[0] * math.sqrt(dk)
        c2 = coup.gamma_me[0, 0] * math.sqrt(dk)
        h3 = np.array([[0.0, c1, 0.0], [c1, 0.0, c2], [0.0, c2, 0.0]])
        period = 2.0 * math.pi / math.sqrt(c1**2 + c2**2)
        st = toy_state(dk)
        traj = ex.integrate(
            st, sys_, coup, disc, cfg, t_end=1.5 * period, dt=period / 4000.0
        )
        y0 = np.array([1.0, 0.0, 0.0])
        for i, t_sig in enumerate(traj.times_sigma):
            t = t_sig / cfg.sigma
            ye = (sla.expm(-1j * h3 * t) @ y0)[2]
            assert traj.excited[i, 0] == pytest.approx(abs(ye) ** 2, abs=1e-8)

    def test_energy_expectation_real_and_conserved(self, na2, ip):
        cfg = ph.PhotonFieldConfig(k0=0.5 * na2.energies_e[18], sigma=SIGMA, sigma_s=0.5 * SIGMA)
        disc = ex.DiscretizationConfig(modes=101, delta_k=0.16 * SIGMA, k_center=cfg.k0)
        coup = ex.CouplingMatrices.build(na2, ip.gamma)
        st = ex.init_state(cfg, disc)
        e0 = ex.energy_expectation(st, na2, coup, disc)
        assert abs(e0.imag) < 1e-10 * abs(e0.real)
        traj = ex.integrate(st, na2, coup, disc, cfg, t_end=cfg.r0 + 12.0 / SIGMA)
        e1 = ex.energy_expectation(traj.final_state, na2, coup, disc)
        assert abs(e1 - e0) < 1e-6 * abs(e0)


class TestIntegration:
    def test_norm_conserved(self, na2, ip):
        cfg = ph.PhotonFieldConfig(k0=0.5 * na2.energies_e[18], sigma=SIGMA, sigma_s=0.25 * SIGMA)
        disc = ex.DiscretizationConfig(modes=151, delta_k=0.11 * SIGMA, k_center=cfg.k0)
        coup = ex.CouplingMatrices.build(na2, ip.gamma)
        st = ex.init_state(cfg, disc)
        traj = ex.integrate(st, na2, coup, disc, cfg, t_end=cfg.r0 + 14.0 / SIGMA)
        assert traj.norm_drift < 1e-6

    def test_step_size_error_carries_suggestion(self):
        # strong-coupling toy: RK4 with a step far beyond the Rabi period
        # visibly violates unitarity and must be reported
        sys_ = toy_system()
        coup = ex.CouplingMatrices.build(sys_, 1e-2)
        dk = 0.01
        disc = ex.DiscretizationConfig(modes=1, delta_k=dk, k_center=2.0)
        cfg = ph.PhotonFieldConfig(k0=2.0, sigma=SIGMA, kind="uncorrelated")
        st = toy_state(dk)
        with pytest.raises(StepSizeError) as err:
            ex.integrate(st, sys_, coup, disc, cfg, t_end=4000.0, dt=400.0)
        assert err.value.suggested_dt is not None

    def test_matches_closed_form_engine(self, na2, ip):
        # desk-scale cross-check at sigma_s = 0.25 sigma: top-3 steady
        # populations from both engines within 5%
        kappa = 0.25
        cfg = ph.PhotonFieldConfig(k0=0.5 * na2.energies_e[18], sigma=SIGMA, sigma_s=kappa * SIGMA)
        disc = ex.discretization_for(cfg, kappa, reduction=10, span=7.0)
        coup = ex.CouplingMatrices.build(na2, ip.gamma)
        st = ex.init_state(cfg, disc)
        horizon = pt.steady_horizon_sigma(cfg)
        traj = ex.integrate(st, na2, coup, disc, cfg, t_end=horizon / SIGMA)
        steady_ex = traj.steady_excited()
        res = pt.population_traces(
            na2, cfg, ip, np.arange(na2.n_excited),
            times=np.linspace(cfg.r0, horizon / SIGMA, 500),
        )
        steady_pt = np.array([r.steady for r in res])
        top = np.argsort(steady_pt)[::-1][:3]
        rel = np.abs(steady_ex[top] - steady_pt[top]) / steady_pt[top]
        assert list(top)[0] == 18
        assert np.max(rel) < 0.05
