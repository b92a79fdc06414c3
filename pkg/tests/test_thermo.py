import math

import numpy as np
import pytest

from hybrid_dicke import (
    ModelParams,
    PhaseLabel,
    bogoliubov_coefficients,
    classify_phase,
    critical_couplings,
    ground_observables,
    normal_spectrum,
    solve_point,
    superradiant_spectrum,
)
from hybrid_dicke.errors import CriticalDivergence, PhaseMismatch, UnstableRegime
from hybrid_dicke.thermo import PHASE_POINT_FIELDS, spectrum

from oracles import classical_limit

FIG2AB = dict(Omega=1.0, omega=1.0, alpha=0.0, g0=0.249, n=1)
FIG2CD = dict(Omega=1.0, omega=1.0, alpha=2.0, g0=0.251, n=1)

# 40-digit evaluations of the closed forms, frozen
OMEGA_MINUS_003 = 0.05565252785186208057303676737596083662758
OMEGA_PLUS_003 = 1.000451296237701775808931858848974169475
XI_B_PLUS_003 = 1.001591993727209736689857056937435233107
DELTA_X_003 = 2.996104337703202088645375437002009862943
OMEGA_T_MINUS_01 = 0.0579625377827534307031269819164358943743
OMEGA_T_PLUS_01 = 2.50012806556259891144671536338907431485
BETA_01 = 2.881141936444991553220562694225113189684
COHERENCE_01 = 11.45643923738960001647011798432002122246
NU_01 = 0.5477225575051661134569697828008021339528

# (Omega, omega, chi, alpha, g0, n) spanning both phases, both sides of resonance
ORACLE_POINTS = [
    (1.0, 1.0, 0.03, 0.0, 0.249, 1),
    (1.0, 1.0, 0.1, 0.0, 0.249, 1),
    (1.0, 1.0, 0.05, 2.0, 0.251, 1),
    (1.0, 1.0, 0.1, 2.0, 0.251, 1),
    (1.0, 1.0, 0.5, 0.0, 0.0, 0),
    (1.0, 1.0, 1.5, 0.0, 0.0, 0),
    (0.7, 1.3, 0.7, 0.5, 0.1, 2),
    (2.0, 0.5, 1.8, 0.3, 0.05, 1),
    (0.4, 2.2, 0.9, 0.0, 0.2, 1),
    (1.5, 0.8, 0.45, 3.0, 0.3, 1),
    (1.5, 0.8, 0.6, 3.0, 0.3, 1),
]


def params(Omega, omega, chi, alpha, g0, n):
    return ModelParams.from_chi(chi, Omega=Omega, omega=omega, alpha=alpha, g0=g0, n=n)


class TestNormalSpectrum:
    def test_fig2a_point(self):
        spec = normal_spectrum(params(1, 1, 0.03, 0, 0.249, 1))
        assert spec.phase is PhaseLabel.NORMAL
        assert spec.omega_minus == pytest.approx(OMEGA_MINUS_003, rel=1e-10)
        assert spec.omega_plus == pytest.approx(OMEGA_PLUS_003, rel=1e-12)
        assert spec.eg_density == -0.5

    def test_gap_closes_at_critical_point(self):
        base = ModelParams(**FIG2AB)
        chi_c = critical_couplings(base).chi_c
        assert normal_spectrum(base.with_chi(chi_c)).omega_minus <= 1e-8

    @pytest.mark.parametrize("Omega, omega", [(1.0, 0.4), (0.3, 2.0)])
    def test_decoupled_limit(self, Omega, omega):
        spec = normal_spectrum(ModelParams(Omega=Omega, omega=omega))
        assert spec.omega_minus == pytest.approx(min(Omega, omega), rel=1e-14)
        assert spec.omega_plus == pytest.approx(max(Omega, omega), rel=1e-14)
        # theta -> 0 when the spin is the upper mode, pi/2 otherwise
        assert spec.theta == pytest.approx(0.0 if Omega > omega else math.pi / 2)

    def test_rejects_superradiant_point(self):
        with pytest.raises(PhaseMismatch):
            normal_spectrum(params(1, 1, 0.1, 0, 0.249, 1))

    def test_rejects_unstable_point(self):
        with pytest.raises(PhaseMismatch):
            normal_spectrum(params(1, 1, 0.04, 2, 0.251, 1))


class TestSuperradiantSpectrum:
    def test_fig2b_point(self):
        spec = superradiant_spectrum(params(1, 1, 0.1, 0, 0.249, 1))
        assert spec.omega_minus == pytest.approx(OMEGA_T_MINUS_01, rel=1e-10)
        assert spec.omega_plus == pytest.approx(OMEGA_T_PLUS_01, rel=1e-12)
        assert spec.eg_density == pytest.approx(-0.725, rel=1e-13)
        assert spec.Omega_tilde == pytest.approx(1.75, rel=1e-13)

    def test_fig2c_point_energy(self):
        assert superradiant_spectrum(params(1, 1, 0.05, 2, 0.251, 1)).eg_density == pytest.approx(-0.725)

    def test_boundary_energy_matches_normal(self):
        p = ModelParams.from_chi(1.0)
        assert superradiant_spectrum(p).eg_density == pytest.approx(-0.5, abs=1e-15)

    def test_rejects_normal_point(self):
        with pytest.raises(PhaseMismatch):
            superradiant_spectrum(params(1, 1, 0.03, 0, 0.249, 1))

    def test_gap_positive_inside_and_closing(self):
        base = ModelParams(**FIG2AB)
        chi_c = critical_couplings(base).chi_c
        gaps = [superradiant_spectrum(base.with_chi(chi_c * (1 + d))).omega_minus
                for d in (1e-1, 1e-2, 1e-3, 1e-4, 1e-6)]
        assert all(g > 0 for g in gaps)
        assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_spectrum_dispatch():
    assert spectrum(params(1, 1, 0.1, 0, 0.249, 1)).Omega_tilde is not None
    assert spectrum(params(1, 1, 0.03, 0, 0.249, 1)).Omega_tilde is None
    with pytest.raises(UnstableRegime):
        spectrum(params(1, 1, 0.04, 2, 0.251, 1))


@pytest.mark.parametrize("point", ORACLE_POINTS)
def test_matches_classical_limit_oracle(point):
    """Spectrum, energy, displacement and spread against the Holstein-Primakoff surface."""
    p = params(*point)
    ref = classical_limit(*point)
    pt = solve_point(p)
    assert pt.eg_density == pytest.approx(ref.energy, rel=1e-9, abs=1e-12)
    assert pt.omega_minus == pytest.approx(ref.omega_minus, rel=1e-6)
    assert pt.omega_plus == pytest.approx(ref.omega_plus, rel=1e-6)
    assert pt.delta_x == pytest.approx(ref.delta_x, rel=1e-6)
    assert pt.psi_q == pytest.approx(ref.psi_q(p.Omega), rel=1e-6, abs=1e-12)
    assert (pt.beta or 0.0) == pytest.approx(abs(ref.X) / math.sqrt(2), rel=1e-6, abs=1e-9)
    assert pt.coherence == pytest.approx(math.exp(ref.r) * abs(ref.X) / math.sqrt(2), rel=1e-6, abs=1e-9)
    # zero-point occupations of b_n and d from the Bogoliubov rows
    bs = bogoliubov_coefficients(p)
    assert bs.xi_b_minus**2 + bs.zeta_b_minus**2 == pytest.approx(ref.nb_fluct, rel=1e-5, abs=1e-9)
    assert bs.xi_d_minus**2 + bs.zeta_d_minus**2 == pytest.approx(ref.nd_fluct, rel=1e-5, abs=1e-9)


class TestBogoliubov:
    def test_identity_when_decoupled(self):
        bs = bogoliubov_coefficients(ModelParams(Omega=1.5, omega=1.0))
        assert bs.xi_b_plus == pytest.approx(1.0, abs=1e-15)
        assert bs.xi_b_minus == pytest.approx(0.0, abs=1e-15)
        assert bs.zeta_b_plus == pytest.approx(0.0, abs=1e-15)
        assert bs.zeta_b_minus == pytest.approx(0.0, abs=1e-15)

    def test_fig2a_coefficient(self):
        bs = bogoliubov_coefficients(params(1, 1, 0.03, 0, 0.249, 1))
        assert bs.xi_b_plus == pytest.approx(XI_B_PLUS_003, rel=1e-9)

    def test_diverges_at_critical_point(self):
        with pytest.raises(CriticalDivergence):
            bogoliubov_coefficients(ModelParams.from_chi(1.0))

    def test_symplectic_on_random_stable_points(self):
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 10_000:
            Omega, omega = rng.uniform(0.1, 5, 2)
            chi, alpha, g0 = rng.uniform(0, 3), rng.uniform(0, 4), rng.uniform(0, 1)
            p = params(Omega, omega, chi, alpha, g0, int(rng.integers(0, 4)))
            if classify_phase(p) not in (PhaseLabel.NORMAL, PhaseLabel.SUPERRADIANT):
                continue
            if spectrum(p).omega_minus < 1e-3:
                continue
            bs = bogoliubov_coefficients(p)
            nb, nd = bs.normalization()
            c1, c2 = bs.cross_commutators()
            assert abs(nb - 1) < 1e-10 and abs(nd - 1) < 1e-10, (p, nb, nd)
            assert abs(c1) < 1e-10 and abs(c2) < 1e-10, (p, c1, c2)
            checked += 1


class TestGroundObservables:
    def test_fig2b_superradiant_point(self):
        obs = ground_observables(params(1, 1, 0.1, 0, 0.249, 1))
        assert obs.psi_q == pytest.approx(0.525, rel=1e-12)
        assert obs.beta == pytest.approx(BETA_01, rel=1e-12)
        assert obs.nu == pytest.approx(NU_01, rel=1e-12)
        assert obs.b_coherence_pair[0] == pytest.approx(COHERENCE_01, rel=1e-12)
        assert obs.b_coherence_pair[1] == -obs.b_coherence_pair[0]

    def test_normal_phase_is_incoherent(self):
        obs = ground_observables(params(1, 1, 0.03, 0, 0.249, 1))
        assert obs.psi_q == 0 and obs.b_coherence_pair == (0.0, 0.0)
        assert obs.beta is None and obs.nu is None
        assert obs.delta_x == pytest.approx(DELTA_X_003, rel=1e-10)

    def test_vacuum_spread(self):
        assert ground_observables(ModelParams()).delta_x == pytest.approx(1 / math.sqrt(2), abs=1e-15)

    def test_ratio(self):
        obs = ground_observables(params(1, 1, 0.1, 2, 0.251, 1))
        assert obs.ratio_Omega_omega_n == pytest.approx(1 / math.sqrt(0.016), rel=1e-12)

    def test_unstable_raises(self):
        with pytest.raises(UnstableRegime):
            ground_observables(params(1, 1, 0.04, 2, 0.251, 1))

    def test_spread_absent_at_critical_point(self):
        assert ground_observables(ModelParams.from_chi(1.0)).delta_x is None

    def test_reversed_order_parameter_decreases(self):
        base = ModelParams(**FIG2CD)
        chis = np.linspace(0.0448, 0.0632, 80)
        psi = [ground_observables(base.with_chi(c)).psi_q for c in chis]
        assert all(v > 0 for v in psi)
        assert all(a > b for a, b in zip(psi, psi[1:]))


class TestSolvePoint:
    def test_normal(self):
        pt = solve_point(params(1, 1, 0.03, 0, 0.249, 1))
        assert pt.phase is PhaseLabel.NORMAL and pt.psi_q == 0 and pt.eg_density == -0.5
        assert pt.omega_minus == pytest.approx(OMEGA_MINUS_003, rel=1e-10)

    def test_unstable_carries_only_label(self):
        pt = solve_point(params(1, 1, 0.04, 2, 0.251, 1))
        assert pt.phase is PhaseLabel.UNSTABLE and pt.s < 0
        d = pt.as_dict()
        assert all(d[k] is None for k in PHASE_POINT_FIELDS if k not in ("phase", "chi", "s"))
        assert d["phase"] == "unstable"

    def test_superradiant(self):
        pt = solve_point(params(1, 1, 0.1, 0, 0.249, 1))
        assert pt.phase is PhaseLabel.SUPERRADIANT
        assert pt.psi_q == pytest.approx(0.525) and pt.eg_density == pytest.approx(-0.725)
