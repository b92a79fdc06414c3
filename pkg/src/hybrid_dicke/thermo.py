"""Closed-form N -> infinity solution in both phases.

The dressed Hamiltonian is mapped to two coupled oscillators with a
Holstein-Primakoff boson ``d``.  In the normal phase the bilinear form is
diagonalised directly; in the superradiant phase both modes are displaced
first (amplitudes ``beta``, ``nu`` scale as ``sqrt(N)`` and are reported per
``sqrt(N)``).  Excitation energies are computed from the product of roots so
that ``omega_minus`` stays accurate as it closes at the critical point.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import CriticalDivergence, PhaseMismatch, UnstableRegime
from .model import (
    ModelParams,
    PhaseLabel,
    classify_phase,
    dressed_frame,
)

DIVERGENCE_GUARD = 1e-12


@dataclass(frozen=True)
class ExcitationSpectrum:
    """Normal-mode energies, mixing angle and ground-state energy per spin.

    ``Omega_tilde`` is the dressed spin frequency and is only set in the
    superradiant phase.
    """

    phase: PhaseLabel
    omega_minus: float
    omega_plus: float
    theta: float
    eg_density: float
    Omega_tilde: float | None = None


@dataclass(frozen=True)
class BogoliubovSet:
    """Coefficients expressing ``b_n`` and ``d`` through the normal modes.

    ``b_n = xi_b_minus e1^dag + xi_b_plus e1 + zeta_b_minus e2^dag + zeta_b_plus e2``
    and likewise for ``d`` (tilde quantities in the superradiant phase).
    """

    xi_b_minus: float
    xi_b_plus: float
    zeta_b_minus: float
    zeta_b_plus: float
    xi_d_minus: float
    xi_d_plus: float
    zeta_d_minus: float
    zeta_d_plus: float

    def normalization(self) -> tuple[float, float]:
        """``[b_n, b_n^dag]`` and ``[d, d^dag]``; both equal 1 for a valid set."""
        b = (self.xi_b_plus**2 - self.xi_b_minus**2) + (self.zeta_b_plus**2 - self.zeta_b_minus**2)
        d = (self.xi_d_plus**2 - self.xi_d_minus**2) + (self.zeta_d_plus**2 - self.zeta_d_minus**2)
        return b, d

    def cross_commutators(self) -> tuple[float, float]:
        """``[b_n, d^dag]`` and ``[b_n, d]``; both vanish for a valid set."""
        bd_dag = (
            self.xi_b_plus * self.xi_d_plus - self.xi_b_minus * self.xi_d_minus
            + self.zeta_b_plus * self.zeta_d_plus - self.zeta_b_minus * self.zeta_d_minus
        )
        bd = (
            self.xi_b_plus * self.xi_d_minus - self.xi_b_minus * self.xi_d_plus
            + self.zeta_b_plus * self.zeta_d_minus - self.zeta_b_minus * self.zeta_d_plus
        )
        return bd_dag, bd


@dataclass(frozen=True)
class GroundObservables:
    """Ground-state observables in the thermodynamic limit.

    Attributes
    ----------
    psi_q : float
        Order parameter ``s omega <b^dag b> / (N Omega)``.
    b_coherence_pair : tuple of float
        ``<b>/sqrt(N)`` for the two degenerate ground states, ``(+c, -c)``.
    delta_x : float or None
        Position spread of ``x = (b + b^dag)/sqrt(2)``; ``None`` at the
        critical point where it diverges.
    beta, nu : float or None
        Field and spin displacement amplitudes per ``sqrt(N)``, superradiant
        phase only.
    ratio_Omega_omega_n : float
    """

    psi_q: float
    b_coherence_pair: tuple[float, float]
    delta_x: float | None
    beta: float | None
    nu: float | None
    ratio_Omega_omega_n: float


def _require(p: ModelParams, allowed, what: str, tol: float):
    phase = classify_phase(p, tol)
    if phase not in allowed:
        raise PhaseMismatch(f"{what} is defined only in {sorted(str(a) for a in allowed)}, got {phase}")
    return phase, dressed_frame(p)


def _half_angle(num: float, den: float) -> float:
    # 2 theta in [0, pi]; atan2(0, 0) = 0 fixes the degenerate resonance.
    return 0.5 * math.atan2(num, den)


def normal_spectrum(p: ModelParams, tol: float = 1e-10) -> ExcitationSpectrum:
    phase, f = _require(p, (PhaseLabel.NORMAL, PhaseLabel.CRITICAL), "normal_spectrum", tol)
    Om, w = p.Omega, p.omega
    wn2 = f.omega_n**2
    total = wn2 + Om**2
    disc = math.sqrt((wn2 - Om**2) ** 2 + 4.0 * f.chi**2 * Om**2 * w**2)
    plus2 = 0.5 * (total + disc)
    # omega_-^2 omega_+^2 = Omega^2 omega^2 (s - chi^2)
    minus2 = max(0.0, Om**2 * w**2 * (f.s - f.chi**2) / plus2)
    theta = _half_angle(2.0 * f.chi_n * Om * f.omega_n, Om**2 - wn2)
    return ExcitationSpectrum(
        phase=phase,
        omega_minus=math.sqrt(minus2),
        omega_plus=math.sqrt(plus2),
        theta=theta,
        eg_density=-Om / 2.0,
    )


def superradiant_spectrum(p: ModelParams, tol: float = 1e-10) -> ExcitationSpectrum:
    phase, f = _require(p, (PhaseLabel.SUPERRADIANT, PhaseLabel.CRITICAL), "superradiant_spectrum", tol)
    Om = p.Omega
    wn2 = f.omega_n**2
    y = f.chi_n**2
    total = wn2 + y**2 * Om**2
    disc = math.sqrt((y**2 * Om**2 - wn2) ** 2 + 4.0 * Om**2 * wn2)
    plus2 = 0.5 * (total + disc)
    # y - 1 = (chi^2 - s)/s keeps the closing gap free of cancellation
    y_minus_1 = (f.chi**2 - f.s) / f.s
    minus2 = max(0.0, Om**2 * wn2 * y_minus_1 * (y + 1.0) / plus2)
    theta = _half_angle(2.0 * f.omega_n * Om, y**2 * Om**2 - wn2)
    return ExcitationSpectrum(
        phase=phase,
        omega_minus=math.sqrt(minus2),
        omega_plus=math.sqrt(plus2),
        theta=theta,
        eg_density=-(Om / 4.0) * (y + 1.0 / y),
        Omega_tilde=Om * (1.0 + y) / 2.0,
    )


def spectrum(p: ModelParams, tol: float = 1e-10) -> ExcitationSpectrum:
    """Phase-appropriate spectrum; the critical point uses the normal branch."""
    phase = classify_phase(p, tol)
    if phase is PhaseLabel.SUPERRADIANT:
        return superradiant_spectrum(p, tol)
    if phase is PhaseLabel.UNSTABLE:
        raise UnstableRegime(f"s = {dressed_frame(p).s!r} <= 0")
    return normal_spectrum(p, tol)


def bogoliubov_coefficients(
    p: ModelParams, tol: float = 1e-10, guard: float = DIVERGENCE_GUARD
) -> BogoliubovSet:
    spec = spectrum(p, tol)
    if spec.omega_minus <= guard:
        raise CriticalDivergence(f"omega_minus = {spec.omega_minus!r} <= {guard!r}")
    wn = dressed_frame(p).omega_n
    spin = spec.Omega_tilde if spec.Omega_tilde is not None else p.Omega
    c, s = math.cos(spec.theta), math.sin(spec.theta)
    wm, wp = spec.omega_minus, spec.omega_plus

    def coeff(amp, ref, mode, sign):
        return amp * (ref + sign * mode) / (2.0 * math.sqrt(ref * mode))

    return BogoliubovSet(
        xi_b_minus=coeff(c, wn, wm, -1),
        xi_b_plus=coeff(c, wn, wm, +1),
        zeta_b_minus=coeff(s, wn, wp, -1),
        zeta_b_plus=coeff(s, wn, wp, +1),
        xi_d_minus=coeff(-s, spin, wm, -1),
        xi_d_plus=coeff(-s, spin, wm, +1),
        zeta_d_minus=coeff(c, spin, wp, -1),
        zeta_d_plus=coeff(c, spin, wp, +1),
    )


def position_variance(p: ModelParams, spec: ExcitationSpectrum, guard: float = DIVERGENCE_GUARD):
    """``<x^2> - <x>^2`` of the field quadrature in a (symmetry-broken) ground state.

    Uses ``x = e^{r_n} (b_n + b_n^dag)/sqrt(2)`` and ``e^{2 r_n} omega_n = omega``.
    Returns ``None`` when ``omega_minus <= guard``.
    """
    if spec.omega_minus <= guard:
        return None
    c2 = math.cos(spec.theta) ** 2
    return 0.5 * p.omega * (c2 / spec.omega_minus + (1.0 - c2) / spec.omega_plus)


def ground_observables(p: ModelParams, tol: float = 1e-10) -> GroundObservables:
    f = dressed_frame(p)
    if f.s <= 0 or classify_phase(p, tol) is PhaseLabel.UNSTABLE:
        raise UnstableRegime(f"s = {f.s!r} <= 0")
    spec = spectrum(p, tol)
    var = position_variance(p, spec)
    delta_x = math.sqrt(var) if var is not None else None
    ratio = p.Omega / f.omega_n
    if spec.phase is not PhaseLabel.SUPERRADIANT:
        return GroundObservables(0.0, (0.0, 0.0), delta_x, None, None, ratio)
    y = f.chi_n**2
    excess = y - 1.0 / y
    beta = math.sqrt(p.Omega / (4.0 * f.omega_n) * excess)
    nu = math.sqrt(0.5 * (1.0 - 1.0 / y))
    coherence = math.exp(f.r_n) * beta
    return GroundObservables(
        psi_q=0.25 * excess,
        b_coherence_pair=(coherence, -coherence),
        delta_x=delta_x,
        beta=beta,
        nu=nu,
        ratio_Omega_omega_n=ratio,
    )


@dataclass(frozen=True)
class PhasePoint:
    """Everything the analytic solution says about one parameter point.

    Unstable points carry only ``phase``, ``chi`` and ``s``; the remaining
    fields are ``None``.  ``coherence`` is the positive member of the pair
    ``<b>/sqrt(N)``.
    """

    phase: PhaseLabel
    chi: float
    s: float
    chi_n: float | None = None
    omega_n: float | None = None
    omega_minus: float | None = None
    omega_plus: float | None = None
    theta: float | None = None
    eg_density: float | None = None
    psi_q: float | None = None
    beta: float | None = None
    nu: float | None = None
    coherence: float | None = None
    delta_x: float | None = None
    ratio_Omega_omega_n: float | None = None

    def as_dict(self) -> dict:
        out = asdict(self)
        out["phase"] = self.phase.value
        return out


PHASE_POINT_FIELDS = tuple(PhasePoint.__dataclass_fields__)


def solve_point(p: ModelParams, tol: float = 1e-10) -> PhasePoint:
    phase = classify_phase(p, tol)
    f = dressed_frame(p)
    if phase is PhaseLabel.UNSTABLE:
        return PhasePoint(phase=phase, chi=f.chi, s=f.s)
    spec = spectrum(p, tol)
    obs = ground_observables(p, tol)
    return PhasePoint(
        phase=phase,
        chi=f.chi,
        s=f.s,
        chi_n=f.chi_n,
        omega_n=f.omega_n,
        omega_minus=spec.omega_minus,
        omega_plus=spec.omega_plus,
        theta=spec.theta,
        eg_density=spec.eg_density,
        psi_q=obs.psi_q,
        beta=obs.beta,
        nu=obs.nu,
        coherence=obs.b_coherence_pair[0],
        delta_x=obs.delta_x,
        ratio_Omega_omega_n=obs.ratio_Omega_omega_n,
    )
