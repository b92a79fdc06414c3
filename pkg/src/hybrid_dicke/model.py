"""Model parameters, the photon-dressed (squeezed) frame and phase classification.

The hybrid model is a Dicke model whose field mode ``b`` is quadratically
coupled to an ancillary cavity mode held in the Fock state ``|n>``.  Replacing
``a^dagger a`` by ``n`` and squeezing ``b`` maps the model onto a Dicke model
with dressed frequency ``omega_n`` and coupling ``lambda_n``.  Everything the
rest of the package computes is expressed through the quantities here.

Conventions: hbar = 1, ``J_x = J_+ + J_-`` (twice the usual spin operator), so
the bare Dicke critical point is ``chi = 2 lambda / sqrt(Omega omega) = 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace


class PhaseLabel(str, enum.Enum):
    NORMAL = "normal"
    SUPERRADIANT = "superradiant"
    CRITICAL = "critical"
    UNSTABLE = "unstable"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the hybrid model.

    Parameters
    ----------
    Omega : float
        Two-level transition frequency (> 0).
    omega : float
        Frequency of the field mode ``b`` (> 0).
    lam : float
        Collective spin-field coupling ``lambda`` (>= 0).
    alpha : float
        Coefficient of the A^2 term (>= 0).
    g0 : float
        Quadratic optomechanical coupling (>= 0).
    n : int
        Fock occupation of the ancillary mode.
    omega_c : float
        Ancillary-mode frequency; only shifts energies by ``n * omega_c``.
    N : int or None
        Number of two-level systems, ``None`` for the thermodynamic limit.

    Construction only checks the sign constraints above.  Whether a point is
    physically stable is answered by :func:`classify_phase`.
    """

    Omega: float = 1.0
    omega: float = 1.0
    lam: float = 0.0
    alpha: float = 0.0
    g0: float = 0.0
    n: int = 0
    omega_c: float = 1.0
    N: int | None = None

    def __post_init__(self):
        for name in ("Omega", "omega"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        for name in ("lam", "alpha", "g0", "omega_c"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be non-negative and finite, got {value!r}")
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"n must be a non-negative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.N is not None:
            if int(self.N) != self.N or self.N < 1:
                raise ValueError(f"N must be a positive integer or None, got {self.N!r}")
            object.__setattr__(self, "N", int(self.N))

    @classmethod
    def from_chi(cls, chi: float, **kwargs) -> "ModelParams":
        """Build parameters from the rescaled coupling ``chi`` instead of ``lam``."""
        Omega = kwargs.get("Omega", 1.0)
        omega = kwargs.get("omega", 1.0)
        return cls(lam=lambda_from_chi(chi, Omega, omega), **kwargs)

    @property
    def chi(self) -> float:
        return 2.0 * self.lam / math.sqrt(self.Omega * self.omega)

    @property
    def thermodynamic_limit(self) -> bool:
        return self.N is None

    def with_chi(self, chi: float) -> "ModelParams":
        return replace(self, lam=lambda_from_chi(chi, self.Omega, self.omega))

    def as_dict(self) -> dict:
        return {
            "Omega": self.Omega,
            "omega": self.omega,
            "lam": self.lam,
            "alpha": self.alpha,
            "g0": self.g0,
            "n": self.n,
            "omega_c": self.omega_c,
            "N": self.N,
        }


def lambda_from_chi(chi: float, Omega: float, omega: float) -> float:
    if chi < 0:
        raise ValueError(f"chi must be non-negative, got {chi!r}")
    return 0.5 * chi * math.sqrt(Omega * omega)


def squeeze_argument(p: ModelParams) -> float:
    """``s = 1 + alpha chi^2 - 4 n g0 / omega``; the dressed frequency is ``omega sqrt(s)``."""
    return 1.0 + 4.0 * (p.alpha * p.lam**2 / p.Omega - p.n * p.g0) / p.omega


@dataclass(frozen=True)
class DressedFrame:
    """Squeeze-transformed quantities at one parameter point.

    ``s`` and ``chi`` are always set.  When ``s <= 0`` the squeeze parameter is
    undefined and ``r_n``, ``lambda_n``, ``chi_n``, ``C_n`` are ``None``;
    ``omega_n`` is then ``None`` as well (it would be imaginary or zero).
    """

    chi: float
    s: float
    r_n: float | None
    omega_n: float | None
    lambda_n: float | None
    chi_n: float | None
    C_n: float | None

    @property
    def defined(self) -> bool:
        return self.s > 0


def dressed_frame(p: ModelParams) -> DressedFrame:
    chi = p.chi
    s = squeeze_argument(p)
    if s <= 0:
        omega_n = 0.0 if s == 0 else None
        return DressedFrame(chi, s, None, omega_n, None, None, None)
    root = math.sqrt(s)
    r_n = -0.25 * math.log(s)
    return DressedFrame(
        chi=chi,
        s=s,
        r_n=r_n,
        omega_n=p.omega * root,
        lambda_n=math.exp(r_n) * p.lam,
        chi_n=chi / root,
        C_n=p.n * p.omega_c + (root - 1.0) * p.omega / 2.0,
    )


def classify_phase(p: ModelParams, tol: float = 1e-10) -> PhaseLabel:
    """Label a parameter point Normal, Superradiant, Critical or Unstable.

    The point is Unstable when ``s <= tol`` (``s = 0`` makes the dressed frame
    singular).  Otherwise ``chi^2`` is compared with ``s``, which is the
    condition ``chi_n = 1``, with tolerance ``tol * max(1, chi^2)``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = squeeze_argument(p)
    if s < 0 or abs(s) <= tol:
        return PhaseLabel.UNSTABLE
    chi2 = p.chi**2
    gap = chi2 - s
    if abs(gap) <= tol * max(1.0, chi2):
        return PhaseLabel.CRITICAL
    return PhaseLabel.SUPERRADIANT if gap > 0 else PhaseLabel.NORMAL


@dataclass(frozen=True)
class CriticalityReport:
    exists: bool
    chi_c: float | None
    degenerate: bool
    branch_note: str


def critical_couplings(p: ModelParams) -> CriticalityReport:
    """Solve ``chi^2 (1 - alpha) = 1 - 4 n g0 / omega`` for the critical ``chi >= 0``.

    ``p.lam`` is ignored.  With ``n = 0`` and ``alpha >= 1`` there is no root,
    which is the no-go theorem for the A^2 term.
    """
    rhs = 1.0 - 4.0 * p.n * p.g0 / p.omega
    if p.n > 0 and math.isclose(4.0 * p.n * p.g0, p.omega, rel_tol=1e-14):
        rhs = 0.0
    slope = 1.0 - p.alpha
    g0_side = _g0_side(p)

    if p.alpha == 1.0:
        if rhs == 0.0:
            return CriticalityReport(
                False, None, True,
                f"alpha = 1 and g0 = omega/(4n): chi_n = 1 for every chi ({g0_side})",
            )
        return CriticalityReport(False, None, False, f"alpha = 1 and {g0_side}: no root")
    if rhs == 0.0:
        return CriticalityReport(
            False, None, False,
            "g0 = omega/(4n): the only root chi = 0 has s = 0 (unstable)",
        )
    if slope * rhs > 0:
        chi_c = math.sqrt(rhs / slope)
        side = "alpha < 1" if slope > 0 else "alpha > 1"
        return CriticalityReport(True, chi_c, False, f"{side} and {g0_side}")
    side = "alpha < 1" if slope > 0 else "alpha > 1"
    return CriticalityReport(False, None, False, f"{side} and {g0_side}: no real root")


def _g0_side(p: ModelParams) -> str:
    if p.n == 0:
        return "n = 0"
    bound = p.omega / (4 * p.n)
    if math.isclose(p.g0, bound, rel_tol=1e-14):
        return "g0 = omega/(4n)"
    return "g0 < omega/(4n)" if p.g0 < bound else "g0 > omega/(4n)"


@dataclass(frozen=True)
class StabilityBounds:
    """Set of ``chi`` values with ``omega_n >= 0``: ``chi >= chi_min``.

    ``chi_min = 0`` means every coupling is stable; ``chi_min = None`` means no
    coupling is.  The bound is closed; on the boundary itself ``s = 0`` and
    :func:`classify_phase` reports Unstable.
    """

    chi_min: float | None
    note: str

    @property
    def stable_everywhere(self) -> bool:
        return self.chi_min == 0.0

    def contains(self, chi: float) -> bool:
        return self.chi_min is not None and chi >= self.chi_min


def stability_bounds(p: ModelParams) -> StabilityBounds:
    deficit = 4.0 * p.n * p.g0 / p.omega - 1.0
    if p.n == 0 or deficit <= 0:
        return StabilityBounds(0.0, "s >= 1 + alpha chi^2 - 4 n g0/omega > 0 for all chi")
    if p.alpha == 0:
        return StabilityBounds(None, "alpha = 0 and g0 > omega/(4n): unstable for all chi")
    return StabilityBounds(
        math.sqrt(deficit / p.alpha),
        "g0 > omega/(4n): A^2 term restores stability above chi_min",
    )


def chi_for_dressed_coupling(p: ModelParams, chi_n: float) -> float:
    """Bare ``chi`` at which the dressed coupling equals ``chi_n``.

    Inverts ``chi_n^2 = chi^2 / (1 + alpha chi^2 - 4 n g0/omega)``.
    """
    rest = 1.0 - 4.0 * p.n * p.g0 / p.omega
    denom = 1.0 - p.alpha * chi_n**2
    chi2 = chi_n**2 * rest / denom if denom != 0 else math.nan
    if not (chi2 > 0 and math.isfinite(chi2)):
        raise ValueError(f"no stable chi reaches chi_n = {chi_n!r} for {p!r}")
    return math.sqrt(chi2)
