"""Finite-N exact diagonalization in a truncated Fock x collective-spin basis.

Basis states are ``|k, m>`` with boson number ``k = 0..M`` and ``J_z``
eigenvalue ``m = -N/2..N/2`` (the maximal ``j = N/2`` sector), stored at index
``k (N + 1) + (m + N/2)``.  Two frames are supported:

``"original"``
    ``H = n omega_c + Omega J_z + omega b^dag b + (lam/sqrt N)(b + b^dag) J_x
    + K (b + b^dag)^2`` with ``K = alpha lam^2 / Omega - n g0``.
``"dressed"``
    The same Hamiltonian after the squeeze ``b = cosh(r) b_n + sinh(r) b_n^dag``,
    i.e. a plain Dicke model with ``omega_n``, ``lambda_n`` and offset ``C_n``.

The two are unitarily equivalent, so converged energies and observables agree.
The dressed frame needs far fewer Fock states in the superradiant phase
because the squeeze no longer has to be built out of number states, which is
why :class:`EDConfig` defaults to it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from .errors import (
    BasisMismatch,
    CutoffCeilingWarning,
    CutoffTooSmall,
    NoConvergence,
    OverflowRisk,
    UnstableRegime,
)
from .model import ModelParams, PhaseLabel, classify_phase, dressed_frame
from .thermo import spectrum, ground_observables

FRAMES = ("original", "dressed")


@dataclass(frozen=True)
class EDConfig:
    """Knobs for cutoff convergence and the eigensolver.

    Parameters
    ----------
    fock_cutoff : int or None
        Initial boson truncation ``M``; ``None`` picks one from the analytic
        occupation estimate.
    cutoff_growth : float
        Factor applied to ``M`` between successive solves.
    cutoff_tol : float
        Relative change of ``<b^dag b>`` accepted as converged.
    max_cutoff : int
    eig_tol : float
        Residual bound ``||H v - E v|| <= eig_tol * max(1, |E|)``.
    dense_threshold : int
        Basis dimensions up to this use dense diagonalization.
    frame : {"dressed", "original"}
    seed : int
        Seed of the random Krylov start vector.
    max_dim : int
        Refuse to assemble larger bases.
    maxiter : int or None
        ARPACK restart budget; ``None`` lets ARPACK choose.
    doublet_tol : float
        Parity doublets split by less than this (times ``max(1, |E|)``) are
        treated as degenerate and the even member is reported.
    """

    fock_cutoff: int | None = None
    cutoff_growth: float = 1.5
    cutoff_tol: float = 1e-6
    max_cutoff: int = 4096
    eig_tol: float = 1e-10
    dense_threshold: int = 2000
    frame: str = "dressed"
    seed: int = 0
    max_dim: int = 1_000_000
    maxiter: int | None = None
    doublet_tol: float = 1e-10

    def __post_init__(self):
        if not self.cutoff_growth > 1:
            raise ValueError("cutoff_growth must exceed 1")
        if not 0 < self.cutoff_tol < 1:
            raise ValueError("cutoff_tol must lie in (0, 1)")
        if self.frame not in FRAMES:
            raise ValueError(f"frame must be one of {FRAMES}, got {self.frame!r}")
        if self.fock_cutoff is not None and self.fock_cutoff < 1:
            raise ValueError("fock_cutoff must be positive")

    def as_dict(self) -> dict:
        return {
            "fock_cutoff": self.fock_cutoff,
            "cutoff_growth": self.cutoff_growth,
            "cutoff_tol": self.cutoff_tol,
            "max_cutoff": self.max_cutoff,
            "eig_tol": self.eig_tol,
            "dense_threshold": self.dense_threshold,
            "frame": self.frame,
            "seed": self.seed,
            "max_dim": self.max_dim,
            "maxiter": self.maxiter,
            "doublet_tol": self.doublet_tol,
        }


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Real symmetric sparse matrix stored as upper-triangle triplets.

    ``rows[i] <= cols[i]`` for every entry; the full matrix is the symmetric
    completion.  Duplicate positions are summed.
    """

    M: int
    N: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    frame: str = "original"

    @property
    def dim(self) -> int:
        return (self.M + 1) * (self.N + 1)

    def index(self, k: int, m: float) -> int:
        return basis_index(k, m, self.N)

    def to_csr(self) -> sps.csr_matrix:
        upper = sps.coo_matrix((self.values, (self.rows, self.cols)), shape=(self.dim, self.dim))
        strict = self.rows != self.cols
        lower = sps.coo_matrix(
            (self.values[strict], (self.cols[strict], self.rows[strict])),
            shape=(self.dim, self.dim),
        )
        return (upper + lower).tocsr()

    def to_dense(self) -> np.ndarray:
        return self.to_csr().toarray()

    def triplets(self):
        return zip(self.rows.tolist(), self.cols.tolist(), self.values.tolist())


def basis_index(k: int, m: float, N: int) -> int:
    return int(k * (N + 1) + round(m + N / 2))


def _basis_grid(M: int, N: int):
    k = np.repeat(np.arange(M + 1), N + 1)
    mshift = np.tile(np.arange(N + 1), M + 1)  # m + N/2
    return k, mshift


def basis_parity(M: int, N: int) -> np.ndarray:
    """``(-1)^(k + m + N/2)`` for every basis state, as +1/-1 integers."""
    k, mshift = _basis_grid(M, N)
    return 1 - 2 * ((k + mshift) % 2)


def _check_size(N, M, max_dim):
    if N is None:
        raise ValueError("exact diagonalization needs a finite N")
    if M < 1:
        raise CutoffTooSmall(f"Fock cutoff must be >= 1, got {M}")
    dim = (M + 1) * (N + 1)
    if dim > max_dim:
        raise OverflowRisk(f"basis dimension {dim} exceeds max_dim={max_dim}")


def build_hamiltonian(
    p: ModelParams, M: int, frame: str = "original", max_dim: int = 1_000_000
) -> OperatorMatrix:
    """Assemble ``H`` for ``p.N`` spins with Fock cutoff ``M``.

    Raises
    ------
    CutoffTooSmall
        If ``M < 1``.
    OverflowRisk
        If ``(M + 1)(N + 1) > max_dim``.
    UnstableRegime
        For ``frame="dressed"`` when ``s <= 0`` (no real squeeze exists).
    """
    N = p.N
    _check_size(N, M, max_dim)
    if frame == "original":
        w = p.omega
        g = p.lam / math.sqrt(N)
        K = p.alpha * p.lam**2 / p.Omega - p.n * p.g0
        offset = p.n * p.omega_c
    elif frame == "dressed":
        f = dressed_frame(p)
        if f.s <= 0:
            raise UnstableRegime(f"s = {f.s!r} <= 0 has no dressed frame")
        w = f.omega_n
        g = f.lambda_n / math.sqrt(N)
        K = 0.0
        offset = f.C_n
    else:
        raise ValueError(f"frame must be one of {FRAMES}, got {frame!r}")

    j = N / 2
    k, mshift = _basis_grid(M, N)
    m = mshift - j
    idx = np.arange(k.size)
    rows, cols, vals = [idx], [idx], [offset + p.Omega * m + w * k + K * (2 * k + 1)]

    # (b + b^dag) J_x: <k+1, m+-1| ... |k, m> = sqrt(k+1) sqrt(j(j+1) - m(m+-1))
    if g != 0.0:
        has_up = k < M
        for dm in (1, -1):
            sel = has_up & (mshift + dm >= 0) & (mshift + dm <= N)
            kk, mm = k[sel], m[sel]
            amp = g * np.sqrt(kk + 1.0) * np.sqrt(j * (j + 1) - mm * (mm + dm))
            rows.append(idx[sel])
            cols.append(idx[sel] + (N + 1) + dm)
            vals.append(amp)

    # K (b + b^dag)^2 off-diagonal: <k+2|...|k> = sqrt((k+1)(k+2))
    if K != 0.0:
        sel = k + 2 <= M
        rows.append(idx[sel])
        cols.append(idx[sel] + 2 * (N + 1))
        vals.append(K * np.sqrt((k[sel] + 1.0) * (k[sel] + 2.0)))

    return OperatorMatrix(
        M=M,
        N=N,
        rows=np.concatenate(rows),
        cols=np.concatenate(cols),
        values=np.concatenate(vals).astype(float),
        frame=frame,
    )


def parity_matrix(N: int, M: int) -> OperatorMatrix:
    """Diagonal ``Pi = exp(i pi (b^dag b + J_z + N/2))`` in the same basis."""
    _check_size(N, M, np.inf)
    diag = basis_parity(M, N).astype(float)
    idx = np.arange(diag.size)
    return OperatorMatrix(M=M, N=N, rows=idx, cols=idx, values=diag)


class GroundPair(NamedTuple):
    """Ground eigenpair plus the lowest state of the opposite parity.

    ``splitting`` is ``E_partner - energy``; it is small and possibly of either
    sign inside a parity doublet.
    """

    energy: float
    vector: np.ndarray
    splitting: float
    residual: float
    partner_energy: float
    partner_vector: np.ndarray


def _sector_lowest(block: sps.csr_matrix, dense: bool, cfg: EDConfig, start):
    n = block.shape[0]
    if dense or n < 3:
        w, v = scipy.linalg.eigh(block.toarray(), subset_by_index=[0, 0])
        return float(w[0]), v[:, 0]
    if start is None or not np.linalg.norm(start) > 0:
        start = np.random.default_rng(cfg.seed).standard_normal(n)
    try:
        w, v = spla.eigsh(
            block, k=1, which="SA", v0=start, tol=0.1 * cfg.eig_tol,
            maxiter=cfg.maxiter, ncv=min(n, 32),
        )
    except spla.ArpackNoConvergence as exc:
        if len(exc.eigenvalues):
            vec = exc.eigenvectors[:, 0]
            res = np.linalg.norm(block @ vec - exc.eigenvalues[0] * vec)
        else:
            res = math.inf
        raise NoConvergence(f"ARPACK did not converge on a block of size {n}", res) from exc
    return float(w[0]), v[:, 0]


def ground_eigenpair(H: OperatorMatrix, cfg: EDConfig = EDConfig(), v0=None) -> GroundPair:
    """Lowest eigenpair of ``H``, resolved by parity sector.

    ``H`` commutes with the parity operator, so each sector is diagonalised on
    its own: dense when ``H.dim <= cfg.dense_threshold``, ARPACK Lanczos
    otherwise.  The lower of the two sector ground states is returned, except
    that the even one wins when the two are degenerate within
    ``cfg.doublet_tol``.  ``v0`` is an optional full-space warm start.
    """
    if H.dim < 2:
        raise ValueError("need at least a 2-dimensional basis")
    full = H.to_csr()
    parity = basis_parity(H.M, H.N)
    dense = H.dim <= cfg.dense_threshold
    found = {}
    for sign in (1, -1):
        sel = np.flatnonzero(parity == sign)
        block = full[sel][:, sel].tocsr()
        start = None if v0 is None else np.asarray(v0, dtype=float)[sel]
        energy, vec = _sector_lowest(block, dense, cfg, start)
        full_vec = np.zeros(H.dim)
        full_vec[sel] = vec / np.linalg.norm(vec)
        found[sign] = (energy, full_vec)

    e_even, e_odd = found[1][0], found[-1][0]
    scale = max(1.0, abs(e_even))
    if abs(e_even - e_odd) < cfg.doublet_tol * scale or e_even <= e_odd:
        (energy, vector), (p_energy, p_vector) = found[1], found[-1]
    else:
        (energy, vector), (p_energy, p_vector) = found[-1], found[1]

    residual = float(np.linalg.norm(full @ vector - energy * vector))
    if residual > cfg.eig_tol * max(1.0, abs(energy)):
        raise NoConvergence(f"residual {residual:.3e} exceeds tolerance", residual)
    # Fix the global sign so repeated runs give identical vectors.
    pivot = np.argmax(np.abs(vector))
    if vector[pivot] < 0:
        vector = -vector
    return GroundPair(energy, vector, p_energy - energy, residual, p_energy, p_vector)


@dataclass(frozen=True)
class EDResult:
    """Finite-N ground state and its observables.

    All observables refer to the original field ``b`` regardless of the frame
    the Hamiltonian was assembled in.  ``psi_q = s omega n_b / (N Omega)``.
    """

    ground_energy: float
    ground_vector: np.ndarray = field(repr=False)
    n_b: float
    jz: float
    x_mean: float
    x2_mean: float
    b_mean: float
    parity: float
    psi_q: float
    delta_x: float
    cutoff_used: int
    converged: bool = False
    splitting: float = math.nan
    frame: str = "original"
    N: int = 0

    SUMMARY_FIELDS = (
        "ground_energy", "n_b", "jz", "x_mean", "x2_mean", "b_mean", "parity",
        "psi_q", "delta_x", "cutoff_used", "converged", "splitting",
    )

    def summary(self) -> dict:
        return {name: getattr(self, name) for name in self.SUMMARY_FIELDS}


def compute_observables(
    p: ModelParams,
    v: np.ndarray,
    M: int,
    frame: str = "original",
    energy: float | None = None,
) -> EDResult:
    """Evaluate ground-state observables of vector ``v`` over the ``(M, p.N)`` basis.

    When ``energy`` is omitted it is computed as ``<v|H|v>``.
    """
    N = p.N
    v = np.asarray(v, dtype=float)
    if N is None or v.shape != ((M + 1) * (N + 1),):
        raise BasisMismatch(f"vector of shape {v.shape} does not match M={M}, N={N}")
    amp = v.reshape(M + 1, N + 1)
    k = np.arange(M + 1, dtype=float)
    weights = np.einsum("km,km->k", amp, amp)
    spin_weights = np.einsum("km,km->m", amp, amp)

    num = float(weights @ k)
    lower1 = float(np.einsum("km,km->k", amp[:-1], amp[1:]) @ np.sqrt(k[1:]))  # <b>
    lower2 = (
        float(np.einsum("km,km->k", amp[:-2], amp[2:]) @ np.sqrt(k[1:-1] * k[2:]))
        if M >= 2 else 0.0
    )  # <b^2>
    jz = float(spin_weights @ (np.arange(N + 1) - N / 2))
    parity = float(basis_parity(M, N) @ (v * v))

    if frame == "dressed":
        r = dressed_frame(p).r_n
        if r is None:
            raise UnstableRegime("dressed observables need s > 0")
        n_b = math.cosh(2 * r) * num + math.sinh(r) ** 2 + math.sinh(2 * r) * lower2
        scale = math.exp(r)
    elif frame == "original":
        n_b, scale = num, 1.0
    else:
        raise ValueError(f"frame must be one of {FRAMES}, got {frame!r}")

    # x = scale (c + c^dag)/sqrt(2) with c the frame's boson
    x_mean = scale * math.sqrt(2.0) * lower1
    x2_mean = scale**2 * (2.0 * num + 1.0 + 2.0 * lower2) / 2.0
    b_mean = scale * lower1

    if energy is None:
        Hcsr = build_hamiltonian(p, M, frame).to_csr()
        energy = float(v @ (Hcsr @ v))
    s = dressed_frame(p).s
    return EDResult(
        ground_energy=float(energy),
        ground_vector=v,
        n_b=float(n_b),
        jz=jz,
        x_mean=x_mean,
        x2_mean=x2_mean,
        b_mean=b_mean,
        parity=parity,
        psi_q=s * p.omega * n_b / (N * p.Omega),
        delta_x=math.sqrt(max(x2_mean - x_mean**2, 0.0)),
        cutoff_used=M,
        frame=frame,
        N=N,
    )


def auto_cutoff(p: ModelParams, frame: str = "dressed") -> int:
    """Initial Fock cutoff from the analytic occupation estimate.

    The original frame uses ``8 (e^{2r} beta^2 + sinh^2 r + 1)``, its mean
    boson number with a generous margin.  In the dressed frame the occupation
    is ``beta^2`` plus Gaussian fluctuations, so the cutoff is that mean plus
    about twelve standard deviations of the number distribution.
    """
    f = dressed_frame(p)
    N = p.N
    obs = ground_observables(p)
    beta2 = (obs.beta or 0.0) ** 2 * N
    if frame == "original":
        return max(16, math.ceil(8 * (math.exp(2 * f.r_n) * beta2 + math.sinh(f.r_n) ** 2 + 1)))

    spec = spectrum(p)
    cap = float(N)  # finite-N fluctuations stay bounded near criticality
    if spec.omega_minus > 1e-12:
        c2 = math.cos(spec.theta) ** 2
        var_x = 0.5 * f.omega_n * (c2 / spec.omega_minus + (1 - c2) / spec.omega_plus)
        var_p = 0.5 * (c2 * spec.omega_minus + (1 - c2) * spec.omega_plus) / f.omega_n
        var_x, var_p = min(var_x, cap), min(var_p, cap)
    else:
        var_x = var_p = cap
    fluct = max(0.0, 0.5 * (var_x + var_p - 1.0))
    width = math.sqrt(2.0 * beta2 * var_x) + var_x + var_p
    return max(16, math.ceil(beta2 + fluct + 12.0 * width + 16))


def _pad(vec: np.ndarray, M_old: int, M_new: int, N: int) -> np.ndarray:
    out = np.zeros((M_new + 1, N + 1))
    out[: M_old + 1] = vec.reshape(M_old + 1, N + 1)
    return out.ravel()


def converge_cutoff(p: ModelParams, cfg: EDConfig = EDConfig()) -> EDResult:
    """Ground state with the Fock cutoff grown until ``<b^dag b>`` settles.

    Each step multiplies ``M`` by ``cfg.cutoff_growth`` (capped at
    ``cfg.max_cutoff``) and stops once the relative change of ``n_b`` between
    the last two cutoffs is at most ``cfg.cutoff_tol``.  Hitting the ceiling
    first returns the last result with ``converged=False`` and emits a
    :class:`CutoffCeilingWarning`.

    Raises
    ------
    UnstableRegime
        When ``s <= 0`` or the point is classified Unstable.
    """
    if p.N is None:
        raise ValueError("converge_cutoff needs a finite N")
    f = dressed_frame(p)
    if f.s <= 0 or classify_phase(p) is PhaseLabel.UNSTABLE:
        raise UnstableRegime(f"s = {f.s!r}: Hamiltonian is unbounded below")

    M = cfg.fock_cutoff if cfg.fock_cutoff is not None else auto_cutoff(p, cfg.frame)
    M = max(1, min(M, cfg.max_cutoff))
    previous, warm = None, None
    while True:
        H = build_hamiltonian(p, M, cfg.frame, cfg.max_dim)
        pair = ground_eigenpair(H, cfg, v0=warm)
        result = compute_observables(p, pair.vector, M, cfg.frame, energy=pair.energy)
        result = replace(result, splitting=pair.splitting)
        if previous is not None:
            change = abs(result.n_b - previous.n_b) / max(abs(previous.n_b), 1e-12)
            if change <= cfg.cutoff_tol:
                return replace(result, converged=True)
        if M >= cfg.max_cutoff:
            warnings.warn(
                f"cutoff ceiling {cfg.max_cutoff} reached before n_b converged",
                CutoffCeilingWarning,
                stacklevel=2,
            )
            return result
        M_next = min(cfg.max_cutoff, max(M + 1, math.ceil(M * cfg.cutoff_growth)))
        warm = _pad(pair.vector + pair.partner_vector, M, M_next, p.N)
        previous, M = result, M_next
