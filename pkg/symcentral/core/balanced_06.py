"""06 - Balanced configurations and the inertia-matrix block structure.

A configuration is balanced when grad_i U + m_i B x_i = 0 for a symmetric
d x d matrix B. Central configurations at I = 1 (exponent 1) have
B = U * Id. solve_balanced finds critical points of U among symmetric lifts
with a prescribed spectrum of S, imposing tr(S^k) = p_k (k = 1..d) through an
augmented Lagrangian and finishing with a Newton step on the KKT system.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares, minimize

from symcentral.config import get_section
from symcentral.core.groups_01 import (
    FiniteGroup, IsotypicDecomposition, isotypic_decomposition,
)
from symcentral.core.nbody_03 import (
    Configuration, grad_potential, inertia_matrix, moment_of_inertia, potential,
)
from symcentral.core.reduction_04 import ReducedFunctional, SymmetricAnsatz, check_symmetric
from symcentral.core.solver_05 import SolveOptions
from symcentral.utils.errors import (
    DegenerateGeometry, InfeasibleSpectrum, InvalidInput, NoConvergence, NotSymmetric,
    SymCentralError, ZeroInertia,
)

logger = logging.getLogger(__name__)

__all__ = [
    'SpectrumTarget', 'BalancedResult', 'SchurReport', 'balanced_residual', 'solve_balanced',
    'isotypic_decomposition', 'schur_check', 'isotypic_inertia',
]


@dataclass(frozen=True, eq=False)
class SpectrumTarget:
    """Target spectrum of S, sorted descending."""
    sigma: np.ndarray

    def __post_init__(self):
        sigma = np.sort(np.asarray(self.sigma, dtype=float).ravel())[::-1].copy()
        if sigma.size == 0 or not np.all(np.isfinite(sigma)):
            raise InvalidInput("Spectrum target must be a non-empty list of numbers")
        if np.any(sigma < 0):
            raise InvalidInput(f"Spectrum target has negative entries: {sigma.tolist()}")
        if not sigma.sum() > 0:
            raise InvalidInput("Spectrum target must have positive trace")
        object.__setattr__(self, 'sigma', sigma)

    @property
    def dim(self) -> int:
        return self.sigma.size

    @property
    def power_sums(self) -> np.ndarray:
        return np.array([np.sum(self.sigma ** k) for k in range(1, self.dim + 1)])

    def error(self, spectrum: np.ndarray) -> float:
        """max_j |spectrum_j - sigma_j| / (1 + p_1)."""
        return float(np.max(np.abs(np.asarray(spectrum) - self.sigma)) / (1.0 + self.sigma.sum()))


@dataclass(frozen=True, eq=False)
class BalancedResult:
    configuration: Configuration
    B: np.ndarray
    residual: float
    spectrum_error: float
    is_central: bool
    degenerate: bool = False
    commutator: float = 0.0
    U: float = float('nan')

    def to_dict(self) -> Dict:
        C = self.configuration
        return {
            'points': C.points.tolist(),
            'masses': C.masses.tolist(),
            'B': self.B.tolist(),
            'residual': self.residual,
            'spectrum_error': self.spectrum_error,
            'is_central': self.is_central,
            'degenerate': self.degenerate,
            'commutator': self.commutator,
            'U': self.U,
            'spectrum': inertia_matrix(C).spectrum.tolist(),
        }


def balanced_residual(C: Configuration, exponent: float = 1.0,
                      target: Optional[SpectrumTarget] = None,
                      strict: bool = False) -> BalancedResult:
    """Least-squares symmetric multiplier B of grad_i U + m_i B x_i = 0.

    When the system is rank-deficient (points in a line through the origin,
    or spanning a proper subspace) the minimal-norm B is returned and
    ``degenerate`` is set; ``is_central`` then asks whether some scalar
    matrix achieves the same residual.

    Raises:
        DegenerateGeometry: on a rank-deficient system when ``strict``.
        ZeroInertia: if I(C) = 0.
    """
    if moment_of_inertia(C) <= 0.0:
        raise ZeroInertia("balanced_residual needs I > 0")
    d = C.dim
    gU = grad_potential(C, exponent)
    pairs = [(a, b) for a in range(d) for b in range(a, d)]
    cols = []
    for a, b in pairs:
        E = np.zeros((d, d))
        E[a, b] = E[b, a] = 1.0
        cols.append((C.masses[:, None] * (C.points @ E.T)).ravel())
    A = np.column_stack(cols)
    rhs = -gU.ravel()
    beta, _, _, sv = np.linalg.lstsq(A, rhs, rcond=None)
    rank = int(np.sum(sv > 1e-9 * sv[0])) if sv.size else 0
    degenerate = rank < len(pairs)
    if degenerate and strict:
        raise DegenerateGeometry(f"Multiplier is not unique (rank {rank} of {len(pairs)})")

    B = np.zeros((d, d))
    for (a, b), v in zip(pairs, beta):
        B[a, b] = B[b, a] = v
    gnorm = float(np.linalg.norm(gU))
    per_body = np.linalg.norm(gU + C.masses[:, None] * (C.points @ B.T), axis=1)
    residual = float(np.max(per_body)) / gnorm if gnorm > 0 else 0.0

    bnorm = float(np.linalg.norm(B))
    scalar_gap = float(np.linalg.norm(B - np.trace(B) / d * np.eye(d)))
    is_central = scalar_gap <= 1e-8 * max(1.0, bnorm)
    if degenerate and not is_central and gnorm > 0:
        col = (C.masses[:, None] * C.points).ravel()
        s = -float(col @ gU.ravel()) / float(col @ col)
        scalar_res = float(np.max(np.linalg.norm(gU + s * C.masses[:, None] * C.points, axis=1)))
        is_central = scalar_res / gnorm <= residual + 1e-8

    S = inertia_matrix(C)
    spectrum_error = target.error(S.spectrum) if target is not None else 0.0
    return BalancedResult(
        C, B, residual, spectrum_error, bool(is_central), degenerate,
        float(np.linalg.norm(B @ S.S - S.S @ B)), potential(C, exponent),
    )


# --- constrained solve ---------------------------------------------------

class _SpectrumProblem:
    """Power-sum constraints c_k(y) = (tr S^k - p_k) / p_1^k in shape coordinates."""

    def __init__(self, A: SymmetricAnsatz, target: SpectrumTarget, exponent: float):
        self.A = A
        self.F = ReducedFunctional(A, exponent)
        self.target = target
        self.p = target.power_sums
        self.scale = np.array([self.p[0] ** k for k in range(1, target.dim + 1)])

    def S(self, y: np.ndarray) -> np.ndarray:
        pts = self.A.points_from_shape(y)
        return (pts.T * self.A.masses) @ pts

    def constraints(self, y: np.ndarray) -> np.ndarray:
        S = self.S(y)
        out = np.empty(self.target.dim)
        Sk = np.eye(S.shape[0])
        for k in range(1, self.target.dim + 1):
            Sk = Sk @ S
            out[k - 1] = (np.trace(Sk) - self.p[k - 1]) / self.scale[k - 1]
        return out

    def jacobian(self, y: np.ndarray) -> np.ndarray:
        """(d, n_y) Jacobian; d tr(S^k) / d x_i = 2k m_i S^(k-1) x_i."""
        pts = self.A.points_from_shape(y)
        S = (pts.T * self.A.masses) @ pts
        rows = []
        Skm1 = np.eye(S.shape[0])
        for k in range(1, self.target.dim + 1):
            dX = 2.0 * k * self.A.masses[:, None] * (pts @ Skm1.T)
            rows.append(self.F.L.T @ dX.ravel() / self.scale[k - 1])
            Skm1 = Skm1 @ S
        return np.array(rows)

    def spectrum_error(self, y: np.ndarray) -> float:
        vals = np.linalg.eigvalsh(self.S(y))[::-1]
        return self.target.error(vals)


def _feasibility(prob: _SpectrumProblem, starts: Sequence[np.ndarray]) -> Tuple[float, np.ndarray]:
    best_err, best_y = math.inf, None
    for y0 in starts:
        res = least_squares(prob.constraints, y0, jac=prob.jacobian,
                            xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=2000)
        err = prob.spectrum_error(res.x)
        if err < best_err:
            best_err, best_y = err, res.x
    return best_err, best_y


def _augmented_lagrangian(prob: _SpectrumProblem, y0: np.ndarray, cfg: Dict) -> Tuple[np.ndarray, np.ndarray]:
    F = prob.F
    mu = np.zeros(prob.target.dim)
    rho = float(cfg.get('al_rho0', 10.0))
    growth = float(cfg.get('al_rho_growth', 10.0))
    y = y0.copy()
    previous = math.inf

    def objective(z, mu, rho):
        try:
            U, g = F.value_and_grad(z)
        except SymCentralError:
            return 1e30, np.zeros_like(z)
        c = prob.constraints(z)
        Jc = prob.jacobian(z)
        return U - mu @ c + 0.5 * rho * c @ c, g - Jc.T @ mu + rho * Jc.T @ c

    for outer in range(int(cfg.get('al_outer_iters', 40))):
        res = minimize(objective, y, args=(mu, rho), jac=True, method='BFGS',
                       options={'gtol': 1e-10, 'maxiter': 2000})
        try:
            F.configuration(res.x)
            y = res.x
        except SymCentralError:
            logger.debug(f"Inner solve {outer} left the stratum; keeping the previous iterate")
        c = prob.constraints(y)
        violation = float(np.max(np.abs(c)))
        if violation <= 1e-12:
            break
        mu = mu - rho * c
        if violation > 0.25 * previous:
            rho *= growth
        previous = violation
    return y, mu


def _kkt_polish(prob: _SpectrumProblem, y: np.ndarray, mu: np.ndarray,
                max_iters: int = 50) -> np.ndarray:
    """Newton on grad U - Jc^T mu = 0, c = 0 with a finite-difference Hessian of the gradient."""
    F = prob.F
    n, m = len(y), len(mu)

    def stationarity(z, mu):
        _, g = F.value_and_grad(z)
        return g - prob.jacobian(z).T @ mu

    def system(z, mu):
        return np.concatenate([stationarity(z, mu), prob.constraints(z)])

    current = system(y, mu)
    for _ in range(max_iters):
        if np.linalg.norm(current) <= 1e-13 * max(1.0, np.linalg.norm(F.value_and_grad(y)[1])):
            break
        h = 1e-6 * max(1.0, float(np.linalg.norm(y)))
        jac = np.zeros((n + m, n + m))
        for j in range(n):
            e = np.zeros(n)
            e[j] = h
            jac[:n, j] = (stationarity(y + e, mu) - stationarity(y - e, mu)) / (2 * h)
        Jc = prob.jacobian(y)
        jac[:n, n:] = -Jc.T
        jac[n:, :n] = Jc
        delta = np.linalg.lstsq(jac, -current, rcond=None)[0]
        t = 1.0
        base = float(np.linalg.norm(current))
        accepted = False
        for _ in range(20):
            try:
                trial = system(y + t * delta[:n], mu + t * delta[n:])
                F.configuration(y + t * delta[:n])
            except SymCentralError:
                t *= 0.5
                continue
            if np.linalg.norm(trial) < base:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        y, mu, current = y + t * delta[:n], mu + t * delta[n:], trial
    return y


def solve_balanced(A: SymmetricAnsatz, target: SpectrumTarget,
                   opts: Optional[SolveOptions] = None,
                   exponent: Optional[float] = None) -> BalancedResult:
    """Critical point of U among lifts of ``A`` whose inertia spectrum is ``target``.

    Raises:
        InvalidInput: if the target has the wrong length.
        InfeasibleSpectrum: if no lift comes within balanced.feasibility_tol of the target.
        NoConvergence: if no start reaches the residual tolerances.
    """
    opts = opts or SolveOptions.from_config()
    cfg = get_section('balanced')
    exponent = exponent if exponent is not None else (opts.exponent or A.exponent)
    if target.dim != A.dim:
        raise InvalidInput(f"Target has {target.dim} eigenvalues, ansatz lives in R^{A.dim}")
    prob = _SpectrumProblem(A, target, exponent)
    if prob.F.n == 0:
        raise InfeasibleSpectrum("Ansatz has no shape coordinates")

    n_starts = int(cfg.get('starts', 8))
    starts = []
    for i in range(n_starts):
        r = A.initial_coords() if i == 0 else None
        if r is None:
            r = A.random_coords(np.random.default_rng(np.random.SeedSequence([opts.seed, i])))
        y = prob.F.retract(A.shape_from_coords(r))
        starts.append(y * math.sqrt(target.sigma.sum()))

    feasibility_tol = float(cfg.get('feasibility_tol', 1e-6))
    best_err, _ = _feasibility(prob, starts)
    if best_err > feasibility_tol:
        raise InfeasibleSpectrum(
            f"Closest lift misses the target spectrum by {best_err:.3e} (tol {feasibility_tol:.1e})"
        )
    logger.debug(f"Feasibility pre-solve reached spectrum error {best_err:.3e}")

    tol = float(cfg.get('residual_tol', 1e-8))

    def run(i: int) -> BalancedResult:
        y, mu = _augmented_lagrangian(prob, starts[i], cfg)
        y = _kkt_polish(prob, y, mu)
        result = balanced_residual(prob.F.configuration(y), exponent, target)
        if result.residual > tol or result.spectrum_error > tol:
            raise NoConvergence(f"residual {result.residual:.2e}, "
                                f"spectrum error {result.spectrum_error:.2e}")
        return result

    results: Dict[int, BalancedResult] = {}
    failures = 0
    workers = max(1, min(int(opts.workers or 1), n_starts))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(run, i): i for i in range(n_starts)}
        for future in as_completed(futures):
            i = futures[future]
            try:
                results[i] = future.result()
                logger.debug(f"OK   start {i}: U={results[i].U:.12g} "
                             f"residual={results[i].residual:.2e}")
            except SymCentralError as e:
                failures += 1
                logger.debug(f"FAIL start {i}: {type(e).__name__}: {e}")
    logger.info(f"Done with {failures}/{n_starts} failures.")
    if not results:
        raise NoConvergence(f"No balanced solve converged for {A!r}")
    ordered = [results[i] for i in sorted(results)]
    return min(ordered, key=lambda r: r.U)


# --- block structure -----------------------------------------------------

@dataclass
class SchurReport:
    commutation_error: float
    off_block_error: float
    blocks: List[Dict] = field(default_factory=list)
    ok: bool = True

    def to_dict(self) -> Dict:
        return {
            'commutation_error': self.commutation_error,
            'off_block_error': self.off_block_error,
            'blocks': self.blocks,
            'ok': self.ok,
        }


def schur_check(G: FiniteGroup, C: Configuration, tol: float = 1e-10) -> SchurReport:
    """Check AS = SA, block-diagonality of S in the isotypic basis and scalar blocks.

    Scalar claims are made only for multiplicity-one blocks of real type. Every
    block also reports the eigenvalues of S restricted to it and their spread
    (``anisotropy``), which is how far a block with multiplicity is from scalar.

    Raises:
        NotSymmetric: if C is not G-symmetric.
    """
    ok, failing = check_symmetric(G, C)
    if not ok:
        raise NotSymmetric(f"Configuration is not invariant under generator {failing}")
    S = inertia_matrix(C).S
    scale = max(1.0, float(np.linalg.norm(S)))
    commutation = max(float(np.linalg.norm(g @ S - S @ g)) for g in G.elements)
    D = isotypic_decomposition(G)
    W = D.basis()
    T = W.T @ S @ W
    mask = np.zeros_like(T, dtype=bool)
    start = 0
    for b in D.blocks:
        mask[start:start + b.dim, start:start + b.dim] = True
        start += b.dim
    off_block = float(np.max(np.abs(T[~mask]), initial=0.0))

    blocks = []
    passed = commutation <= tol * scale and off_block <= tol * scale
    projected = isotypic_inertia(C, D)
    for b, inertia_j in zip(D.blocks, projected):
        Sj = b.basis.T @ S @ b.basis
        ev = np.linalg.eigvalsh(0.5 * (Sj + Sj.T))
        entry = {
            'dim': b.dim, 'irrep_dim': b.irrep_dim, 'multiplicity': b.multiplicity,
            'real_type': b.real_type, 'projected_inertia': inertia_j,
            'eigenvalues': ev.tolist(), 'anisotropy': float(ev[-1] - ev[0]),
        }
        if b.multiplicity == 1 and b.real_type:
            value = float(np.trace(Sj)) / b.dim
            gap = float(np.linalg.norm(Sj - value * np.eye(b.dim)))
            entry.update(scalar=True, value=value, scalar_error=gap)
            passed = passed and gap <= tol * scale
        else:
            entry.update(scalar=None)
        blocks.append(entry)
    return SchurReport(commutation, off_block, blocks, passed)


def isotypic_inertia(C: Configuration, D: IsotypicDecomposition) -> List[float]:
    """Moment of inertia of the projection of C onto each isotypic block."""
    if D.dim != C.dim:
        raise InvalidInput(f"Decomposition of R^{D.dim} does not match R^{C.dim}")
    return [float(np.sum(C.masses * np.sum((C.points @ b.basis) ** 2, axis=1)))
            for b in D.blocks]
