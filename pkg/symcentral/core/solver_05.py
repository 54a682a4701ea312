"""05 - Central configurations of a symmetric ansatz.

Everything runs in the ansatz's shape coordinates y on the sphere {I(y) = 1}:

  minimize              - projected-gradient descent in the mass metric with
                          Armijo backtracking and the rescaling retraction,
                          then Newton on the Lagrange system; multi-start,
                          lowest U kept
  find_critical_points  - damped Newton from many random stratum points plus
                          a few descents; roots classified by the Hessian of
                          U - lambda I on the tangent space of the sphere
  polish                - Newton from a given point (used by continuation)

When the sphere is a pair of points (one shape coordinate) the candidates are
evaluated directly. Starts run in a thread pool; each owns the RNG stream
SeedSequence([seed, start]) and results are merged in a scheduling-independent
order. A start that runs into a collision is redrawn from
SeedSequence([seed, start, attempt]) up to ``collision_retries`` times before it
counts as a failure.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, fields
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigh, null_space

from symcentral.config import get_config, get_section
from symcentral.core.groups_01 import centralizer_rotations
from symcentral.core.nbody_03 import (
    Configuration, act, central_residual, config_distance, configurations_match,
    edge_ratio, fingerprint, min_separation, moment_of_inertia, potential,
)
from symcentral.core.reduction_04 import ReducedFunctional, SymmetricAnsatz
from symcentral.utils.errors import (
    CollisionSingularity, NoConvergence, OrbitCollision, RigidShape, SymCentralError,
)

logger = logging.getLogger(__name__)


@dataclass
class SolveOptions:
    """Solver tolerances and limits; see the ``solver`` config section."""
    tol_grad: float = 1e-10
    max_iters: int = 5000
    starts: int = 64
    seed: int = 0
    min_separation: float = 1e-6
    newton_tol: float = 1e-12
    zero_eig_tol: float = 1e-6
    armijo_shrink: float = 0.5
    armijo_c: float = 1e-4
    initial_step: float = 1.0
    newton_switch: float = 1e-4
    newton_max_iters: int = 100
    census_starts: int = 256
    dedup_tol: float = 1e-6
    collision_retries: int = 4
    workers: int = 1
    exponent: Optional[float] = None

    def __post_init__(self):
        for name in ('tol_grad', 'min_separation', 'newton_tol', 'zero_eig_tol',
                     'armijo_c', 'initial_step', 'newton_switch', 'dedup_tol'):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0 < self.armijo_shrink < 1:
            raise ValueError(f"armijo_shrink must lie in (0, 1), got {self.armijo_shrink}")
        if self.starts < 1 or self.census_starts < 1:
            raise ValueError("starts and census_starts must be >= 1")
        if self.max_iters < 0 or self.newton_max_iters < 1:
            raise ValueError("Iteration limits must be positive")
        if self.collision_retries < 0:
            raise ValueError(f"collision_retries must be >= 0, got {self.collision_retries}")
        if self.exponent is not None and not self.exponent > 0:
            raise ValueError(f"exponent must be positive, got {self.exponent}")

    @classmethod
    def from_config(cls, **overrides) -> 'SolveOptions':
        """Options from the ``solver`` config section; non-None ``overrides`` win."""
        config = get_config()
        section = get_section('solver')
        known = {f.name for f in fields(cls)}
        values = {k: v for k, v in section.items() if k in known}
        values['workers'] = config.resolve_workers(section.get('workers'))
        values['seed'] = config.default_seed()
        for k, v in overrides.items():
            if k not in known:
                raise TypeError(f"Unknown solver option {k!r}")
            if v is not None:
                values[k] = v
        if values.get('workers') is not None:
            values['workers'] = config.resolve_workers(values['workers'])
        return cls(**values)


@dataclass(frozen=True, eq=False)
class CriticalPoint:
    """A central configuration at I = 1 with its Morse data."""
    configuration: Configuration
    U: float
    lam: float
    residual: float
    morse_index: int
    null_count: int
    kind: str
    shape: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    start: int = -1

    @property
    def edge_ratio(self) -> float:
        return edge_ratio(self.configuration)

    def to_dict(self) -> Dict:
        C = self.configuration
        return {
            'points': C.points.tolist(),
            'masses': C.masses.tolist(),
            'U': self.U,
            'lambda': self.lam,
            'residual': self.residual,
            'morse_index': self.morse_index,
            'null_count': self.null_count,
            'kind': self.kind,
            'edge_ratio': self.edge_ratio,
            'inertia': moment_of_inertia(C),
        }


@dataclass
class Census:
    """Distinct critical points found by a multi-start Newton search."""
    distinct: List[CriticalPoint]
    starts_used: int
    converged_count: int
    failures: int

    @property
    def minima(self) -> List[CriticalPoint]:
        return [c for c in self.distinct if c.morse_index == 0]

    @property
    def saddles(self) -> List[CriticalPoint]:
        return [c for c in self.distinct if c.morse_index > 0]

    def to_dict(self) -> Dict:
        return {
            'starts_used': self.starts_used,
            'converged_count': self.converged_count,
            'failures': self.failures,
            'count': len(self.distinct),
            'solutions': [c.to_dict() for c in self.distinct],
        }


# --- single-start building blocks ----------------------------------------

def _lagrange(g: np.ndarray, n: np.ndarray) -> Tuple[float, float]:
    """Least-squares multiplier and relative residual of g = lambda n."""
    lam = float(g @ n) / float(n @ n)
    gnorm = float(np.linalg.norm(g))
    if gnorm == 0.0:
        return lam, 0.0
    return lam, float(np.linalg.norm(g - lam * n)) / gnorm


def _descend(F: ReducedFunctional, y: np.ndarray, opts: SolveOptions) -> np.ndarray:
    """Armijo projected-gradient descent on {I = 1} in the mass metric Q."""
    chol = cho_factor(F.Q)
    U, g = F.value_and_grad(y)
    step = opts.initial_step
    for it in range(opts.max_iters):
        _, rel = _lagrange(g, F.grad_inertia(y))
        if rel < opts.newton_switch:
            logger.debug(f"Descent reached the Newton switch after {it} iterations")
            return y
        p = cho_solve(chol, g)
        pg = p - float(g @ y) * y
        slope = float(g @ pg)
        if slope <= 0.0:
            return y
        t = min(opts.initial_step, 2.0 * step)
        accepted = False
        for _ in range(60):
            try:
                y_t = F.retract(y - t * pg)
                U_t, g_t = F.value_and_grad(y_t)
            except SymCentralError:
                t *= opts.armijo_shrink
                continue
            if U_t <= U - opts.armijo_c * t * slope:
                accepted = True
                break
            t *= opts.armijo_shrink
        if not accepted:
            logger.debug(f"Line search stalled at iteration {it}")
            return y
        y, U, g, step = y_t, U_t, g_t, t
        if min_separation(F.configuration(y)) < opts.min_separation:
            raise CollisionSingularity("Descent approached a collision")
    return y


def _newton(F: ReducedFunctional, y: np.ndarray, opts: SolveOptions,
            max_iters: Optional[int] = None) -> Tuple[np.ndarray, float]:
    """Damped Newton on grad U - lambda grad I = 0, I = 1; returns (y, lambda)."""
    y = F.retract(y)
    max_iters = opts.newton_max_iters if max_iters is None else max_iters
    U, g = F.value_and_grad(y)
    n = F.grad_inertia(y)
    lam, rel = _lagrange(g, n)
    for _ in range(max_iters):
        if rel <= opts.newton_tol:
            break
        HU, HI = F.hessians(y)
        k = len(y)
        jac = np.zeros((k + 1, k + 1))
        jac[:k, :k] = HU - lam * HI
        jac[:k, k] = -n
        jac[k, :k] = n
        rhs = -np.concatenate([g - lam * n, [F.inertia(y) - 1.0]])
        delta = np.linalg.lstsq(jac, rhs, rcond=None)[0][:k]
        base = float(np.linalg.norm(g - lam * n))
        t = 1.0
        accepted = False
        for _ in range(30):
            try:
                y_t = F.retract(y + t * delta)
                U_t, g_t = F.value_and_grad(y_t)
            except SymCentralError:
                t *= 0.5
                continue
            n_t = F.grad_inertia(y_t)
            lam_t = float(g_t @ n_t) / float(n_t @ n_t)
            if np.linalg.norm(g_t - lam_t * n_t) <= (1.0 - 1e-4 * t) * base:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        y, g, n = y_t, g_t, n_t
        lam, rel = _lagrange(g, n)
    return y, lam


def _morse(F: ReducedFunctional, y: np.ndarray, lam: float,
           opts: SolveOptions) -> Tuple[int, int, np.ndarray]:
    """Morse index, null count and tangent eigenvalues of U - lambda I at y."""
    HU, HI = F.hessians(y)
    n = F.grad_inertia(y)
    T = null_space(n[None, :])
    if T.shape[1] == 0:
        return 0, 0, np.zeros(0)
    H = T.T @ (HU - lam * HI) @ T
    ev = eigh(0.5 * (H + H.T), eigvals_only=True)
    tol = opts.zero_eig_tol * max(1.0, float(np.max(np.abs(ev))))
    return int(np.sum(ev < -tol)), int(np.sum(np.abs(ev) <= tol)), ev


def _critical_point(F: ReducedFunctional, y: np.ndarray, opts: SolveOptions,
                    start: int, tangent: bool = True) -> CriticalPoint:
    C = F.configuration(y)
    lam, residual = central_residual(C, F.exponent)
    if not residual <= opts.tol_grad:
        raise NoConvergence(f"Residual {residual:.3e} above tol_grad {opts.tol_grad:.1e}")
    if min_separation(C) < opts.min_separation:
        raise CollisionSingularity("Solution closer than min_separation to a collision")
    if tangent:
        index, nulls, ev = _morse(F, y, lam, opts)
    else:
        index, nulls, ev = 0, 0, np.zeros(0)
    if index > 0:
        kind = 'saddle'
    elif nulls > 0:
        kind = 'degenerate'
    else:
        kind = 'minimum'
    return CriticalPoint(C, potential(C, F.exponent), lam, residual, index, nulls, kind,
                         y.copy(), ev, start)


def _start_shape(A: SymmetricAnsatz, F: ReducedFunctional, seed: int, index: int,
                 attempt: int = 0) -> np.ndarray:
    r = A.initial_coords() if index == 0 and attempt == 0 else None
    if r is None:
        entropy = [seed, index] if attempt == 0 else [seed, index, attempt]
        rng = np.random.default_rng(np.random.SeedSequence(entropy))
        r = A.random_coords(rng)
    return F.retract(A.shape_from_coords(r))


def _run_start(A: SymmetricAnsatz, F: ReducedFunctional, opts: SolveOptions,
               index: int, mode: str) -> CriticalPoint:
    for attempt in range(opts.collision_retries + 1):
        try:
            y = _start_shape(A, F, opts.seed, index, attempt)
            if mode == 'descent':
                y = _descend(F, y, opts)
            y, _ = _newton(F, y, opts)
            return _critical_point(F, y, opts, index)
        except (CollisionSingularity, OrbitCollision) as e:
            if attempt == opts.collision_retries:
                raise
            logger.debug(f"Start {index} attempt {attempt}: {type(e).__name__}; resampling")


def _run_starts(A: SymmetricAnsatz, F: ReducedFunctional, opts: SolveOptions,
                jobs: Sequence[Tuple[int, str]]) -> Tuple[List[CriticalPoint], int]:
    results: Dict[int, CriticalPoint] = {}
    failures = 0
    workers = max(1, min(int(opts.workers or 1), len(jobs)))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(_run_start, A, F, opts, i, mode): i for i, mode in jobs}
        for future in as_completed(futures):
            i = futures[future]
            try:
                cp = future.result()
            except SymCentralError as e:
                failures += 1
                logger.debug(f"FAIL start {i}: {type(e).__name__}: {e}")
                continue
            results[i] = cp
            logger.debug(f"OK   start {i}: U={cp.U:.12g} residual={cp.residual:.2e} "
                         f"index={cp.morse_index}")
    logger.info(f"Done with {failures}/{len(jobs)} failures.")
    return [results[i] for i in sorted(results)], failures


def _rigid_candidates(A: SymmetricAnsatz, F: ReducedFunctional,
                      opts: SolveOptions) -> List[CriticalPoint]:
    """Both points of a one-coordinate sphere, kept when they lie in the ansatz's components."""
    y0 = np.array([1.0 / math.sqrt(float(F.Q[0, 0]))])
    out = []
    for sign in (1.0, -1.0):
        try:
            out.append(_critical_point(F, sign * y0, opts, start=0, tangent=False))
        except SymCentralError as e:
            logger.debug(f"SKIP y={sign * y0[0]:+.6g}: {type(e).__name__}: {e}")
    return out


def _functional(A: SymmetricAnsatz, opts: SolveOptions) -> ReducedFunctional:
    F = ReducedFunctional(A, opts.exponent)
    if F.n == 0:
        raise RigidShape(f"{A!r} has no shape coordinates")
    return F


# --- dedup ---------------------------------------------------------------

def _sort_key(cp: CriticalPoint) -> tuple:
    return (round(cp.U, 9), tuple(np.round(fingerprint(cp.configuration).ravel(), 9)), cp.start)


def _same(c1: CriticalPoint, c2: CriticalPoint, rotations, tol: float) -> bool:
    C1, C2 = c1.configuration, c2.configuration
    if rotations is None:
        return config_distance(C1, C2) <= tol
    return any(configurations_match(act(R, C1), C2, tol) for R in rotations)


def dedup(points: Sequence[CriticalPoint], rotations, tol: float) -> List[CriticalPoint]:
    """Distinct entries in sort order; ``rotations`` is a finite centralizer or None."""
    distinct: List[CriticalPoint] = []
    for cp in sorted(points, key=_sort_key):
        if not any(_same(cp, other, rotations, tol) for other in distinct):
            distinct.append(cp)
    return distinct


# --- public API ----------------------------------------------------------

def minimize(A: SymmetricAnsatz, opts: Optional[SolveOptions] = None) -> CriticalPoint:
    """Lowest-U central configuration of the ansatz over ``opts.starts`` starts.

    Raises:
        RigidShape: if the ansatz has no shape coordinates.
        NoConvergence: if no start produced a minimum.
    """
    opts = opts or SolveOptions.from_config()
    F = _functional(A, opts)
    if F.n == 1:
        candidates = _rigid_candidates(A, F, opts)
    else:
        jobs = [(i, 'descent') for i in range(opts.starts)]
        found, _ = _run_starts(A, F, opts, jobs)
        candidates = [cp for cp in found if cp.morse_index == 0]
    if not candidates:
        raise NoConvergence(f"No start converged to a minimum for {A!r}")
    best_U = min(cp.U for cp in candidates)
    ties = [cp for cp in candidates if cp.U <= best_U + 1e-9 * max(1.0, abs(best_U))]
    best = min(ties, key=_sort_key)
    logger.info(f"Minimum U={best.U:.12g} residual={best.residual:.2e} from start {best.start}")
    return best


def find_critical_points(A: SymmetricAnsatz, opts: Optional[SolveOptions] = None) -> Census:
    """Census of distinct critical points from ``opts.census_starts`` Newton starts.

    A few descent starts are added so minima with small basins are not missed.
    Entries are identified when a rotation commuting with the group maps one
    onto the other; without a finite centralizer, by fingerprint distance.
    """
    opts = opts or SolveOptions.from_config()
    F = _functional(A, opts)
    rotations = centralizer_rotations(A.group)
    if F.n == 1:
        found = _rigid_candidates(A, F, opts)
        return Census(dedup(found, rotations, opts.dedup_tol), 2, len(found), 2 - len(found))
    n_descent = min(8, opts.starts)
    jobs = [(i, 'descent') for i in range(n_descent)]
    jobs += [(i, 'newton') for i in range(n_descent, n_descent + opts.census_starts)]
    found, failures = _run_starts(A, F, opts, jobs)
    distinct = dedup(found, rotations, opts.dedup_tol)
    logger.info(f"Done. {len(found)} converged, {len(distinct)} distinct.")
    return Census(distinct, len(jobs), len(found), failures)


def polish(A: SymmetricAnsatz, coords, opts: Optional[SolveOptions] = None,
           descend: bool = False) -> CriticalPoint:
    """Newton (optionally preceded by descent) from raw reduced coordinates.

    Raises:
        NoConvergence: if the result is not a critical point within tol_grad.
    """
    opts = opts or SolveOptions.from_config()
    F = _functional(A, opts)
    y = F.retract(A.shape_from_coords(np.asarray(coords, dtype=float)))
    if F.n == 1:
        return _critical_point(F, y, opts, start=-1, tangent=False)
    if descend:
        y = _descend(F, y, opts)
    y, _ = _newton(F, y, opts)
    return _critical_point(F, y, opts, start=-1)


def solution_coords(A: SymmetricAnsatz, cp: CriticalPoint) -> np.ndarray:
    """Raw reduced coordinates of a solution of ``A``."""
    return A.coords_from_shape(cp.shape)
