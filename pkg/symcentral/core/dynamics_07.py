"""07 - Dynamical certification of central configurations.

Fixed-step RK4 on  x_i'' = (1/m_i) dU/dx_i, which for exponent a is

    x_i'' = -a * sum_{j != i} m_j (x_i - x_j) / r_ij^(a+2)

Two certificates are built on it:

  homothetic  - release from rest; the shape, rescaled to I = 1, must not
                change while the configuration collapses
  rotation    - rigid rotation with omega^2 = a U / I about the barycenter;
                the configuration must keep its shape and size

The homothetic window is capped at a fraction of the analytic collapse time
    t_c = sqrt(I / (2U)) * B(1/2 + 1/a, 1/2) / a
which is (pi/2) sqrt(I / (2U)) for the Newtonian exponent.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.distance import pdist
from scipy.special import beta

from symcentral.config import get_config, get_section
from symcentral.core.nbody_03 import (
    Configuration, center, config_distance, inertia_matrix, moment_of_inertia,
    normalize_inertia, potential,
)
from symcentral.utils.errors import CollisionAbort, InvalidConfiguration, SymCentralError
from symcentral.utils.io_utils import write_csv

logger = logging.getLogger(__name__)

__all__ = [
    'Trajectory', 'DeviationReport', 'accelerations', 'energy', 'integrate',
    'collapse_time', 'rotation_velocities', 'homothetic_report', 'homothetic_test',
    'rotation_report', 'rotation_test', 'certify_all', 'write_trajectory_csv',
]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled RK4 solution.

    ``positions`` and ``velocities`` have shape (samples, n, d); ``energy`` is
    the total energy at each sample.
    """
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    energy: np.ndarray
    masses: np.ndarray
    exponent: float = 1.0
    dt: float = 0.0

    @property
    def n_samples(self) -> int:
        return len(self.times)

    @property
    def energy_drift(self) -> float:
        """max |E(t) - E(0)| / |E(0)| (absolute when E(0) = 0)."""
        e0 = float(self.energy[0])
        gap = float(np.max(np.abs(self.energy - e0)))
        return gap / abs(e0) if e0 != 0.0 else gap

    @property
    def momentum_drift(self) -> float:
        P = np.einsum('i,tik->tk', self.masses, self.velocities)
        return float(np.max(np.linalg.norm(P - P[0], axis=1)))

    def configuration(self, k: int) -> Configuration:
        return Configuration(self.positions[k], self.masses)

    def rows(self) -> List[Dict]:
        n, d = self.positions.shape[1:]
        out = []
        for k, t in enumerate(self.times):
            row = {'t': float(t)}
            for i in range(n):
                for c in range(d):
                    row[f"x{i + 1}_{c + 1}"] = float(self.positions[k, i, c])
            for i in range(n):
                for c in range(d):
                    row[f"v{i + 1}_{c + 1}"] = float(self.velocities[k, i, c])
            row['E'] = float(self.energy[k])
            out.append(row)
        return out


@dataclass
class DeviationReport:
    """Outcome of a homothetic or rotation certificate."""
    mode: str
    max_deviation: float
    t_end: float
    dt: float
    steps: int
    energy_drift: float
    momentum_drift: float
    collapse_time: Optional[float] = None
    omega: Optional[float] = None

    def to_dict(self) -> Dict:
        out = {
            'mode': self.mode,
            'max_deviation': self.max_deviation,
            't_end': self.t_end,
            'dt': self.dt,
            'steps': self.steps,
            'energy_drift': self.energy_drift,
            'momentum_drift': self.momentum_drift,
        }
        if self.collapse_time is not None:
            out['collapse_time'] = self.collapse_time
        if self.omega is not None:
            out['omega'] = self.omega
        return out


# --- equations of motion -------------------------------------------------

def _acceleration(x: np.ndarray, m: np.ndarray, exponent: float) -> Tuple[np.ndarray, float]:
    """Accelerations and the smallest pair distance at positions x."""
    diff = x[:, None, :] - x[None, :, :]
    r = np.sqrt(np.sum(diff ** 2, axis=2))
    np.fill_diagonal(r, np.inf)
    coef = -exponent * m[None, :] / r ** (exponent + 2)
    return np.einsum('ij,ijk->ik', coef, diff), float(np.min(r)) if len(m) > 1 else math.inf


def _energy(x: np.ndarray, v: np.ndarray, m: np.ndarray, exponent: float) -> float:
    kinetic = 0.5 * float(np.sum(m * np.sum(v ** 2, axis=1)))
    if len(m) < 2:
        return kinetic
    i, j = np.triu_indices(len(m), k=1)
    return kinetic - float(np.sum(m[i] * m[j] / pdist(x) ** exponent))


def accelerations(C: Configuration, exponent: float = 1.0) -> np.ndarray:
    """(n, d) array of grad_i U / m_i."""
    return _acceleration(C.points, C.masses, exponent)[0]


def energy(C: Configuration, velocities, exponent: float = 1.0) -> float:
    """Kinetic minus potential energy."""
    return _energy(C.points, np.asarray(velocities, dtype=float), C.masses, exponent)


def _partial(times, xs, vs, es, m, exponent, h) -> Trajectory:
    return Trajectory(np.array(times), np.array(xs), np.array(vs), np.array(es), m, exponent, h)


def integrate(C: Configuration, velocities, t_end: float, dt: float,
              exponent: float = 1.0, collision_radius: Optional[float] = None,
              record_every: int = 1) -> Trajectory:
    """Fixed-step RK4 from (C, velocities) over [0, t_end].

    The step is t_end / ceil(t_end / dt), so the last sample lands on t_end.

    Args:
        C: Initial positions and masses.
        velocities: (n, d) initial velocities.
        t_end: Final time (>= 0).
        dt: Largest allowed step (> 0).
        exponent: Potential exponent a.
        collision_radius: Abort distance; defaults to dynamics.collision_radius.
        record_every: Keep every k-th step (the last step is always kept).

    Raises:
        CollisionAbort: if two bodies come within ``collision_radius``; the
            exception carries the abort time and the trajectory so far.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not t_end >= 0:
        raise ValueError(f"t_end must be non-negative, got {t_end}")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    x = C.points.copy()
    v = np.array(velocities, dtype=float)
    if v.shape != x.shape:
        raise ValueError(f"Velocities of shape {v.shape} for positions of shape {x.shape}")
    m = C.masses.copy()
    if collision_radius is None:
        collision_radius = float(get_section('dynamics').get('collision_radius', 1e-6))

    steps = int(math.ceil(t_end / dt - 1e-9)) if t_end > 0 else 0
    h = t_end / steps if steps else dt
    times, xs, vs, es = [0.0], [x.copy()], [v.copy()], [_energy(x, v, m, exponent)]

    def acc(pos, t):
        a, rmin = _acceleration(pos, m, exponent)
        if rmin < collision_radius:
            raise CollisionAbort(
                f"Bodies within {rmin:.3e} of each other at t={t:.6g}",
                time=t, trajectory=_partial(times, xs, vs, es, m, exponent, h),
            )
        return a

    for k in range(1, steps + 1):
        t0 = (k - 1) * h
        k1x, k1v = v, acc(x, t0)
        k2x, k2v = v + 0.5 * h * k1v, acc(x + 0.5 * h * k1x, t0 + 0.5 * h)
        k3x, k3v = v + 0.5 * h * k2v, acc(x + 0.5 * h * k2x, t0 + 0.5 * h)
        k4x, k4v = v + h * k3v, acc(x + h * k3x, t0 + h)
        x = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if k % record_every == 0 or k == steps:
            times.append(k * h)
            xs.append(x.copy())
            vs.append(v.copy())
            es.append(_energy(x, v, m, exponent))
    # The end of the last step is checked too
    if steps:
        acc(x, steps * h)
    logger.debug(f"Integrated {steps} RK4 steps of {h:.3e}")
    return _partial(times, xs, vs, es, m, exponent, h)


def write_trajectory_csv(traj: Trajectory, path: Union[str, Path]) -> Path:
    return write_csv(traj.rows(), path)


# --- certificates --------------------------------------------------------

def collapse_time(C: Configuration, exponent: float = 1.0) -> float:
    """Time for a central configuration released from rest to collide."""
    inertia = moment_of_inertia(center(C))
    U = potential(C, exponent)
    return math.sqrt(inertia / (2.0 * U)) * beta(0.5 + 1.0 / exponent, 0.5) / exponent


def _prepared(C: Configuration) -> Configuration:
    return normalize_inertia(center(C))


def _window_defaults(t_end: Optional[float], dt: Optional[float]) -> Tuple[float, float]:
    section = get_section('dynamics')
    t_end = float(section.get('t_end', 0.1)) if t_end is None else float(t_end)
    dt = float(section.get('dt', 1e-4)) if dt is None else float(dt)
    return t_end, dt


def homothetic_report(C: Configuration, t_end: Optional[float] = None,
                      dt: Optional[float] = None, exponent: float = 1.0) -> DeviationReport:
    """Release C (centered, scaled to I = 1) from rest and track its shape.

    Each sample is rescaled to I = 1 and compared with the initial shape by
    config_distance. The window stops at dynamics.collapse_fraction of the
    collapse time.
    """
    t_end, dt = _window_defaults(t_end, dt)
    C0 = _prepared(C)
    t_c = collapse_time(C0, exponent)
    fraction = float(get_section('dynamics').get('collapse_fraction', 0.5))
    window = min(t_end, fraction * t_c)
    if window < t_end:
        logger.info(f"Window shortened to {window:.4g} (collapse at {t_c:.4g})")
    traj = integrate(C0, np.zeros_like(C0.points), window, dt, exponent)
    deviation = max(config_distance(normalize_inertia(center(traj.configuration(k))), C0)
                    for k in range(traj.n_samples))
    return DeviationReport('homothetic', deviation, window, traj.dt, traj.n_samples - 1,
                           traj.energy_drift, traj.momentum_drift, collapse_time=t_c)


def homothetic_test(C: Configuration, t_end: Optional[float] = None,
                    dt: Optional[float] = None, exponent: float = 1.0) -> float:
    return homothetic_report(C, t_end, dt, exponent).max_deviation


def _rotation_generator(C: Configuration) -> np.ndarray:
    """Skew matrix J with J x the pi/2 rotation of x in the configuration's plane."""
    if C.dim == 2:
        return np.array([[0.0, -1.0], [1.0, 0.0]])
    if C.dim == 3:
        data = inertia_matrix(C)
        vals, vecs = np.linalg.eigh(data.S)
        if vals[0] > 1e-9 * max(data.trace, 1e-300):
            raise InvalidConfiguration("Rigid rotation needs a planar configuration")
        a, b, c = vecs[:, 0]
        return np.array([[0.0, -c, b], [c, 0.0, -a], [-b, a, 0.0]])
    raise InvalidConfiguration(f"Rigid rotation is only defined in R^2 and R^3, not R^{C.dim}")


def rotation_velocities(C: Configuration, omega_scale: float = 1.0,
                        exponent: float = 1.0) -> Tuple[np.ndarray, float]:
    """Velocities omega J x_i of a rigid rotation, with omega^2 = a U / I.

    Returns:
        (velocities, omega)
    """
    J = _rotation_generator(C)
    omega = omega_scale * math.sqrt(exponent * potential(C, exponent) / moment_of_inertia(C))
    return omega * C.points @ J.T, omega


def rotation_report(C: Configuration, t_end: Optional[float] = None,
                    dt: Optional[float] = None, exponent: float = 1.0,
                    omega_scale: float = 1.0) -> DeviationReport:
    """Spin C (centered, scaled to I = 1) rigidly and track its shape.

    A central configuration rotates without changing size, so the samples
    are compared with the initial configuration without rescaling.
    """
    t_end, dt = _window_defaults(t_end, dt)
    C0 = _prepared(C)
    v0, omega = rotation_velocities(C0, omega_scale, exponent)
    traj = integrate(C0, v0, t_end, dt, exponent)
    deviation = max(config_distance(traj.configuration(k), C0) for k in range(traj.n_samples))
    return DeviationReport('rotation', deviation, t_end, traj.dt, traj.n_samples - 1,
                           traj.energy_drift, traj.momentum_drift, omega=omega)


def rotation_test(C: Configuration, t_end: Optional[float] = None,
                  dt: Optional[float] = None, exponent: float = 1.0,
                  omega_scale: float = 1.0) -> float:
    return rotation_report(C, t_end, dt, exponent, omega_scale).max_deviation


def certify_all(configs: Sequence[Configuration], mode: str = 'homothetic',
                t_end: Optional[float] = None, dt: Optional[float] = None,
                exponent: float = 1.0, workers: Optional[int] = None) -> List[Optional[DeviationReport]]:
    """Run one certificate per configuration in a thread pool.

    Failed runs are logged and left as None in the returned list.
    """
    if mode not in ('homothetic', 'rotation'):
        raise ValueError(f"Unknown mode {mode!r}")
    report = homothetic_report if mode == 'homothetic' else rotation_report
    workers = get_config().resolve_workers(workers)
    results: List[Optional[DeviationReport]] = [None] * len(configs)
    failures = 0
    with ThreadPoolExecutor(max_workers=max(1, min(workers, len(configs) or 1))) as executor:
        futures = {executor.submit(report, C, t_end, dt, exponent): i
                   for i, C in enumerate(configs)}
        for future in as_completed(futures):
            i = futures[future]
            try:
                results[i] = future.result()
                logger.debug(f"OK   config {i}: deviation={results[i].max_deviation:.2e}")
            except SymCentralError as e:
                failures += 1
                logger.warning(f"FAIL config {i}: {type(e).__name__}: {e}")
    logger.info(f"Done with {failures}/{len(configs)} failures.")
    return results
