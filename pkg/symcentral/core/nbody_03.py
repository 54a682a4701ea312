"""03 - Configurations and the n-body functionals.

A Configuration is an ordered list of points with positive masses, but all
public comparisons treat it as the unordered set {(x_i, m_i)}.

    U(C) = sum_{i<j} m_i m_j / r_ij^a      (a = exponent, default 1)
    I(C) = sum_i m_i |x_i|^2
    S(C) = sum_i m_i x_i x_i^T             (d x d, trace S = I)

Gradients and the Hessian of U are analytic. Congruence is tested through the
sorted list of (m_i, m_j, r_ij) triples.
"""
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist, pdist

from symcentral.utils.errors import (
    CollisionSingularity, InvalidConfiguration, InvalidInput, SizeMismatch, ZeroInertia,
)
from symcentral.utils.io_utils import read_json, write_csv, write_json

logger = logging.getLogger(__name__)

COLLISION_THRESHOLD = 1e-12


class Configuration:
    """Points in R^d with positive masses.

    Args:
        points: (n, d) array-like of positions.
        masses: n positive masses; a scalar is broadcast.
        labels: Optional per-body text labels (carried through I/O only).

    Raises:
        InvalidConfiguration: for non-positive masses, shape mismatches or
            coincident points.
    """

    __hash__ = None

    def __init__(self, points, masses=1.0, labels: Optional[Sequence[str]] = None):
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(1, -1)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise InvalidConfiguration(f"Expected an (n, d) point array, got shape {pts.shape}")
        m = np.array(masses, dtype=float)
        if m.ndim == 0:
            m = np.full(pts.shape[0], float(m))
        if m.shape != (pts.shape[0],):
            raise InvalidConfiguration(f"{m.size} masses for {pts.shape[0]} points")
        if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(m)):
            raise InvalidConfiguration("Configuration contains non-finite values")
        if np.any(m <= 0):
            raise InvalidConfiguration("All masses must be positive")
        if pts.shape[0] > 1:
            dmin = float(np.min(pdist(pts)))
            if dmin <= 0.0:
                raise InvalidConfiguration("Two bodies occupy the same point")
        if labels is not None and len(labels) != pts.shape[0]:
            raise InvalidConfiguration(f"{len(labels)} labels for {pts.shape[0]} points")
        pts.setflags(write=False)
        m.setflags(write=False)
        self.points = pts
        self.masses = m
        self.labels = list(labels) if labels is not None else None

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    def __len__(self) -> int:
        return self.n

    def scaled(self, factor: float) -> 'Configuration':
        return Configuration(self.points * factor, self.masses, self.labels)

    def matches(self, other: 'Configuration', tol: float = 1e-9) -> bool:
        """Unordered, mass-preserving equality within ``tol`` (relative to the extent)."""
        return configurations_match(self, other, tol)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return configurations_match(self, other)

    def __repr__(self) -> str:
        return f"Configuration(n={self.n}, dim={self.dim}, total_mass={self.total_mass:g})"

    # I/O

    def to_dict(self) -> Dict:
        out = {
            'dim': self.dim,
            'bodies': [{'x': x.tolist(), 'm': float(m)} for x, m in zip(self.points, self.masses)],
        }
        if self.labels is not None:
            out['labels'] = list(self.labels)
        return out

    @classmethod
    def from_dict(cls, data: Dict) -> 'Configuration':
        """Read ``{dim, bodies: [{x, m}], labels?}``, ``{points, masses}`` or
        ``{group, orbits: [{at, m}]}``."""
        if not isinstance(data, dict):
            raise InvalidInput("Configuration JSON must be an object")
        if 'orbits' in data:
            return _from_orbits(data)
        if 'points' in data:
            return cls(data['points'], data.get('masses', 1.0), data.get('labels'))
        try:
            bodies = data['bodies']
            points = [b['x'] for b in bodies]
            masses = [b.get('m', 1.0) for b in bodies]
        except (KeyError, TypeError) as e:
            raise InvalidInput(f"Malformed configuration JSON: missing {e}")
        if not bodies:
            raise InvalidConfiguration("Configuration has no bodies")
        C = cls(points, masses, data.get('labels'))
        if 'dim' in data and int(data['dim']) != C.dim:
            raise InvalidConfiguration(f"dim={data['dim']} but points are {C.dim}-dimensional")
        return C


def _from_orbits(data: Dict) -> Configuration:
    from symcentral.core.groups_01 import group_from_spec
    from symcentral.core.strata_02 import orbit

    if 'group' not in data:
        raise InvalidInput("Orbit-generated configuration needs a 'group'")
    G = group_from_spec(data['group'])
    points, masses = [], []
    for spec in data['orbits']:
        try:
            x = np.asarray(spec['at'], dtype=float)
        except (KeyError, TypeError, ValueError):
            raise InvalidInput(f"Orbit entry {spec!r} needs an 'at' point")
        if x.shape != (G.dim,):
            raise InvalidConfiguration(f"Orbit point {x.tolist()} is not in R^{G.dim}")
        pts = orbit(G, x)
        points.extend(pts)
        masses.extend([float(spec.get('m', 1.0))] * len(pts))
    return Configuration(np.array(points), masses)


# --- functionals ---------------------------------------------------------

def _pairs(C: Configuration) -> Tuple[np.ndarray, np.ndarray]:
    """Condensed pair distances and mass products, with the collision check."""
    r = pdist(C.points)
    if r.size and float(np.min(r)) < COLLISION_THRESHOLD:
        raise CollisionSingularity(f"Bodies at distance {float(np.min(r)):.3e}")
    i, j = np.triu_indices(C.n, k=1)
    return r, C.masses[i] * C.masses[j]


def potential(C: Configuration, exponent: float = 1.0) -> float:
    """U = sum over unordered pairs of m_i m_j / r_ij^exponent.

    Raises:
        CollisionSingularity: if two bodies are closer than 1e-12.
    """
    r, mm = _pairs(C)
    return float(np.sum(mm / r ** exponent))


def moment_of_inertia(C: Configuration) -> float:
    return float(np.sum(C.masses * np.sum(C.points ** 2, axis=1)))


def _differences(C: Configuration) -> Tuple[np.ndarray, np.ndarray]:
    diff = C.points[:, None, :] - C.points[None, :, :]
    r = np.sqrt(np.sum(diff ** 2, axis=2))
    np.fill_diagonal(r, np.inf)
    if C.n > 1 and float(np.min(r)) < COLLISION_THRESHOLD:
        raise CollisionSingularity(f"Bodies at distance {float(np.min(r)):.3e}")
    return diff, r


def grad_potential(C: Configuration, exponent: float = 1.0) -> np.ndarray:
    """(n, d) array of dU/dx_i = -a sum_j m_i m_j (x_i - x_j) / r_ij^(a+2)."""
    diff, r = _differences(C)
    mm = np.outer(C.masses, C.masses)
    coef = -exponent * mm / r ** (exponent + 2)
    return np.einsum('ij,ijk->ik', coef, diff)


def grad_inertia(C: Configuration) -> np.ndarray:
    return 2.0 * C.masses[:, None] * C.points


def hessian_potential(C: Configuration, exponent: float = 1.0) -> np.ndarray:
    """(nd, nd) Hessian of U in the flattened coordinates (x_1, ..., x_n)."""
    n, d = C.n, C.dim
    diff, r = _differences(C)
    H = np.zeros((n, d, n, d))
    eye = np.eye(d)
    for i in range(n):
        for j in range(i + 1, n):
            u = diff[i, j]
            rij = r[i, j]
            block = (-exponent * C.masses[i] * C.masses[j] * rij ** (-exponent - 2)
                     * (eye - (exponent + 2) * np.outer(u, u) / rij ** 2))
            H[i, :, i, :] += block
            H[j, :, j, :] += block
            H[i, :, j, :] -= block
            H[j, :, i, :] -= block
    return H.reshape(n * d, n * d)


def hessian_inertia(C: Configuration) -> np.ndarray:
    return np.diag(2.0 * np.repeat(C.masses, C.dim))


def barycenter(C: Configuration) -> np.ndarray:
    return C.masses @ C.points / C.total_mass


def center(C: Configuration) -> Configuration:
    """Translated copy with barycenter at the origin."""
    return Configuration(C.points - barycenter(C), C.masses, C.labels)


def act(g, C: Configuration) -> Configuration:
    """g . C; masses travel with their points."""
    g = np.asarray(g, dtype=float)
    if g.shape != (C.dim, C.dim):
        raise InvalidInput(f"Matrix of shape {g.shape} cannot act on R^{C.dim}")
    return Configuration(C.points @ g.T, C.masses, C.labels)


def normalize_inertia(C: Configuration) -> Configuration:
    """Rescale about the origin to I = 1.

    Raises:
        ZeroInertia: if every body sits at the origin.
    """
    inertia = moment_of_inertia(C)
    if inertia <= 0.0:
        raise ZeroInertia("Configuration has zero moment of inertia")
    return C.scaled(1.0 / math.sqrt(inertia))


def min_separation(C: Configuration) -> float:
    return float(np.min(pdist(C.points))) if C.n > 1 else math.inf


# --- inertia matrix ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class InertiaData:
    """Inertia matrix S with its descending spectrum and merged multiplicities."""
    S: np.ndarray
    spectrum: np.ndarray
    multiplicities: Tuple[Tuple[float, int], ...]

    @property
    def trace(self) -> float:
        return float(np.trace(self.S))

    def to_dict(self) -> Dict:
        return {
            'S': self.S.tolist(),
            'spectrum': self.spectrum.tolist(),
            'multiplicities': [{'value': v, 'multiplicity': k} for v, k in self.multiplicities],
            'trace': self.trace,
        }


def inertia_matrix(C: Configuration) -> InertiaData:
    S = (C.points.T * C.masses) @ C.points
    S = 0.5 * (S + S.T)
    vals = np.linalg.eigvalsh(S)[::-1].copy()
    tol = 1e-9 * max(float(np.trace(S)), 1e-300)
    merged: List[List[float]] = []
    for v in vals:
        if merged and abs(merged[-1][0] - v) <= tol:
            merged[-1][1] += 1
            merged[-1][2].append(v)
        else:
            merged.append([v, 1, [v]])
    mults = tuple((float(np.mean(vs)), int(k)) for _, k, vs in merged)
    return InertiaData(S, vals, mults)


# --- central configurations ----------------------------------------------

def central_residual(C: Configuration, exponent: float = 1.0) -> Tuple[float, float]:
    """Least-squares multiplier and relative residual of grad U = lambda grad I.

    Returns:
        (lambda, |grad U - lambda grad I| / |grad U|)

    Raises:
        ZeroInertia: if I(C) = 0.
        CollisionSingularity: if two bodies coincide.
    """
    gI = grad_inertia(C).ravel()
    norm_i = float(gI @ gI)
    if norm_i == 0.0:
        raise ZeroInertia("central_residual needs I > 0")
    gU = grad_potential(C, exponent).ravel()
    lam = float(gU @ gI) / norm_i
    norm_u = float(np.linalg.norm(gU))
    if norm_u == 0.0:
        return lam, 0.0
    return lam, float(np.linalg.norm(gU - lam * gI)) / norm_u


# --- congruence ----------------------------------------------------------

def fingerprint(C: Configuration) -> np.ndarray:
    """(P, 3) array of (min mass, max mass, distance) over all pairs, lexicographically sorted."""
    if C.n < 2:
        return np.zeros((0, 3))
    i, j = np.triu_indices(C.n, k=1)
    lo = np.minimum(C.masses[i], C.masses[j])
    hi = np.maximum(C.masses[i], C.masses[j])
    r = pdist(C.points)
    order = np.lexsort((r, hi, lo))
    return np.column_stack([lo[order], hi[order], r[order]])


def config_distance(C1: Configuration, C2: Configuration) -> float:
    """L-infinity distance between sorted fingerprints; 0 for congruent configurations.

    Raises:
        SizeMismatch: if body counts or total masses differ.
    """
    if C1.n != C2.n:
        raise SizeMismatch(f"Configurations have {C1.n} and {C2.n} bodies")
    if abs(C1.total_mass - C2.total_mass) > 1e-9 * max(C1.total_mass, C2.total_mass):
        raise SizeMismatch(f"Total masses {C1.total_mass} and {C2.total_mass} differ")
    if C1.n < 2:
        return 0.0
    return float(np.max(np.abs(fingerprint(C1) - fingerprint(C2))))


def configurations_match(C1: Configuration, C2: Configuration, tol: float = 1e-9) -> bool:
    """True when C2 is a mass-preserving reordering of C1 up to ``tol``."""
    if C1.n != C2.n or C1.dim != C2.dim:
        return False
    scale = 1.0 + float(np.max(np.abs(C1.points)))
    dist = cdist(C1.points, C2.points)
    mass_gap = np.abs(C1.masses[:, None] - C2.masses[None, :])
    cost = dist + np.where(mass_gap > 1e-9 * np.maximum(1.0, C1.masses[:, None]), 1e6, 0.0)
    rows, cols = linear_sum_assignment(cost)
    return bool(np.max(cost[rows, cols]) <= tol * scale)


def edge_ratio(C: Configuration, rel_tol: float = 1e-6) -> float:
    """Shortest pairwise distance over the next distinct one (1.0 if all are equal)."""
    if C.n < 2:
        return 1.0
    r = np.sort(pdist(C.points))
    shortest = r[0]
    longer = r[r > shortest * (1.0 + rel_tol)]
    if longer.size == 0:
        return 1.0
    return float(shortest / longer[0])


# --- files ---------------------------------------------------------------

def load_configuration(path: Union[str, Path]) -> Configuration:
    return Configuration.from_dict(read_json(path))


def save_configuration(C: Configuration, path: Union[str, Path]) -> Path:
    return write_json(C.to_dict(), path)


def points_rows(C: Configuration, **extra) -> List[Dict]:
    """One row per body: index, mass, coordinates, plus any ``extra`` columns."""
    rows = []
    for i, (x, m) in enumerate(zip(C.points, C.masses)):
        row = dict(extra)
        row['body'] = i
        row['m'] = float(m)
        for k, v in enumerate(x):
            row[f"x{k + 1}"] = float(v)
        rows.append(row)
    return rows


def write_points_csv(C: Configuration, path: Union[str, Path]) -> Path:
    return write_csv(points_rows(C), path)
