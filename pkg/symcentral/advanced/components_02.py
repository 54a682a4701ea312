"""Connected components of the configuration space of an ansatz.

Slots of different topological orbit types never collide, so the space of
configurations is a product over orbit types. Only one-dimensional strata
contribute more than one component:

  ray   - a 1-dim component bounded by the origin; k slots on it are ordered
          by radius, giving k! / prod(c_m!) orderings for c_m slots of mass m
  line  - a wall-free 1-dim stratum (isotropy G); orderings along the line
          are further identified when a rotation commuting with G reverses
          the line: (P + Pal) / 2, with Pal the palindromic orderings

Higher-dimensional strata are connected and contribute 1, as does the origin.
"""
import logging
import math
from collections import Counter
from typing import Dict, List, Optional

import numpy as np
from scipy.linalg import null_space

from symcentral.core.groups_01 import FiniteGroup, centralizer_rotations
from symcentral.core.reduction_04 import AnsatzSlot, SymmetricAnsatz

logger = logging.getLogger(__name__)


def _multiset_permutations(counts: List[int]) -> int:
    out = math.factorial(sum(counts))
    for c in counts:
        out //= math.factorial(c)
    return out


def _palindromes(counts: List[int]) -> int:
    """Palindromic arrangements of a multiset with the given multiplicities."""
    odd = sum(c % 2 for c in counts)
    if odd > 1:
        return 0
    return _multiset_permutations([c // 2 for c in counts])


def _reverses_line(G: FiniteGroup, direction: np.ndarray) -> bool:
    """True if some rotation commuting with G maps ``direction`` to its negative."""
    d = G.dim
    candidates = centralizer_rotations(G)
    if candidates is None:
        candidates = []
        if d % 2 == 0:
            candidates.append(-np.eye(d))
        for a in null_space(direction[None, :]).T:
            candidates.append(2.0 * np.outer(a, a) - np.eye(d))
    for R in candidates:
        if np.linalg.det(R) < 0:
            continue
        if not all(np.allclose(R @ g, g @ R, atol=1e-9) for g in G.elements):
            continue
        if np.allclose(R @ direction, -direction, atol=1e-9):
            return True
    return False


def _slot_masses(slots: List[AnsatzSlot]) -> List[int]:
    counts = Counter(round(s.mass, 12) for s in slots)
    return [counts[m] for m in sorted(counts)]


def component_factors(A: SymmetricAnsatz) -> List[Dict]:
    """Per-orbit-type contribution to the component count.

    Returns:
        One dict per topological orbit type in the ansatz, in slot order, with
        keys ``label``, ``slots``, ``fixed_dim``, ``kind`` and ``factor``.
    """
    groups: Dict[tuple, List[AnsatzSlot]] = {}
    for slot in A.slots:
        groups.setdefault(slot.topo.key, []).append(slot)
    out = []
    for slots in groups.values():
        topo = slots[0].topo
        counts = _slot_masses(slots)
        if topo.fixed_dim != 1:
            kind, factor = ('origin' if topo.fixed_dim == 0 else 'connected'), 1
        elif topo.stratum.walls.shape[0]:
            kind, factor = 'ray', _multiset_permutations(counts)
        else:
            orderings = _multiset_permutations(counts)
            if _reverses_line(A.group, topo.stratum.basis[:, 0]):
                kind, factor = 'line', (orderings + _palindromes(counts)) // 2
            else:
                kind, factor = 'line', orderings
        out.append({
            'label': topo.label,
            'slots': len(slots),
            'fixed_dim': topo.fixed_dim,
            'kind': kind,
            'factor': factor,
        })
    return out


def component_census(A: SymmetricAnsatz, factors: Optional[List[Dict]] = None) -> int:
    """Number of connected components of the ansatz's configuration space at its masses."""
    factors = component_factors(A) if factors is None else factors
    total = 1
    for f in factors:
        total *= f['factor']
    logger.info(f"{A!r}: {total} component(s)")
    return total
