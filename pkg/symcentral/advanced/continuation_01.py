"""Mass continuation of central configurations.

mass_scan follows one solution while a slot's mass moves through a list of
values. The first point comes from minimize (or from given coordinates); each
later point is predicted by a secant step in the raw reduced coordinates and
corrected by Newton on the Lagrange system. When the corrector fails from the
prediction it is retried from the previous solution; a second failure ends
the scan with ContinuationLost.

Raw coordinates are used for the predictor because the shape coordinates
depend on the masses through the centering constraint.
"""
import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from symcentral.core.reduction_04 import SymmetricAnsatz
from symcentral.core.solver_05 import (
    CriticalPoint, SolveOptions, minimize, polish, solution_coords,
)
from symcentral.utils.errors import ContinuationLost, SymCentralError

logger = logging.getLogger(__name__)


def _predict(history: List[np.ndarray], masses: List[float], mass: float) -> np.ndarray:
    """Secant extrapolation of the last two solutions to ``mass``."""
    if len(history) < 2 or masses[-1] == masses[-2]:
        return history[-1]
    slope = (history[-1] - history[-2]) / (masses[-1] - masses[-2])
    return history[-1] + slope * (mass - masses[-1])


def mass_scan(A: SymmetricAnsatz, slot_index: int, mass_values: Sequence[float],
              opts: Optional[SolveOptions] = None, coords=None) -> List[CriticalPoint]:
    """Continue a central configuration of ``A`` along the masses of one slot.

    Args:
        A: The ansatz; the mass of ``slot_index`` is replaced at each step.
        slot_index: Slot whose mass is scanned.
        mass_values: Masses in scan order.
        opts: Solver options.
        coords: Raw reduced coordinates to polish at the first mass instead of
            running minimize.

    Returns:
        One CriticalPoint per mass value.

    Raises:
        ContinuationLost: when a step does not reconverge; ``last_good`` holds
            the previous CriticalPoint and ``results`` everything before it.
    """
    mass_values = [float(m) for m in mass_values]
    if not mass_values:
        raise ValueError("mass_values is empty")
    opts = opts or SolveOptions.from_config()

    first = A.with_mass(slot_index, mass_values[0])
    if coords is None:
        cp = minimize(first, opts)
    else:
        cp = polish(first, coords, opts, descend=True)
    results = [cp]
    history = [solution_coords(first, cp)]
    done = [mass_values[0]]
    logger.info(f"OK   step 0: mass={mass_values[0]:.6g} U={cp.U:.12g} residual={cp.residual:.2e}")

    for step, mass in enumerate(mass_values[1:], start=1):
        B = A.with_mass(slot_index, mass)
        guess = _predict(history, done, mass)
        try:
            cp = polish(B, guess, opts)
        except SymCentralError as e:
            logger.debug(f"Predictor failed at step {step} ({type(e).__name__}: {e}); "
                         f"retrying from the previous point")
            try:
                cp = polish(B, history[-1], opts)
            except SymCentralError as e2:
                logger.warning(f"FAIL step {step}: {type(e2).__name__}: {e2}")
                raise ContinuationLost(
                    f"Lost the branch at mass {mass:.6g} (last good mass {done[-1]:.6g})",
                    last_good=results[-1], results=results,
                )
        results.append(cp)
        history.append(solution_coords(B, cp))
        done.append(mass)
        logger.info(f"OK   step {step}: mass={mass:.6g} U={cp.U:.12g} residual={cp.residual:.2e}")

    logger.info(f"Done. {len(results)} converged.")
    return results


def scan_rows(results: Sequence[CriticalPoint], mass_values: Sequence[float]) -> List[Dict]:
    """CSV rows for a scan: step, mass, U, lambda, residual, Morse index, edge ratio, points."""
    rows = []
    for step, (cp, mass) in enumerate(zip(results, mass_values)):
        row = {
            'step': step,
            'mass': float(mass),
            'U': cp.U,
            'lambda': cp.lam,
            'residual': cp.residual,
            'morse_index': cp.morse_index,
            'edge_ratio': cp.edge_ratio,
        }
        for i, x in enumerate(cp.configuration.points):
            for k, v in enumerate(x):
                row[f"x{i + 1}_{k + 1}"] = float(v)
        rows.append(row)
    return rows
