"""Solver extensions: mass continuation and component counting."""

from symcentral.advanced.continuation_01 import mass_scan, scan_rows
from symcentral.advanced.components_02 import component_census, component_factors

__all__ = [
    'mass_scan',
    'scan_rows',
    'component_census',
    'component_factors',
]
