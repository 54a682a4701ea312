"""Utility modules."""
from symcentral.utils.errors import SymCentralError, InvalidInput, NumericalFailure
from symcentral.utils.io_utils import dumps_json, write_json, read_json, write_csv
__all__ = [
    'SymCentralError', 'InvalidInput', 'NumericalFailure',
    'dumps_json', 'write_json', 'read_json', 'write_csv',
]
