"""Version information for SymCentral."""

__version__ = "1.0.0"
__author__ = "SymCentral Development Team"
__license__ = "MIT"
__description__ = "Symmetric central and balanced configurations of the n-body problem"
