"""SymCentral - symmetric central and balanced configurations."""
from symcentral.__version__ import __version__
__all__ = ['__version__']
