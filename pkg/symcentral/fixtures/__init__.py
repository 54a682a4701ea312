"""Packaged example inputs: ansatz and configuration JSON files."""
from pathlib import Path
from typing import List

from symcentral.utils.errors import InvalidInput

FIXTURE_DIR = Path(__file__).parent


def fixture_names() -> List[str]:
    return sorted(p.name for p in FIXTURE_DIR.glob('*.json'))


def fixture_path(name: str) -> Path:
    """Path of a packaged fixture; the '.json' suffix is optional."""
    path = FIXTURE_DIR / (name if name.endswith('.json') else f"{name}.json")
    if not path.exists():
        raise InvalidInput(f"No fixture {name!r}; available: {', '.join(fixture_names())}")
    return path
