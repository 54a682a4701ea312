"""Configuration Management for SymCentral.

Loads and manages configuration parameters from symcentral_config.yaml.
Users can override defaults by placing a config file in their working directory.
"""
import os
import yaml
from pathlib import Path
from typing import Any, Dict, Optional

# Default config file locations (in priority order)
CONFIG_SEARCH_PATHS = [
    Path.cwd() / 'symcentral_config.yaml',            # Current directory
    Path.home() / '.symcentral' / 'config.yaml',      # User home
    Path(__file__).parent / 'symcentral_config.yaml',  # Package directory
]


class Config:
    """Configuration manager for SymCentral."""

    _instance = None
    _config = None

    def __new__(cls):
        """Singleton pattern - only one config instance."""
        if cls._instance is None:
            cls._instance = super(Config, cls).__new__(cls)
        return cls._instance

    def __init__(self):
        """Initialize config by loading from file."""
        if self._config is None:
            self.load()

    def load(self, config_path: Optional[Path] = None):
        """Load configuration from YAML file.

        Missing sections or keys fall back to the built-in defaults, so a user
        file only needs to list what it changes.

        Args:
            config_path: Specific config file to load. If None, searches default locations.
        """
        if config_path:
            config_file = Path(config_path)
            if not config_file.exists():
                raise FileNotFoundError(f"Config file not found: {config_file}")
        else:
            config_file = None
            for path in CONFIG_SEARCH_PATHS:
                if path.exists():
                    config_file = path
                    break

        config = self._get_minimal_defaults()
        if config_file and config_file.exists():
            with open(config_file) as f:
                loaded = yaml.safe_load(f) or {}
            for section, values in loaded.items():
                if isinstance(values, dict) and isinstance(config.get(section), dict):
                    config[section].update(values)
                else:
                    config[section] = values
        self._config = config

    def _get_minimal_defaults(self) -> Dict:
        """Get minimal default configuration."""
        return {
            'global': {
                'default_workers': 'auto',
                'log_level': 'INFO',
                'seed_env_var': 'SYMCENTRAL_SEED',
                'default_seed': 0,
            },
            'groups': {'tol': 1e-9, 'hash_decimals': 6, 'max_order': 1000},
            'strata': {
                'wall_tol': 1e-9,
                'chamber_samples': 20000,
                'representative_tries': 512,
                'radius_range': [0.5, 2.0],
            },
            'solver': {
                'tol_grad': 1e-10,
                'max_iters': 5000,
                'starts': 64,
                'census_starts': 256,
                'min_separation': 1e-6,
                'newton_tol': 1e-12,
                'zero_eig_tol': 1e-6,
                'armijo_shrink': 0.5,
                'armijo_c': 1e-4,
                'initial_step': 1.0,
                'newton_switch': 1e-4,
                'newton_max_iters': 100,
                'dedup_tol': 1e-6,
                'collision_retries': 4,
                'workers': 'auto',
            },
            'balanced': {
                'al_outer_iters': 40,
                'al_rho0': 10.0,
                'al_rho_growth': 10.0,
                'feasibility_tol': 1e-6,
                'residual_tol': 1e-8,
                'starts': 8,
            },
            'dynamics': {
                't_end': 0.1,
                'dt': 1e-4,
                'collision_radius': 1e-6,
                'collapse_fraction': 0.5,
            },
            'output': {'digits': 17},
        }

    def get(self, key_path: str, default: Any = None) -> Any:
        """Get configuration value by dot-separated key path.

        Args:
            key_path: Dot-separated path (e.g., 'solver.tol_grad')
            default: Default value if key not found

        Returns:
            Configuration value or default

        Examples:
            >>> config = Config()
            >>> config.get('solver.starts')
            64
            >>> config.get('dynamics.dt')
            0.0001
        """
        keys = key_path.split('.')
        value = self._config

        for key in keys:
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default

        # Handle 'auto' workers
        if value == 'auto' and 'worker' in key_path.lower():
            return os.cpu_count() or 1

        return value

    def get_section(self, section: str) -> Dict:
        """Get entire configuration section.

        Args:
            section: Section name (e.g., 'solver', 'dynamics')

        Returns:
            Dictionary of all parameters in section
        """
        return self._config.get(section, {})

    def resolve_workers(self, workers: Optional[int]) -> int:
        """Resolve worker count (handles 'auto').

        Args:
            workers: Number of workers or None

        Returns:
            Resolved worker count
        """
        if workers is None:
            workers = self.get('solver.workers', None) or self.get('global.default_workers', 4)

        if workers == 'auto' or (isinstance(workers, str) and workers.lower() == 'auto'):
            return os.cpu_count() or 1

        return max(1, int(workers))

    def default_seed(self) -> int:
        """Seed from the environment variable named in global.seed_env_var, else the config."""
        env_name = self.get('global.seed_env_var', 'SYMCENTRAL_SEED')
        raw = os.environ.get(env_name)
        if raw is not None and raw.strip():
            try:
                return int(raw)
            except ValueError:
                raise ValueError(f"{env_name} must be an integer, got {raw!r}")
        return int(self.get('global.default_seed', 0))


# Global config instance
_config_instance = None


def get_config() -> Config:
    """Get global configuration instance."""
    global _config_instance
    if _config_instance is None:
        _config_instance = Config()
    return _config_instance


def load_config(config_path: Optional[Path] = None):
    """Load configuration from file.

    Args:
        config_path: Path to config file. If None, searches default locations.
    """
    config = get_config()
    config.load(config_path)


# Convenience functions
def get(key_path: str, default: Any = None) -> Any:
    """Get configuration value."""
    return get_config().get(key_path, default)


def get_section(section: str) -> Dict:
    """Get configuration section."""
    return get_config().get_section(section)
