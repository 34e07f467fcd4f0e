"""Core package initialization.

Settings, validators and exceptions are re-exported here. The per-run options
loader is resolved lazily via module-level __getattr__ so importing the core
package never touches the filesystem.
"""

from importlib import import_module
from gkpthreshold.core.config import (
    settings,
    configure_logging,
    validate_gate,
    validate_log_level,
    validate_probability,
    validate_variance,
)
from gkpthreshold.core.exceptions import *  # re-export exceptions

__all__ = [
    # Config
    'settings',
    'configure_logging',
    'validate_gate',
    'validate_log_level',
    'validate_probability',
    'validate_variance',
    # Exceptions
    'GKPThresholdException',
    'ContractViolation',
    'ConfigurationError',
    'NumericalFailure',
    'require',
    # Run options (resolved lazily)
    'RunOptions',
    'load_run_options',
]


_LAZY_CONFIG_SYMBOLS = {
    'RunOptions',
    'load_run_options',
}


def __getattr__(name: str):
    """Lazily import run-option helpers from gkpthreshold.core.config."""
    if name in _LAZY_CONFIG_SYMBOLS:
        module = import_module('gkpthreshold.core.config')
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
