"""Top-level package for GKP cluster-state threshold analysis.

Expose commonly used submodules for easier imports.
"""

from gkpthreshold.core.config import settings  # noqa: F401

__version__ = settings.APP_VERSION

__all__ = [
    "settings",
    "__version__",
]
