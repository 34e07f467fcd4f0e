"""Services package initialization.

This module lazily imports the analysis entry points so that importing the
package does not pull in sympy, scipy or tqdm until a service is used.
"""

from importlib import import_module

__all__ = [
    'propagate',
    'error_multipliers',
    'fixed_point_check',
    'p_err_gate',
    'sigma2_for_threshold',
    'threshold_table',
    'curve',
    'simulate',
    'distill_stats',
]

_LAZY_MAP = {
    'propagate': 'gkpthreshold.services.cluster_gates',
    'error_multipliers': 'gkpthreshold.services.cluster_gates',
    'fixed_point_check': 'gkpthreshold.services.cluster_gates',
    'p_err_gate': 'gkpthreshold.services.threshold',
    'sigma2_for_threshold': 'gkpthreshold.services.threshold',
    'threshold_table': 'gkpthreshold.services.threshold',
    'curve': 'gkpthreshold.services.threshold',
    'simulate': 'gkpthreshold.services.shift_mc',
    'distill_stats': 'gkpthreshold.services.magic_distill',
}


def __getattr__(name: str):
    if name in _LAZY_MAP:
        module = import_module(_LAZY_MAP[name])
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
