import importlib

import pytest

SERVICES = ("gaussian_core", "cluster_gates", "threshold", "shift_mc", "magic_distill", "output")


def test_package_and_entry_point_import():
    import gkpthreshold
    import gkpthreshold.main as entry

    assert gkpthreshold.__version__
    assert callable(entry.run)
    assert set(entry.COMMANDS) == {"thresholds", "curve", "noise-table", "mc", "distill"}


@pytest.mark.parametrize("name", SERVICES)
def test_service_modules_import(name):
    module = importlib.import_module(f"gkpthreshold.services.{name}")
    assert module.__name__.endswith(name)


def test_lazy_service_names_resolve():
    import gkpthreshold.services as services

    for name in services.__all__:
        assert callable(getattr(services, name)), name
    with pytest.raises(AttributeError):
        services.not_a_service
