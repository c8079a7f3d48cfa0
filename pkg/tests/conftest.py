import pytest

from rovermon import config
from rovermon.scenario import run_scenario


@pytest.fixture(scope="session")
def builtin_runs():
    """Each builtin scenario executed once with default settings, shared
    across the whole test session: name -> (config, log, summary)."""
    runs = {}
    for name in config.BUILTIN_NAMES:
        cfg = config.from_dict({"builtin": name})
        log, summary = run_scenario(cfg)
        runs[name] = (cfg, log, summary)
    return runs
