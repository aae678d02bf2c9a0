"""Mixed-order self-paced curriculum learning: Python front end to the C++ core."""

from ._moscl import *  # noqa: F401,F403
from . import _moscl

__version__ = "0.1.0"


def _setting(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def run_experiment(train, eval=None, **settings):
    """Runs the training pipeline. Keyword arguments are config keys, e.g.
    scheduler="mixed", total_epochs=60."""
    return _moscl.run_experiment({k: _setting(v) for k, v in settings.items()}, train, eval)


def config_text(**settings):
    return _moscl.config_text({k: _setting(v) for k, v in settings.items()})
