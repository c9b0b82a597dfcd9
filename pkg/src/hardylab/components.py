"""Registry of all available hardylab commands."""

from hardylab.framework.config_check import ConfigError

from .commands.atom import Atom
from .commands.basis import Basis
from .commands.estimates import Estimates
from .commands.hardy import Hardy
from .commands.kernel import Kernel
from .commands.sharpness import Sharpness

COMMAND = 'command'
_run_components = {Basis, Kernel, Atom, Hardy, Sharpness, Estimates}  #: All commands we can run.

# Build a dict of {'command name': class} for all run components, so we can easily start a run given its name.
_component_registry = {cls.component: cls for cls in _run_components}


def make_run(config):
    """Read the command from config, and create a Run object for that command."""
    if COMMAND not in config:
        raise ConfigError('Config does not contain a hardylab command name.', [COMMAND])

    component_name = config[COMMAND]
    if component_name not in _component_registry:
        raise ConfigError(f'Unknown hardylab command {component_name}.', [COMMAND])

    return _component_registry[component_name](config)


def list_components():
    """Return a sorted list of all known commands."""
    return sorted(_component_registry.keys())
