"""Default numerical settings and helper functions for user customization."""

import yaml

from hardylab.framework.config_check import ConfigError, check_exists
from hardylab.framework.errors import Error

defaults = dict(
    abs_tol=1e-12,
    rel_tol=1e-10,
    panel_budget=4000,
    spectral_tol=1e-12,
    threads=1,
)  #: Default parameters.

FILE_KEYS = frozenset(defaults) | {'store', 'log_dir', 'format'}  #: Keys a configuration file may set.


def read(file):
    """Read settings from a flat YAML file of ``key: value`` lines and return them as dict.

    :raises ConfigError: if the file is not a flat mapping or contains unknown keys.
    """
    try:
        check_exists(file)
    except Error as e:
        raise ConfigError(e.message, ['config'])
    with open(file, encoding='utf-8') as f:
        try:
            values = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f'Could not parse configuration file {file}: {e}', ['config'])
    if values is None:
        return {}
    if not isinstance(values, dict) or any(isinstance(v, (dict, list)) for v in values.values()):
        raise ConfigError(f'Configuration file {file} must contain flat "key: value" lines.', ['config'])
    unknown = sorted(str(key) for key in values if key not in FILE_KEYS)
    if unknown:
        raise ConfigError(f'Unknown parameter(-s) in configuration file {file}: {", ".join(unknown)}.', ['config'])
    return values
