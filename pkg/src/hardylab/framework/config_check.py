"""Utilities to validate run configurations in a generic way.

Each :class:`.run.Run` object has an attribute :attr:`.run.Run.config_template`.  This dictionary describes the
structure and expected content of the configuration for that Run.  The :class:`.run.Run` base class describes the
numerical settings common to all commands (tolerances, panel budget, thread count).  Each command extends this
dictionary with its own arguments.  For example, the kernel command extends ``config_template`` as follows::

   self.config_template.update({
        'r': ConfigItem(check_open_unit),
        'action': ConfigChoice('closed', 'spectral', 'heat', 'deriv-l2'),
    })

This way, :meth:`ConfigCheck.validate` checks for the presence of a configuration key ``r`` with a value in
``(0, 1)``, and a key ``action`` whose value is one of the listed choices."""

import logging
import os
import re
from fractions import Fraction
from functools import reduce

import numpy as np

from .errors import Error

logger = logging.getLogger(__name__)


class ConfigError(Error):
    """Subclass to signal errors in the configuration or input files provided by the user.

    :obj:`ConfigError` contains a reference to the config key where the problem is found, so the command line can tell
    the user which flag or configuration entry to change.  For a problem with ``config['panel_budget']``,
    :attr:`ConfigError.path` has the value ``['panel_budget']``.

    :param message: Error message.
    :param path: List of keys pointing to the config value.
    """

    exit_code = 2

    def __init__(self, message, path):
        super().__init__(message)
        self.path = path  #: List of configuration keys pointing to the config value which caused the error.


class ConfigItem:
    """A ConfigItem describes what kind of value is expected at a given position in the config dictionary.

    :param check_function: A function ``check(value, **kwargs)`` by which to check the parameter's value. This
      function should raise :obj:`.errors.Error` if the check fails.
    :param description: Description of the parameter's meaning.
    :param optional: Whether this config parameter may be omitted.
    :param default: Default value.
    :param kwargs: Extra keyword arguments to pass on to ``check_function``.
    """

    def __init__(self, check_function=None, description=None, optional=False, default=None, **kwargs):
        self.description = description
        self._optional = optional
        self._check_function = check_function  #: Function to check the configured value with.
        self._check_kwargs = kwargs  #: Keyword arguments for :attr:`_check_function`.
        self._default = default
        self._path = None
        self._config = None
        self.value = None  #: Value found after a successful call to :meth:`check`.

    def check(self):
        """Check if :attr:`_config` contains a value for this :class:`ConfigItem`, and check that value."""
        if self._path is None or self._config is None:
            raise RuntimeError('ConfigItem.check() called but _path and _config are not set.  This is a bug. '
                               f'{self._path}, {self._config}')
        # Missing values are filled in with the default, so the rest of the code can look up every key.
        if len(self._path) > 1:
            parent_section = reduce(lambda section, key: section.setdefault(key, {}), self._path[:-1], self._config)
        else:
            parent_section = self._config
        try:
            value = dict.setdefault(parent_section, self._path[-1], self._default)
        except TypeError:
            raise ConfigError('Incorrect input configuration, '
                              f'could not look up {": ".join(str(x) for x in self._path)}.', self._path)
        if value is None or (isinstance(value, str) and not value):
            if self._optional:
                return
            raise ConfigError(f'No value for configuration key {": ".join(str(x) for x in self._path)}.',
                              self._path)

        try:
            self.check_value(value, **self._check_kwargs)
        except ConfigError:
            raise
        except Exception as e:
            raise ConfigError(getattr(e, 'message', str(e)), self._path)
        self.value = value

    def check_value(self, value, **kwargs):
        if self._check_function is not None:
            self._check_function(value, **kwargs)

    def set_config_refs(self, configcheck: 'ConfigCheck', config, path):
        """Link the ConfigItem to a config dict that we want to check.

        :param configcheck: :obj:`ConfigCheck` which this ConfigItem belongs to.
        :param config: Dictionary which contains a configuration.
        :param path: List of keys by which to look up the value in ``config`` and nested sub-dictionaries.
        """
        self._configcheck = configcheck
        self._config = config
        self._path = path


class ConfigChoice(ConfigItem):
    """Checks a config setting where the user must pick a value from a fixed set of choices."""

    def __init__(self, *choices, **kwargs):
        super().__init__(**kwargs)
        self._choices = choices

    def check_value(self, value):
        if value not in self._choices:
            raise Error(f'Incorrect value "{value}", please choose from {{'
                        + ', '.join(str(x) for x in self._choices)
                        + '}.')


class ConfigCheck:
    """Compile a config template against a config dict, and validate it.

    :param config_template: Nested dictionary of :obj:`ConfigItem`.
    :param config: Configuration dictionary, completed in place with default values.
    """

    def __init__(self, config_template, config):
        self.config = config
        self.config_items = self._compile(config_template)  #: Dictionary of :obj:`ConfigItem`.
        self._validated = False

    def _compile(self, checked_section, path=()):
        """Link ConfigItems with their value inside the config dict."""
        if isinstance(checked_section, dict):
            return {key: self._compile(value, path + (key,)) for key, value in checked_section.items()}
        logger.debug('Set config refs on %s', '.'.join(str(x) for x in path))
        checked_section.set_config_refs(self, self.config, list(path))
        return checked_section

    def validate(self, validate_section=None):
        """Validate if :attr:`config` satisfies the requirements of :attr:`config_items`.

        Raises an exception if a required configuration parameter is missing, or if its value doesn't pass a check.
        """
        if validate_section is None:
            self.validate(self.config_items)
            self._validated = True
            return
        for key, item in validate_section.items():
            if isinstance(item, dict):
                self.validate(item)
            elif isinstance(item, ConfigItem):
                item.check()
            else:
                raise RuntimeError(f'Unexpected entry in configuration: "{key}: {item}".  This is a bug.')


def check_exists(file):
    """Check if ``file`` exists, raise :obj:`.errors.Error` otherwise."""
    if not os.path.exists(file):
        raise Error(f'File "{file}" does not exist.')


def check_positive(value):
    if not float(value) > 0:
        raise Error(f'Value {value} must be positive.')


def check_positive_int(value):
    if int(value) != value or value < 1:
        raise Error(f'Value {value} must be a positive integer.')


def check_natural(value):
    if int(value) != value or value < 0:
        raise Error(f'Value {value} must be a non-negative integer.')


def check_open_unit(value):
    """Check ``0 < value < 1``."""
    if not 0 < float(value) < 1:
        raise Error(f'Value {value} must lie strictly between 0 and 1.')


def parse_rational(text):
    """Parse ``"num/den"``, an integer or a decimal into an exact :obj:`~fractions.Fraction`."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, (int, np.integer)):
        return Fraction(int(text))
    if isinstance(text, float):
        return Fraction(repr(text))
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise Error(f'Could not parse "{text}" as a rational number (use "num/den" or a decimal).')


def parse_number_list(text):
    """Parse a comma separated list of numbers, keeping exact rationals where given as ``num/den``."""
    if isinstance(text, (list, tuple)):
        return list(text)
    result = []
    for item in str(text).split(','):
        item = item.strip()
        if not item:
            continue
        value = parse_rational(item)
        result.append(int(value) if value.denominator == 1 and '.' not in item else value)
    return result


def read_points_file(file):
    """Read real numbers from a text file, one or more per line, separated by whitespace or commas.

    ``#`` starts a comment.  Parse errors raise :obj:`ConfigError` with the 1-based line and column of the offending
    entry.
    """
    check_exists(file)
    points = []
    with open(file, encoding='utf-8') as f:
        for line_no, line in enumerate(f, start=1):
            content = line.split('#', 1)[0]
            for match in re.finditer(r'[^\s,]+', content):
                try:
                    points.append(float(match.group()))
                except ValueError:
                    raise ConfigError(f'{file}:{line_no}:{match.start() + 1}: could not parse "{match.group()}" '
                                      'as a number.', ['points'])
    if not points:
        raise ConfigError(f'{file} does not contain any points.', ['points'])
    return np.array(points)
