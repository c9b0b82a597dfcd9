"""Command-line runs, one :class:`hardylab.LabRun` subclass per command family.

This module holds the configuration items and parsers shared by several commands: the system flags, point grids
and rational inputs.
"""

import numpy as np

from hardylab.bases import Family, SystemSpec
from hardylab.framework.config_check import (
    ConfigChoice,
    ConfigError,
    ConfigItem,
    check_positive_int,
    parse_number_list,
    parse_rational,
    read_points_file,
)
from hardylab.framework.errors import Error
from hardylab.framework.store import ResultsStore
from hardylab.quadrature import CoefficientCache

SYSTEM = 'system'
ALPHA = 'alpha'
BETA = 'beta'
LAM = 'lam'
DIM = 'd'
ACTION = 'action'
POINTS = 'points'
STORE = 'store'


def check_rational(value):
    """Check that ``value`` parses as an exact rational number."""
    parse_rational(value)


def check_number_list(value):
    if not parse_number_list(value):
        raise Error(f'Expected a comma separated list of numbers, got "{value}".')


def check_int_grid(value):
    """Check a comma separated, strictly increasing list of positive integers."""
    values = parse_number_list(value)
    if not values or any(not isinstance(v, int) or v < 1 for v in values):
        raise Error(f'Expected positive integers, got "{value}".')
    if values != sorted(set(values)):
        raise Error(f'Grid "{value}" must be strictly increasing.')


def system_template():
    """Config items describing an orthonormal system."""
    return {
        SYSTEM: ConfigChoice(*(family.value for family in Family), description='Orthonormal family.'),
        ALPHA: ConfigItem(check_number_list, 'Type parameter alpha, one value or one per coordinate.',
                          optional=True),
        BETA: ConfigItem(check_number_list, 'Jacobi parameter beta.', optional=True),
        LAM: ConfigItem(check_number_list, 'Generalized Hermite parameter lambda.', optional=True),
        DIM: ConfigItem(check_positive_int, 'Dimension.', default=1),
    }


def _parameter(config, key):
    if config.get(key) is None:
        return None
    values = parse_number_list(config[key])
    return values[0] if len(values) == 1 else tuple(values)


def build_system(config, placeholder=False):
    """:obj:`.bases.SystemSpec` from the validated system config items, keeping rational parameters exact.

    :param placeholder: Fill missing type parameters with 0, for results that only depend on the family.
    """
    family = Family(config[SYSTEM])
    values = {key: _parameter(config, key) for key in (ALPHA, BETA, LAM)}
    if placeholder:
        needed = {Family.GENERALIZED_HERMITE: (LAM,), Family.JACOBI: (ALPHA, BETA)}.get(family, (ALPHA,))
        values.update({key: 0 for key in needed if values[key] is None})
    return SystemSpec.build(family, values[ALPHA], values[BETA], values[LAM], int(config[DIM]))


def numbers(config, key):
    """Floats of a comma separated config value."""
    return np.array([float(v) for v in parse_number_list(config[key])])


def grid(config, key):
    """Integers of a comma separated config value."""
    return [int(v) for v in parse_number_list(config[key])]


def point_grid(config, key='u'):
    """Evaluation points from the inline list ``key`` or the points file, whichever is given."""
    if config.get(POINTS):
        return read_points_file(config[POINTS])
    if config.get(key) is None:
        raise ConfigError(f'Give evaluation points with --{key} or --points.', [key])
    return numbers(config, key)


def rational(config, key):
    return parse_rational(config[key])


def optional_rational(config, key):
    return None if config.get(key) is None else parse_rational(config[key])


def coefficient_cache(config):
    """Coefficient cache persisted next to the results store, or an in-memory one without a store."""
    if config.get(STORE):
        return CoefficientCache(ResultsStore(config[STORE]).sidecar('coefficients.json'))
    return CoefficientCache()
