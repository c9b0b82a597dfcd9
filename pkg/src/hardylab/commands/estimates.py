import logging
import math

import numpy as np

import hardylab
from hardylab import estimates
from hardylab.framework.config_check import ConfigChoice, ConfigError, ConfigItem, check_exists, check_natural, \
    read_points_file
from hardylab.framework.run import RunOutput

from . import ACTION, build_system, check_int_grid, check_number_list, grid, numbers, system_template

logger = logging.getLogger(__name__)

_J = 'j'
_ELL = 'ell'
_K = 'k'
_KGRID = 'kgrid'
_RGRID = 'rgrid'
_CGRID = 'cgrid'
_U = 'u'
_PAIRS = 'pairs'
_METHOD = 'method'

REGIME = 'regime'
SIGN_SIZE = 'sign-size'
DERIV_SUP = 'deriv-sup'
HOLDER = 'holder'
KERNEL_HOLDER = 'kernel-holder'
COND_C = 'cond-c'

DEFAULT_KGRID = '4,8,16,32'
DEFAULT_RGRID = '0.5,0.7,0.8,0.9'
COND_C_STEPS = (0.05, 0.1, 0.2, 0.4)


def read_pairs(file, width):
    """Rows of ``width`` numbers from a points file, one pair per row."""
    values = read_points_file(file)
    if values.size % width:
        raise ConfigError(f'{file} must contain {width} numbers per pair, got {values.size} numbers in total.',
                          [_PAIRS])
    return values.reshape(-1, width)


def default_cond_c_pairs(system):
    """Pairs (x, x + h/√d·(1, …, 1)) around x = (1, …, 1)."""
    x = np.ones(system.d)
    return [(x, x + h / math.sqrt(system.d)) for h in COND_C_STEPS]


class Estimates(hardylab.LabRun):
    """Numerical checks of the pointwise, derivative, modulus and kernel estimates.

    The record is stored even when a check does not pass; the command line then exits with the
    :obj:`.framework.errors.CheckFailed` code.
    """

    component = 'estimates'

    def __init__(self, config):
        super().__init__(config)
        self.config_template.update(system_template())
        self.config_template.update({
            ACTION: ConfigChoice(REGIME, SIGN_SIZE, DERIV_SUP, HOLDER, KERNEL_HOLDER, COND_C),
            _J: ConfigItem(check_natural, 'Derivative order.', default=1),
            _ELL: ConfigItem(check_natural, 'Weight exponent ell of the sign-size check.', default=0),
            _K: ConfigItem(check_natural, 'Taylor order of condition (C).', default=0),
            _KGRID: ConfigItem(check_int_grid, 'Comma separated grid of k.', default=DEFAULT_KGRID),
            _RGRID: ConfigItem(check_number_list, 'Comma separated grid of r.', default=DEFAULT_RGRID),
            _CGRID: ConfigItem(check_number_list, 'Candidate interval constants c of the sign-size check.',
                               optional=True),
            _U: ConfigItem(check_number_list, 'Sample points of the regime check.', optional=True),
            _PAIRS: ConfigItem(check_exists, 'File with one pair of points per line.', optional=True),
            _METHOD: ConfigChoice('parseval', 'quadrature', default='parseval'),
        })

    def _start(self):
        system = build_system(self.config)
        action = self.config[ACTION]
        j = int(self.config[_J])
        if action == REGIME:
            u = numbers(self.config, _U) if self.config.get(_U) else None
            check = estimates.check_regime_bounds(system, grid(self.config, _KGRID), u)
        elif action == SIGN_SIZE:
            c_grid = tuple(numbers(self.config, _CGRID)) if self.config.get(_CGRID) else estimates.SIGN_SIZE_C_GRID
            check = estimates.check_sign_size(system, j, int(self.config[_ELL]), grid(self.config, _KGRID), c_grid)
        elif action == DERIV_SUP:
            check = estimates.check_derivative_sup(system, j, grid(self.config, _KGRID))
        elif action == HOLDER:
            check = estimates.check_holder_modulus(system, j, grid(self.config, _KGRID), self._pairs(2))
        elif action == KERNEL_HOLDER:
            check = estimates.check_kernel_holder(system, j, numbers(self.config, _RGRID), self._pairs(2))
        else:
            pairs = self._pairs(2 * system.d)
            if pairs is None:
                pairs = default_cond_c_pairs(system)
            else:
                pairs = [(row[:system.d], row[system.d:]) for row in pairs]
            check = estimates.check_cond_c(system, int(self.config[_K]), numbers(self.config, _RGRID), pairs,
                                           self.config[_METHOD], self.config[hardylab.ABS_TOL],
                                           self.config[hardylab.REL_TOL])
        if not check.passed:
            logger.warning('Check %s did not pass: worst ratio %.4g.', check.name, check.worst_ratio)
        return RunOutput({'system': system.describe(), **check.summary()}, check.table)

    def _pairs(self, width):
        if not self.config.get(_PAIRS):
            return None
        return read_pairs(self.config[_PAIRS], width)
