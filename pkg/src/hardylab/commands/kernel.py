import logging

import numpy as np
import pandas as pd

import hardylab
from hardylab import kernels
from hardylab.framework.config_check import ConfigChoice, ConfigError, ConfigItem, check_natural, check_open_unit, \
    check_positive
from hardylab.framework.errors import ShapeError
from hardylab.framework.run import RunOutput

from . import ACTION, POINTS, build_system, check_number_list, numbers, point_grid, system_template

logger = logging.getLogger(__name__)

_R = 'r'
_T = 't'
_U = 'u'
_V = 'v'
_J = 'j'
_METHOD = 'method'
_K_MAX = 'kmax'

CLOSED = 'closed'
SPECTRAL = 'spectral'
HEAT = 'heat'
DERIV_L2 = 'deriv-l2'


class Kernel(hardylab.LabRun):
    """Kernels R_r(u, v) and G_t(u, v) on a lattice of points, and L² norms of kernel derivatives."""

    component = 'kernel'

    def __init__(self, config):
        super().__init__(config)
        self.config_template.update(system_template())
        self.config_template.update({
            ACTION: ConfigChoice(CLOSED, SPECTRAL, HEAT, DERIV_L2),
            _R: ConfigItem(check_open_unit, 'Kernel parameter r.', optional=True),
            _T: ConfigItem(check_positive, 'Heat kernel time t.', optional=True),
            _U: ConfigItem(check_number_list, 'First arguments.', optional=True),
            POINTS: ConfigItem(description='File with first arguments.', optional=True),
            _V: ConfigItem(check_number_list, 'Second arguments; defaults to the first ones.', optional=True),
            _J: ConfigItem(check_natural, 'Derivative order.', default=1),
            _METHOD: ConfigChoice('fd', 'spectral', optional=True),
            _K_MAX: ConfigItem(check_natural, 'Spectral cutoff.', optional=True),
        })

    def _require(self, key):
        if self.config.get(key) is None:
            raise ConfigError(f'Action {self.config[ACTION]} needs --{key}.', [key])
        return float(self.config[key])

    def _start(self):
        system = build_system(self.config)
        u = point_grid(self.config, _U)
        v = u if self.config.get(_V) is None else numbers(self.config, _V)
        action = self.config[ACTION]
        summary = {'system': system.describe(), 'action': action}
        if action == DERIV_L2:
            return self._deriv_l2(system, u, summary)
        if system.d != 1:
            raise ShapeError('The kernel command evaluates one-dimensional systems; use a d = 1 system.')
        U, V = (a.ravel() for a in np.meshgrid(u, v, indexing='ij'))
        table = pd.DataFrame({'u': U, 'v': V})
        if action == CLOSED:
            r = self._require(_R)
            table['value'] = kernels.kernel_closed_1d(system, r, U, V)
            summary['r'] = r
        elif action == SPECTRAL:
            r = self._require(_R)
            tol = self.config[hardylab.SPECTRAL_TOL]
            if self.config.get(_K_MAX) is None:
                truncation = kernels.spectral_truncation(system, r, tol, U, V)
            else:
                K_max = int(self.config[_K_MAX])
                truncation = kernels.SpectralTruncation(K_max, kernels.spectral_tail_bound(system, r, K_max, U, V))
            table['value'] = kernels.kernel_spectral(system, r, U, V, truncation.K_max, max(tol, truncation.tail_bound))
            summary.update({'r': r, 'K_max': truncation.K_max, 'tail_estimate': truncation.tail_bound,
                            'tail_rigorous': kernels.tail_is_rigorous(system)})
        else:
            t = self._require(_T)
            table['value'] = kernels.heat_kernel(system, t, U[:, None], V[:, None])
            table['explicit'] = kernels.heat_kernel_explicit(system, t, U[:, None], V[:, None])
            summary.update({'t': t,
                            'max_difference': float(np.max(np.abs(table['value'] - table['explicit']))),
                            'decay_ratio': kernels.heat_decay_ratio(system, t, u, self.config[hardylab.ABS_TOL],
                                                                    self.config[hardylab.REL_TOL])})
        return RunOutput(summary, table)

    def _deriv_l2(self, system, u, summary):
        r = self._require(_R)
        j = int(self.config[_J])
        norms = [kernels.kernel_deriv_l2(system, r, j, float(x), self.config[hardylab.ABS_TOL],
                                         self.config[hardylab.REL_TOL], self.config.get(_METHOD),
                                         self.config[hardylab.PANEL_BUDGET]) for x in u]
        summary.update({'r': r, 'j': j})
        return RunOutput(summary, pd.DataFrame({'u': u, 'l2_norm': norms}))
