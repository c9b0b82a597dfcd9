import logging

import hardylab
from hardylab import sharpness
from hardylab.framework.config_check import ConfigChoice, ConfigItem, check_natural, check_positive_int
from hardylab.framework.run import RunOutput

from . import ACTION, build_system, check_int_grid, check_rational, coefficient_cache, grid, optional_rational, \
    rational, system_template

logger = logging.getLogger(__name__)

_P = 'p'
_S = 's'
_EPS = 'eps'
_KGRID = 'kgrid'
_DELTA = 'delta'
_ROUTE = 'route'
_K_CAP = 'k_cap_factor'
_DELTA_CHECK = 'delta_check'

PARAMS = 'params'
RUN = 'run'

DEFAULT_KGRID = '16,32,64,128,256'


class Sharpness(hardylab.LabRun):
    """Sharpness experiments: route selection, and the growth of deficient Hardy sums on counterexample atoms."""

    component = 'sharpness'

    def __init__(self, config):
        super().__init__(config)
        self.config_template.update(system_template())
        self.config_template.update({
            ACTION: ConfigChoice(PARAMS, RUN),
            _P: ConfigItem(check_rational, 'Hardy space exponent p.', default='1'),
            _S: ConfigItem(check_rational, 'Power s of the coefficients.', default='1'),
            _EPS: ConfigItem(check_rational, 'Deficit epsilon of the exponent; 1/5, or 0 on the boundary route.',
                             optional=True),
            _KGRID: ConfigItem(check_int_grid, 'Comma separated grid of K.', default=DEFAULT_KGRID),
            _DELTA: ConfigItem(check_rational, 'Piece width delta of the atom.', optional=True),
            _ROUTE: ConfigChoice(*(route.value for route in sharpness.Route), optional=True),
            _K_CAP: ConfigItem(check_positive_int, 'Coefficients are computed up to this multiple of K.', default=4),
            _DELTA_CHECK: ConfigItem(check_natural, 'Repeat the fit at delta/2 (1) or not (0).', default=1),
        })

    def _start(self):
        system = build_system(self.config)
        p = rational(self.config, _P)
        route = self.config.get(_ROUTE)
        if self.config[ACTION] == PARAMS:
            setup = sharpness.derive_sharpness_params(system, p, route)
            return RunOutput({'system': system.describe(), 'p': p, **setup.to_dict()})

        params = sharpness.SharpnessParams.create(system, p, rational(self.config, _S),
                                                  optional_rational(self.config, _EPS), grid(self.config, _KGRID),
                                                  optional_rational(self.config, _DELTA), route)
        cache = coefficient_cache(self.config)
        report = sharpness.run_sharpness(params, self.config[hardylab.ABS_TOL], self.config[hardylab.REL_TOL],
                                         self.config[hardylab.PANEL_BUDGET], max(1, self.config[hardylab.THREADS]),
                                         cache, int(self.config[_K_CAP]), bool(self.config[_DELTA_CHECK]))
        cache.save()
        return RunOutput(report.summary(), report.table)
