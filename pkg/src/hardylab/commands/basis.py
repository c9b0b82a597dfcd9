import logging

import pandas as pd

import hardylab
from hardylab import bases
from hardylab.framework.config_check import ConfigItem, check_natural
from hardylab.framework.run import RunOutput

from . import POINTS, build_system, check_number_list, point_grid, system_template

logger = logging.getLogger(__name__)

_K = 'k'
_U = 'u'
_DERIV = 'deriv'


class Basis(hardylab.LabRun):
    """Values φ_k(u), or derivatives φ_k^{(j)}(u), of a one-dimensional system on a grid."""

    component = 'basis'

    def __init__(self, config):
        super().__init__(config)
        self.config_template.update(system_template())
        self.config_template.update({
            _K: ConfigItem(check_natural, 'Index k.'),
            _U: ConfigItem(check_number_list, 'Comma separated evaluation points.', optional=True),
            POINTS: ConfigItem(description='File with evaluation points.', optional=True),
            _DERIV: ConfigItem(check_natural, 'Derivative order.', default=0),
        })

    def _start(self):
        system = build_system(self.config)
        k, j = int(self.config[_K]), int(self.config[_DERIV])
        u = point_grid(self.config, _U)
        logger.debug('Evaluating %s, k=%d, j=%d on %d points.', system.family.value, k, j, u.size)
        if j == 0:
            values = bases.eval_1d(system, k, u)
        else:
            values = bases.eval_deriv_1d(system, k, j, u)
        table = pd.DataFrame({'u': u, 'value': values})
        return RunOutput({'system': system.describe(), 'k': k, 'deriv': j}, table)
