import logging

import hardylab
from hardylab import atoms, hardy
from hardylab.framework.config_check import ConfigChoice, ConfigItem, check_exists, check_natural, \
    check_positive
from hardylab.framework.run import RunOutput

from . import ACTION, build_system, check_rational, coefficient_cache, optional_rational, rational, \
    system_template
from .atom import counterexample_atom

logger = logging.getLogger(__name__)

_P = 'p'
_S = 's'
_E = 'E'
_A = 'A'
_DELTA = 'delta'
_ATOM = 'atom'
_K_MAX = 'kmax'

GAMMA = 'gamma'
EXPONENT = 'exponent'
SUM = 'sum'


class Hardy(hardylab.LabRun):
    """Kernel regularity exponents, admissible exponents and Hardy sums of atoms."""

    component = 'hardy'

    def __init__(self, config):
        super().__init__(config)
        self.config_template.update(system_template())
        self.config_template.update({
            ACTION: ConfigChoice(GAMMA, EXPONENT, SUM),
            _P: ConfigItem(check_rational, 'Hardy space exponent p.', default='1'),
            _S: ConfigItem(check_rational, 'Power s of the coefficients.', default='1'),
            _E: ConfigItem(check_rational, 'Exponent E; defaults to the admissible exponent.', optional=True),
            _A: ConfigItem(check_positive, 'Dilation of the counterexample atom.', default=1.),
            _DELTA: ConfigItem(check_rational, 'Piece width of the counterexample atom.', optional=True),
            _ATOM: ConfigItem(check_exists, 'JSON atom file.', optional=True),
            _K_MAX: ConfigItem(check_natural, 'Largest shell |n| summed explicitly.', default=64),
        })

    def _start(self):
        action = self.config[ACTION]
        system = build_system(self.config, placeholder=action in (GAMMA, EXPONENT))
        gamma = hardy.gamma_for(system)
        summary = {'system': system.describe(), 'action': action, 'gamma': gamma}
        if action == GAMMA:
            return RunOutput(summary)
        p, s = rational(self.config, _P), rational(self.config, _S)
        d = system.d
        E_admissible = hardy.admissible_exponent(p, s, d, gamma)
        if action == EXPONENT:
            E_theorem = hardy.theorem_exponent(system, p, s)
            summary.update({'p': p, 's': s, 'd': d, 'E': E_theorem, 'E_admissible': E_admissible,
                            'consistent': E_theorem == E_admissible})
            return RunOutput(summary)

        params = hardy.HardyExponentParams.for_system(system, p, s, optional_rational(self.config, _E))
        a = counterexample_atom(self.config)
        if d > 1:
            a = atoms.ProductAtom((a,) * d)
        cache = coefficient_cache(self.config)
        result = hardy.hardy_sum(system, a, params, int(self.config[_K_MAX]), self.config[hardylab.ABS_TOL], cache)
        cache.save()
        summary.update({'p': p, 's': s, 'd': d, 'E': params.E, **result.to_dict()})
        return RunOutput(summary)
