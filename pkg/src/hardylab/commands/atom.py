import json
import logging
import math
from fractions import Fraction

import pandas as pd

import hardylab
from hardylab import atoms
from hardylab.framework.config_check import (
    ConfigChoice,
    ConfigError,
    ConfigItem,
    check_exists,
    check_positive,
    check_positive_int,
    parse_number_list,
)
from hardylab.framework.run import RunOutput

from . import ACTION, check_number_list, check_rational, optional_rational, rational

logger = logging.getLogger(__name__)

_P = 'p'
_A = 'A'
_DELTA = 'delta'
_DELTAS = 'deltas'
_Q = 'q'
_ATOM = 'atom'
_DIM = 'd'

BUILD = 'build'
VALIDATE = 'validate'
CONSTANTS = 'constants'
SCALING = 'scaling'

DEFAULT_DELTAS = '1/8,1/16,1/32,1/64'


def read_atom(file):
    """Atom from a JSON file in the :func:`.atoms.atom_to_json` layout."""
    with open(file, encoding='utf-8') as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f'{file}:{e.lineno}:{e.colno}: {e.msg}', [_ATOM])
    return atoms.atom_from_json(data)


def counterexample_atom(config):
    """Atom from ``--atom FILE`` when given, else the counterexample atom of ``p``, ``A`` and ``delta``."""
    if config.get(_ATOM):
        return read_atom(config[_ATOM])
    return atoms.build_counterexample_atom(rational(config, _P), float(config[_A]), optional_rational(config, _DELTA))


def pieces_table(a):
    return pd.DataFrame([{'left': left, 'right': right, 'value': value} for left, right, value in a.pieces],
                        columns=['left', 'right', 'value'])


class Atom(hardylab.LabRun):
    """Counterexample atoms: build, validate, their exact constants, and the δ-scaling of the last constant."""

    component = 'atom'

    def __init__(self, config):
        super().__init__(config)
        self.config_template.update({
            ACTION: ConfigChoice(BUILD, VALIDATE, CONSTANTS, SCALING),
            _P: ConfigItem(check_rational, 'Hardy space exponent p, e.g. 2/3.', default='1'),
            _A: ConfigItem(check_positive, 'Dilation A >= 1.', default=1.),
            _DELTA: ConfigItem(check_rational, 'Piece width delta, e.g. 1/10.', optional=True),
            _DELTAS: ConfigItem(check_number_list, 'Comma separated grid of delta.', default=DEFAULT_DELTAS),
            _Q: ConfigChoice('2', 'inf', default='inf'),
            _ATOM: ConfigItem(check_exists, 'JSON atom file to validate.', optional=True),
            _DIM: ConfigItem(check_positive_int, 'Dimension of the product atom for validation.', default=1),
        })

    def _start(self):
        action = self.config[ACTION]
        p = rational(self.config, _P)
        if action == BUILD:
            a = counterexample_atom(self.config)
            return RunOutput(atoms.atom_to_json(a), pieces_table(a))
        if action == VALIDATE:
            a = counterexample_atom(self.config)
            d = int(self.config[_DIM])
            if d > 1:
                a = atoms.ProductAtom((a,) * d)
            q = math.inf if self.config[_Q] == 'inf' else 2
            report = atoms.validate_atom(a, p, q)
            table = pd.DataFrame({'moment': list(report.moment_residuals),
                                  'residual': list(report.moment_residuals.values())})
            table['moment'] = table['moment'].astype(str)
            return RunOutput({'p': p, 'q': self.config[_Q], 'd': d, **report.to_dict()}, table)
        P = atoms.vanishing_order(p)
        if action == CONSTANTS:
            delta = optional_rational(self.config, _DELTA) or Fraction(1, 8 * (P + 1))
            constants = atoms.counterexample_constants(P, delta)
            table = pd.DataFrame({'i': range(1, P + 2), 'C': [str(c) for c in constants],
                                  'C_float': [float(c) for c in constants]})
            return RunOutput({'p': p, 'P': P, 'delta': delta, 'constants': [str(c) for c in constants]}, table)
        deltas = [atoms.as_fraction(v) for v in parse_number_list(self.config[_DELTAS])]
        table, summary = atoms.c_last_scaling(P, deltas)
        return RunOutput({'p': p, 'P': P, **summary}, table)
