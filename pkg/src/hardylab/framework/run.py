"""Base implementation of a run."""

import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import pandas as pd
import yaml

from .config_check import ConfigCheck
from .store import ResultsStore, RunRecord

logger = logging.getLogger(__name__)
_log_format = logging.Formatter('%(asctime)s %(name)s [%(levelname)s] - %(message)s')
_logfile_handler = None

logging.captureWarnings(True)
warnlogger = logging.getLogger('py.warnings')

#: Config keys which influence where or how results are written, but not the results themselves.
OUTPUT_KEYS = frozenset({'format', 'out', 'store', 'log_dir', 'verbose', 'config', 'threads', 'command'})


def set_up_console_logging(root_logger, verbose=False):
    """Install a log handler that prints to the terminal."""
    ch = logging.StreamHandler()
    ch.setFormatter(_log_format)
    ch.setLevel(logging.DEBUG if verbose else logging.WARNING)
    root_logger.addHandler(ch)
    warnlogger.addHandler(ch)


def set_up_logfile(log_dir, root_logger, verbose=False, filename='hardylab.log'):
    """Install a log handler that prints to a file in the provided directory."""
    global _logfile_handler
    os.makedirs(log_dir, exist_ok=True)
    fh = logging.FileHandler(os.path.join(log_dir, filename), encoding='utf-8')
    fh.setLevel(logging.DEBUG if verbose else logging.INFO)
    fh.setFormatter(_log_format)

    root_logger.addHandler(fh)
    warnlogger.addHandler(fh)
    _logfile_handler = fh


def remove_logfile_handler(root_logger):
    """Remove the log file handler, so repeated runs in one process do not write each line several times."""
    global _logfile_handler
    if _logfile_handler is not None:
        root_logger.removeHandler(_logfile_handler)
        warnlogger.removeHandler(_logfile_handler)
        _logfile_handler.close()
        _logfile_handler = None


def to_jsonable(value):
    """Convert ``value`` to plain JSON types with a deterministic representation.

    Fractions become ``"num/den"`` strings, numpy scalars and arrays become Python numbers and lists, and non-finite
    floats become the strings ``"nan"``, ``"inf"`` and ``"-inf"``.
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, pd.DataFrame):
        return {'columns': [str(c) for c in value.columns],
                'rows': [[to_jsonable(v) for v in row] for row in value.itertuples(index=False, name=None)]}
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else int(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    if hasattr(value, 'value') and hasattr(value, 'name'):  # Enum
        return value.value
    return value


@dataclass(frozen=True)
class RunOutput:
    """What a run produces: a JSON summary and an optional table for CSV output."""

    summary: dict
    table: pd.DataFrame = field(default=None, compare=False)

    def to_json(self):
        result = dict(self.summary)
        if self.table is not None:
            result['table'] = self.table
        return to_jsonable(result)


def write_output(outputs, fmt, out=None):
    """Write stored run outputs as JSON or CSV to ``out`` (a path) or return the text when ``out`` is None."""
    if fmt == 'json':
        text = json.dumps(outputs, sort_keys=True, indent=2) + '\n'
    else:
        text = outputs_to_frame(outputs).to_csv(index=False, float_format='%.17g', lineterminator='\n')
    if out is None:
        return text
    with open(out, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    return text


def outputs_to_frame(outputs):
    """Table of a stored output: its ``table`` entry when present, else a single row of scalar summary values."""
    table = outputs.get('table')
    if table is not None:
        return pd.DataFrame(table['rows'], columns=table['columns'])
    scalars = {key: value for key, value in sorted(outputs.items()) if not isinstance(value, (dict, list))}
    return pd.DataFrame([scalars])


class Run:
    """Common skeleton for all runs, takes care of logging, config validation and the results store.

    :param config: dictionary containing all configuration for the current run.
    """

    component = None  #: Name of the command, to be set in subclasses.
    software_name = 'hardylab'

    def __init__(self, config):
        """Initialize a run from a config dict.

        :param config: Dictionary describing run settings and input.

        """
        logger.debug('Run.__init__')
        self.config_template = {
        }  #: Dictionary of :obj:`.config_check.ConfigItem` describing the required configuration for this run.

        # When running from the command line, config contains a 'func' attribute set by the argparse subparsers.  It
        # must not end up in the parameter set used for the run id.
        config.pop('func', None)
        self.config = config
        self.root_logger = logger  #: root logger for Run log file.  Can be overridden in subclass
        self.record = None  #: :obj:`.store.RunRecord` once the run has finished.

    def start(self):
        """Call this method to start the actual calculation.

        Wraps :meth:`.config_check.ConfigCheck.validate` and :meth:`Run._start` with exception handlers, and looks up
        or appends the run in the results store.

        :return: The :obj:`.store.RunRecord` of this run.
        """
        global _logfile_handler
        if _logfile_handler is None and self.config.get('log_dir'):
            set_up_logfile(self.config['log_dir'], self.root_logger, self.config.get('verbose', False))
        logger.info(self.version_info())

        try:
            self._configure()
            logger.debug('Validated configuration:\n%s', yaml.safe_dump(to_jsonable(self.parameters_for_id()),
                                                                        sort_keys=True))
            store = ResultsStore(self.config['store']) if self.config.get('store') else None
            run_id = self.run_id()
            record = store.lookup(run_id) if store is not None else None
            if record is not None:
                logger.info('Run %s found in store %s, returning stored record.', run_id, store.path)
            else:
                output = self._start()
                record = RunRecord.create(run_id, self.component, to_jsonable(self.parameters_for_id()),
                                          output.to_json(), self.version())
                if store is not None:
                    record = store.append(record)
        except BaseException:
            logger.exception('Error:')
            raise
        self.record = record
        logger.info('Run complete.')
        return record

    def _configure(self):
        """Check configuration against :attr:`config_template`, filling in defaults."""
        ConfigCheck(self.config_template, self.config).validate()

    def parameters_for_id(self):
        """The parameter set that identifies this run: all validated config keys that influence results."""
        return {key: value for key, value in sorted(self.config.items()) if key not in OUTPUT_KEYS}

    def run_id(self):
        """Content hash of the command and its parameter set."""
        payload = json.dumps({'command': self.component, 'parameters': to_jsonable(self.parameters_for_id())},
                             sort_keys=True)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()

    def _start(self):
        """Start the actual calculation, returning a :obj:`RunOutput`.

        This method should be implemented in each subclass.
        """
        raise NotImplementedError

    def version(self):
        """Version string of the software, stored in each record."""
        raise NotImplementedError

    def version_info(self):
        """Return a string describing package and dependency versions.

        This method should be implemented in each subclass.
        """
        raise NotImplementedError
