import logging
from importlib.metadata import PackageNotFoundError, version

import hardylab.parameters
from hardylab.framework.config_check import ConfigError, ConfigItem, check_natural, check_positive, check_positive_int
from hardylab.framework.run import Run

try:
    dist_name = 'hardylab'
    __version__ = version(dist_name)
except PackageNotFoundError:  # pragma: no cover
    __version__ = "unknown"
finally:
    del PackageNotFoundError

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

ABS_TOL = 'abs_tol'
REL_TOL = 'rel_tol'
PANEL_BUDGET = 'panel_budget'
SPECTRAL_TOL = 'spectral_tol'
THREADS = 'threads'


class LabRun(Run):
    """Run class with the numerical settings shared by all hardylab commands."""

    component = None  #: Command name, to be set in each subclass.
    software_name = 'hardylab'

    def __init__(self, config):
        """Initialize a hardylab run."""
        super().__init__(config)
        self.root_logger = logger
        defaults = hardylab.parameters.defaults
        self.config_template.update({
            ABS_TOL: ConfigItem(check_positive, 'Absolute quadrature tolerance.', default=defaults[ABS_TOL]),
            REL_TOL: ConfigItem(check_positive, 'Relative quadrature tolerance.', default=defaults[REL_TOL]),
            PANEL_BUDGET: ConfigItem(check_positive_int, 'Maximum number of quadrature panels.',
                                     default=defaults[PANEL_BUDGET]),
            SPECTRAL_TOL: ConfigItem(check_positive, 'Tail tolerance for spectral sums.', default=defaults[SPECTRAL_TOL]),
            THREADS: ConfigItem(check_natural, 'Worker threads.', default=defaults[THREADS]),
        })
        logger.debug('Running with config:\n%s', config)

    def _configure(self):
        """Add extra configure steps for hardylab.

        - Check the numeric settings are of the right type, so a YAML string like ``'1e-12'`` is caught early.
        """
        super()._configure()
        for key in (ABS_TOL, REL_TOL, SPECTRAL_TOL):
            self.config[key] = float(self.config[key])
        for key in (PANEL_BUDGET, THREADS):
            if int(self.config[key]) != self.config[key]:
                raise ConfigError(f'{key} must be an integer, got {self.config[key]}.', [key])
            self.config[key] = int(self.config[key])

    def version(self):
        return __version__

    def version_info(self):
        """Return string with describing version of hardylab and its main dependencies."""
        return f'hardylab version {__version__} using ' \
               f'numpy {version("numpy")}, scipy {version("scipy")}, pandas {version("pandas")}'
