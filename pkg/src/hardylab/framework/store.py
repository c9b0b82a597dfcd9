"""Append-only JSON-lines store of run records."""

import fcntl
import json
import logging
import os
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from datetime import datetime, timezone

from .errors import Error

logger = logging.getLogger(__name__)

STORE_ENV = 'HARDYLAB_STORE'  #: Environment variable naming the default store path.


@dataclass(frozen=True)
class RunRecord:
    """One completed run, as written to the store."""

    run_id: str
    timestamp: str
    command: str
    parameters: dict
    outputs: dict
    version: str

    @classmethod
    def create(cls, run_id, command, parameters, outputs, version):
        timestamp = datetime.now(timezone.utc).isoformat(timespec='seconds')
        return cls(run_id, timestamp, command, parameters, outputs, version)

    def to_line(self):
        return json.dumps(asdict(self), sort_keys=True) + '\n'


@contextmanager
def _locked(path, mode):
    with open(path, mode, encoding='utf-8') as f:
        fcntl.flock(f, fcntl.LOCK_EX)
        try:
            yield f
        finally:
            fcntl.flock(f, fcntl.LOCK_UN)


class ResultsStore:
    """JSON-lines file with one :obj:`RunRecord` per line.

    Records are never rewritten.  All access holds an exclusive lock on the file, so concurrent processes see complete
    lines only.

    :param path: Store file, created on first append.
    """

    def __init__(self, path):
        self.path = os.fspath(path)

    @classmethod
    def from_environment(cls):
        path = os.environ.get(STORE_ENV)
        return cls(path) if path else None

    def _records(self, f):
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                yield RunRecord(**json.loads(line))
            except (json.JSONDecodeError, TypeError) as e:
                raise Error(f'Corrupt results store {self.path}, line {line_no}: {e}')

    def lookup(self, run_id):
        """Return the stored record with ``run_id``, or None."""
        if not os.path.exists(self.path):
            return None
        with _locked(self.path, 'r') as f:
            for record in self._records(f):
                if record.run_id == run_id:
                    return record
        return None

    def append(self, record):
        """Append ``record`` unless a record with the same id exists; return the record that is stored."""
        with _locked(self.path, 'a+') as f:
            f.seek(0)
            for existing in self._records(f):
                if existing.run_id == record.run_id:
                    logger.debug('Record %s already stored.', record.run_id)
                    return existing
            f.seek(0, os.SEEK_END)
            f.write(record.to_line())
            f.flush()
            os.fsync(f.fileno())
        logger.debug('Appended record %s to %s.', record.run_id, self.path)
        return record

    def records(self):
        """All stored records, in write order."""
        if not os.path.exists(self.path):
            return []
        with _locked(self.path, 'r') as f:
            return list(self._records(f))

    def sidecar(self, suffix):
        """Path of a companion file next to the store, e.g. the coefficient cache."""
        return f'{self.path}.{suffix}'
