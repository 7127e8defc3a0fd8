"""Base class for the l2sep management commands."""

import json
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from core.exceptions import ConfigurationError, L2SepError

logger = logging.getLogger(__name__)


class L2SepCommand(BaseCommand):
    """
    Runs `execute_command` and maps domain errors onto exit codes:
    configuration problems exit with 2, numerical failures with 3.
    """

    def execute_command(self, *args, **options):
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            return self.execute_command(*args, **options)
        except L2SepError as exc:
            logger.error('%s failed: %s', self.__module__.rsplit('.', 1)[-1], exc)
            raise CommandError(str(exc), returncode=exc.exit_code) from exc

    @staticmethod
    def load_json(path, label='file'):
        if path is None:
            return None
        try:
            return json.loads(Path(path).read_text())
        except FileNotFoundError as exc:
            raise ConfigurationError(f'{label} {path} does not exist.') from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(
                f'{label} {path}: {exc.msg} (line {exc.lineno}, column {exc.colno})'
            ) from exc

    @staticmethod
    def validated(serializer_class, data, label, context=None):
        serializer = serializer_class(data=data, context=context or {})
        if not serializer.is_valid():
            raise ConfigurationError(f'Invalid {label}: {json.dumps(serializer.errors)}')
        return serializer.save()
