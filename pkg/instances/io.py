import json
import logging
from pathlib import Path

from core.exceptions import InstanceFormatError
from .serializers import MilpInstanceSerializer

logger = logging.getLogger(__name__)


def dumps_instance(instance):
    return json.dumps(MilpInstanceSerializer(instance).data, indent=1, allow_nan=False)


def loads_instance(text, source='<string>'):
    """Parse a JSON instance document; errors carry line/column or field details."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            f'{source}: malformed instance file: {exc.msg}', line=exc.lineno, column=exc.colno,
        ) from exc
    if not isinstance(document, dict):
        raise InstanceFormatError(f'{source}: top-level value must be an object.', line=1, column=1)

    serializer = MilpInstanceSerializer(data=document)
    if not serializer.is_valid():
        raise InstanceFormatError(
            f'{source}: invalid instance document.', errors=dict(serializer.errors),
        )
    return serializer.save()


def write_instance(instance, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_instance(instance))
    logger.debug('Wrote %s to %s', instance.name, path)


def read_instance(path):
    path = Path(path)
    return loads_instance(path.read_text(), source=str(path))


def read_instances(directory):
    """All *.json instances under `directory`, ordered by file name."""
    return [read_instance(p) for p in sorted(Path(directory).glob('*.json'))]
