import json
import logging
from pathlib import Path

from core.exceptions import CheckpointMismatchError, ConfigurationError
from .serializers import CheckpointSerializer

logger = logging.getLogger(__name__)


def save_net(net, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(CheckpointSerializer(net).data))
    logger.info('Saved %d-parameter network to %s', net.param_count, path)


def load_net(path, architecture=None):
    """Load a checkpoint, refusing it when `architecture` is given and differs."""
    path = Path(path)
    try:
        document = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigurationError(f'Checkpoint {path} does not exist.') from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f'Checkpoint {path}: {exc.msg}') from exc
    if architecture is not None and document.get('architecture_hash') != architecture.digest():
        raise CheckpointMismatchError(f'Checkpoint {path} was written for a different architecture.')
    serializer = CheckpointSerializer(data=document)
    if not serializer.is_valid():
        raise ConfigurationError(f'Invalid checkpoint {path}: {json.dumps(serializer.errors)}')
    return serializer.save()
