import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from django.conf import settings
from rest_framework import serializers

from core.exceptions import ConfigurationError
from separators.config import SeparatorConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BufferEntry:
    instance: str
    update_index: int
    config: SeparatorConfig
    fingerprint: str
    reward: float


class BufferEntrySerializer(serializers.Serializer):
    instance = serializers.CharField()
    update_index = serializers.IntegerField(min_value=0)
    config = serializers.IntegerField(min_value=0)
    width = serializers.IntegerField(min_value=1)
    fingerprint = serializers.CharField()
    reward = serializers.FloatField()

    def create(self, validated_data):
        return BufferEntry(
            instance=validated_data['instance'],
            update_index=validated_data['update_index'],
            config=SeparatorConfig(validated_data['config'], validated_data['width']),
            fingerprint=validated_data['fingerprint'],
            reward=validated_data['reward'],
        )

    def to_representation(self, entry):
        return {
            'instance': entry.instance,
            'update_index': entry.update_index,
            'config': entry.config.bits,
            'width': entry.config.width,
            'fingerprint': entry.fingerprint,
            'reward': entry.reward,
        }


@dataclass
class BanditBuffer:
    """
    Append-only (instance, update, config, reward) records. Graphs are kept
    in memory for refitting; the JSON-lines file at `path` holds the records.
    """
    path: Path = None
    r_min: float = field(default_factory=lambda: settings.L2SEP['R_MIN'])
    entries: list = field(default_factory=list)
    graphs: list = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    def append(self, instance, update_index, config, graph, reward):
        if reward < self.r_min - 1e-12:
            raise ConfigurationError(f'Reward {reward} is below r_min={self.r_min}.')
        entry = BufferEntry(instance, update_index, config, graph.fingerprint(), float(reward))
        self.entries.append(entry)
        self.graphs.append(graph)
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open('a') as stream:
                stream.write(json.dumps(BufferEntrySerializer(entry).data) + '\n')
        return entry

    def samples(self):
        return list(zip(self.graphs, [entry.reward for entry in self.entries]))

    def rewards(self):
        return [entry.reward for entry in self.entries]


def read_buffer(path):
    """Records of a JSON-lines buffer file (without graphs)."""
    entries = []
    for number, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        serializer = BufferEntrySerializer(data=json.loads(line))
        if not serializer.is_valid():
            raise ConfigurationError(f'{path}:{number}: {json.dumps(serializer.errors)}')
        entries.append(serializer.save())
    return entries
