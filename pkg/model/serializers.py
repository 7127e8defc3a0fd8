from dataclasses import asdict

import numpy as np
from rest_framework import serializers

from core.exceptions import CheckpointMismatchError
from .net import NODE_KINDS, Architecture, RewardNet

CHECKPOINT_VERSION = 1


class ArchitectureSerializer(serializers.Serializer):
    variable_dim = serializers.IntegerField(min_value=1)
    constraint_dim = serializers.IntegerField(min_value=1)
    separator_dim = serializers.IntegerField(min_value=1)
    hidden = serializers.IntegerField(min_value=1)
    heads = serializers.IntegerField(min_value=1)
    dropout = serializers.FloatField(min_value=0, max_value=1)

    def validate(self, data):
        if data['hidden'] % data['heads']:
            raise serializers.ValidationError({'heads': ['Must divide hidden.']})
        return data

    def create(self, validated_data):
        return Architecture(**validated_data)


class CheckpointSerializer(serializers.Serializer):
    """
    Versioned JSON checkpoint of a RewardNet. The stored architecture hash
    must match the architecture it ships with.
    """
    version = serializers.IntegerField()
    architecture = ArchitectureSerializer()
    architecture_hash = serializers.CharField()
    params = serializers.DictField(child=serializers.JSONField())
    stats = serializers.DictField(child=serializers.ListField(child=serializers.ListField()))
    stats_frozen = serializers.BooleanField()

    def validate_version(self, value):
        if value != CHECKPOINT_VERSION:
            raise serializers.ValidationError(f'Unsupported checkpoint version {value}.')
        return value

    def create(self, validated_data):
        architecture = Architecture(**validated_data['architecture'])
        if architecture.digest() != validated_data['architecture_hash']:
            raise CheckpointMismatchError('Checkpoint architecture hash does not match its architecture.')
        net = RewardNet(architecture)
        if set(validated_data['params']) != set(net.params):
            raise CheckpointMismatchError('Checkpoint parameters do not match the architecture.')
        for name, shaped in net.params.items():
            value = np.asarray(validated_data['params'][name], dtype=float)
            if value.shape != shaped.shape:
                raise CheckpointMismatchError(f'Parameter {name} has shape {value.shape}, expected {shaped.shape}.')
            net.params[name] = value
        net.stats = {
            kind: tuple(np.asarray(part, dtype=float) for part in validated_data['stats'][kind])
            for kind in NODE_KINDS
        }
        net.stats_frozen = validated_data['stats_frozen']
        return net

    def to_representation(self, net):
        return {
            'version': CHECKPOINT_VERSION,
            'architecture': asdict(net.architecture),
            'architecture_hash': net.architecture.digest(),
            'params': {name: p.tolist() for name, p in net.params.items()},
            'stats': {kind: [mu.tolist(), sigma.tolist()] for kind, (mu, sigma) in net.stats.items()},
            'stats_frozen': net.stats_frozen,
        }
