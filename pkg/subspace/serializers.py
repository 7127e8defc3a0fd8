import math

from rest_framework import serializers

from bnc.serializers import SeparatorConfigField
from .restriction import RestrictedSubspace


class StepSerializer(serializers.Serializer):
    step = serializers.IntegerField(min_value=1)
    config = serializers.IntegerField(min_value=0)
    gain = serializers.FloatField()
    erm_performance = serializers.FloatField()
    mean_agnostic = serializers.FloatField()
    worst_agnostic = serializers.FloatField()


class RestrictedSubspaceSerializer(serializers.Serializer):
    """A restricted subspace; an unbounded filter is written as a null threshold."""
    configs = serializers.ListField(child=SeparatorConfigField(), allow_empty=False)
    threshold = serializers.FloatField(allow_null=True, default=None)
    steps = StepSerializer(many=True, required=False, default=list)

    def validate_configs(self, value):
        if len(set(value)) != len(value):
            raise serializers.ValidationError('Subspace configs must be distinct.')
        return value

    def create(self, validated_data):
        threshold = validated_data['threshold']
        return RestrictedSubspace(
            configs=list(validated_data['configs']),
            threshold=-math.inf if threshold is None else threshold,
            steps=[dict(step) for step in validated_data['steps']],
        )

    def to_representation(self, subspace):
        return {
            'configs': [config.bits for config in subspace.configs],
            'threshold': subspace.threshold if math.isfinite(subspace.threshold) else None,
            'steps': list(subspace.steps),
        }
