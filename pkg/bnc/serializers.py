import math

from rest_framework import serializers

from separators.config import NUM_SEPARATORS, SEPARATOR_NAMES, SeparatorConfig
from .params import METRIC_MODES, BnCParams
from .schedule import ConfigSchedule


def _finite_or_none(value):
    return float(value) if math.isfinite(value) else None


class SeparatorConfigField(serializers.Field):
    """A config as its integer bitmask or as a list of separator names."""

    default_error_messages = {
        'invalid': 'Expected a bitmask in [0, {limit}) or a list of separator names.',
    }

    def to_internal_value(self, data):
        limit = 1 << NUM_SEPARATORS
        if isinstance(data, int) and not isinstance(data, bool) and 0 <= data < limit:
            return SeparatorConfig(data)
        if isinstance(data, list) and all(name in SEPARATOR_NAMES for name in data):
            return SeparatorConfig.from_names(data)
        self.fail('invalid', limit=limit)

    def to_representation(self, value):
        return value.bits


class ScheduleUpdateSerializer(serializers.Serializer):
    round = serializers.IntegerField(min_value=0)
    config = SeparatorConfigField()


class ConfigScheduleSerializer(serializers.Serializer):
    updates = ScheduleUpdateSerializer(many=True, allow_empty=False)
    prefix = SeparatorConfigField(required=False, allow_null=True, default=None)

    def validate_updates(self, value):
        rounds = [update['round'] for update in value]
        if any(b <= a for a, b in zip(rounds, rounds[1:])):
            raise serializers.ValidationError('Update rounds must be strictly increasing.')
        return value

    def validate(self, data):
        if data['updates'][0]['round'] != 0 and data.get('prefix') is None:
            raise serializers.ValidationError(
                {'prefix': ['Required when the first update is after round 0.']}
            )
        return data

    def create(self, validated_data):
        updates = tuple((u['round'], u['config']) for u in validated_data['updates'])
        return ConfigSchedule(updates, validated_data.get('prefix'))

    def to_representation(self, schedule):
        return {
            'updates': [{'round': n, 'config': config.bits} for n, config in schedule.updates],
            'prefix': schedule.prefix.bits if schedule.prefix is not None else None,
        }


class BnCParamsSerializer(serializers.Serializer):
    """Solver parameters; omitted fields fall back to the settings defaults."""
    max_sep_rounds_root = serializers.IntegerField(min_value=0, required=False)
    node_sep_freq = serializers.IntegerField(min_value=0, required=False)
    max_cuts_per_round = serializers.IntegerField(min_value=0, required=False)
    parallelism_thresh = serializers.FloatField(min_value=0, max_value=1, required=False)
    gap_limit = serializers.FloatField(min_value=0, required=False)
    node_limit = serializers.IntegerField(min_value=0, required=False)
    effort_limit = serializers.FloatField(min_value=0, required=False, allow_null=True)
    w_pivot = serializers.FloatField(required=False)
    w_sepcall = serializers.FloatField(required=False)
    w_node = serializers.FloatField(required=False)
    hard_stop_ratio = serializers.FloatField(min_value=0, required=False)
    metric = serializers.ChoiceField(choices=METRIC_MODES, required=False)

    def validate(self, data):
        for name in ('w_pivot', 'w_sepcall', 'w_node'):
            if name in data and data[name] <= 0:
                raise serializers.ValidationError({name: ['Effort weights must be > 0.']})
        return data

    def create(self, validated_data):
        return BnCParams(**validated_data)

    def to_representation(self, params):
        return params.as_dict()


class SolveResultSerializer(serializers.Serializer):
    """Read-only JSON view of a SolveResult; snapshots are not serialized."""

    def to_representation(self, result):
        return {
            'status': result.status.value,
            'objective': _finite_or_none(result.objective),
            'best_bound': _finite_or_none(result.best_bound),
            'gap': result.gap,
            'nodes': result.nodes,
            'sep_rounds': result.sep_rounds,
            'pivots': result.pivots,
            'effort': result.effort,
            'wall_seconds': result.wall_seconds,
            'root_bound': _finite_or_none(result.root_bound),
            'seed': result.seed,
            'sep_calls': {name: result.sep_calls.get(name, 0) for name in SEPARATOR_NAMES},
            'cuts_generated': {name: result.cuts_generated.get(name, 0) for name in SEPARATOR_NAMES},
            'cuts_applied': {name: result.cuts_applied.get(name, 0) for name in SEPARATOR_NAMES},
            'applied_updates': [
                {'round': n, 'config': config.bits} for n, config in result.applied_updates
            ],
            'solution': result.solution.tolist() if result.solution is not None else None,
        }
