from rest_framework import serializers

from bandit.config import INFERENCE_STRATEGIES, TrainRunConfig, TrainRunConfigSerializer, update_rounds_for
from bnc.params import BnCParams
from bnc.serializers import BnCParamsSerializer, SeparatorConfigField
from instances.generators import GENERATORS
from .baselines import Evaluation, MethodSample
from .config import METHODS, OBJECTIVES, ExperimentConfig


class ExperimentConfigSerializer(serializers.Serializer):
    """
    Experiment config file. Omitted fields take the desk-scale defaults; the
    update rounds follow the instance class unless the run config gives them.
    """
    name = serializers.SlugField(max_length=100)
    class_tag = serializers.ChoiceField(choices=sorted(str(tag) for tag in GENERATORS))
    seed = serializers.IntegerField(min_value=0, required=False)
    k_small = serializers.IntegerField(min_value=1, required=False)
    k_large = serializers.IntegerField(min_value=1, required=False)
    valid = serializers.IntegerField(min_value=0, required=False)
    test = serializers.IntegerField(min_value=1, required=False)
    full_size = serializers.BooleanField(required=False)
    params = BnCParamsSerializer(required=False)
    n_random = serializers.IntegerField(min_value=0, required=False)
    hamming_radius = serializers.IntegerField(min_value=0, required=False)
    subspace_size = serializers.IntegerField(min_value=1, required=False)
    threshold = serializers.FloatField(allow_null=True, required=False)
    resubspace_at_update2 = serializers.BooleanField(required=False)
    hold_out_filter = serializers.BooleanField(required=False, default=False)
    run_cfg = TrainRunConfigSerializer(required=False)
    objective = serializers.ChoiceField(choices=OBJECTIVES, required=False)
    gap_limit_fraction = serializers.FloatField(min_value=0, max_value=1, required=False)
    inference_strategy = serializers.ChoiceField(choices=INFERENCE_STRATEGIES + ('validate',),
                                                 required=False)
    methods = serializers.ListField(child=serializers.ChoiceField(choices=METHODS), required=False,
                                    allow_empty=False)

    def validate_hold_out_filter(self, value):
        if value:
            raise serializers.ValidationError('Hold-out filtering is not supported.')
        return value

    def validate(self, data):
        run_cfg = data.get('run_cfg', {})
        if data.get('resubspace_at_update2') and run_cfg.get('steps', 2) < 2:
            raise serializers.ValidationError(
                {'resubspace_at_update2': ['A second subspace needs at least two update steps.']}
            )
        if run_cfg.get('configs_per_instance', 8) > data.get('subspace_size', 12):
            raise serializers.ValidationError(
                {'run_cfg': ['configs_per_instance cannot exceed subspace_size.']}
            )
        return data

    def create(self, validated_data):
        data = dict(validated_data)
        data.pop('hold_out_filter')
        if 'params' in data:
            data['params'] = BnCParams(**data['params'])
        run_data = dict(data.pop('run_cfg', {}))
        if 'update_rounds' not in run_data:
            run_data['update_rounds'] = update_rounds_for(data['class_tag'], run_data.get('steps', 2))
        data['run_cfg'] = TrainRunConfig(**run_data)
        return ExperimentConfig(**data).validate()

    def to_representation(self, config):
        return config.as_dict()


class MethodSampleSerializer(serializers.Serializer):
    method = serializers.CharField()
    instance = serializers.CharField()
    delta = serializers.FloatField()
    status = serializers.CharField()
    measure = serializers.FloatField(allow_null=True)
    gap = serializers.FloatField(allow_null=True)
    configs = serializers.ListField(child=SeparatorConfigField())

    def create(self, validated_data):
        data = dict(validated_data)
        data['configs'] = tuple(data['configs'])
        return MethodSample(**data)


class EvaluationSerializer(serializers.Serializer):
    """Per-instance samples of every method, grouped by method on load."""
    objective = serializers.ChoiceField(choices=OBJECTIVES)
    strategy = serializers.ChoiceField(choices=INFERENCE_STRATEGIES)
    samples = MethodSampleSerializer(many=True)

    def create(self, validated_data):
        results = {}
        for item in validated_data['samples']:
            sample = MethodSampleSerializer().create(item)
            results.setdefault(sample.method, []).append(sample)
        return Evaluation(validated_data['objective'], validated_data['strategy'], results)

    def to_representation(self, evaluation):
        return {
            'objective': evaluation.objective,
            'strategy': evaluation.strategy,
            'samples': MethodSampleSerializer(
                [sample for samples in evaluation.results.values() for sample in samples], many=True,
            ).data,
        }
