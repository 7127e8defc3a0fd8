import math

import numpy as np
import scipy.sparse as sp
from rest_framework import serializers

from .problem import SENSES, ClassTag, MilpInstance

FORMAT_VERSION = 1


def _bound_to_json(value):
    return None if math.isinf(value) else float(value)


class MilpInstanceSerializer(serializers.Serializer):
    """
    JSON document for a MilpInstance (format_version 1).

    Constraints travel as explicit sparse triplets [row, col, coeff]; infinite
    bounds are written as null. `save()` returns a validated MilpInstance.
    """
    format_version = serializers.IntegerField()
    name = serializers.CharField(max_length=200)
    class_tag = serializers.ChoiceField(choices=ClassTag.choices, default=ClassTag.CUSTOM)
    num_vars = serializers.IntegerField(min_value=0)
    num_cons = serializers.IntegerField(min_value=0)
    objective = serializers.ListField(child=serializers.FloatField())
    senses = serializers.ListField(child=serializers.ChoiceField(choices=SENSES))
    rhs = serializers.ListField(child=serializers.FloatField())
    lower = serializers.ListField(child=serializers.FloatField(allow_null=True))
    upper = serializers.ListField(child=serializers.FloatField(allow_null=True))
    integer = serializers.ListField(child=serializers.IntegerField(min_value=0))
    entries = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(), min_length=3, max_length=3)
    )
    metadata = serializers.JSONField(required=False, default=dict)

    def validate_format_version(self, value):
        if value != FORMAT_VERSION:
            raise serializers.ValidationError(
                f'Unsupported format_version {value}; expected {FORMAT_VERSION}.'
            )
        return value

    def validate_metadata(self, value):
        if not isinstance(value, dict):
            raise serializers.ValidationError('metadata must be an object.')
        return value

    def validate(self, data):
        n, m = data['num_vars'], data['num_cons']
        errors = {}
        for field_name, size in (('objective', n), ('lower', n), ('upper', n),
                                 ('senses', m), ('rhs', m)):
            if len(data[field_name]) != size:
                errors[field_name] = [f'Expected {size} values, got {len(data[field_name])}.']
        bad_integer = [j for j in data['integer'] if j >= n]
        if bad_integer:
            errors['integer'] = [f'Column index {bad_integer[0]} out of range.']
        for k, (row, col, coeff) in enumerate(data['entries']):
            if row != int(row) or not 0 <= row < m or col != int(col) or not 0 <= col < n:
                errors['entries'] = [f'Entry {k} has index ({row}, {col}) outside {m}x{n}.']
                break
            if not math.isfinite(coeff):
                errors['entries'] = [f'Entry {k} has a non-finite coefficient.']
                break
        if errors:
            raise serializers.ValidationError(errors)
        return data

    def create(self, validated_data):
        n, m = validated_data['num_vars'], validated_data['num_cons']
        entries = validated_data['entries']
        rows = [int(e[0]) for e in entries]
        cols = [int(e[1]) for e in entries]
        data = [e[2] for e in entries]
        integer = np.zeros(n, dtype=bool)
        integer[validated_data['integer']] = True
        return MilpInstance(
            name=validated_data['name'],
            objective=validated_data['objective'],
            matrix=sp.csr_matrix((data, (rows, cols)), shape=(m, n)),
            senses=validated_data['senses'],
            rhs=validated_data['rhs'],
            lower=[-math.inf if v is None else v for v in validated_data['lower']],
            upper=[math.inf if v is None else v for v in validated_data['upper']],
            integer=integer,
            class_tag=validated_data['class_tag'],
            metadata=validated_data.get('metadata') or {},
        )

    def to_representation(self, instance):
        coo = instance.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return {
            'format_version': FORMAT_VERSION,
            'name': instance.name,
            'class_tag': str(instance.class_tag),
            'num_vars': instance.num_vars,
            'num_cons': instance.num_cons,
            'objective': instance.objective.tolist(),
            'senses': list(instance.senses),
            'rhs': instance.rhs.tolist(),
            'lower': [_bound_to_json(v) for v in instance.lower],
            'upper': [_bound_to_json(v) for v in instance.upper],
            'integer': instance.integer_indices.tolist(),
            'entries': [
                [int(coo.row[k]), int(coo.col[k]), float(coo.data[k])] for k in order
            ],
            'metadata': instance.metadata,
        }
