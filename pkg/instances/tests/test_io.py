import json
import math
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from core.exceptions import InstanceFormatError, InstanceValidationError
from instances.generators import generate
from instances.io import dumps_instance, loads_instance, read_instance, write_instance
from instances.problem import GE, build_instance
from instances.serializers import MilpInstanceSerializer


class InstanceFileTest(SimpleTestCase):
    """Test JSON instance files."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = Path(self.tmp.name) / 'instance.json'

    def tearDown(self):
        self.tmp.cleanup()

    def test_round_trip_every_class(self):
        """Test read(write(x)) == x for each generated class."""
        for class_tag in ('packing', 'bin_packing', 'max_cut', 'comb_auction', 'indep_set'):
            instance = generate(class_tag, seed=31)
            write_instance(instance, self.path)
            self.assertEqual(read_instance(self.path), instance)

    def test_infinite_bounds_are_null(self):
        """Test infinite bounds are written as null and restored."""
        instance = build_instance('free', [1.0, 0.5], [{0: 1, 1: 1}], [GE], [0.25],
                                  [None, 0.0], [None, 3.0], [False, True])
        document = json.loads(dumps_instance(instance))
        self.assertIsNone(document['lower'][0])
        self.assertIsNone(document['upper'][0])
        restored = loads_instance(dumps_instance(instance))
        self.assertEqual(restored.lower[0], -math.inf)
        self.assertEqual(restored, instance)

    def test_truncated_file_reports_position(self):
        """Test a truncated document raises a parse error with line and column."""
        text = dumps_instance(generate('packing', seed=1))
        self.path.write_text(text[: len(text) // 2])
        with self.assertRaises(InstanceFormatError) as ctx:
            read_instance(self.path)
        self.assertIsNotNone(ctx.exception.line)
        self.assertIsNotNone(ctx.exception.column)

    def test_lower_above_upper_is_validation_error(self):
        """Test a document with lb > ub fails model validation."""
        document = json.loads(dumps_instance(generate('bin_packing', seed=2)))
        document['lower'][0] = 2.0
        with self.assertRaises(InstanceValidationError):
            loads_instance(json.dumps(document))

    def test_wrong_format_version(self):
        """Test an unknown format_version is reported on its field."""
        document = json.loads(dumps_instance(generate('packing', seed=1)))
        document['format_version'] = 2
        with self.assertRaises(InstanceFormatError) as ctx:
            loads_instance(json.dumps(document))
        self.assertIn('format_version', ctx.exception.errors)


class MilpInstanceSerializerTest(SimpleTestCase):
    """Test the instance serializer field validation."""

    def setUp(self):
        self.document = json.loads(dumps_instance(generate('indep_set', seed=5)))

    def test_valid_document(self):
        """Test a generated document validates."""
        serializer = MilpInstanceSerializer(data=self.document)
        self.assertTrue(serializer.is_valid(), serializer.errors)

    def test_entry_out_of_range(self):
        """Test a triplet outside the matrix shape is rejected."""
        self.document['entries'].append([0, self.document['num_vars'], 1.0])
        serializer = MilpInstanceSerializer(data=self.document)
        self.assertFalse(serializer.is_valid())
        self.assertIn('entries', serializer.errors)

    def test_length_mismatch(self):
        """Test an objective of the wrong length is rejected."""
        self.document['objective'] = self.document['objective'][:-1]
        serializer = MilpInstanceSerializer(data=self.document)
        self.assertFalse(serializer.is_valid())
        self.assertIn('objective', serializer.errors)

    def test_missing_field(self):
        """Test a missing required field is reported."""
        del self.document['rhs']
        serializer = MilpInstanceSerializer(data=self.document)
        self.assertFalse(serializer.is_valid())
        self.assertIn('rhs', serializer.errors)

    def test_bad_sense(self):
        """Test an unknown row sense is rejected."""
        self.document['senses'][0] = '<'
        serializer = MilpInstanceSerializer(data=self.document)
        self.assertFalse(serializer.is_valid())
        self.assertIn('senses', serializer.errors)
