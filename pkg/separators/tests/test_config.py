import numpy as np
from django.test import SimpleTestCase

from core.exceptions import ConfigurationError
from separators.config import NUM_SEPARATORS, SEPARATOR_NAMES, SeparatorConfig, all_configs


class SeparatorConfigTest(SimpleTestCase):
    """Test the separator activation bitmask."""

    def test_all_on_and_off(self):
        """Test the extreme configurations."""
        self.assertEqual(SeparatorConfig.all_on().count, NUM_SEPARATORS)
        self.assertEqual(SeparatorConfig.all_off().active, ())

    def test_bit_order_is_least_significant_first(self):
        """Test bit k switches on the k-th separator name."""
        config = SeparatorConfig(0b101)
        self.assertEqual(config.names, (SEPARATOR_NAMES[0], SEPARATOR_NAMES[2]))
        self.assertEqual(str(config), '00000101')

    def test_from_names_and_vector(self):
        """Test names and 0/1 vectors build the same configuration."""
        by_name = SeparatorConfig.from_names(['clique', 'gomory_mir'])
        by_vector = SeparatorConfig.from_vector(by_name.vector())
        self.assertEqual(by_name, by_vector)
        np.testing.assert_array_equal(by_name.vector(), [0, 1, 0, 0, 1, 0, 0, 0])

    def test_out_of_range_bits(self):
        """Test masks wider than the separator count are rejected."""
        with self.assertRaises(ConfigurationError):
            SeparatorConfig(1 << NUM_SEPARATORS)
        with self.assertRaises(ConfigurationError):
            SeparatorConfig(-1)

    def test_flip_and_hamming(self):
        """Test flipping one bit moves the configuration by Hamming distance one."""
        config = SeparatorConfig(0b1100)
        flipped = config.flip(0)
        self.assertEqual(flipped.bits, 0b1101)
        self.assertEqual(config.hamming(flipped), 1)

    def test_subsets(self):
        """Test a configuration with k active separators has 2^k subsets."""
        subsets = SeparatorConfig(0b1011).subsets()
        self.assertEqual(len(subsets), 8)
        self.assertTrue(all(s.bits & ~0b1011 == 0 for s in subsets))

    def test_all_configs(self):
        """Test the full configuration space is enumerated once each."""
        configs = all_configs(3)
        self.assertEqual(len(configs), 8)
        self.assertEqual(len(set(configs)), 8)
