import os
import tempfile
import unittest
from fractions import Fraction
from unittest.mock import patch

from .config import get_config, get_config_path, parse_fraction, reset_config_cache


class TestConfig(unittest.TestCase):
    def setUp(self):
        reset_config_cache()

    def tearDown(self):
        reset_config_cache()

    def test_packaged_defaults(self):
        with patch.dict(os.environ, {}, clear=False):
            os.environ.pop("LCPACK_CONFIG", None)
            self.assertEqual(get_config("gap_max_bins"), 4)
            self.assertEqual(get_config("lpack_min_eps"), "1/4")
            self.assertEqual(get_config("no_such_key", 7), 7)

    def test_local_file_overrides_single_keys(self):
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "override.yml")
            with open(path, "w", encoding="utf-8") as handle:
                handle.write("layout_budget: 5\n")
            with patch.dict(os.environ, {"LCPACK_CONFIG": path}):
                self.assertEqual(get_config_path(), path)
                self.assertEqual(get_config("layout_budget"), 5)
                self.assertEqual(get_config("gap_max_bins"), 4)

    def test_missing_override_is_ignored(self):
        with patch.dict(os.environ, {"LCPACK_CONFIG": "/no/such/file.yml"}):
            self.assertIsNone(get_config_path())
            self.assertEqual(get_config("layout_k_max"), 2)

    def test_parse_fraction(self):
        self.assertEqual(parse_fraction("1/4"), Fraction(1, 4))
        self.assertEqual(parse_fraction(" 0.25 "), Fraction(1, 4))
        self.assertEqual(parse_fraction(0.1), Fraction(1, 10))
        self.assertEqual(parse_fraction(3), Fraction(3))
        for bad in ("a/b", True, "1/0"):
            with self.assertRaises(ValueError):
                parse_fraction(bad)


if __name__ == "__main__":
    unittest.main()
