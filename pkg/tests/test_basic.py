import pytest
import os
import sys
import json

# Add the src directory to the path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../src")))


def test_package_structure():
    """Test that the package structure is correct."""
    assert os.path.isdir(os.path.join(os.path.dirname(__file__), "../src")), "src directory should exist"
    assert os.path.isdir(os.path.join(os.path.dirname(__file__), "../src/rgbose")), "rgbose package should exist"

    key_files = [
        "../src/rgbose/__init__.py",
        "../src/rgbose/__main__.py",
        "../src/rgbose/config.py",
        "../src/rgbose/cli.py",
        "../src/rgbose/lab/cache.py",
        "../src/rgbose/lab/flows.py",
        "../src/rgbose/lab/ward.py",
        "../src/rgbose/schemas/run_config.json",
        "../src/rgbose/schemas/powercount_input.json",
        "../pyproject.toml"
    ]

    for file_path in key_files:
        full_path = os.path.join(os.path.dirname(__file__), file_path)
        assert os.path.isfile(full_path), f"{file_path} should exist"

    import rgbose
    assert hasattr(rgbose, "__version__"), "Package should have __version__ attribute"
    assert rgbose.__version__ == "0.2.0", "Package version should be 0.2.0"


def test_config_module():
    """Test that the config module has the expected attributes."""
    from rgbose import config

    expected_attributes = [
        "CACHE_DIR",
        "CACHE_ENABLED",
        "THREADS",
        "DEFAULT_TOL",
        "LOG_LEVEL",
        "CSV_SIGNIFICANT_DIGITS",
        "TREE_ENUMERATION_MAX",
        "SCHEMAS_DIR",
        "RUN_CONFIG_SCHEMA_PATH",
        "POWERCOUNT_INPUT_SCHEMA_PATH",
        "NU_HOOK_C1",
        "NU_HOOK_C2",
    ]

    for attr in expected_attributes:
        assert hasattr(config, attr), f"Config should have {attr} attribute"

    assert config.CACHE_ENABLED is False, "conftest disables the disk cache"
    assert config.CSV_SIGNIFICANT_DIGITS == 17
    assert isinstance(config.THREADS, int) and config.THREADS >= 1
    assert config.DEFAULT_TOL > 0


def test_run_config_schema_is_valid_json():
    from rgbose import config

    with open(config.RUN_CONFIG_SCHEMA_PATH) as f:
        schema = json.load(f)
    assert schema["type"] == "object"
    assert "params" in schema["properties"]


def test_powercount_input_schema_matches_regions():
    from rgbose import config
    from rgbose.lab.powercount import REGIONS

    with open(config.POWERCOUNT_INPUT_SCHEMA_PATH) as f:
        schema = json.load(f)
    assert schema["type"] == "array"
    assert tuple(schema["items"]["properties"]["regime"]["properties"]["region"]["enum"]) == REGIONS


def test_error_hierarchy():
    from rgbose.lab.errors import (
        ConfigError, ConvergenceError, DomainError, NonContractionError, QuadratureError, RGBoseError
    )

    assert issubclass(DomainError, ValueError)
    for exc in (DomainError, ConfigError, QuadratureError, ConvergenceError, NonContractionError):
        assert issubclass(exc, RGBoseError)
    assert issubclass(NonContractionError, ConvergenceError)
    assert NonContractionError("not a contraction", 1.2).ratio == 1.2
    assert QuadratureError("too coarse", 1e-3).error_estimate == 1e-3


def test_cache_disabled_computes_every_time():
    from rgbose.lab.cache import QuadratureCache

    calls = []
    cache = QuadratureCache(enabled=False)
    for _ in range(2):
        cache.get_or_compute("key", lambda: calls.append(1) or 42)
    assert len(calls) == 2


def test_cache_replays_stored_value(tmp_path):
    from rgbose.lab.cache import QuadratureCache

    calls = []
    cache = QuadratureCache(cache_dir=tmp_path, enabled=True)
    first = cache.get_or_compute("beta:n=1", lambda: calls.append(1) or 0.125)
    second = cache.get_or_compute("beta:n=1", lambda: calls.append(1) or 0.5)
    assert first == second == 0.125
    assert len(calls) == 1
