"""Unit tests for configuration loading and resource guards."""

import pytest
import yaml
from pydantic import ValidationError

from detlab.config import LabConfig, LimitSettings, load_config
from detlab.errors import ResourceLimitError
from detlab.resources import ResourceGuard


@pytest.fixture
def isolated(temp_dir, monkeypatch):
    """Run from an empty directory with no DETMAX_LAB_ variables set."""
    monkeypatch.chdir(temp_dir)
    for name in ("MAX_BITS", "MAX_SUBSETS", "LOG_LEVEL", "LOG_FILE", "WORKERS"):
        monkeypatch.delenv(f"DETMAX_LAB_{name}", raising=False)
    return temp_dir


class TestLabConfig:
    """Tests for the configuration model."""

    def test_defaults(self, config):
        assert config.limits.max_subsets == 5_000_000
        assert config.limits.max_bits == 4096
        assert config.log.level == "INFO"
        assert config.parallel.workers == 1

    def test_with_limits(self, config):
        updated = config.with_limits(max_subsets=7)
        assert updated.limits.max_subsets == 7
        assert updated.limits.max_bits == config.limits.max_bits
        assert config.limits.max_subsets == 5_000_000

    def test_with_no_limits_is_identity(self, config):
        assert config.with_limits() is config

    def test_rejects_nonpositive_bound(self):
        with pytest.raises(ValidationError):
            LimitSettings(max_bits=0)

    def test_save_and_reload(self, isolated):
        config = LabConfig(limits=LimitSettings(max_bits=128))
        path = isolated / "saved.yaml"
        config.save_config(path)
        assert yaml.safe_load(path.read_text())["limits"]["max_bits"] == 128
        assert load_config(str(path)) == config


class TestLoadConfig:
    def test_defaults_without_files(self, isolated):
        assert load_config() == LabConfig()

    def test_reads_local_yaml(self, isolated):
        (isolated / "detlab.yaml").write_text("limits:\n  max_subsets: 99\n")
        assert load_config().limits.max_subsets == 99

    def test_env_overrides_file(self, isolated, monkeypatch):
        """Should let DETMAX_LAB_ variables win over the YAML file."""
        path = isolated / "custom.yaml"
        path.write_text("limits:\n  max_bits: 100\nlog:\n  level: DEBUG\n")
        monkeypatch.setenv("DETMAX_LAB_MAX_BITS", "512")
        monkeypatch.setenv("DETMAX_LAB_WORKERS", "3")
        config = load_config(str(path))
        assert config.limits.max_bits == 512
        assert config.log.level == "DEBUG"
        assert config.parallel.workers == 3

    def test_invalid_yaml_value(self, isolated):
        path = isolated / "bad.yaml"
        path.write_text("limits:\n  max_subsets: -1\n")
        with pytest.raises(ValidationError):
            load_config(str(path))


class TestResourceGuard:
    """Tests for the enumeration and precision guards."""

    def test_subsets(self, tight_guard):
        assert tight_guard.check_subsets(5, 2) == 10
        with pytest.raises(ResourceLimitError, match="max_subsets"):
            tight_guard.check_subsets(6, 2)

    def test_assignments(self, tight_guard):
        assert tight_guard.check_assignments(10) == 10
        with pytest.raises(ResourceLimitError):
            tight_guard.check_assignments(11)

    def test_bits(self, tight_guard):
        tight_guard.check_bits(2**63)
        with pytest.raises(ResourceLimitError, match="bits"):
            tight_guard.check_bits(2**64, "delta")

    def test_gadget(self, guard):
        guard.check_gadget(8)
        with pytest.raises(ResourceLimitError, match="max_gadget_ell"):
            guard.check_gadget(10)

    def test_workers_floor(self):
        guard = ResourceGuard(LabConfig(parallel={"workers": 0, "chunk_size": 0}))
        assert guard.workers == 1
        assert guard.chunk_size == 1

    def test_memory_stats(self, guard):
        stats = guard.get_memory_stats()
        assert stats["available"] is True
        assert stats["rss_mb"] > 0
