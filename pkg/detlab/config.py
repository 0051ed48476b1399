from pathlib import Path
from typing import Optional

import yaml
from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


DEFAULT_CONFIG_DIR = Path.home() / ".detmax_lab"


class LimitSettings(BaseModel):
    max_subsets: int = 5_000_000
    max_assignments: int = 2_000_000
    max_bits: int = 4096
    max_gadget_ell: int = 8

    @field_validator("max_subsets", "max_assignments", "max_bits", "max_gadget_ell")
    @classmethod
    def must_be_positive(cls, v: int) -> int:
        if v <= 0:
            raise ValueError(f"resource bound must be positive, got {v}")
        return v


class LogSettings(BaseModel):
    level: str = "INFO"
    file: Optional[str] = None


class VerifySettings(BaseModel):
    trials: int = 50
    seed: int = 0


class ParallelSettings(BaseModel):
    workers: int = 1
    chunk_size: int = 4096


class LabConfig(BaseModel):
    limits: LimitSettings = Field(default_factory=LimitSettings)
    log: LogSettings = Field(default_factory=LogSettings)
    verify: VerifySettings = Field(default_factory=VerifySettings)
    parallel: ParallelSettings = Field(default_factory=ParallelSettings)

    def with_limits(
        self, max_subsets: Optional[int] = None, max_bits: Optional[int] = None
    ) -> "LabConfig":
        updates = {}
        if max_subsets is not None:
            updates["max_subsets"] = max_subsets
        if max_bits is not None:
            updates["max_bits"] = max_bits
        if not updates:
            return self
        limits = LimitSettings(**{**self.limits.model_dump(), **updates})
        return self.model_copy(update={"limits": limits})

    def save_config(self, path: Path) -> None:
        with open(path, "w") as f:
            yaml.dump(self.model_dump(), f, default_flow_style=False, sort_keys=False)


class EnvSettings(BaseSettings):
    """Environment overrides, also read from a local .env file."""

    model_config = SettingsConfigDict(
        env_prefix="DETMAX_LAB_", env_file=".env", extra="ignore"
    )

    max_bits: Optional[int] = None
    max_subsets: Optional[int] = None
    log_level: Optional[str] = None
    log_file: Optional[str] = None
    workers: Optional[int] = None


def load_config(config_path: Optional[str] = None) -> LabConfig:
    search_paths = [
        config_path,
        "./detlab.yaml",
        "./config.yaml",
        DEFAULT_CONFIG_DIR / "config.yaml",
    ]

    data: dict = {}
    for path in search_paths:
        if path and Path(path).exists():
            with open(path, "r") as f:
                data = yaml.safe_load(f) or {}
            break

    env = EnvSettings()
    if env.max_bits is not None:
        data.setdefault("limits", {})["max_bits"] = env.max_bits
    if env.max_subsets is not None:
        data.setdefault("limits", {})["max_subsets"] = env.max_subsets
    if env.log_level:
        data.setdefault("log", {})["level"] = env.log_level
    if env.log_file:
        data.setdefault("log", {})["file"] = env.log_file
    if env.workers is not None:
        data.setdefault("parallel", {})["workers"] = env.workers

    return LabConfig(**data)
