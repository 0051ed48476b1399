from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from detlab.errors import DomainError
from detlab.rational import Rat, format_rat


@dataclass(frozen=True)
class DetMaxSolution:
    subset: tuple[int, ...]
    value: Rat

    @property
    def k(self) -> int:
        return len(self.subset)

    def to_dict(self) -> dict:
        # 1-based indices at the file boundary
        return {
            "subset": [i + 1 for i in self.subset],
            "value": format_rat(self.value),
        }


@dataclass
class Failure:
    message: str
    counterexample: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"message": self.message, "counterexample": self.counterexample}


@dataclass
class VerificationReport:
    suite: str
    trials: int = 0
    failures: list[Failure] = field(default_factory=list)
    wall_time: float = 0.0
    memory: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def fail(self, message: str, counterexample: Optional[dict] = None) -> None:
        self.failures.append(Failure(message, counterexample or {}))

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "trials": self.trials,
            "passed": self.passed,
            "failures": [f.to_dict() for f in self.failures],
            "wall_time_seconds": round(self.wall_time, 3),
            "memory": self.memory,
        }


@dataclass
class RunConfig:
    command: str
    selector: Optional[str] = None
    k: Optional[int] = None
    eps: Optional[Fraction] = None
    trials: Optional[int] = None
    seed: int = 0
    max_subsets: Optional[int] = None
    max_bits: Optional[int] = None
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in ("solve", "reduce", "verify", "gen"):
            raise DomainError(f"Unknown command: {self.command}")
        for name in ("max_subsets", "max_bits", "trials"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise DomainError(f"{name} must be positive, got {value}")

    def to_dict(self) -> dict:
        result: dict[str, Any] = {"command": self.command, "seed": self.seed}
        if self.selector is not None:
            result["selector"] = self.selector
        if self.k is not None:
            result["k"] = self.k
        if self.eps is not None:
            result["eps"] = format_rat(self.eps)
        if self.trials is not None:
            result["trials"] = self.trials
        if self.max_subsets is not None:
            result["max_subsets"] = self.max_subsets
        if self.max_bits is not None:
            result["max_bits"] = self.max_bits
        result.update(self.extra)
        return result
