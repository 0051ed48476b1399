import logging
from math import comb
from typing import Optional

import psutil

from detlab.config import LabConfig
from detlab.errors import ResourceLimitError

logger = logging.getLogger("detlab.resources")


class ResourceGuard:
    """Refuses enumerations that would not finish at desk scale."""

    def __init__(self, config: Optional[LabConfig] = None):
        self.config = config or LabConfig()

    @property
    def limits(self):
        return self.config.limits

    def check_subsets(self, n: int, k: int) -> int:
        count = comb(n, k)
        if count > self.limits.max_subsets:
            raise ResourceLimitError(
                f"C({n},{k}) = {count} subsets exceeds max_subsets={self.limits.max_subsets}"
            )
        logger.debug(f"Enumerating {count} subsets of size {k} from {n}")
        return count

    def check_assignments(self, count: int) -> int:
        if count > self.limits.max_assignments:
            raise ResourceLimitError(
                f"{count} assignments exceeds max_assignments={self.limits.max_assignments}"
            )
        return count

    def check_bits(self, denominator: int, what: str = "precision") -> None:
        bits = denominator.bit_length()
        if bits > self.limits.max_bits:
            raise ResourceLimitError(
                f"{what} needs {bits} bits, exceeds max_bits={self.limits.max_bits}"
            )

    def check_gadget(self, ell: int) -> None:
        if ell > self.limits.max_gadget_ell:
            raise ResourceLimitError(
                f"gadget order ell={ell} exceeds max_gadget_ell={self.limits.max_gadget_ell}"
            )

    @property
    def workers(self) -> int:
        return max(1, self.config.parallel.workers)

    @property
    def chunk_size(self) -> int:
        return max(1, self.config.parallel.chunk_size)

    def get_memory_stats(self) -> dict:
        try:
            rss = psutil.Process().memory_info().rss
        except psutil.Error as e:
            logger.debug(f"Could not read process memory: {e}")
            return {"available": False}
        return {"available": True, "rss_mb": round(rss / (1024**2), 2)}
