"""
Cut pool: duplicate suppression, per-family counters and the audit trail.
"""

import logging
from pathlib import Path
from typing import Optional, Union

import pandas as pd
from pydantic import BaseModel, ConfigDict

from .models import Cut, CutFamily

logger = logging.getLogger(__name__)

CUT_LOG_COLUMNS = ["family", "ell", "scenario", "S", "Tsets", "violation", "rhs"]


class CutRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    cut: Cut
    violation: Optional[float] = None


class CutPool:
    """
    Every cut accepted during one solve, in insertion order.
    """

    def __init__(self):
        self._keys: set = set()
        self.records: list[CutRecord] = []

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, cut: Cut) -> bool:
        return cut.key() in self._keys

    @property
    def cuts(self) -> list[Cut]:
        return [record.cut for record in self.records]

    def add(self, cut: Cut, violation: Optional[float] = None) -> bool:
        """Add a cut unless an identical one is already pooled; True when added."""
        key = cut.key()
        if key in self._keys:
            return False
        self._keys.add(key)
        self.records.append(CutRecord(cut=cut, violation=violation))
        return True

    def count(self, family: CutFamily) -> int:
        return sum(1 for record in self.records if record.cut.family == family)

    def counts(self) -> dict[str, int]:
        """Cuts per family, every family present."""
        totals = {family.value: 0 for family in CutFamily}
        for record in self.records:
            totals[record.cut.family.value] += 1
        return totals

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for record in self.records:
            p = record.cut.provenance
            rows.append(
                {
                    "family": record.cut.family.value,
                    "ell": "" if p.ell is None else p.ell,
                    "scenario": "" if p.scenario is None else p.scenario,
                    "S": " ".join(str(i) for i in p.S),
                    "Tsets": ";".join(f"{i}:{' '.join(str(j) for j in T)}" for i, T in sorted(p.t_sets.items())),
                    "violation": "" if record.violation is None else record.violation,
                    "rhs": record.cut.rhs,
                }
            )
        return pd.DataFrame(rows, columns=CUT_LOG_COLUMNS)

    def write_cut_log(self, path: Union[str, Path]) -> None:
        """Write the audit trail as CSV: family,ell,scenario,S,Tsets,violation,rhs."""
        self.to_frame().to_csv(path, index=False)
        logger.info("Wrote %d cuts to %s", len(self.records), path)
