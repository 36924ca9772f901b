"""
Problem data for chance-constrained static lot-sizing.

An `Instance` holds the horizon, the equiprobable demand scenarios, the cost
vectors and the risk level. `DemandStats` caches everything the formulations and
the cut generators derive from the demands: cumulative demands, per-period
scenario rankings, the top-k sets and the big-M vector.

Periods and scenarios are 0-based throughout the Python API.
"""

import hashlib
import logging
import math
from pathlib import Path
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import InstanceDimensionError, InstanceParseError, InstanceValidationError

logger = logging.getLogger(__name__)

# floor(m * epsilon) is taken with this slack so that 0.29 * 100 gives 29
_FLOOR_SLACK = 1e-9


def risk_budget(m: int, epsilon: float) -> int:
    """Number of scenarios that may be violated, k = floor(m * epsilon), kept below m."""
    return min(int(math.floor(m * epsilon + _FLOOR_SLACK)), max(m - 1, 0))


class Instance(BaseModel):
    """
    Immutable instance of the static probabilistic lot-sizing problem.

    Scenarios are equiprobable (probability 1/m each); this is a structural
    assumption, not a field.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = Field(..., ge=1, description="Number of periods")
    m: int = Field(..., ge=1, description="Number of scenarios")
    epsilon: float = Field(..., description="Risk level in [0, 1)")
    f: tuple[float, ...] = Field(..., description="Fixed setup cost per period")
    c: tuple[float, ...] = Field(..., description="Unit production cost per period")
    h: tuple[float, ...] = Field(..., description="Unit holding cost per period")
    d: tuple[tuple[float, ...], ...] = Field(..., description="Demand matrix, one row of n periods per scenario")

    @field_validator("epsilon")
    @classmethod
    def _epsilon_in_range(cls, v: float) -> float:
        if not math.isfinite(v) or v < 0.0 or v >= 1.0:
            raise ValueError("epsilon must be in [0, 1)")
        return v

    @field_validator("f", "c", "h")
    @classmethod
    def _costs_nonnegative(cls, v: tuple[float, ...], info) -> tuple[float, ...]:
        for value in v:
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"{info.field_name} must be finite and nonnegative")
        return v

    @field_validator("d")
    @classmethod
    def _demands_nonnegative(cls, v: tuple[tuple[float, ...], ...]) -> tuple[tuple[float, ...], ...]:
        for row in v:
            for value in row:
                if not math.isfinite(value) or value < 0.0:
                    raise ValueError("d must be finite and nonnegative")
        return v

    @model_validator(mode="after")
    def _check_dimensions(self) -> "Instance":
        for name in ("f", "c", "h"):
            size = len(getattr(self, name))
            if size != self.n:
                raise ValueError(f"dimension mismatch: {name} has {size} entries, expected n={self.n}")
        if len(self.d) != self.m:
            raise ValueError(f"dimension mismatch: d has {len(self.d)} rows, expected m={self.m}")
        for j, row in enumerate(self.d):
            if len(row) != self.n:
                raise ValueError(f"dimension mismatch: d row {j} has {len(row)} entries, expected n={self.n}")
        return self

    @property
    def k(self) -> int:
        """Maximum number of violated scenarios."""
        return risk_budget(self.m, self.epsilon)

    def demand_array(self) -> np.ndarray:
        """Demand matrix as an m x n float array."""
        return np.asarray(self.d, dtype=float).reshape(self.m, self.n)


class DemandStats(BaseModel):
    """
    Scenario statistics shared by formulations, cut generators and oracles.

    `sigma_desc[i]` lists scenarios by cumulative demand at period i, largest
    first; `sigma_asc[i]` smallest first. Ties go to the lower scenario index in
    both orders. `tstar[i]` holds the first k entries of `sigma_desc[i]`.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    m: int
    k: int
    D: np.ndarray = Field(..., description="Cumulative demand, m x n")
    sigma_desc: np.ndarray = Field(..., description="n x m scenario ranking, descending")
    sigma_asc: np.ndarray = Field(..., description="n x m scenario ranking, ascending")
    tstar: np.ndarray = Field(..., description="n x k top-k scenarios per period")
    M: np.ndarray = Field(..., description="Big-M vector, length n")

    def cum(self, j: int, i: int) -> float:
        """D[j, i] with the convention D[j, -1] = 0."""
        if i < 0:
            return 0.0
        return float(self.D[j, i])

    def closing(self, i: int) -> int:
        """Scenario ranked k+1 at period i (sigma_{i(k+1)})."""
        return int(self.sigma_desc[i, self.k])

    def top(self, i: int) -> float:
        """Largest cumulative demand at period i."""
        return float(self.D[self.sigma_desc[i, 0], i])

    def top_set(self, i: int) -> tuple[int, ...]:
        """T*_i as a tuple in descending order."""
        return tuple(int(j) for j in self.tstar[i])

    def rank_of(self, i: int, j: int) -> int:
        """Position of scenario j in sigma_desc[i]."""
        return int(np.flatnonzero(self.sigma_desc[i] == j)[0])


def cumulative_demands(inst: Instance) -> np.ndarray:
    """Prefix sums of every demand row: D[j, i] = sum of d[j, 0..i]."""
    return np.cumsum(inst.demand_array(), axis=1)


def rank_scenarios(D: np.ndarray, i: int) -> tuple[np.ndarray, np.ndarray]:
    """Descending and ascending scenario orders at period i, ties by index."""
    column = D[:, i]
    desc = np.argsort(-column, kind="stable")
    asc = np.argsort(column, kind="stable")
    return desc, asc


def big_m(D: np.ndarray) -> np.ndarray:
    """M_i = max over scenarios of the demand still to come from period i on."""
    totals = D[:, -1][:, None]
    before = np.hstack([np.zeros((D.shape[0], 1)), D[:, :-1]])
    return np.max(totals - before, axis=0)


def demand_stats(inst: Instance) -> DemandStats:
    D = cumulative_demands(inst)
    desc_rows, asc_rows = [], []
    for i in range(inst.n):
        desc, asc = rank_scenarios(D, i)
        desc_rows.append(desc)
        asc_rows.append(asc)
    sigma_desc = np.vstack(desc_rows).astype(int)
    sigma_asc = np.vstack(asc_rows).astype(int)
    k = inst.k
    return DemandStats(
        n=inst.n,
        m=inst.m,
        k=k,
        D=D,
        sigma_desc=sigma_desc,
        sigma_asc=sigma_asc,
        tstar=sigma_desc[:, :k].copy(),
        M=big_m(D),
    )


class GeneratorConfig(BaseModel):
    """Inclusive integer ranges of the discrete uniform generators."""

    model_config = ConfigDict(frozen=True)

    f_range: tuple[int, int] = (50, 100)
    c_range: tuple[int, int] = (5, 10)
    d_range: tuple[int, int] = (10, 30)
    h_range: tuple[int, int] = (30, 60)

    @field_validator("f_range", "c_range", "d_range", "h_range")
    @classmethod
    def _range_ordered(cls, v: tuple[int, int], info) -> tuple[int, int]:
        lo, hi = v
        if lo < 0 or hi < lo:
            raise ValueError(f"{info.field_name} must satisfy 0 <= lo <= hi")
        return v


def generate(n: int, m: int, epsilon: float, seed: int, config: Optional[GeneratorConfig] = None) -> Instance:
    """
    Draw a random instance; identical arguments give identical instances.
    """
    config = config or GeneratorConfig()
    rng = np.random.default_rng(seed)

    def draw(bounds: tuple[int, int], size) -> np.ndarray:
        return rng.integers(bounds[0], bounds[1], size=size, endpoint=True).astype(float)

    f = draw(config.f_range, n)
    c = draw(config.c_range, n)
    h = draw(config.h_range, n)
    d = draw(config.d_range, (m, n))
    return Instance(
        n=n,
        m=m,
        epsilon=epsilon,
        f=tuple(f.tolist()),
        c=tuple(c.tolist()),
        h=tuple(h.tolist()),
        d=tuple(tuple(row) for row in d.tolist()),
    )


def instance_id(inst: Instance) -> str:
    """Short content hash identifying an instance."""
    return hashlib.sha1(inst.model_dump_json().encode("utf-8")).hexdigest()[:12]


def save(inst: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(inst.model_dump_json(), encoding="utf-8")


def load(path: Union[str, Path]) -> Instance:
    """
    Read an instance JSON file.

    Raises InstanceParseError for malformed documents and missing fields,
    InstanceDimensionError when sizes disagree, and InstanceValidationError for
    out-of-range values.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        return Instance.model_validate_json(text)
    except ValidationError as exc:
        raise _translate(exc) from exc


def parse(payload: Union[str, bytes, dict]) -> Instance:
    """Validate an instance given as JSON text or a decoded mapping."""
    try:
        if isinstance(payload, dict):
            return Instance.model_validate(payload)
        return Instance.model_validate_json(payload)
    except ValidationError as exc:
        raise _translate(exc) from exc


def _translate(exc: ValidationError) -> Exception:
    error = exc.errors()[0]
    kind = error.get("type", "")
    loc = ".".join(str(part) for part in error.get("loc", ()))
    message = error.get("msg", "")
    if kind == "missing":
        return InstanceParseError(f"missing field {loc}")
    if kind == "extra_forbidden":
        return InstanceParseError(f"unexpected field {loc}")
    if kind == "json_invalid":
        return InstanceParseError(f"malformed instance document: {message}")
    if "dimension mismatch" in message:
        return InstanceDimensionError(message.removeprefix("Value error, "))
    if kind == "value_error" or kind.startswith("greater_than"):
        return InstanceValidationError(f"{loc}: {message.removeprefix('Value error, ')}" if loc else message)
    logger.debug("Unmapped validation error %s at %s", kind, loc)
    return InstanceParseError(f"invalid field {loc}: {message}")
