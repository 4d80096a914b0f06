"""Parameter vectors, null hypotheses and fit results shared by both models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidNull

__all__ = ["ParamVector", "NullHypothesis", "FitResult", "as_values"]

SPECIFIED = "specified"
HOMOGENEOUS = "homogeneous"


@dataclass(frozen=True, eq=False)
class ParamVector:
    """Node parameters, optionally with one coordinate pinned to zero."""

    values: np.ndarray
    reference: Optional[int] = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise ValueError("parameters must be finite")
        if self.reference is not None:
            if not 0 <= self.reference < v.size:
                raise ValueError(f"reference {self.reference} out of range")
            if v[self.reference] != 0.0:
                raise ValueError("the reference coordinate must equal 0")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, ParamVector):
            return NotImplemented
        return self.reference == other.reference and np.array_equal(
            self.values, other.values
        )

    @classmethod
    def pinned(cls, values, reference: int = 0) -> "ParamVector":
        """Shift ``values`` so that ``values[reference] == 0``."""
        v = np.asarray(values, dtype=float)
        return cls(v - v[reference], reference)


def as_values(beta) -> np.ndarray:
    return np.asarray(getattr(beta, "values", beta), dtype=float)


@dataclass(frozen=True)
class NullHypothesis:
    """Restriction of the parameter space to be tested.

    ``specified`` fixes ``beta[indices] = values``; ``homogeneous`` ties all
    of ``beta[indices]`` to one common (free) value. Indices are 0-based.
    """

    kind: str
    indices: tuple
    values: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in (SPECIFIED, HOMOGENEOUS):
            raise InvalidNull(f"unknown null kind {self.kind!r}")
        idx = [int(i) for i in self.indices]
        if len(set(idx)) != len(idx):
            raise InvalidNull("null indices must be distinct")
        if not idx:
            raise InvalidNull("null must name at least one parameter")
        if any(i < 0 for i in idx):
            raise InvalidNull("null indices must be non-negative")
        order = np.argsort(idx, kind="stable")
        object.__setattr__(self, "indices", tuple(idx[k] for k in order))
        if self.kind == SPECIFIED:
            if self.values is None or len(self.values) != len(idx):
                raise InvalidNull("a specified null needs one value per index")
            vals = [float(v) for v in self.values]
            if not all(math.isfinite(v) for v in vals):
                raise InvalidNull("null values must be finite")
            object.__setattr__(self, "values", tuple(vals[k] for k in order))
        else:
            if self.values is not None:
                raise InvalidNull("a homogeneous null takes no values")
            if len(idx) < 2:
                raise InvalidNull("a homogeneous null needs at least two indices")

    @classmethod
    def specified(cls, indices: Sequence[int], values) -> "NullHypothesis":
        return cls(SPECIFIED, tuple(indices), tuple(np.atleast_1d(values).tolist()))

    @classmethod
    def homogeneous(cls, indices: Sequence[int]) -> "NullHypothesis":
        return cls(HOMOGENEOUS, tuple(indices))

    @property
    def r(self) -> int:
        return len(self.indices)

    @property
    def is_specified(self) -> bool:
        return self.kind == SPECIFIED

    def check(self, n: int) -> None:
        if self.indices[-1] >= n:
            raise InvalidNull(f"null index {self.indices[-1]} outside [0, {n})")

    def to_json_dict(self) -> dict:
        out = {"kind": self.kind, "indices": [i + 1 for i in self.indices]}
        if self.values is not None:
            out["values"] = list(self.values)
        return out


@dataclass(frozen=True)
class FitResult:
    """Outcome of a (possibly restricted) maximum likelihood fit."""

    model: str
    beta_hat: ParamVector
    loglik: float
    iterations: int
    converged: bool
    residual_inf: float
    se: np.ndarray
    b_n: float
    c_n: float
    restricted_to: Optional[NullHypothesis] = None
    method: str = field(default="", compare=False)

    @property
    def beta(self) -> np.ndarray:
        return self.beta_hat.values

    @property
    def reference(self) -> Optional[int]:
        return self.beta_hat.reference

    @property
    def n(self) -> int:
        return len(self.beta_hat)

    def to_json_dict(self) -> dict:
        out = {
            "model": self.model,
            "n": self.n,
            "beta": self.beta.tolist(),
            "se": [None if not np.isfinite(s) else float(s) for s in self.se],
            "loglik": self.loglik,
            "iterations": self.iterations,
            "converged": self.converged,
            "residual_inf": self.residual_inf,
            "b_n": self.b_n,
            "c_n": self.c_n,
        }
        if self.restricted_to is not None:
            out["null"] = self.restricted_to.to_json_dict()
        if self.reference is not None:
            out["reference"] = self.reference + 1
        return out
