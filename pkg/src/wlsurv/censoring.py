"""Censored lifetime samples and the censoring mechanisms that produce them.

A sample is a sequence of ``(time, status)`` pairs with ``status = 1`` for an
observed failure and ``0`` for a right-censored time, tagged with the scheme
that generated it:

* ``Complete()``   every unit failed;
* ``TypeI(tc)``    observation stopped at a fixed time ``tc``;
* ``TypeII(r)``    observation stopped at the ``r``-th failure;
* ``Random()``     each unit carries its own censoring time.

The on-disk format is UTF-8 CSV with header ``time,status``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .errors import DatasetError, DomainError


@dataclass(frozen=True)
class Complete:
    tag = "complete"

    def describe(self) -> dict:
        return {"type": self.tag}


@dataclass(frozen=True)
class TypeI:
    tc: float
    tag = "type1"

    def __post_init__(self):
        if not self.tc > 0:
            raise DomainError(f"t_c must be positive, got {self.tc!r}")

    def describe(self) -> dict:
        return {"type": self.tag, "tc": float(self.tc)}


@dataclass(frozen=True)
class TypeII:
    r: int
    tag = "type2"

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise DomainError(f"r must be a positive integer, got {self.r!r}")

    def describe(self) -> dict:
        return {"type": self.tag, "r": int(self.r)}


@dataclass(frozen=True)
class Random:
    tag = "random"

    def describe(self) -> dict:
        return {"type": self.tag}


Scheme = Union[Complete, TypeI, TypeII, Random]


@dataclass(frozen=True)
class Observation:
    time: float
    status: int

    def __post_init__(self):
        if not (math.isfinite(self.time) and self.time > 0):
            raise DomainError(f"time must be positive and finite, got {self.time!r}")
        if self.status not in (0, 1):
            raise DomainError(f"status must be 0 or 1, got {self.status!r}")


@dataclass(frozen=True)
class CensoredSample:
    """Immutable collection of observations plus censoring-scheme metadata.

    ``times`` and ``status`` keep the input order; estimation code never
    depends on that order.
    """

    times: np.ndarray
    status: np.ndarray
    scheme: Scheme = field(default_factory=Random)

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        status = np.array(self.status, dtype=np.int64)
        if times.ndim != 1 or times.shape != status.shape:
            raise DomainError("times and status must be 1-d arrays of equal length")
        if times.size == 0:
            raise DomainError("a sample needs at least one observation")
        if not np.all(np.isfinite(times)) or np.any(times <= 0):
            raise DomainError("all times must be positive and finite")
        if np.any((status != 0) & (status != 1)):
            raise DomainError("status values must be 0 or 1")
        times.setflags(write=False)
        status.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "status", status)
        _check_scheme(times, status, self.scheme)

    @property
    def n(self) -> int:
        return int(self.times.size)

    @property
    def d(self) -> int:
        """Number of observed failures."""
        return int(self.status.sum())

    @property
    def censored_fraction(self) -> float:
        return 1.0 - self.d / self.n

    @property
    def observations(self) -> list[Observation]:
        return [Observation(float(t), int(s)) for t, s in zip(self.times, self.status)]

    def with_scheme(self, scheme: Scheme) -> "CensoredSample":
        return CensoredSample(self.times, self.status, scheme)

    def __len__(self) -> int:
        return self.n


def _check_scheme(times, status, scheme):
    fail = times[status == 1]
    cens = times[status == 0]
    if isinstance(scheme, Complete):
        if cens.size:
            raise DomainError("a complete sample cannot contain censored observations")
    elif isinstance(scheme, TypeII):
        if fail.size != scheme.r:
            raise DomainError(f"type II sample must have exactly r={scheme.r} failures, has {fail.size}")
        if cens.size and np.any(cens != fail.max()):
            raise DomainError("type II censored times must equal the r-th failure time")
    elif isinstance(scheme, TypeI):
        if np.any(fail > scheme.tc):
            raise DomainError("type I failure times must not exceed t_c")
        if np.any(cens != scheme.tc):
            raise DomainError("type I censored times must equal t_c")
    elif not isinstance(scheme, Random):
        raise DomainError(f"unknown censoring scheme {scheme!r}")


def _lifetimes(values, name="lifetimes") -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise DomainError(f"{name} must not be empty")
    if np.any(np.isnan(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} must be positive")
    return arr


def complete(lifetimes) -> CensoredSample:
    arr = _lifetimes(lifetimes)
    return CensoredSample(arr, np.ones(arr.size, dtype=np.int64), Complete())


def apply_type2(lifetimes, r: int) -> CensoredSample:
    """Stop the test at the ``r``-th failure.

    The ``r`` smallest lifetimes are failures; every other unit is censored at
    the ``r``-th order statistic.  Input order is preserved.
    """
    arr = _lifetimes(lifetimes)
    if int(r) != r or not 1 <= r <= arr.size:
        raise DomainError(f"r must satisfy 1 <= r <= n={arr.size}, got {r!r}")
    r = int(r)
    order = np.argsort(arr, kind="stable")
    t_r = arr[order[r - 1]]
    status = np.zeros(arr.size, dtype=np.int64)
    status[order[:r]] = 1
    times = np.where(status == 1, arr, t_r)
    return CensoredSample(times, status, TypeII(r))


def apply_type1(lifetimes, tc: float) -> CensoredSample:
    """Stop the test at time ``tc``; a lifetime equal to ``tc`` is a failure."""
    arr = _lifetimes(lifetimes)
    tc = float(tc)
    if not tc > 0:
        raise DomainError(f"t_c must be positive, got {tc!r}")
    status = (arr <= tc).astype(np.int64)
    times = np.where(status == 1, arr, tc)
    if math.isinf(tc):
        return CensoredSample(times, status, Complete())
    return CensoredSample(times, status, TypeI(tc))


def apply_random(lifetimes, censor_times) -> CensoredSample:
    """Pair each lifetime with its own censoring time: ``(min(T, C), T <= C)``."""
    t = _lifetimes(lifetimes)
    c = np.asarray(censor_times, dtype=float).ravel()
    if c.shape != t.shape:
        raise DomainError(f"length mismatch: {t.size} lifetimes vs {c.size} censoring times")
    if np.any(np.isnan(c)) or np.any(c <= 0):
        raise DomainError("censoring times must be positive")
    status = (t <= c).astype(np.int64)
    return CensoredSample(np.minimum(t, c), status, Random())


def coerce_scheme(sample: CensoredSample, scheme: Scheme) -> CensoredSample:
    """Interpret a loaded sample under ``scheme``.

    An all-failure sample is censored by the requested mechanism.  A sample
    that already carries censoring must already satisfy the scheme's
    invariants; it is relabelled, never re-censored.
    """
    if isinstance(scheme, Random):
        return sample.with_scheme(scheme)
    if isinstance(scheme, Complete):
        return sample.with_scheme(scheme)
    if sample.d == sample.n:
        if isinstance(scheme, TypeII):
            return apply_type2(sample.times, scheme.r)
        return apply_type1(sample.times, scheme.tc)
    return sample.with_scheme(scheme)


# ---------------------------------------------------------------------------
# CSV I/O
# ---------------------------------------------------------------------------

HEADER = ("time", "status")


def parse_dataset(text: str | Iterable[str]) -> CensoredSample:
    """Parse ``time,status`` CSV content into a Random-scheme sample.

    Raises
    ------
    DatasetError
        With the 1-based line number and the offending field name.
    """
    if isinstance(text, str):
        text = io.StringIO(text)
    rows = csv.reader(text)
    try:
        header = next(rows)
    except StopIteration:
        raise DatasetError("empty input: missing header 'time,status'", line=1) from None
    header = [h.strip().lstrip("﻿").lower() for h in header]
    for name in HEADER:
        if name not in header:
            raise DatasetError(f"missing required column '{name}'", line=1, field=name)
    it, ist = header.index("time"), header.index("status")
    times, status = [], []
    for lineno, row in enumerate(rows, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise DatasetError(f"expected {len(header)} fields, found {len(row)}", line=lineno)
        raw_t, raw_s = row[it].strip(), row[ist].strip()
        try:
            t = float(raw_t)
        except ValueError:
            raise DatasetError(f"time is not a number: {raw_t!r}", line=lineno, field="time") from None
        if not (math.isfinite(t) and t > 0):
            raise DatasetError(f"time must be positive and finite: {raw_t!r}", line=lineno, field="time")
        if raw_s not in ("0", "1"):
            raise DatasetError(f"status must be 0 or 1: {raw_s!r}", line=lineno, field="status")
        times.append(t)
        status.append(int(raw_s))
    if not times:
        raise DatasetError("no observations after the header", line=2)
    return CensoredSample(np.array(times), np.array(status), Random())


def serialize(sample: CensoredSample) -> str:
    """Canonical CSV text; ``parse_dataset(serialize(s))`` reproduces ``s``."""
    lines = ["time,status"]
    lines += [f"{float(t)!r},{int(s)}" for t, s in zip(sample.times, sample.status)]
    return "\n".join(lines) + "\n"


def load_dataset(path: str | Path) -> CensoredSample:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return parse_dataset(text)


def bundled_path(name: str) -> Path:
    """Filesystem path of a bundled dataset (``"rats"`` or ``"devices"``)."""
    ref = resources.files("wlsurv") / "data" / f"{name}.csv"
    return Path(str(ref))


def load_bundled(name: str) -> CensoredSample:
    ref = resources.files("wlsurv") / "data" / f"{name}.csv"
    return parse_dataset(ref.read_text(encoding="utf-8"))


__all__ = [
    "Complete",
    "TypeI",
    "TypeII",
    "Random",
    "Scheme",
    "Observation",
    "CensoredSample",
    "complete",
    "apply_type1",
    "apply_type2",
    "apply_random",
    "coerce_scheme",
    "parse_dataset",
    "serialize",
    "load_dataset",
    "load_bundled",
    "bundled_path",
]
