"""Scalar arithmetic: exact rationals (gmpy2.mpq) or IEEE doubles.

The active mode only decides how raw inputs are converted when structures are
built.  Equality decisions are made by :func:`is_zero` / :func:`eq`, which look
at the value type: exact values compare exactly, floats compare against the
tolerance of the active context.
"""

from __future__ import annotations

import contextvars
import math
import os
import re
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator

import gmpy2
import numpy as np

from .errors import ExactModeUnsupported

mpq = gmpy2.mpq

EXACT = "exact"
FLOAT = "float"
DEFAULT_TOL = 1e-9

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+(\s*/\s*[+-]?\d+)?\s*$")


@dataclass(frozen=True)
class Arithmetic:
    mode: str = EXACT
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        if self.mode not in (EXACT, FLOAT):
            raise ValueError(f"unknown arithmetic mode {self.mode!r}")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")


def _initial() -> Arithmetic:
    mode = os.environ.get("FSTRUCT_MODE", EXACT).strip().lower() or EXACT
    return Arithmetic(mode=mode)


_current: contextvars.ContextVar[Arithmetic] = contextvars.ContextVar(
    "fstruct_arithmetic", default=_initial()
)


def current() -> Arithmetic:
    return _current.get()


def is_exact_mode() -> bool:
    return _current.get().mode == EXACT


def tolerance() -> float:
    return _current.get().tol


@contextmanager
def arithmetic(mode: str | None = None, tol: float | None = None) -> Iterator[Arithmetic]:
    """Temporarily switch arithmetic mode and/or tolerance."""
    base = _current.get()
    ctx = Arithmetic(mode=mode or base.mode, tol=base.tol if tol is None else tol)
    token = _current.set(ctx)
    try:
        yield ctx
    finally:
        _current.reset(token)


def set_arithmetic(mode: str | None = None, tol: float | None = None) -> Arithmetic:
    """Set the session-wide arithmetic context (used by the CLI)."""
    base = _current.get()
    ctx = Arithmetic(mode=mode or base.mode, tol=base.tol if tol is None else tol)
    _current.set(ctx)
    return ctx


# ---------------------------------------------------------------- conversion

def parse_rational(text: str) -> Any:
    """Parse ``"p"`` or ``"p/q"``; anything else is rejected with ValueError."""
    if not _RATIONAL_RE.match(text):
        raise ValueError(f"not a rational literal: {text!r}")
    return mpq(text.replace(" ", ""))


def scalar(x: Any) -> Any:
    """Convert ``x`` to a scalar of the active mode."""
    if is_exact_mode():
        if isinstance(x, (bool, np.bool_)):
            return mpq(int(x))
        if isinstance(x, (int, np.integer)):
            return mpq(int(x))
        if isinstance(x, type(mpq(0))):
            return x
        if isinstance(x, Fraction):
            return mpq(x.numerator, x.denominator)
        if isinstance(x, str):
            try:
                return parse_rational(x)
            except ValueError:
                raise ExactModeUnsupported(f"entry {x!r} is not an exact rational") from None
        if isinstance(x, (float, np.floating)):
            raise ExactModeUnsupported(f"float entry {x!r} in exact mode")
        raise TypeError(f"cannot convert {type(x).__name__} to an exact scalar")
    if isinstance(x, str):
        try:
            return float(parse_rational(x))
        except ValueError:
            return float(x)
    return float(x)


def array(data: Any) -> np.ndarray:
    """Build an array of scalars in the active mode."""
    if is_exact_mode():
        raw = np.asarray(data, dtype=object)
        out = np.empty(raw.shape, dtype=object)
        for idx, v in np.ndenumerate(raw):
            out[idx] = scalar(v)
        return out
    raw = np.asarray(data, dtype=object)
    out = np.empty(raw.shape, dtype=float)
    for idx, v in np.ndenumerate(raw):
        out[idx] = scalar(v)
    return out


def zeros(shape: int | tuple[int, ...], like: np.ndarray | None = None) -> np.ndarray:
    exact = is_exact(like) if like is not None else is_exact_mode()
    if exact:
        out = np.empty(shape, dtype=object)
        out.fill(mpq(0))
        return out
    return np.zeros(shape, dtype=float)


def identity(n: int, like: np.ndarray | None = None) -> np.ndarray:
    out = zeros((n, n), like=like)
    one = mpq(1) if out.dtype == object else 1.0
    for i in range(n):
        out[i, i] = one
    return out


def is_exact(a: Any) -> bool:
    if isinstance(a, np.ndarray):
        return a.dtype == object
    return not isinstance(a, (float, np.floating))


def as_float(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        return np.vectorize(float, otypes=[float])(a) if a.size else np.zeros(a.shape)
    return np.asarray(a, dtype=float)


def sqrt(x: Any) -> Any:
    """Square root; exact when ``x`` is the square of a rational."""
    if is_exact(x):
        q = mpq(x)
        if q < 0:
            raise ValueError("square root of a negative number")
        num, den = q.numerator, q.denominator
        rn, rd = gmpy2.isqrt(num), gmpy2.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return mpq(rn, rd)
        raise ExactModeUnsupported(f"sqrt({q}) is irrational")
    return math.sqrt(x)


# ---------------------------------------------------------------- comparator

def magnitude(a: Any) -> Any:
    """Max-norm of an array (or absolute value of a scalar); 0 for empty input."""
    if isinstance(a, np.ndarray):
        if a.size == 0:
            return mpq(0) if a.dtype == object else 0.0
        return abs(a).max()
    return abs(a)


def is_zero(a: Any, tol: float | None = None) -> bool:
    """The single zero test used throughout: exact for rationals, ``<= tol`` for floats."""
    m = magnitude(a)
    if is_exact(m):
        return m == 0
    return float(m) <= (tolerance() if tol is None else tol)


def eq(a: Any, b: Any, tol: float | None = None) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        a, b = np.asarray(a), np.asarray(b)
        if a.shape != b.shape:
            return False
    return is_zero(a - b, tol)


def to_plain(x: Any) -> Any:
    """Defect value as a Python number (exact stays mpq)."""
    return x if is_exact(x) else float(x)


def fmt(x: Any) -> str:
    """Rationals as ``p/q``; floats with 12 significant digits."""
    if is_exact(x):
        return str(mpq(x))
    v = float(x)
    if v == 0:
        v = 0.0
    return f"{v:.12g}"
