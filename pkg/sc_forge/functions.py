"""Function specifications used for f, g and ρ.

A ``FunctionSpec`` is either an explicit table or one formula from a small
catalog with rational parameters. Formulas involving logarithms are defined
as their value rounded down to the dyadic grid 2^-DYADIC_BITS, which makes
every evaluation an exact ``Fraction``.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Optional

from mpmath import iv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from sc_forge.constants import THRESHOLD_SCAN_LIMIT
from sc_forge.errors import InputError
from sc_forge.exact import enclose, exact_log2, floor_on_grid

logger = logging.getLogger(__name__)

Formula = Literal["ceil_sqrt", "n_over_log2_sq", "log_composite", "affine", "constant"]

_ALIASES: dict[str, Formula] = {
    "sqrt": "ceil_sqrt",
    "ceil_sqrt": "ceil_sqrt",
    "nlog2sq": "n_over_log2_sq",
    "n_over_log2_sq": "n_over_log2_sq",
    "logcomp": "log_composite",
    "log_composite": "log_composite",
    "affine": "affine",
    "const": "constant",
    "constant": "constant",
}

_SHORT_NAMES: dict[Formula, str] = {
    "ceil_sqrt": "sqrt",
    "n_over_log2_sq": "nlog2sq",
    "log_composite": "logcomp",
    "affine": "affine",
    "constant": "const",
}

# parameter names in positional order, with defaults
_PARAMS: dict[Formula, tuple[tuple[str, str], ...]] = {
    "ceil_sqrt": (("c", "1"),),
    "n_over_log2_sq": (("c", "1"),),
    "log_composite": (("p", "1/2"),),
    "affine": (("a", "1"), ("b", "0")),
    "constant": (("c", "0"),),
}


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {text!r}") from exc


def _canonical(value: Fraction) -> str:
    return str(Fraction(value))


class FunctionSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["formula", "table"] = "formula"
    formula: Optional[Formula] = None
    params: tuple[tuple[str, str], ...] = ()
    table: tuple[tuple[int, str], ...] = ()
    minimum: Optional[str] = None
    viable: bool = False
    domain_max: int = Field(default=1024, ge=1)

    @model_validator(mode="after")
    def _check(self) -> "FunctionSpec":
        if self.kind == "formula":
            if self.formula is None:
                raise ValueError("formula specs need a formula name")
            allowed = {name for name, _ in _PARAMS[self.formula]}
            unknown = [name for name, _ in self.params if name not in allowed]
            if unknown:
                raise ValueError(f"unknown parameters for {self.formula}: {', '.join(unknown)}")
            for _, text in self.params:
                Fraction(text)
            if self.formula in ("ceil_sqrt", "n_over_log2_sq") and self.param("c") < 0:
                raise ValueError("scale parameter must be nonnegative")
        else:
            if not self.table:
                raise ValueError("table specs need at least one entry")
            keys = [k for k, _ in self.table]
            if len(set(keys)) != len(keys) or min(keys) < 1:
                raise ValueError("table keys must be distinct positive integers")
            for _, text in self.table:
                Fraction(text)
        if self.minimum is not None:
            Fraction(self.minimum)
        if self.viable:
            problem = self.viability_problem()
            if problem:
                raise ValueError(f"function is not viable: {problem}")
        return self

    # --- construction -------------------------------------------------

    @classmethod
    def parse(cls, text: str, *, viable: bool = False, domain_max: int = 1024) -> "FunctionSpec":
        """Parse `sqrt`, `const:6`, `affine:a=1/2,b=3`, `logcomp:p=1/2`, `table:1=6,2=7`, each with optional `min=`"""
        name, _, rest = text.strip().partition(":")
        name = name.strip().lower()
        items = [item.strip() for item in rest.split(",") if item.strip()]
        minimum = None
        try:
            if name == "table":
                entries = []
                for item in items:
                    key, sep, value = item.partition("=")
                    if not sep:
                        raise InputError(f"table entries are key=value, got {item!r}")
                    if key.strip() == "min":
                        minimum = _canonical(parse_rational(value))
                        continue
                    entries.append((int(key), _canonical(parse_rational(value))))
                return cls(kind="table", table=tuple(sorted(entries)), minimum=minimum,
                           viable=viable, domain_max=domain_max)
            if name not in _ALIASES:
                raise InputError(f"unknown function {name!r}; known: {', '.join(sorted(_ALIASES))}, table")
            formula = _ALIASES[name]
            order = [param for param, _ in _PARAMS[formula]]
            params: dict[str, str] = {}
            for position, item in enumerate(items):
                key, sep, value = item.partition("=")
                if not sep:
                    if position >= len(order):
                        raise InputError(f"too many values for {name}")
                    key, value = order[position], item
                key = key.strip()
                if key == "min":
                    minimum = _canonical(parse_rational(value))
                else:
                    params[key] = _canonical(parse_rational(value))
            return cls(formula=formula, params=tuple(sorted(params.items())), minimum=minimum,
                       viable=viable, domain_max=domain_max)
        except ValidationError as exc:
            raise InputError(f"invalid function spec {text!r}: {exc.errors()[0]['msg']}") from exc
        except ValueError as exc:
            raise InputError(f"invalid function spec {text!r}: {exc}") from exc

    def describe(self) -> str:
        if self.kind == "table":
            items = [f"{k}={v}" for k, v in self.table]
        else:
            items = [f"{k}={v}" for k, v in self.params]
        if self.minimum is not None:
            items.append(f"min={self.minimum}")
        head = "table" if self.kind == "table" else _SHORT_NAMES[self.formula]
        return f"{head}:{','.join(items)}" if items else head

    def param(self, name: str) -> Fraction:
        given = dict(self.params)
        if name in given:
            return Fraction(given[name])
        return Fraction(dict(_PARAMS[self.formula])[name])

    # --- evaluation ---------------------------------------------------

    def value(self, n: int) -> Fraction:
        return _evaluate(self, n)

    def ceil_value(self, n: int) -> int:
        return math.ceil(self.value(n))

    def _raw(self, n: int) -> Fraction:
        if self.kind == "table":
            entries = dict(self.table)
            if n not in entries:
                raise InputError(f"table function undefined at {n}")
            return Fraction(entries[n])
        formula = self.formula
        if formula == "constant":
            return self.param("c")
        if formula == "affine":
            return self.param("a") * n + self.param("b")
        if formula == "ceil_sqrt":
            c = self.param("c")
            square = c.numerator * c.numerator * n
            root = math.isqrt(square)
            if root * root == square:
                return Fraction(-(-root // c.denominator))
            return Fraction(root // c.denominator + 1)
        if formula == "n_over_log2_sq":
            c = self.param("c")
            if n <= 1:
                return c
            power = exact_log2(n)
            if power is not None:
                return c * n / (power * power)
            return floor_on_grid(lambda v, k: k * v / (iv.log(v) / iv.log(2)) ** 2, n, c)
        # log_composite: ln(n^p / ln n) * ln n
        if n < 3:
            return Fraction(0)
        value = floor_on_grid(lambda v, p: (p * iv.log(v) - iv.log(iv.log(v))) * iv.log(v), n, self.param("p"))
        return max(value, Fraction(0))

    # --- declared growth ----------------------------------------------

    @property
    def sublinear(self) -> bool:
        if self.kind == "table":
            return True
        if self.formula == "affine":
            return self.param("a") == 0
        return True

    @property
    def superlogarithmic(self) -> bool:
        if self.kind == "table" or self.formula == "constant":
            return False
        if self.formula == "affine":
            return self.param("a") > 0
        return self.formula != "log_composite" or self.param("p") > 0

    def sample_points(self) -> list[int]:
        if self.kind == "table":
            return [k for k, _ in self.table]
        return list(range(1, self.domain_max + 1))

    def viability_problem(self) -> Optional[str]:
        """None when f(n) ≥ 6 and f is nondecreasing over the sampled domain"""
        previous = None
        for n in self.sample_points():
            current = self.value(n)
            if current < 6:
                return f"f({n}) = {current} < 6"
            if previous is not None and current < previous:
                return f"f decreases at {n}"
            previous = current
        return None

    # --- thresholds ---------------------------------------------------

    def _horizon(self, K: int) -> int:
        """A t beyond which value(t) * K < t holds for every larger t"""
        if self.kind == "table":
            return max(k for k, _ in self.table)
        formula = self.formula
        if formula == "constant":
            horizon = math.floor(self.param("c") * K) + 1
        elif formula == "affine":
            a, b = self.param("a"), self.param("b")
            if a * K >= 1:
                raise InputError(f"affine function with slope {a} never stays below t/{K}")
            if a <= 0:
                horizon = math.floor(b * K) + 1
            else:
                horizon = math.floor(b * K / (1 - a * K)) + 1
        elif formula == "ceil_sqrt":
            c = self.param("c")
            horizon = math.ceil((c * K + K + 2) ** 2)
        elif formula == "n_over_log2_sq":
            # log2(t)^2 > cK as soon as log2(t) >= m with m^2 > cK
            m = math.isqrt(math.floor(self.param("c") * K)) + 1
            horizon = max(2, 1 << m)
        else:
            p = self.param("p")
            if p <= 0:
                horizon = 1
            else:
                j = 3
                while enclose(lambda v: (v * iv.log(2)) ** 2, j)[1] * p * K >= (1 << j):
                    j += 1
                horizon = 1 << j
        if self.minimum is not None:
            horizon = max(horizon, math.floor(Fraction(self.minimum) * K) + 1)
        return max(horizon, 1)

    def threshold(self, K: int) -> int:
        """Least n' ≥ 1 with value(t) < t/K for every t ≥ n'"""
        if K < 1:
            raise InputError("threshold divisor must be positive")
        horizon = self._horizon(K)
        if horizon > THRESHOLD_SCAN_LIMIT:
            raise InputError(f"threshold for divisor {K} lies beyond the scan limit {THRESHOLD_SCAN_LIMIT}")
        last_failure = 0
        for t in range(horizon, 0, -1):
            if self.value(t) * K >= t:
                last_failure = t
                break
        candidate = last_failure + 1
        if self.kind == "table":
            last_key = max(k for k, _ in self.table)
            if last_key < 2 * candidate:
                raise InputError(
                    f"table too short to certify the threshold for divisor {K}: "
                    f"needs values on [1, {2 * candidate}], has up to {last_key}"
                )
        return candidate


@lru_cache(maxsize=1 << 17)
def _evaluate(spec: FunctionSpec, n: int) -> Fraction:
    value = spec._raw(n)
    if spec.minimum is not None:
        value = max(value, Fraction(spec.minimum))
    return value


def default_f() -> FunctionSpec:
    return FunctionSpec(formula="ceil_sqrt")


def default_g() -> FunctionSpec:
    return FunctionSpec(formula="log_composite")


def ratio_nonincreasing(numerator: FunctionSpec, denominator: FunctionSpec, points: list[int]) -> bool:
    """numerator/denominator never increases along `points` (zero denominators skipped)"""
    previous = None
    for x in points:
        d = denominator.value(x)
        if d == 0:
            continue
        current = numerator.value(x) / d
        if previous is not None and current > previous:
            return False
        previous = current
    return True
