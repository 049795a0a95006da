"""Truncated multivariate formal power series over exact rationals.

A series lives over a fixed, ordered registry of graded formal variables
and is stored sparsely as a dict mapping exponent tuples to ``Fraction``
coefficients.  The zero series is the empty dict.  All arithmetic is exact;
no floats appear anywhere.

Variables come in three kinds:

  ``t``  insertion variables t_a^alpha, grading 2a - 2 + |e_alpha|
         (t_0^alpha is printed as x{alpha});
  ``s``  kappa variables s_a^alpha with a >= -1, grading 2a + |e_alpha|;
  ``q``  the degree-tracking variable, grading -2 * (c1 pairing per unit
         degree).

Truncation is a per-variable exponent cap, plus an optional cap on the
total exponent of the non-q variables.  Operations re-truncate their
results to the shared bounds; coefficients can only be read inside the
declared bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Iterator, Mapping

Exponents = tuple[int, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Variable:
    kind: str  # "t", "s" or "q"
    a: int
    alpha: int
    grading: int

    def __post_init__(self):
        if self.kind not in ("t", "s", "q"):
            raise ValueError(f"unknown variable kind {self.kind!r}")
        if self.kind == "t" and self.a < 0:
            raise ValueError("t variables need a >= 0")
        if self.kind == "s" and self.a < -1:
            raise ValueError("s variables need a >= -1")

    @property
    def key(self) -> tuple[str, int, int]:
        return (self.kind, self.a, self.alpha)

    @property
    def name(self) -> str:
        if self.kind == "q":
            return "q"
        if self.kind == "t" and self.a == 0:
            return f"x{self.alpha}"
        return f"{self.kind}{self.a},{self.alpha}"


class VarRegistry:
    """Ordered collection of variables; identity is (kind, a, alpha)."""

    def __init__(self, variables: Iterable[Variable]):
        self._vars = tuple(variables)
        index: dict[tuple[str, int, int], int] = {}
        for i, v in enumerate(self._vars):
            if v.grading % 2 != 0:
                raise ValueError(f"odd grading rejected for {v.name}: {v.grading}")
            if v.kind == "q" and (v.a, v.alpha) != (0, 0):
                raise ValueError("q carries no subscripts")
            if v.key in index:
                raise ValueError(f"duplicate variable {v.name}")
            index[v.key] = i
        self._index = index
        self._names = {v.name: i for i, v in enumerate(self._vars)}

    def __len__(self) -> int:
        return len(self._vars)

    def __iter__(self) -> Iterator[Variable]:
        return iter(self._vars)

    def __getitem__(self, i: int) -> Variable:
        return self._vars[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, VarRegistry) and self._vars == other._vars

    def __hash__(self) -> int:
        return hash(self._vars)

    def index_of(self, kind: str, a: int = 0, alpha: int = 0) -> int:
        try:
            return self._index[(kind, a, alpha)]
        except KeyError:
            raise ValueError(f"unknown variable ({kind},{a},{alpha})") from None

    def index_of_name(self, name: str) -> int:
        try:
            return self._names[name]
        except KeyError:
            raise ValueError(f"unknown variable {name!r}") from None

    def q_index(self) -> int | None:
        return self._index.get(("q", 0, 0))

    def grading(self, exps: Exponents) -> int:
        return sum(k * v.grading for k, v in zip(exps, self._vars))


@dataclass(frozen=True)
class Truncation:
    """Per-variable exponent caps plus an optional total cap on non-q vars."""

    caps: tuple[int, ...]
    total_cap: int | None = None

    def admits(self, exps: Exponents, q_index: int | None) -> bool:
        if any(e > c for e, c in zip(exps, self.caps)):
            return False
        if self.total_cap is not None:
            total = sum(e for i, e in enumerate(exps) if i != q_index)
            if total > self.total_cap:
                return False
        return True

    def dominates(self, other: "Truncation") -> bool:
        """True when every bound of ``other`` is within this truncation."""
        if len(self.caps) != len(other.caps):
            return False
        if any(oc > c for oc, c in zip(other.caps, self.caps)):
            return False
        if self.total_cap is not None and (
            other.total_cap is None or other.total_cap > self.total_cap
        ):
            return False
        return True


class QSeries:
    """Immutable truncated series; supports +, -, * and exact helpers."""

    __slots__ = ("registry", "trunc", "_terms")

    def __init__(
        self,
        registry: VarRegistry,
        trunc: Truncation,
        terms: Mapping[Exponents, Fraction] | None = None,
    ):
        if len(trunc.caps) != len(registry):
            raise ValueError("truncation caps do not match the registry")
        qi = registry.q_index()
        kept: dict[Exponents, Fraction] = {}
        for exps, coef in (terms or {}).items():
            if len(exps) != len(registry):
                raise ValueError("exponent vector length mismatch")
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            if coef == 0:
                continue
            if trunc.admits(exps, qi):
                kept[exps] = Fraction(coef)
        object.__setattr__(self, "registry", registry)
        object.__setattr__(self, "trunc", trunc)
        object.__setattr__(self, "_terms", kept)

    def __setattr__(self, name, value):
        raise AttributeError("QSeries is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, registry: VarRegistry, trunc: Truncation) -> "QSeries":
        return cls(registry, trunc, {})

    @classmethod
    def constant(cls, registry, trunc, value) -> "QSeries":
        return cls(registry, trunc, {(0,) * len(registry): Fraction(value)})

    @classmethod
    def one(cls, registry, trunc) -> "QSeries":
        return cls.constant(registry, trunc, 1)

    @classmethod
    def variable(cls, registry, trunc, kind: str, a: int = 0, alpha: int = 0) -> "QSeries":
        i = registry.index_of(kind, a, alpha)
        exps = tuple(1 if j == i else 0 for j in range(len(registry)))
        return cls(registry, trunc, {exps: ONE})

    # -- basics ------------------------------------------------------------

    def items(self) -> Iterator[tuple[Exponents, Fraction]]:
        return iter(sorted(self._terms.items()))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QSeries)
            and self.registry == other.registry
            and self.trunc == other.trunc
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self.registry, self.trunc, tuple(sorted(self._terms.items()))))

    def _check_compat(self, other: "QSeries"):
        if self.registry != other.registry:
            raise ValueError("series registries differ")
        if self.trunc != other.trunc:
            raise ValueError("series truncations differ")

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, QSeries):
            return self + QSeries.constant(self.registry, self.trunc, other)
        self._check_compat(other)
        terms = dict(self._terms)
        for exps, coef in other._terms.items():
            terms[exps] = terms.get(exps, ZERO) + coef
        return QSeries(self.registry, self.trunc, terms)

    __radd__ = __add__

    def __neg__(self):
        return QSeries(
            self.registry, self.trunc, {e: -c for e, c in self._terms.items()}
        )

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            return self + (-Fraction(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            scalar = Fraction(other)
            return QSeries(
                self.registry,
                self.trunc,
                {e: c * scalar for e, c in self._terms.items()},
            )
        self._check_compat(other)
        qi = self.registry.q_index()
        out: dict[Exponents, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                if not self.trunc.admits(exps, qi):
                    continue
                out[exps] = out.get(exps, ZERO) + c1 * c2
        return QSeries(self.registry, self.trunc, out)

    __rmul__ = __mul__

    # -- calculus ------------------------------------------------------------

    def exp(self) -> "QSeries":
        """exp of a series with zero constant term, Taylor-expanded exactly."""
        const = self._terms.get((0,) * len(self.registry))
        if const:
            raise ValueError("exp needs a zero constant term")
        result = QSeries.one(self.registry, self.trunc)
        power = QSeries.one(self.registry, self.trunc)
        k = 0
        while True:
            power = power * self
            k += 1
            if power.is_zero():
                break
            result = result + power * Fraction(1, factorial(k))
        return result

    def coefficient(self, exps: Exponents) -> Fraction:
        exps = tuple(exps)
        if len(exps) != len(self.registry):
            raise ValueError("exponent vector length mismatch")
        if any(e < 0 for e in exps):
            raise ValueError("negative exponent")
        if not self.trunc.admits(exps, self.registry.q_index()):
            raise ValueError(f"monomial {exps} lies outside the truncation")
        return self._terms.get(exps, ZERO)

    def partial_derivative(self, kind: str, a: int = 0, alpha: int = 0) -> "QSeries":
        """Formal d/dv; the cap of the differentiated variable drops by one."""
        i = self.registry.index_of(kind, a, alpha)
        caps = list(self.trunc.caps)
        caps[i] = max(caps[i] - 1, 0)
        total = self.trunc.total_cap
        if total is not None and i != self.registry.q_index():
            total = max(total - 1, 0)
        new_trunc = Truncation(tuple(caps), total)
        terms: dict[Exponents, Fraction] = {}
        for exps, coef in self._terms.items():
            k = exps[i]
            if k == 0:
                continue
            dexps = exps[:i] + (k - 1,) + exps[i + 1 :]
            terms[dexps] = terms.get(dexps, ZERO) + coef * k
        return QSeries(self.registry, new_trunc, terms)

    def q_log_derivative(self) -> "QSeries":
        """q d/dq; exponents are preserved so the truncation is unchanged."""
        qi = self.registry.q_index()
        if qi is None:
            raise ValueError("registry has no q variable")
        return QSeries(
            self.registry,
            self.trunc,
            {e: c * e[qi] for e, c in self._terms.items()},
        )

    def multiply_variable(self, kind: str, a: int = 0, alpha: int = 0) -> "QSeries":
        """Multiply by a single variable; overflowing terms are dropped."""
        return self * QSeries.variable(self.registry, self.trunc, kind, a, alpha)

    def restrict(self, new_trunc: Truncation) -> "QSeries":
        """Re-truncate downward; every bound of the target must be tighter."""
        if not self.trunc.dominates(new_trunc):
            raise ValueError("restrict only tightens truncations")
        return QSeries(self.registry, new_trunc, self._terms)

    # -- inspection -----------------------------------------------------------

    def gradings(self) -> set[int]:
        """Set of total gradings of the stored monomials."""
        return {self.registry.grading(e) for e in self._terms}

    def monomial_name(self, exps: Exponents) -> str:
        parts = []
        for e, v in zip(exps, self.registry):
            if e == 1:
                parts.append(v.name)
            elif e > 1:
                parts.append(f"{v.name}^{e}")
        return "1" if not parts else "*".join(parts)

    def table(self) -> str:
        """Human-readable coefficient table, rows sorted by exponent vector."""
        qi = self.registry.q_index()
        rows = []
        for exps, coef in sorted(
            self._terms.items(),
            key=lambda item: ((item[0][qi] if qi is not None else 0), item[0]),
        ):
            rows.append(f"{self.monomial_name(exps)} : {coef}")
        return "\n".join(rows)

    # -- serialization ----------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "vars": [
                {"kind": v.kind, "a": v.a, "alpha": v.alpha, "grading": v.grading}
                for v in self.registry
            ],
            "truncation": {
                "caps": list(self.trunc.caps),
                "total_cap": self.trunc.total_cap,
            },
            "terms": [
                {"exp": list(exps), "coef": format_rational(coef)}
                for exps, coef in sorted(self._terms.items())
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "QSeries":
        registry = VarRegistry(
            Variable(v["kind"], v["a"], v["alpha"], v["grading"])
            for v in data["vars"]
        )
        trunc = Truncation(
            tuple(data["truncation"]["caps"]), data["truncation"].get("total_cap")
        )
        terms = {
            tuple(t["exp"]): parse_rational(t["coef"]) for t in data["terms"]
        }
        return cls(registry, trunc, terms)


def ring_ops(a: QSeries, b: QSeries, op: str) -> QSeries:
    """Named ring operation entry point: op in {"add", "sub", "mul"}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown ring op {op!r}")


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    num, _, den = text.partition("/")
    return Fraction(int(num), int(den) if den else 1)
