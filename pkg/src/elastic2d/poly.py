"""Exact multivariate polynomial arithmetic over the rationals.

A polynomial lives over a fixed, ordered ``VariableSpace`` and is stored as a
sparse map from dense exponent tuples (one entry per variable) to ``Fraction``
coefficients.  All arithmetic is exact; there is no floating point anywhere in
this module.  Identity testing therefore reduces to comparing canonical maps.

Conventions used throughout the package:

* first-order jet variables ``G11, G12, G21, G22`` stand for the entries of
  the displacement gradient, ``Gil = d u^i / d x^l``;
* second-order jet variables ``u{i}_{mn}`` (with ``m <= n``) stand for
  ``d^2 u^i / d x^m d x^n``, the index pair sorted because mixed partials
  commute;
* ``c, s`` are the components of a unit direction vector, only ever used
  modulo the relation ``c^2 + s^2 = 1`` (see :meth:`Polynomial.reduce_circle`);
* ``p, p2`` are plane-wave profile symbols (first and second derivative of the
  scalar profile), and ``V1, V2`` are free polarization components.

Direction, profile and polarization symbols carry grading weight 0 so that
``homogeneous_part`` measures degree in the jet variables alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

#: Symbols that do not count towards the default (jet) grading.
_WEIGHT_ZERO = frozenset({"c", "s", "p", "p2", "V1", "V2"})

Rat = int | Fraction


def frac(x: Rat | str) -> Fraction:
    """Coerce ints, strings like ``"3/4"`` and Fractions to an exact Fraction."""
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class VariableSpace:
    """An ordered tuple of distinct variable names with grading weights."""

    names: tuple[str, ...]
    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        if len(self.weights) != len(self.names):
            raise ValueError("weights must match names")

    @staticmethod
    def make(names: Iterable[str]) -> "VariableSpace":
        names = tuple(names)
        weights = tuple(0 if n in _WEIGHT_ZERO else 1 for n in names)
        return VariableSpace(names, weights)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValueError(f"unknown variable {name!r} in space {self.names}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def extended(self, extra: Iterable[str]) -> "VariableSpace":
        return VariableSpace.make(self.names + tuple(extra))


def g_name(i: int, l: int) -> str:
    """First-order jet variable name for d u^i / d x^l."""
    return f"G{i}{l}"


def u2_name(i: int, m: int, n: int) -> str:
    """Second-order jet variable name for d^2 u^i / d x^m d x^n (indices sorted)."""
    m, n = min(m, n), max(m, n)
    return f"u{i}_{m}{n}"


JET1 = VariableSpace.make(("G11", "G12", "G21", "G22"))
JET2 = VariableSpace.make(
    ("G11", "G12", "G21", "G22",
     "u1_11", "u1_12", "u1_22", "u2_11", "u2_12", "u2_22"))
CIRCLE = VariableSpace.make(("c", "s", "p", "p2"))
#: Plane waves with a free polarization vector (V1, V2); used for the
#: single-speed null-condition contraction of the reduced system.
VWAVE = VariableSpace.make(("c", "s", "p", "p2", "V1", "V2"))


class Polynomial:
    """Immutable-by-convention exact polynomial over a :class:`VariableSpace`.

    ``terms`` maps exponent tuples to nonzero Fractions; the empty map is the
    zero polynomial.  All operations return new values and never mutate.
    """

    __slots__ = ("space", "terms")

    def __init__(self, space: VariableSpace, terms: Mapping[tuple[int, ...], Rat] | None = None):
        self.space = space
        canon: dict[tuple[int, ...], Fraction] = {}
        if terms:
            nvars = len(space.names)
            for exps, coeff in terms.items():
                if len(exps) != nvars:
                    raise ValueError(f"exponent tuple {exps} does not match space of {nvars} variables")
                coeff = frac(coeff)
                if coeff != 0:
                    canon[tuple(exps)] = coeff
        self.terms = canon

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, space: VariableSpace) -> "Polynomial":
        return cls(space, {})

    @classmethod
    def const(cls, space: VariableSpace, value: Rat) -> "Polynomial":
        return cls(space, {(0,) * len(space.names): frac(value)})

    @classmethod
    def var(cls, space: VariableSpace, name: str, coeff: Rat = 1) -> "Polynomial":
        exps = [0] * len(space.names)
        exps[space.index(name)] = 1
        return cls(space, {tuple(exps): frac(coeff)})

    @classmethod
    def monomial(cls, space: VariableSpace, powers: Mapping[str, int], coeff: Rat = 1) -> "Polynomial":
        exps = [0] * len(space.names)
        for name, e in powers.items():
            exps[space.index(name)] = e
        return cls(space, {tuple(exps): frac(coeff)})

    # -- arithmetic -----------------------------------------------------

    def _check_space(self, other: "Polynomial") -> None:
        if self.space != other.space:
            raise ValueError("mismatched variable spaces")

    def __add__(self, other: "Polynomial | Rat") -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.const(self.space, other)
        self._check_space(other)
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            out[exps] = out.get(exps, Fraction(0)) + coeff
        return Polynomial(self.space, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.space, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial | Rat") -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.const(self.space, other)
        return self + (-other)

    def __rsub__(self, other: Rat) -> "Polynomial":
        return Polynomial.const(self.space, other) - self

    def __mul__(self, other: "Polynomial | Rat") -> "Polynomial":
        if not isinstance(other, Polynomial):
            k = frac(other)
            return Polynomial(self.space, {e: c * k for e, c in self.terms.items()})
        self._check_space(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, Fraction(0)) + ca * cb
        return Polynomial(self.space, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        out = Polynomial.const(self.space, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.space == other.space and self.terms == other.terms

    def __hash__(self):  # pragma: no cover - dict-backed, not hashable
        raise TypeError("Polynomial is not hashable")

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self) -> Fraction:
        """The value of a constant polynomial (raises if non-constant)."""
        if not self.terms:
            return Fraction(0)
        zero = (0,) * len(self.space.names)
        if set(self.terms) != {zero}:
            raise ValueError("polynomial is not constant")
        return self.terms[zero]

    def coeff(self, powers: Mapping[str, int]) -> Fraction:
        exps = [0] * len(self.space.names)
        for name, e in powers.items():
            exps[self.space.index(name)] = e
        return self.terms.get(tuple(exps), Fraction(0))

    def graded_degree(self, weights: tuple[int, ...] | None = None) -> int:
        """Maximum weighted degree over all terms (0 for the zero polynomial)."""
        w = weights if weights is not None else self.space.weights
        if not self.terms:
            return 0
        return max(sum(e * wi for e, wi in zip(exps, w)) for exps in self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(exps) for exps in self.terms)

    def homogeneous_part(self, degree: int, weights: tuple[int, ...] | None = None) -> "Polynomial":
        """Sum of terms of exactly the given weighted degree.

        The default grading counts jet variables only (direction/profile
        symbols have weight 0).
        """
        w = weights if weights is not None else self.space.weights
        out = {exps: c for exps, c in self.terms.items()
               if sum(e * wi for e, wi in zip(exps, w)) == degree}
        return Polynomial(self.space, out)

    def variables_present(self) -> set[str]:
        out: set[str] = set()
        for exps in self.terms:
            for name, e in zip(self.space.names, exps):
                if e:
                    out.add(name)
        return out

    # -- calculus ---------------------------------------------------------

    def diff(self, name: str) -> "Polynomial":
        """Formal partial derivative with respect to one variable."""
        i = self.space.index(name)
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in self.terms.items():
            e = exps[i]
            if e:
                new = list(exps)
                new[i] = e - 1
                key = tuple(new)
                out[key] = out.get(key, Fraction(0)) + coeff * e
        return Polynomial(self.space, out)

    def substitute(self, bindings: Mapping[str, "Polynomial"],
                   target: VariableSpace | None = None) -> "Polynomial":
        """Exact composition: replace bound variables by their images.

        Images must all live over ``target`` (default: this polynomial's own
        space).  Unbound variables that appear in the polynomial must exist in
        the target space and map to themselves.
        """
        target = target if target is not None else self.space
        for name, img in bindings.items():
            self.space.index(name)  # raises on unknown variable
            if img.space != target:
                raise ValueError(f"binding image for {name!r} is not over the target space")
        images: dict[str, Polynomial] = dict(bindings)
        for name in self.variables_present():
            if name not in images:
                if name not in target:
                    raise ValueError(f"unbound variable {name!r} absent from target space")
                images[name] = Polynomial.var(target, name)

        # cache powers of each image as they are needed
        powcache: dict[str, list[Polynomial]] = {}

        def power(name: str, e: int) -> Polynomial:
            cache = powcache.setdefault(name, [Polynomial.const(target, 1)])
            while len(cache) <= e:
                cache.append(cache[-1] * images[name])
            return cache[e]

        out = Polynomial.zero(target)
        for exps, coeff in self.terms.items():
            term = Polynomial.const(target, coeff)
            for name, e in zip(self.space.names, exps):
                if e:
                    term = term * power(name, e)
            out = out + term
        return out

    def reduce_circle(self) -> "Polynomial":
        """Canonical remainder modulo ``c^2 + s^2 - 1``.

        Exhaustively rewrites ``s^2 -> 1 - c^2``; the result has s-degree at
        most 1 and is the unique such representative (division by a polynomial
        monic in ``s``).  A polynomial over a space without ``s`` is returned
        unchanged.
        """
        if "s" not in self.space or "c" not in self.space:
            return self
        si = self.space.index("s")
        ci = self.space.index("c")
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in self.terms.items():
            k = exps[si]
            if k < 2:
                out[exps] = out.get(exps, Fraction(0)) + coeff
                continue
            q, r = divmod(k, 2)
            # s^k = s^r * (1 - c^2)^q expanded binomially
            for j in range(q + 1):
                new = list(exps)
                new[si] = r
                new[ci] = exps[ci] + 2 * j
                key = tuple(new)
                contrib = coeff * math.comb(q, j) * (-1) ** j
                out[key] = out.get(key, Fraction(0)) + contrib
        return Polynomial(self.space, out)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, values: Mapping[str, object]) -> object:
        """Evaluate with duck-typed arithmetic (Fractions, floats, numpy arrays).

        Coefficients are converted to float unless every supplied value is an
        int or Fraction, in which case the evaluation stays exact.
        """
        exact = all(isinstance(v, (int, Fraction)) for v in values.values())
        missing = self.variables_present() - set(values)
        if missing:
            raise ValueError(f"missing values for {sorted(missing)}")
        total: object = Fraction(0) if exact else 0.0
        for exps, coeff in self.terms.items():
            term: object = coeff if exact else float(coeff)
            for name, e in zip(self.space.names, exps):
                if e:
                    v = values[name]
                    term = term * v ** e
            total = total + term
        return total

    # -- serialization --------------------------------------------------

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in graded-lexicographic descending order (deterministic)."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        pieces: list[str] = []
        for exps, coeff in self.sorted_terms():
            factors = [f"{n}^{e}" if e > 1 else n
                       for n, e in zip(self.space.names, exps) if e]
            mag = abs(coeff)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = str(mag) + "*" + "*".join(factors)
            if not pieces:
                pieces.append(body if coeff > 0 else "-" + body)
            else:
                pieces.append(("+ " if coeff > 0 else "- ") + body)
        return " ".join(pieces)

    def to_json_obj(self) -> dict:
        return {
            "variables": list(self.space.names),
            "terms": [{"exponents": list(exps), "coeff": str(coeff)}
                      for exps, coeff in self.sorted_terms()],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Polynomial":
        space = VariableSpace.make(obj["variables"])
        terms = {tuple(t["exponents"]): Fraction(t["coeff"]) for t in obj["terms"]}
        return cls(space, terms)

    def __repr__(self) -> str:
        return f"Polynomial({self.to_text()})"


def arith(p: Polynomial, q: Polynomial, op: str) -> Polynomial:
    """Named arithmetic entry point: op is one of ``add``, ``sub``, ``mul``."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown op {op!r}")
