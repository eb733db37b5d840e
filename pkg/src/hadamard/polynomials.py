"""Sparse polynomials, noncommutative and commutative.

A noncommutative monomial is a word: a tuple of variable indices read left
to right.  A commutative monomial is a sorted tuple of variable indices,
repeats meaning powers, so the multilinear case is exactly the tuples with
distinct entries.  Coefficients live in one of the fields from
``hadamard.fields`` and zero coefficients are never stored.

The Hadamard product f o g keeps the monomials common to both operands and
multiplies their coefficients pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    ArityMismatchError,
    DEFAULT_MAX_TERMS,
    FieldMismatchError,
    ResourceCapError,
    ValidationError,
)
from .fields import Field, RationalField, field_from_json, field_to_json


def _check_compatible(a, b):
    if a.n_vars != b.n_vars:
        raise ArityMismatchError(f"{a.n_vars} variables vs {b.n_vars}")
    if a.field != b.field:
        raise FieldMismatchError(f"{a.field} vs {b.field}")


def word_key(word: tuple[int, ...]):
    """Canonical ordering key: by length, then lexicographic."""
    return (len(word), word)


@dataclass
class NCPoly:
    """Noncommutative polynomial: a map from words to nonzero coefficients."""

    n_vars: int
    field: Field
    terms: dict = dc_field(default_factory=dict)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n_vars: int, field: Field) -> "NCPoly":
        return cls(n_vars, field, {})

    @classmethod
    def const(cls, n_vars: int, field: Field, c) -> "NCPoly":
        c = field.coerce(c)
        return cls(n_vars, field, {(): c} if c else {})

    @classmethod
    def var(cls, n_vars: int, field: Field, i: int) -> "NCPoly":
        if not 0 <= i < n_vars:
            raise ValidationError(f"variable {i} out of range")
        return cls(n_vars, field, {(i,): field.one()})

    @classmethod
    def from_terms(cls, n_vars: int, field: Field, terms: Mapping) -> "NCPoly":
        out = {}
        for word, c in terms.items():
            word = tuple(word)
            if any(not 0 <= v < n_vars for v in word):
                raise ValidationError(f"word {word} references a variable out of range")
            c = field.coerce(c)
            if c:
                out[word] = c
        return cls(n_vars, field, out)

    # -- ring operations ----------------------------------------------------

    def add(self, other: "NCPoly") -> "NCPoly":
        _check_compatible(self, other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w, self.field.zero()) + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return NCPoly(self.n_vars, self.field, out)

    def neg(self) -> "NCPoly":
        return self.scale(self.field.from_int(-1))

    def sub(self, other: "NCPoly") -> "NCPoly":
        return self.add(other.neg())

    def scale(self, c) -> "NCPoly":
        c = self.field.coerce(c)
        if not c:
            return NCPoly.zero(self.n_vars, self.field)
        return NCPoly(self.n_vars, self.field, {w: c * v for w, v in self.terms.items()})

    def mul(self, other: "NCPoly", max_terms: int = DEFAULT_MAX_TERMS) -> "NCPoly":
        """Concatenation product; order of the factors matters."""
        _check_compatible(self, other)
        if len(self.terms) * len(other.terms) > max_terms:
            raise ResourceCapError(
                f"product support may reach {len(self.terms) * len(other.terms)} terms, cap is {max_terms}"
            )
        out = {}
        zero = self.field.zero()
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                s = out.get(w, zero) + c1 * c2
                if s:
                    out[w] = s
                else:
                    out.pop(w, None)
        return NCPoly(self.n_vars, self.field, out)

    def hadamard(self, other: "NCPoly") -> "NCPoly":
        _check_compatible(self, other)
        small, big = (self.terms, other.terms) if len(self.terms) <= len(other.terms) else (other.terms, self.terms)
        out = {}
        for w, c in small.items():
            d = big.get(w)
            if d is not None:
                prod = c * d
                if prod:
                    out[w] = prod
        return NCPoly(self.n_vars, self.field, out)

    # -- queries ------------------------------------------------------------

    def mon_set(self) -> set:
        return set(self.terms)

    def coeff(self, word: Sequence[int]):
        return self.terms.get(tuple(word), self.field.zero())

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Max word length; -1 for the zero polynomial."""
        return max((len(w) for w in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        lengths = {len(w) for w in self.terms}
        return len(lengths) <= 1

    def homogeneous_part(self, k: int) -> "NCPoly":
        return NCPoly(self.n_vars, self.field, {w: c for w, c in self.terms.items() if len(w) == k})

    def evaluate(self, point: Sequence):
        """Substitute commuting field values for the variables."""
        if len(point) != self.n_vars:
            raise ArityMismatchError(f"expected {self.n_vars} values, got {len(point)}")
        point = [self.field.coerce(x) for x in point]
        total = self.field.zero()
        for w, c in self.terms.items():
            v = c
            for i in w:
                v = v * point[i]
            total = total + v
        return total

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: word_key(kv[0]))

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "nvars": self.n_vars,
            "field": field_to_json(self.field),
            "terms": [
                {"word": list(w), "coeff": self.field.coeff_to_json(c)}
                for w, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, obj: dict, field: Field | None = None) -> "NCPoly":
        if field is None:
            if "field" not in obj:
                raise ValidationError("polynomial JSON lacks a field descriptor")
            field = field_from_json(obj["field"])
        terms = {}
        for t in obj["terms"]:
            w = tuple(int(v) for v in t["word"])
            if w in terms:
                raise ValidationError(f"duplicate word {list(w)}")
            terms[w] = field.coeff_from_json(t["coeff"])
        return cls.from_terms(int(obj["nvars"]), field, terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NCPoly)
            and self.n_vars == other.n_vars
            and self.field == other.field
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        if self.is_zero():
            return "NCPoly(0)"
        bits = [f"{c!r}*x{list(w)}" for w, c in self.sorted_terms()[:6]]
        more = "..." if len(self.terms) > 6 else ""
        return f"NCPoly({' + '.join(bits)}{more})"


@dataclass
class CPoly:
    """Commutative polynomial keyed by sorted variable tuples (repeats = powers)."""

    n_vars: int
    field: Field
    terms: dict = dc_field(default_factory=dict)

    @classmethod
    def zero(cls, n_vars: int, field: Field) -> "CPoly":
        return cls(n_vars, field, {})

    @classmethod
    def const(cls, n_vars: int, field: Field, c) -> "CPoly":
        c = field.coerce(c)
        return cls(n_vars, field, {(): c} if c else {})

    @classmethod
    def var(cls, n_vars: int, field: Field, i: int) -> "CPoly":
        if not 0 <= i < n_vars:
            raise ValidationError(f"variable {i} out of range")
        return cls(n_vars, field, {(i,): field.one()})

    @classmethod
    def from_terms(cls, n_vars: int, field: Field, terms: Mapping) -> "CPoly":
        out = {}
        for mono, c in terms.items():
            mono = tuple(sorted(mono))
            if any(not 0 <= v < n_vars for v in mono):
                raise ValidationError(f"monomial {mono} references a variable out of range")
            c = field.coerce(c)
            if not c:
                continue
            s = out.get(mono, field.zero()) + c
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return cls(n_vars, field, out)

    def add(self, other: "CPoly") -> "CPoly":
        _check_compatible(self, other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, self.field.zero()) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return CPoly(self.n_vars, self.field, out)

    def neg(self) -> "CPoly":
        return self.scale(self.field.from_int(-1))

    def sub(self, other: "CPoly") -> "CPoly":
        return self.add(other.neg())

    def scale(self, c) -> "CPoly":
        c = self.field.coerce(c)
        if not c:
            return CPoly.zero(self.n_vars, self.field)
        return CPoly(self.n_vars, self.field, {m: c * v for m, v in self.terms.items()})

    def mul(self, other: "CPoly", max_terms: int = DEFAULT_MAX_TERMS) -> "CPoly":
        _check_compatible(self, other)
        if len(self.terms) * len(other.terms) > max_terms:
            raise ResourceCapError(
                f"product support may reach {len(self.terms) * len(other.terms)} terms, cap is {max_terms}"
            )
        out = {}
        zero = self.field.zero()
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                s = out.get(m, zero) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return CPoly(self.n_vars, self.field, out)

    def hadamard(self, other: "CPoly") -> "CPoly":
        _check_compatible(self, other)
        small, big = (self.terms, other.terms) if len(self.terms) <= len(other.terms) else (other.terms, self.terms)
        out = {}
        for m, c in small.items():
            d = big.get(m)
            if d is not None:
                prod = c * d
                if prod:
                    out[m] = prod
        return CPoly(self.n_vars, self.field, out)

    def mon_set(self) -> set:
        return set(self.terms)

    def coeff(self, mono: Iterable[int]):
        return self.terms.get(tuple(sorted(mono)), self.field.zero())

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=-1)

    def is_multilinear(self) -> bool:
        return all(len(set(m)) == len(m) for m in self.terms)

    def support_vars(self) -> set:
        out = set()
        for m in self.terms:
            out.update(m)
        return out

    def evaluate(self, point: Sequence):
        if len(point) != self.n_vars:
            raise ArityMismatchError(f"expected {self.n_vars} values, got {len(point)}")
        point = [self.field.coerce(x) for x in point]
        total = self.field.zero()
        for m, c in self.terms.items():
            v = c
            for i in m:
                v = v * point[i]
            total = total + v
        return total

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: word_key(kv[0]))

    def to_json(self) -> dict:
        return {
            "nvars": self.n_vars,
            "field": field_to_json(self.field),
            "terms": [
                {"support": list(m), "coeff": self.field.coeff_to_json(c)}
                for m, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, obj: dict, field: Field | None = None) -> "CPoly":
        if field is None:
            if "field" not in obj:
                raise ValidationError("polynomial JSON lacks a field descriptor")
            field = field_from_json(obj["field"])
        terms = {}
        for t in obj["terms"]:
            m = tuple(sorted(int(v) for v in t["support"]))
            if m in terms:
                raise ValidationError(f"duplicate monomial {list(m)}")
            terms[m] = field.coeff_from_json(t["coeff"])
        return cls.from_terms(int(obj["nvars"]), field, terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CPoly)
            and self.n_vars == other.n_vars
            and self.field == other.field
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        if self.is_zero():
            return "CPoly(0)"
        bits = [f"{c!r}*x{list(m)}" for m, c in self.sorted_terms()[:6]]
        more = "..." if len(self.terms) > 6 else ""
        return f"CPoly({' + '.join(bits)}{more})"


# ---------------------------------------------------------------------------
# multilinear correlation


def corr(f: CPoly, g: CPoly) -> Fraction:
    """|sum over multilinear monomials m of f(m) g(m)|, over the rationals.

    Coefficients of non-multilinear monomials are ignored: the correlation
    ranges over the multilinear monomials only.
    """
    _check_compatible(f, g)
    if not isinstance(f.field, RationalField):
        raise ValidationError("correlation is defined over the rationals")
    total = Fraction(0)
    small, big = (f.terms, g.terms) if len(f.terms) <= len(g.terms) else (g.terms, f.terms)
    for m, c in small.items():
        if len(set(m)) != len(m):
            continue
        d = big.get(m)
        if d is not None:
            total += c * d
    return abs(total)


def norm_sq(f: CPoly) -> Fraction:
    """Sum of squared coefficients over the multilinear monomials."""
    if not isinstance(f.field, RationalField):
        raise ValidationError("norm_sq is defined over the rationals")
    return sum(
        (c * c for m, c in f.terms.items() if len(set(m)) == len(m)),
        Fraction(0),
    )
