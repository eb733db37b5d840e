"""Noncommutative arithmetic circuits.

A circuit is a topologically ordered list of gates over a shared field:
inputs (one variable each), constants, fan-in-two additions, and fan-in-two
ordered multiplications.  Multiplication is noncommutative — the left and
right operands keep their order when monomials are concatenated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import DEFAULT_MAX_DEGREE, DEFAULT_MAX_TERMS, ResourceCapError, ValidationError
from .fields import Field, RationalField, field_from_json, field_to_json
from .polynomials import NCPoly


@dataclass(frozen=True)
class InputGate:
    var: int


@dataclass(frozen=True)
class ConstGate:
    value: object


@dataclass(frozen=True)
class AddGate:
    left: int
    right: int


@dataclass(frozen=True)
class MulGate:
    left: int
    right: int


Gate = Union[InputGate, ConstGate, AddGate, MulGate]


@dataclass
class Circuit:
    n_vars: int
    field: Field
    gates: tuple[Gate, ...]
    output: int

    @classmethod
    def build(cls, n_vars: int, field: Field, gates: Sequence[Gate], output: int) -> "Circuit":
        coerced = []
        for g in gates:
            if isinstance(g, ConstGate):
                g = ConstGate(field.coerce(g.value))
            coerced.append(g)
        c = cls(n_vars, field, tuple(coerced), output)
        err = validate_circuit(c)
        if err:
            raise ValidationError(err)
        return c

    def size(self) -> tuple[int, int]:
        """(gate count, wire count)."""
        wires = sum(2 for g in self.gates if isinstance(g, (AddGate, MulGate)))
        return len(self.gates), wires

    def formal_degrees(self) -> list[int]:
        degs = []
        for g in self.gates:
            if isinstance(g, InputGate):
                degs.append(1)
            elif isinstance(g, ConstGate):
                degs.append(0)
            elif isinstance(g, AddGate):
                degs.append(max(degs[g.left], degs[g.right]))
            else:
                degs.append(degs[g.left] + degs[g.right])
        return degs

    def formal_degree(self) -> int:
        return self.formal_degrees()[self.output]

    def evaluate(self, point: Sequence):
        point = [self.field.coerce(x) for x in point]
        if len(point) != self.n_vars:
            raise ValidationError(f"expected {self.n_vars} values, got {len(point)}")
        vals = []
        for g in self.gates:
            if isinstance(g, InputGate):
                vals.append(point[g.var])
            elif isinstance(g, ConstGate):
                vals.append(g.value)
            elif isinstance(g, AddGate):
                vals.append(vals[g.left] + vals[g.right])
            else:
                vals.append(vals[g.left] * vals[g.right])
        return vals[self.output]

    def expand(
        self,
        max_degree: int = DEFAULT_MAX_DEGREE,
        max_terms: int = DEFAULT_MAX_TERMS,
    ) -> NCPoly:
        """Gate-by-gate expansion into an explicit polynomial."""
        if self.formal_degree() > max_degree:
            raise ResourceCapError(
                f"formal degree {self.formal_degree()} exceeds cap {max_degree}"
            )
        polys: list[NCPoly] = []
        for g in self.gates:
            if isinstance(g, InputGate):
                polys.append(NCPoly.var(self.n_vars, self.field, g.var))
            elif isinstance(g, ConstGate):
                polys.append(NCPoly.const(self.n_vars, self.field, g.value))
            elif isinstance(g, AddGate):
                polys.append(polys[g.left].add(polys[g.right]))
            else:
                polys.append(polys[g.left].mul(polys[g.right], max_terms=max_terms))
            if len(polys[-1].terms) > max_terms:
                raise ResourceCapError(f"gate expansion exceeds {max_terms} terms")
        return polys[self.output]

    def is_monotone(self) -> bool:
        """Rational constants, all strictly positive."""
        if not isinstance(self.field, RationalField):
            return False
        return all(
            g.value > 0 for g in self.gates if isinstance(g, ConstGate)
        )

    def to_json(self) -> dict:
        out = []
        for g in self.gates:
            if isinstance(g, InputGate):
                out.append({"op": "in", "var": g.var})
            elif isinstance(g, ConstGate):
                out.append({"op": "const", "value": self.field.coeff_to_json(g.value)})
            elif isinstance(g, AddGate):
                out.append({"op": "add", "l": g.left, "r": g.right})
            else:
                out.append({"op": "mul", "l": g.left, "r": g.right})
        return {
            "nvars": self.n_vars,
            "field": field_to_json(self.field),
            "gates": out,
            "output": self.output,
        }

    @classmethod
    def from_json(cls, obj: dict, field: Field | None = None) -> "Circuit":
        if field is None:
            if "field" not in obj:
                raise ValidationError("circuit JSON lacks a field descriptor")
            field = field_from_json(obj["field"])
        gates: list[Gate] = []
        for g in obj["gates"]:
            op = g["op"]
            if op == "in":
                gates.append(InputGate(int(g["var"])))
            elif op == "const":
                gates.append(ConstGate(field.coeff_from_json(g["value"])))
            elif op == "add":
                gates.append(AddGate(int(g["l"]), int(g["r"])))
            elif op == "mul":
                gates.append(MulGate(int(g["l"]), int(g["r"])))
            else:
                raise ValidationError(f"unknown gate op {op!r}")
        return cls.build(int(obj["nvars"]), field, gates, int(obj["output"]))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Circuit)
            and self.n_vars == other.n_vars
            and self.field == other.field
            and self.gates == other.gates
            and self.output == other.output
        )

    def __repr__(self) -> str:
        return f"Circuit(gates={len(self.gates)}, vars={self.n_vars}, output={self.output})"


def validate_circuit(c: Circuit) -> Optional[str]:
    if not c.gates:
        return "no gates"
    if not 0 <= c.output < len(c.gates):
        return f"output {c.output} out of range"
    for i, g in enumerate(c.gates):
        if isinstance(g, InputGate):
            if not 0 <= g.var < c.n_vars:
                return f"gate {i} reads variable {g.var} outside 0..{c.n_vars - 1}"
        elif isinstance(g, (AddGate, MulGate)):
            if not (0 <= g.left < i and 0 <= g.right < i):
                return f"gate {i} references a later or negative gate"
    return None


def propagate_zeros(c: Circuit) -> Circuit:
    """Eliminate zero constants: a*0 = 0, a+0 = a.  Output zero becomes a
    single zero-constant circuit."""
    alias: list[Optional[int]] = []  # gate -> surviving gate id, None if identically zero
    gates: list[Gate] = []

    def emit(g: Gate) -> int:
        gates.append(g)
        return len(gates) - 1

    for g in c.gates:
        if isinstance(g, InputGate):
            alias.append(emit(g))
        elif isinstance(g, ConstGate):
            alias.append(None if not g.value else emit(g))
        elif isinstance(g, AddGate):
            l, r = alias[g.left], alias[g.right]
            if l is None and r is None:
                alias.append(None)
            elif l is None:
                alias.append(r)
            elif r is None:
                alias.append(l)
            else:
                alias.append(emit(AddGate(l, r)))
        else:
            l, r = alias[g.left], alias[g.right]
            if l is None or r is None:
                alias.append(None)
            else:
                alias.append(emit(MulGate(l, r)))

    out = alias[c.output]
    if out is None:
        return Circuit.build(c.n_vars, c.field, [ConstGate(c.field.zero())], 0)
    return Circuit.build(c.n_vars, c.field, gates, out)


class CircuitBuilder:
    """Incremental construction; None stands for the zero polynomial."""

    def __init__(self, n_vars: int, field: Field):
        self.n_vars = n_vars
        self.field = field
        self.gates: list[Gate] = []

    def _emit(self, g: Gate) -> int:
        self.gates.append(g)
        return len(self.gates) - 1

    def input(self, var: int) -> int:
        return self._emit(InputGate(var))

    def const(self, value) -> Optional[int]:
        value = self.field.coerce(value)
        if not value:
            return None
        return self._emit(ConstGate(value))

    def add(self, l: Optional[int], r: Optional[int]) -> Optional[int]:
        if l is None:
            return r
        if r is None:
            return l
        return self._emit(AddGate(l, r))

    def add_many(self, ids: Sequence[Optional[int]]) -> Optional[int]:
        acc: Optional[int] = None
        for i in ids:
            acc = self.add(acc, i)
        return acc

    def mul(self, l: Optional[int], r: Optional[int]) -> Optional[int]:
        if l is None or r is None:
            return None
        return self._emit(MulGate(l, r))

    def finish(self, output: Optional[int]) -> Circuit:
        if output is None:
            return Circuit.build(self.n_vars, self.field, [ConstGate(self.field.zero())], 0)
        return Circuit.build(self.n_vars, self.field, self.gates, output)
