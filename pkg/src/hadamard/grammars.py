"""Acyclic context-free grammars and their monotone-circuit correspondence.

Nonterminals are strings, terminals are integers 0..terminals-1, and every
right-hand side has at most two symbols (the empty tuple is epsilon).  The
nonterminal dependency graph must be acyclic, so languages are finite and
derivation-tree counts are well defined.

A monotone circuit maps to a grammar gate by gate — inputs become terminal
productions, positive constants become epsilon, addition becomes
alternation, multiplication becomes concatenation — and back.  Under that
round trip the coefficient of a word equals its number of derivation trees
(constants re-enter as 1).

``build_mirror_suffix_grammar`` and ``build_mirror_prefix_grammar`` generate
the classic pair of finite languages {z . w . reverse(w)} and
{w . reverse(w) . z} whose intersection is {w . reverse(w) . w}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .circuits import (
    AddGate,
    Circuit,
    CircuitBuilder,
    ConstGate,
    InputGate,
    MulGate,
    propagate_zeros,
)
from .errors import ResourceCapError, ValidationError
from .fields import RationalField

Symbol = Union[str, int]  # str: nonterminal, int: terminal
DEFAULT_MAX_WORDS = 1 << 16


@dataclass
class AcyclicCFG:
    nonterminals: tuple[str, ...]
    terminals: int
    start: str
    productions: dict  # nonterminal -> tuple of right-hand sides (tuples of Symbol)

    @classmethod
    def build(
        cls,
        nonterminals: Sequence[str],
        terminals: int,
        start: str,
        productions: dict,
    ) -> "AcyclicCFG":
        prods = {
            nt: tuple(tuple(rhs) for rhs in productions.get(nt, ()))
            for nt in nonterminals
        }
        g = cls(tuple(nonterminals), terminals, start, prods)
        err = validate_grammar(g)
        if err:
            raise ValidationError(err)
        return g

    def size(self) -> int:
        return (
            len(self.nonterminals)
            + self.terminals
            + sum(1 + len(rhs) for rhss in self.productions.values() for rhs in rhss)
        )

    def to_json(self) -> dict:
        # productions as a flat list in declaration order; terminals as
        # {"t": index}, nonterminals as their names, empty rhs = epsilon
        def sym(s: Symbol):
            return {"t": s} if isinstance(s, int) else s

        return {
            "nonterminals": list(self.nonterminals),
            "terminals": self.terminals,
            "start": self.start,
            "productions": [
                {"lhs": nt, "rhs": [sym(s) for s in rhs]}
                for nt in self.nonterminals
                for rhs in self.productions[nt]
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AcyclicCFG":
        def sym(s) -> Symbol:
            if isinstance(s, dict):
                return int(s["t"])
            if isinstance(s, str):
                return s
            raise ValidationError(f"bad grammar symbol {s!r}")

        prods: dict = {}
        for prod in obj["productions"]:
            lhs = str(prod["lhs"])
            prods.setdefault(lhs, []).append(tuple(sym(s) for s in prod["rhs"]))
        return cls.build(
            [str(nt) for nt in obj["nonterminals"]],
            int(obj["terminals"]),
            str(obj["start"]),
            prods,
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AcyclicCFG)
            and self.nonterminals == other.nonterminals
            and self.terminals == other.terminals
            and self.start == other.start
            and self.productions == other.productions
        )


def validate_grammar(g: AcyclicCFG) -> Optional[str]:
    declared = set(g.nonterminals)
    if len(declared) != len(g.nonterminals):
        return "duplicate nonterminal names"
    if g.start not in declared:
        return f"start symbol {g.start!r} not declared"
    if g.terminals < 0:
        return "negative terminal count"
    if set(g.productions) - declared:
        return "productions for undeclared nonterminals"
    for nt, rhss in g.productions.items():
        for rhs in rhss:
            if len(rhs) > 2:
                return f"{nt}: right-hand side longer than two symbols"
            for s in rhs:
                if isinstance(s, str):
                    if s not in declared:
                        return f"{nt}: undeclared nonterminal {s!r}"
                elif isinstance(s, int):
                    if not 0 <= s < g.terminals:
                        return f"{nt}: terminal {s} outside 0..{g.terminals - 1}"
                else:
                    return f"{nt}: bad symbol {s!r}"
    if topo_order(g) is None:
        return "nonterminal dependencies contain a cycle"
    return None


def topo_order(g: AcyclicCFG) -> Optional[list[str]]:
    """Dependencies-first order of the nonterminals, or None on a cycle."""
    deps = {
        nt: {s for rhss in (g.productions.get(nt, ()),) for rhs in rhss for s in rhs if isinstance(s, str)}
        for nt in g.nonterminals
    }
    order: list[str] = []
    state: dict[str, int] = {}  # 1 = visiting, 2 = done

    def visit(nt: str) -> bool:
        if state.get(nt) == 2:
            return True
        if state.get(nt) == 1:
            return False
        state[nt] = 1
        for dep in sorted(deps[nt]):
            if not visit(dep):
                return False
        state[nt] = 2
        order.append(nt)
        return True

    for nt in g.nonterminals:
        if not visit(nt):
            return None
    return order


def strip_useless(g: AcyclicCFG) -> AcyclicCFG:
    """Keep only nonterminals that derive some word and are reachable."""
    productive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for nt, rhss in g.productions.items():
            if nt in productive:
                continue
            for rhs in rhss:
                if all(not isinstance(s, str) or s in productive for s in rhs):
                    productive.add(nt)
                    changed = True
                    break
    reachable = {g.start}
    frontier = [g.start]
    while frontier:
        nt = frontier.pop()
        for rhs in g.productions.get(nt, ()):
            if any(isinstance(s, str) and s not in productive for s in rhs):
                continue
            for s in rhs:
                if isinstance(s, str) and s not in reachable:
                    reachable.add(s)
                    frontier.append(s)
    keep = [nt for nt in g.nonterminals if nt in (productive & reachable) or nt == g.start]
    prods = {
        nt: tuple(
            rhs
            for rhs in g.productions.get(nt, ())
            if all(not isinstance(s, str) or (s in productive and s in reachable) for s in rhs)
        )
        for nt in keep
    }
    return AcyclicCFG.build(keep, g.terminals, g.start, prods)


def language(
    g: AcyclicCFG, max_len: Optional[int] = None, max_words: int = DEFAULT_MAX_WORDS
) -> set[tuple[int, ...]]:
    """All derivable words, bottom-up over the dependency order."""
    order = topo_order(g)
    assert order is not None  # validated at construction
    lang: dict[str, set] = {}
    for nt in order:
        words: set = set()
        for rhs in g.productions.get(nt, ()):
            pieces = [
                lang[s] if isinstance(s, str) else {(s,)} for s in rhs
            ]
            if not pieces:
                words.add(())
                continue
            combos = pieces[0]
            for nxt in pieces[1:]:
                combos = {a + b for a in combos for b in nxt}
                if len(combos) > max_words:
                    raise ResourceCapError(f"language exceeds {max_words} words")
            for w in combos:
                if max_len is None or len(w) <= max_len:
                    words.add(w)
            if len(words) > max_words:
                raise ResourceCapError(f"language exceeds {max_words} words")
        lang[nt] = words
    return lang[g.start]


def count_derivations(g: AcyclicCFG, word: Sequence[int]) -> int:
    """Number of derivation trees of the word from the start symbol."""
    word = tuple(int(t) for t in word)
    if any(not 0 <= t < g.terminals for t in word):
        return 0
    memo: dict = {}

    def count_symbol(s: Symbol, lo: int, hi: int) -> int:
        if isinstance(s, int):
            return 1 if hi - lo == 1 and word[lo] == s else 0
        key = (s, lo, hi)
        if key in memo:
            return memo[key]
        total = 0
        for rhs in g.productions.get(s, ()):
            if len(rhs) == 0:
                total += 1 if lo == hi else 0
            elif len(rhs) == 1:
                total += count_symbol(rhs[0], lo, hi)
            else:
                for mid in range(lo, hi + 1):
                    left = count_symbol(rhs[0], lo, mid)
                    if left:
                        total += left * count_symbol(rhs[1], mid, hi)
        memo[key] = total
        return total

    return count_symbol(g.start, 0, len(word))


def intersect_bruteforce(
    g1: AcyclicCFG,
    g2: AcyclicCFG,
    max_len: Optional[int] = None,
    max_words: int = DEFAULT_MAX_WORDS,
) -> set[tuple[int, ...]]:
    return language(g1, max_len, max_words) & language(g2, max_len, max_words)


# ---------------------------------------------------------------------------
# circuit <-> grammar


def circuit_to_cfg(c: Circuit) -> AcyclicCFG:
    """Gate-for-nonterminal translation of a monotone circuit.

    Zero constants are eliminated first; the remaining constants must be
    positive.  The language of the result is exactly the circuit's monomial
    support, and when every constant is 1 the derivation-tree count of a
    word is its coefficient."""
    c = propagate_zeros(c)
    if len(c.gates) == 1 and isinstance(c.gates[0], ConstGate) and not c.gates[0].value:
        return AcyclicCFG.build(("G0",), c.n_vars, "G0", {"G0": ()})
    if not c.is_monotone():
        raise ValidationError("grammar translation requires a monotone circuit")
    names = [f"G{i}" for i in range(len(c.gates))]
    prods: dict = {}
    for i, g in enumerate(c.gates):
        if isinstance(g, InputGate):
            prods[names[i]] = ((g.var,),)
        elif isinstance(g, ConstGate):
            prods[names[i]] = ((),)
        elif isinstance(g, AddGate):
            prods[names[i]] = ((names[g.left],), (names[g.right],))
        else:
            prods[names[i]] = ((names[g.left], names[g.right]),)
    return AcyclicCFG.build(names, c.n_vars, names[c.output], prods)


def cfg_to_circuit(g: AcyclicCFG) -> Circuit:
    """Monotone circuit whose coefficient of each word is the number of
    derivation trees of that word (useless symbols contribute nothing)."""
    g = strip_useless(g)
    field = RationalField()
    builder = CircuitBuilder(g.terminals, field)
    inputs: dict[int, int] = {}
    one: Optional[int] = None

    def terminal_gate(t: int) -> int:
        if t not in inputs:
            inputs[t] = builder.input(t)
        return inputs[t]

    def epsilon_gate() -> int:
        nonlocal one
        if one is None:
            one = builder.const(1)
        return one

    gate_of: dict[str, Optional[int]] = {}
    order = topo_order(g)
    assert order is not None
    for nt in order:
        alternatives = []
        for rhs in g.productions.get(nt, ()):
            if len(rhs) == 0:
                alternatives.append(epsilon_gate())
            elif len(rhs) == 1:
                s = rhs[0]
                alternatives.append(
                    terminal_gate(s) if isinstance(s, int) else gate_of[s]
                )
            else:
                ids = [
                    terminal_gate(s) if isinstance(s, int) else gate_of[s]
                    for s in rhs
                ]
                alternatives.append(builder.mul(ids[0], ids[1]))
        gate_of[nt] = builder.add_many(alternatives)
    return builder.finish(gate_of.get(g.start))


# ---------------------------------------------------------------------------
# the mirror pair


def _mirror_core(n: int, alphabet: int) -> tuple[list[str], dict]:
    """Shared nonterminals: ANY (one letter), LEN{k} (any k letters),
    MIR{k} (w . reverse(w) with |w| = k)."""
    nts = ["ANY"]
    prods: dict = {"ANY": tuple((t,) for t in range(alphabet))}
    for k in range(1, n + 1):
        name = f"LEN{k}"
        nts.append(name)
        prods[name] = (("ANY",),) if k == 1 else (("ANY", f"LEN{k-1}"),)
    for k in range(1, n + 1):
        mir = f"MIR{k}"
        if k == 1:
            pair_names = []
            for t in range(alphabet):
                pn = f"PAIR{t}"
                nts.append(pn)
                prods[pn] = ((t, t),)
                pair_names.append(pn)
            nts.append(mir)
            prods[mir] = tuple((pn,) for pn in pair_names)
        else:
            wrap_names = []
            for t in range(alphabet):
                inner = f"IN{t}_{k}"
                outer = f"WRAP{t}_{k}"
                nts.extend([inner, outer])
                prods[inner] = ((f"MIR{k-1}", t),)
                prods[outer] = ((t, inner),)
                wrap_names.append(outer)
            nts.append(mir)
            prods[mir] = tuple((wn,) for wn in wrap_names)
    return nts, prods


def build_mirror_suffix_grammar(n: int, alphabet: int = 2) -> AcyclicCFG:
    """{ z . w . reverse(w) : |z| = |w| = n } over the given alphabet."""
    if n < 1 or alphabet < 1:
        raise ValidationError("need n >= 1 and a nonempty alphabet")
    nts, prods = _mirror_core(n, alphabet)
    nts.append("S")
    prods["S"] = ((f"LEN{n}", f"MIR{n}"),)
    return AcyclicCFG.build(nts, alphabet, "S", prods)


def build_mirror_prefix_grammar(n: int, alphabet: int = 2) -> AcyclicCFG:
    """{ w . reverse(w) . z : |z| = |w| = n } over the given alphabet."""
    if n < 1 or alphabet < 1:
        raise ValidationError("need n >= 1 and a nonempty alphabet")
    nts, prods = _mirror_core(n, alphabet)
    nts.append("S")
    prods["S"] = ((f"MIR{n}", f"LEN{n}"),)
    return AcyclicCFG.build(nts, alphabet, "S", prods)
