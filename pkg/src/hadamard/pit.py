"""Identity testing for branching programs, plus reductions into them.

Four testers with different contracts:

* ``pit_rational``  — deterministic, rationals only.  The squared-coefficient
  sum of f is the product program of f with itself evaluated at all-ones;
  over the rationals it vanishes exactly when f does.
* ``pit_span_basis`` — deterministic, any field.  Works degree by degree on
  the coefficient matrices: a divide-and-conquer pass keeps a spanning
  basis of the interval products, each basis element tagged with the word
  that produced it, so a nonzero program yields an explicit witness word.
* ``pit_randomized`` — finite fields.  Replaces each variable with a fresh
  value per layer, which separates words by position, and evaluates at
  uniform points in an extension large enough for the usual degree-over-
  field-size failure bound.
* ``pit_bruteforce`` — expands the program (or circuit) outright.

``det_to_abp`` encodes a matrix determinant as a constant-labeled program
(closed-walk-sequence dynamic programming), and ``reach_to_abp`` encodes
s-t reachability of a digraph, so both reduce to identity tests.
"""

from __future__ import annotations

import random as _random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .abp import (
    ABP,
    LinearForm,
    coefficient_matrices,
    coefficient_of,
    constant_abp,
    homogeneous_parts,
    normalize_edges,
    prune,
)
from .circuits import Circuit
from .errors import DEFAULT_MAX_TERMS, ValidationError
from .fields import ExtField, Field, PrimeField, RationalField
from .matrices import Matrix, independent_subset
from .polynomials import NCPoly
from .products import hadamard_abp


@dataclass
class PitVerdict:
    is_zero: bool
    method: str
    witness: Optional[dict] = None
    trials: Optional[int] = None
    per_trial_bound: Optional[Fraction] = None
    value_json: Optional[object] = None

    def to_json(self) -> dict:
        failure = None
        if self.per_trial_bound is not None and self.trials is not None:
            failure = str(self.per_trial_bound**self.trials)
        return {
            "is_zero": self.is_zero,
            "method": self.method,
            "witness": self.witness,
            "trials": self.trials,
            "per_trial_bound": None
            if self.per_trial_bound is None
            else str(self.per_trial_bound),
            "failure_bound": failure,
            "value": self.value_json,
        }


def pit_rational(p: ABP) -> PitVerdict:
    """Zero iff the sum of squared coefficients is zero (rationals only)."""
    if not isinstance(p.field, RationalField):
        raise ValidationError("squared-coefficient test needs rational coefficients")
    square = hadamard_abp(p, p)
    total = square.evaluate([Fraction(1)] * p.n_vars)
    return PitVerdict(
        is_zero=total == 0,
        method="square_sum",
        value_json=p.field.coeff_to_json(total),
    )


def _span_basis(
    mats: list[dict[int, Matrix]], lo: int, hi: int, field: Field
) -> list[tuple[tuple[int, ...], Matrix]]:
    """Word-tagged basis spanning all products M[lo][v1] ... M[hi-1][v_k]."""
    if hi - lo == 1:
        items = sorted(mats[lo].items())
        vectors = [m for _, m in items]
        keep = independent_subset([m.entries for m in vectors], field)
        return [((items[i][0],), items[i][1]) for i in keep]
    mid = (lo + hi) // 2
    left = _span_basis(mats, lo, mid, field)
    right = _span_basis(mats, mid, hi, field)
    tagged = []
    for wl, ml in left:
        for wr, mr in right:
            prod = ml.matmul(mr)
            if not prod.is_zero():
                tagged.append((wl + wr, prod))
    keep = independent_subset([m.entries for _, m in tagged], field)
    return [tagged[i] for i in keep]


def pit_span_basis(p: ABP) -> PitVerdict:
    """Deterministic: per degree, span the interval products of the
    coefficient matrices; a surviving nonzero scalar names a witness word."""
    parts = homogeneous_parts(p)
    for k, part in enumerate(parts):
        if k == 0:
            form = part.label(0, 0, 0)
            if form is not None and form.const:
                return PitVerdict(
                    is_zero=False,
                    method="span_basis",
                    witness={"word": [], "coeff": p.field.coeff_to_json(form.const)},
                )
            continue
        part = prune(part)
        if part.depth != k:
            continue  # this degree vanished structurally
        part = normalize_edges(part)
        mats = coefficient_matrices(part)
        if any(not layer for layer in mats):
            continue
        basis = _span_basis(mats, 0, k, p.field)
        for word, mat in basis:
            c = mat.entry(0, 0)
            if c:
                assert coefficient_of(p, word) == c
                return PitVerdict(
                    is_zero=False,
                    method="span_basis",
                    witness={"word": list(word), "coeff": p.field.coeff_to_json(c)},
                )
    return PitVerdict(is_zero=True, method="span_basis")


# ---------------------------------------------------------------------------
# randomized evaluation


def _poly_eval_in(coeffs: Sequence[int], x):
    """Evaluate an integer-coefficient polynomial (low-degree-first) at x."""
    field = x.field
    acc = field.zero()
    for c in reversed(list(coeffs)):
        acc = acc * x + field.from_int(c)
    return acc


def _extension_with_embedding(field: Field, min_size: int):
    """A field of size >= min_size containing ``field``, with the embedding map."""
    if isinstance(field, PrimeField):
        if field.p >= min_size:
            return field, lambda x: x
        e = 1
        while field.p**e < min_size:
            e += 1
        big = ExtField.make(field.p, e)
        return big, lambda x: big.from_int(x.value)
    if isinstance(field, ExtField):
        if field.order >= min_size:
            return field, lambda x: x
        e = 2
        while field.order**e < min_size:
            e += 1
        big = ExtField.make(field.p, field.k * e)
        root = None
        for cand in big.elements():
            if not _poly_eval_in(field.modulus, cand):
                root = cand
                break
        assert root is not None, "an irreducible factor always has a root upstairs"

        def embed(x, _root=root, _big=big):
            acc = _big.zero()
            for c in reversed(x.coeffs):
                acc = acc * _root + _big.from_int(c)
            return acc

        return big, embed
    raise ValidationError("randomized evaluation needs a finite field")


def pit_randomized(p: ABP, trials: int = 20, seed: int = 0) -> PitVerdict:
    """Per-layer variable relabeling + random evaluation over a big-enough
    extension.  A nonzero evaluation proves nonzero; all-zero evaluations
    leave a per-trial failure chance of at most depth / field size."""
    if isinstance(p.field, RationalField):
        raise ValidationError("use the square-sum test for rational programs")
    if trials < 1:
        raise ValidationError("at least one trial required")
    d = p.depth
    big, embed = _extension_with_embedding(p.field, max(2 * d, 2))
    bound = Fraction(d, big.order) if d else Fraction(0)
    zero, one = big.zero(), big.one()
    edges_by_layer: list[list] = [[] for _ in range(d)]
    for key, form in p.edges.items():
        edges_by_layer[key[0]].append((key, form))
    for trial in range(trials):
        # each trial gets its own stream keyed by (seed, trial), so trial t
        # draws the same points no matter how many trials run before it
        rng = _random.Random(f"{seed}:{trial}")
        points = [
            [big.random(rng) for _ in range(p.n_vars)] for _ in range(d)
        ]
        vec = [one]
        for layer in range(d):
            nxt = [zero] * p.layer_sizes[layer + 1]
            for (lyr, a, c), form in edges_by_layer[layer]:
                if not vec[a]:
                    continue
                val = embed(form.const)
                for v, coeff in form.coeffs.items():
                    val = val + embed(coeff) * points[layer][v]
                nxt[c] = nxt[c] + vec[a] * val
            vec = nxt
        if vec[0]:
            return PitVerdict(
                is_zero=False,
                method="randomized",
                witness={"trial": trial},
                trials=trial + 1,
                per_trial_bound=bound,
                value_json=big.coeff_to_json(vec[0]),
            )
    return PitVerdict(
        is_zero=True, method="randomized", trials=trials, per_trial_bound=bound
    )


def pit_bruteforce(
    obj: Union[ABP, Circuit], max_terms: int = DEFAULT_MAX_TERMS
) -> PitVerdict:
    """Expand outright and look at the terms."""
    f = obj.expand(max_terms=max_terms)
    if f.is_zero():
        return PitVerdict(is_zero=True, method="bruteforce")
    word, coeff = f.sorted_terms()[0]
    return PitVerdict(
        is_zero=False,
        method="bruteforce",
        witness={"word": list(word), "coeff": f.field.coeff_to_json(coeff)},
    )


def hadamard_zero_circuits(
    c1: Circuit,
    c2: Circuit,
    max_degree: int = 12,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> PitVerdict:
    """Is the coefficient-wise product of two monotone circuits zero?

    Monotonicity rules out cancellation, so the product vanishes exactly
    when the circuits' monomial supports are disjoint."""
    if not (c1.is_monotone() and c2.is_monotone()):
        raise ValidationError("support comparison requires monotone circuits")
    f = c1.expand(max_degree=max_degree, max_terms=max_terms)
    g = c2.expand(max_degree=max_degree, max_terms=max_terms)
    common = f.mon_set() & g.mon_set()
    if not common:
        return PitVerdict(is_zero=True, method="monotone_support")
    word = min(common, key=lambda w: (len(w), w))
    return PitVerdict(
        is_zero=False,
        method="monotone_support",
        witness={"word": list(word), "coeff": None},
    )


# ---------------------------------------------------------------------------
# determinant as a constant-labeled program


def det_to_abp(rows: Sequence[Sequence], field: Optional[Field] = None) -> ABP:
    """Program whose (constant) polynomial is the determinant.

    States walk closed-walk sequences: a node remembers the head of the
    current closed walk and the walk's position; closing a walk costs a
    sign flip, and a final global sign straightens the count out.  Paths
    use exactly n edges, so the program has n+1 layers of O(n^2) nodes.
    """
    if field is None:
        field = RationalField()
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise ValidationError("determinant needs a nonempty square matrix")
    a = [[field.coerce(x) for x in row] for row in rows]
    minus_one = field.zero() - field.one()
    final_sign = field.one() if (n + 1) % 2 == 0 else minus_one

    if n == 1:
        return constant_abp(0, field, a[0][0])

    # internal layers share one state list: (head, current) with head <= current
    states = [(h, u) for h in range(n) for u in range(h, n)]
    index = {s: i for i, s in enumerate(states)}
    sizes = [1] + [len(states)] * (n - 1) + [1]
    edges: dict = {}

    def add(key, c):
        if not c:
            return
        prev = edges.get(key)
        c = prev.const + c if prev else c
        if c:
            edges[key] = LinearForm.constant(field, c)
        else:
            edges.pop(key, None)

    # layer 0: open the first walk at head h, take its first step
    for h in range(n):
        for v in range(h + 1, n):
            add((0, 0, index[(h, v)]), a[h][v])
        for h2 in range(h + 1, n):
            add((0, 0, index[(h2, h2)]), minus_one * a[h][h])
    # internal steps
    for layer in range(1, n - 1):
        for (h, u) in states:
            src = index[(h, u)]
            for v in range(h + 1, n):
                add((layer, src, index[(h, v)]), a[u][v])
            for h2 in range(h + 1, n):
                add((layer, src, index[(h2, h2)]), minus_one * a[u][h])
    # last step: close the final walk
    for (h, u) in states:
        add((n - 1, index[(h, u)], 0), final_sign * a[u][h])

    return ABP.build(0, field, sizes, edges)


# ---------------------------------------------------------------------------
# reachability as a multilinear program


@dataclass(frozen=True)
class Digraph:
    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    s: int
    t: int

    def __post_init__(self):
        if not (0 <= self.s < self.n_vertices and 0 <= self.t < self.n_vertices):
            raise ValidationError("endpoint out of range")
        for (u, v) in self.edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValidationError(f"edge ({u},{v}) out of range")

    @classmethod
    def from_json(cls, obj: dict) -> "Digraph":
        return cls(
            int(obj["vertices"]),
            tuple((int(u), int(v)) for u, v in obj["edges"]),
            int(obj["s"]),
            int(obj["t"]),
        )

    def to_json(self) -> dict:
        return {
            "vertices": self.n_vertices,
            "edges": [[u, v] for u, v in self.edges],
            "s": self.s,
            "t": self.t,
        }


def reach_to_abp(g: Digraph, field: Optional[Field] = None) -> ABP:
    """Program that is nonzero exactly when t is reachable from s.

    Vertices are copied once per level; every program edge (graph step or
    stay-in-place) carries its own fresh variable, so distinct paths give
    distinct monomials and nothing can cancel."""
    if field is None:
        field = RationalField()
    if g.s == g.t:
        return constant_abp(0, field, 1)
    n = g.n_vertices
    depth = n - 1
    arcs = sorted(set(g.edges))
    sizes = [1] + [n] * (depth - 1) + [1]
    var_of: dict = {}

    for layer in range(depth):
        if layer == 0:
            outs = [(g.s, 0)]
        else:
            outs = [(u, u) for u in range(n)]
        for (u, src) in outs:
            # one step along any out-edge, or stay in place to pad the path
            targets = sorted({v for (uu, v) in arcs if uu == u} | {u})
            for v in targets:
                if layer == depth - 1:
                    if v != g.t:
                        continue
                    dst = 0
                else:
                    dst = v
                var_of.setdefault((layer, src, dst), len(var_of))

    labels = {
        key: LinearForm.of_var(field, var) for key, var in var_of.items()
    }
    return ABP.build(len(var_of), field, sizes, labels)
