"""Layered algebraic branching programs.

An ABP has layers 0..d with one node in layer 0 (the source) and one in
layer d (the sink).  Every edge goes from a layer to the next and carries an
affine linear form; the program computes the sum over source-to-sink paths
of the ordered product of the labels, a noncommutative polynomial of degree
at most d.  Parallel edges are not represented: ingesting two labels on the
same node pair means adding them.

``homogeneous_parts`` splits a program into one degree-homogeneous program
per degree by degree-tracking node duplication: a node of the part for
degree k remembers which original node it is and how much degree has been
accumulated, and each new edge bundles a run of constant-labeled original
edges followed by exactly one variable-carrying step.  The parts therefore
have only homogeneous linear forms on their edges and their path length
equals their degree.

``normalize_edges`` further splits internal nodes per arriving variable so
that every edge except those into the sink mentions a single variable.  The
edge map has no parallel edges and the sink cannot be duplicated, so labels
on the last layer (and the single edge of a degree-1 program) may still
combine several variables; downstream constructions treat labels
variable-by-variable, which agrees with the single-variable normal form
whenever it applies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import (
    ArityMismatchError,
    DEFAULT_MAX_TERMS,
    FieldMismatchError,
    ResourceCapError,
    ValidationError,
)
from .fields import Field, field_from_json, field_to_json
from .matrices import Matrix
from .polynomials import NCPoly


@dataclass
class LinearForm:
    """An affine form: constant + sum of coefficient * variable."""

    const: object
    coeffs: dict  # variable index -> nonzero coefficient

    @classmethod
    def make(cls, field: Field, const=0, coeffs: Optional[dict] = None) -> "LinearForm":
        c = field.coerce(const)
        out = {}
        for v, a in (coeffs or {}).items():
            a = field.coerce(a)
            if a:
                out[int(v)] = a
        return cls(c, out)

    @classmethod
    def constant(cls, field: Field, c) -> "LinearForm":
        return cls.make(field, const=c)

    @classmethod
    def of_var(cls, field: Field, v: int, coeff=1) -> "LinearForm":
        return cls.make(field, coeffs={v: coeff})

    def is_zero(self) -> bool:
        return not self.const and not self.coeffs

    def is_homogeneous(self) -> bool:
        return not self.const

    def is_constant(self) -> bool:
        return not self.coeffs

    def single_variable(self) -> Optional[tuple[int, object]]:
        if not self.const and len(self.coeffs) == 1:
            return next(iter(self.coeffs.items()))
        return None

    def add(self, other: "LinearForm", field: Field) -> "LinearForm":
        coeffs = dict(self.coeffs)
        for v, a in other.coeffs.items():
            s = coeffs.get(v, field.zero()) + a
            if s:
                coeffs[v] = s
            else:
                coeffs.pop(v, None)
        return LinearForm(self.const + other.const, coeffs)

    def scale(self, c, field: Field) -> "LinearForm":
        c = field.coerce(c)
        if not c:
            return LinearForm(field.zero(), {})
        return LinearForm(c * self.const, {v: c * a for v, a in self.coeffs.items()})

    def constant_part(self):
        return self.const

    def linear_part(self, field: Field) -> "LinearForm":
        return LinearForm(field.zero(), dict(self.coeffs))

    def variable_product(self, other: "LinearForm", field: Field) -> "LinearForm":
        """Match variables pointwise: sum of a_v b_v x_v over shared v."""
        coeffs = {}
        small, big = (self.coeffs, other.coeffs) if len(self.coeffs) <= len(other.coeffs) else (other.coeffs, self.coeffs)
        for v, a in small.items():
            b = big.get(v)
            if b is not None:
                prod = a * b
                if prod:
                    coeffs[v] = prod
        return LinearForm(field.zero(), coeffs)

    def evaluate(self, point: Sequence):
        total = self.const
        for v, a in self.coeffs.items():
            total = total + a * point[v]
        return total

    def to_json(self, field: Field) -> dict:
        return {
            "const": field.coeff_to_json(self.const),
            "coeffs": {str(v): field.coeff_to_json(a) for v, a in sorted(self.coeffs.items())},
        }

    @classmethod
    def from_json(cls, obj: dict, field: Field) -> "LinearForm":
        return cls.make(
            field,
            const=field.coeff_from_json(obj.get("const", field.coeff_to_json(field.zero()))),
            coeffs={int(v): field.coeff_from_json(a) for v, a in obj.get("coeffs", {}).items()},
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearForm) and self.const == other.const and self.coeffs == other.coeffs


@dataclass
class ABP:
    n_vars: int
    field: Field
    layer_sizes: tuple[int, ...]
    edges: dict  # (layer, from_node, to_node) -> LinearForm, zero forms omitted

    @property
    def depth(self) -> int:
        return len(self.layer_sizes) - 1

    def node_count(self) -> int:
        return sum(self.layer_sizes)

    def edge_count(self) -> int:
        return len(self.edges)

    def label(self, layer: int, a: int, c: int) -> Optional[LinearForm]:
        return self.edges.get((layer, a, c))

    @classmethod
    def build(cls, n_vars: int, field: Field, layer_sizes: Sequence[int], edges: dict) -> "ABP":
        clean = {}
        for key, form in edges.items():
            layer, a, c = key
            if isinstance(form, LinearForm):
                lf = LinearForm.make(field, form.const, form.coeffs)
            else:
                lf = form
            if lf.is_zero():
                continue
            k = (int(layer), int(a), int(c))
            if k in clean:  # parallel edges merge by addition
                lf = clean[k].add(lf, field)
                if lf.is_zero():
                    del clean[k]
                    continue
            clean[k] = lf
        abp = cls(n_vars, field, tuple(int(s) for s in layer_sizes), clean)
        err = validate(abp)
        if err:
            raise ValidationError(err)
        return abp

    def expand(self, max_terms: int = DEFAULT_MAX_TERMS) -> NCPoly:
        """Path-by-path expansion into an explicit polynomial."""
        zero = self.field.zero()
        current = [{(): self.field.one()}]  # polynomials per node of layer 0
        for layer in range(self.depth):
            nxt = [dict() for _ in range(self.layer_sizes[layer + 1])]
            live = 0
            for (lyr, a, c), form in self.edges.items():
                if lyr != layer:
                    continue
                src = current[a]
                if not src:
                    continue
                dst = nxt[c]
                for word, coeff in src.items():
                    if form.const:
                        s = dst.get(word, zero) + coeff * form.const
                        if s:
                            dst[word] = s
                        else:
                            dst.pop(word, None)
                    for v, av in form.coeffs.items():
                        w = word + (v,)
                        s = dst.get(w, zero) + coeff * av
                        if s:
                            dst[w] = s
                        else:
                            dst.pop(w, None)
            live = sum(len(d) for d in nxt)
            if live > max_terms:
                raise ResourceCapError(f"expansion exceeds {max_terms} terms at layer {layer + 1}")
            current = nxt
        return NCPoly(self.n_vars, self.field, dict(current[0]))

    def evaluate(self, point: Sequence):
        """Iterated matrix product of the labels evaluated at the point."""
        if len(point) != self.n_vars:
            raise ArityMismatchError(f"expected {self.n_vars} values, got {len(point)}")
        point = [self.field.coerce(x) for x in point]
        zero = self.field.zero()
        vec = [self.field.one()]
        for layer in range(self.depth):
            nxt = [zero] * self.layer_sizes[layer + 1]
            for (lyr, a, c), form in self.edges.items():
                if lyr != layer:
                    continue
                if vec[a]:
                    nxt[c] = nxt[c] + vec[a] * form.evaluate(point)
            vec = nxt
        return vec[0]

    def edges_in_layer(self, layer: int) -> list:
        return sorted(
            ((key, form) for key, form in self.edges.items() if key[0] == layer),
            key=lambda kv: kv[0],
        )

    def to_json(self) -> dict:
        out_edges = []
        for (layer, a, c) in sorted(self.edges):
            form = self.edges[(layer, a, c)]
            out_edges.append(
                {"from": [layer, a], "to": [layer + 1, c], "label": form.to_json(self.field)}
            )
        return {
            "nvars": self.n_vars,
            "field": field_to_json(self.field),
            "layers": list(self.layer_sizes),
            "edges": out_edges,
        }

    @classmethod
    def from_json(cls, obj: dict, field: Field | None = None) -> "ABP":
        if field is None:
            if "field" not in obj:
                raise ValidationError("ABP JSON lacks a field descriptor")
            field = field_from_json(obj["field"])
        layers = [int(s) for s in obj["layers"]]
        edges = {}
        for e in obj["edges"]:
            fl, fn = int(e["from"][0]), int(e["from"][1])
            tl, tn = int(e["to"][0]), int(e["to"][1])
            if tl != fl + 1:
                raise ValidationError(f"edge {e['from']} -> {e['to']} skips layers")
            form = LinearForm.from_json(e["label"], field)
            key = (fl, fn, tn)
            if key in edges:
                form = edges[key].add(form, field)
            if form.is_zero():
                edges.pop(key, None)
                continue
            edges[key] = form
        return cls.build(int(obj["nvars"]), field, layers, edges)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ABP)
            and self.n_vars == other.n_vars
            and self.field == other.field
            and self.layer_sizes == other.layer_sizes
            and self.edges == other.edges
        )

    def __repr__(self) -> str:
        return f"ABP(layers={list(self.layer_sizes)}, edges={len(self.edges)}, vars={self.n_vars})"


def validate(abp: ABP) -> Optional[str]:
    """First structural violation as a message, or None if well formed."""
    ls = abp.layer_sizes
    if len(ls) < 1:
        return "no layers"
    if any(s < 1 for s in ls):
        return f"empty layer in {list(ls)}"
    if ls[0] != 1 or ls[-1] != 1:
        return "source and sink layers must have exactly one node"
    if abp.n_vars < 0:
        return "negative variable count"
    for (layer, a, c), form in abp.edges.items():
        if not 0 <= layer < abp.depth:
            return f"edge layer {layer} out of range"
        if not 0 <= a < ls[layer]:
            return f"edge source node {a} out of range in layer {layer}"
        if not 0 <= c < ls[layer + 1]:
            return f"edge target node {c} out of range in layer {layer + 1}"
        if any(not 0 <= v < abp.n_vars for v in form.coeffs):
            return f"edge ({layer},{a},{c}) references a variable out of range"
        if form.is_zero():
            return f"edge ({layer},{a},{c}) stores an explicit zero label"
    return None


def zero_abp(n_vars: int, field: Field) -> ABP:
    return ABP.build(n_vars, field, (1, 1), {})


def constant_abp(n_vars: int, field: Field, c) -> ABP:
    c = field.coerce(c)
    edges = {(0, 0, 0): LinearForm.constant(field, c)} if c else {}
    return ABP.build(n_vars, field, (1, 1), edges)


# ---------------------------------------------------------------------------
# homogenization


def _constant_matrices(abp: ABP) -> list[list[list]]:
    """Per layer, the matrix of constant parts of the labels."""
    out = []
    zero = abp.field.zero()
    for layer in range(abp.depth):
        rows = [[zero] * abp.layer_sizes[layer + 1] for _ in range(abp.layer_sizes[layer])]
        out.append(rows)
    for (layer, a, c), form in abp.edges.items():
        out[layer][a][c] = form.const
    return out


def _linear_matrices(abp: ABP) -> list[list[list]]:
    """Per layer, the matrix of homogeneous linear parts of the labels."""
    field = abp.field
    out = []
    for layer in range(abp.depth):
        rows = [
            [LinearForm(field.zero(), {}) for _ in range(abp.layer_sizes[layer + 1])]
            for _ in range(abp.layer_sizes[layer])
        ]
        out.append(rows)
    for (layer, a, c), form in abp.edges.items():
        if form.coeffs:
            out[layer][a][c] = form.linear_part(field)
    return out


def _const_products(abp: ABP, cons: list[list[list]]) -> dict:
    """C[(i, j)][a][b]: sum over constant-only walks from layer i node a to layer j node b."""
    field = abp.field
    zero, one = field.zero(), field.one()
    prods: dict = {}
    for i in range(abp.depth + 1):
        n = abp.layer_sizes[i]
        prods[(i, i)] = [[one if a == b else zero for b in range(n)] for a in range(n)]
    for i in range(abp.depth + 1):
        for j in range(i + 1, abp.depth + 1):
            prev = prods[(i, j - 1)]
            step = cons[j - 1]
            rows = []
            for a in range(abp.layer_sizes[i]):
                row = []
                for b in range(abp.layer_sizes[j]):
                    s = zero
                    for m in range(abp.layer_sizes[j - 1]):
                        if prev[a][m] and step[m][b]:
                            s = s + prev[a][m] * step[m][b]
                    row.append(s)
                rows.append(row)
            prods[(i, j)] = rows
    return prods


def homogeneous_parts(abp: ABP) -> list[ABP]:
    """Degree-homogeneous programs (one per degree 0..depth) summing to the input.

    The part for degree k has k+1 layers.  A node of its layer w is a pair
    (original layer, original node) reachable after w variable-carrying
    steps; an edge bundles a constant-only walk followed by one
    variable-carrying original edge, and edges into the sink also absorb the
    trailing constant-only walk.  Every label is a homogeneous linear form.
    """
    field = abp.field
    d = abp.depth
    cons = _constant_matrices(abp)
    lins = _linear_matrices(abp)
    cprod = _const_products(abp, cons)

    parts = [constant_abp(abp.n_vars, field, cprod[(0, d)][0][0])]

    for k in range(1, d + 1):
        # layer w of part k holds original pairs (i, a), w <= i <= d-(k-w)
        node_lists: list[list[tuple[int, int]]] = [[(0, 0)]]
        for w in range(1, k):
            nodes = [
                (i, a)
                for i in range(w, d - (k - w) + 1)
                for a in range(abp.layer_sizes[i])
            ]
            node_lists.append(nodes)
        node_lists.append([(d, 0)])
        index = [
            {node: idx for idx, node in enumerate(layer_nodes)}
            for layer_nodes in node_lists
        ]

        edges = {}

        def composite_step(i: int, a: int, j: int):
            """Forms into layer-j nodes: constant walk i->j-1, then one variable edge."""
            reach = cprod[(i, j - 1)][a]
            out = {}
            for m in range(abp.layer_sizes[j - 1]):
                w_am = reach[m]
                if not w_am:
                    continue
                for b in range(abp.layer_sizes[j]):
                    lf = lins[j - 1][m][b]
                    if lf.coeffs:
                        scaled = lf.scale(w_am, field)
                        if not scaled.is_zero():
                            out[b] = scaled.add(out[b], field) if b in out else scaled
            return {b: lf for b, lf in out.items() if not lf.is_zero()}

        for w in range(k):
            for (i, a) in node_lists[w]:
                src = index[w][(i, a)]
                if w + 1 < k:
                    for j in range(i + 1, d - (k - w - 1) + 1):
                        for b, lf in composite_step(i, a, j).items():
                            dst = index[w + 1][(j, b)]
                            key = (w, src, dst)
                            edges[key] = lf.add(edges[key], field) if key in edges else lf
                else:
                    # final step: variable edge at any remaining position, then constants to the sink
                    total = None
                    for j in range(i + 1, d + 1):
                        for b, lf in composite_step(i, a, j).items():
                            tail = cprod[(j, d)][b][0]
                            if tail:
                                scaled = lf.scale(tail, field)
                                if not scaled.is_zero():
                                    total = scaled if total is None else total.add(scaled, field)
                    if total is not None and not total.is_zero():
                        edges[(w, src, 0)] = total

        layer_sizes = [len(nodes) for nodes in node_lists]
        parts.append(ABP.build(abp.n_vars, field, layer_sizes, edges))

    return parts


def is_homogeneous_program(abp: ABP) -> bool:
    return all(form.is_homogeneous() for form in abp.edges.values())


def normalize_edges(abp: ABP) -> ABP:
    """Split nodes so every edge label is 0 or a single alpha * x_i.

    Requires a degree-homogeneous program of degree >= 1.  Internal nodes
    are duplicated per arriving variable; nodes feeding the sink are also
    duplicated per departing variable, so sink-bound labels split as well.
    Already-normal programs are returned as is.  A degree-1 program is the
    one shape that cannot be split at all — the lone source-to-sink label
    would need parallel edges, which the edge map merges — so it is
    returned unchanged and consumers accept multi-variable labels there.
    """
    if abp.depth < 1:
        raise ValidationError("normalization requires degree at least 1")
    if not is_homogeneous_program(abp):
        raise ValidationError("normalization requires homogeneous edge labels")
    d = abp.depth
    if d == 1:
        return abp
    if all(form.single_variable() is not None for form in abp.edges.values()):
        return abp

    field = abp.field
    # arriving variables per internal node; departing variables at layer d-1
    arriving: list[dict[int, list[int]]] = [dict() for _ in range(d)]
    for (layer, a, c), form in abp.edges.items():
        if 1 <= layer + 1 <= d - 1:
            slot = arriving[layer + 1].setdefault(c, [])
            for v in form.coeffs:
                if v not in slot:
                    slot.append(v)
    departing: dict[int, list[int]] = {}
    for a in range(abp.layer_sizes[d - 1]):
        form = abp.edges.get((d - 1, a, 0))
        if form is not None:
            departing[a] = sorted(form.coeffs)

    def copies(w: int, c: int) -> list[tuple[int, int, int]]:
        ins = sorted(arriving[w].get(c, []))
        outs = departing.get(c, []) if w == d - 1 else [-1]
        return [(c, v, t) for v in ins for t in outs]

    node_lists: list[list[tuple[int, int, int]]] = [[(0, -1, -1)]]
    for w in range(1, d):
        nodes = [node for c in range(abp.layer_sizes[w]) for node in copies(w, c)]
        if not nodes:
            nodes = [(0, -1, -1)]  # placeholder keeps the layer nonempty
        node_lists.append(nodes)
    node_lists.append([(0, -1, -1)])
    index = [{node: i for i, node in enumerate(nodes)} for nodes in node_lists]

    edges: dict[tuple[int, int, int], LinearForm] = {}

    def add_edge(layer: int, src: int, dst: int, var: int, coeff) -> None:
        lf = LinearForm.make(field, coeffs={var: coeff})
        key = (layer, src, dst)
        edges[key] = lf.add(edges[key], field) if key in edges else lf

    for (layer, a, c), form in abp.edges.items():
        sources = [(0, -1, -1)] if layer == 0 else copies(layer, a)
        if not sources:
            continue  # unreachable or dead in the split program
        if layer < d - 1:
            for v, coeff in form.coeffs.items():
                for dst in copies(layer + 1, c):
                    if dst[1] != v:
                        continue
                    for src in sources:
                        add_edge(layer, index[layer][src], index[layer + 1][dst], v, coeff)
        else:
            # each copy's sink edge keeps only its own departing variable
            for src in sources:
                t = src[2]
                add_edge(layer, index[layer][src], 0, t, form.coeffs[t])

    layer_sizes = [len(nodes) for nodes in node_lists]
    return ABP.build(abp.n_vars, field, layer_sizes, edges)


# ---------------------------------------------------------------------------
# sums and pruning


def abp_sum(parts: Sequence[ABP]) -> ABP:
    """Disjoint union behind a shared source and sink.

    Shorter programs are fed through a shared constant-1 delay chain hanging
    off the source, so the overhead over the summed sizes is at most the
    maximum depth plus one.
    """
    parts = list(parts)
    if not parts:
        raise ValidationError("empty sum")
    n_vars = parts[0].n_vars
    field = parts[0].field
    for p in parts:
        if p.n_vars != n_vars:
            raise ArityMismatchError("summands disagree on variable count")
        if p.field != field:
            raise FieldMismatchError("summands disagree on field")
    # a single-layer program computes the constant 1; lift it to depth 1
    parts = [constant_abp(n_vars, field, 1) if p.depth == 0 else p for p in parts]
    depth = max(p.depth for p in parts)

    chain_positions = sorted({depth - p.depth for p in parts if p.depth < depth})
    # nodes per layer: optional chain node first, then each part's nodes
    offsets: list[dict] = [dict() for _ in range(len(parts))]
    layer_nodes = [0] * (depth + 1)
    layer_nodes[0] = 1
    layer_nodes[depth] = 1
    chain_index: dict[int, int] = {}
    for w in range(1, depth):
        count = 0
        if any(pos >= w for pos in chain_positions):
            chain_index[w] = 0
            count = 1
        for pi, p in enumerate(parts):
            shift = depth - p.depth
            local = w - shift
            if 0 < local < p.depth:
                offsets[pi][local] = count
                count += p.layer_sizes[local]
        if count == 0:
            count = 1  # placeholder
        layer_nodes[w] = count

    edges: dict = {}

    def add_edge(key, form):
        if key in edges:
            form = edges[key].add(form, field)
            if form.is_zero():
                del edges[key]
                return
        edges[key] = form

    one_form = LinearForm.constant(field, 1)
    # chain edges: source -> c_1 -> c_2 -> ... as far as needed
    max_chain = max(chain_positions, default=0)
    for w in range(max_chain):
        src = 0 if w == 0 else chain_index[w]
        if w + 1 == depth:
            dst = 0
        elif w + 1 <= max_chain:
            dst = chain_index[w + 1]
        else:
            break
        add_edge((w, src, dst), one_form)

    for pi, p in enumerate(parts):
        shift = depth - p.depth
        for (layer, a, c), form in p.edges.items():
            gl = layer + shift
            if layer == 0:
                src = 0 if shift == 0 else chain_index[shift]
            else:
                src = offsets[pi][layer] + a
            if layer + 1 == p.depth:
                dst = 0
            else:
                dst = offsets[pi][layer + 1] + c
            add_edge((gl, src, dst), LinearForm.make(field, form.const, form.coeffs))

    return ABP.build(n_vars, field, layer_nodes, edges)


def prune(abp: ABP) -> ABP:
    """Drop nodes not on any source-to-sink edge path; canonical zero if none."""
    d = abp.depth
    if d == 0:
        return abp
    fwd = [set() for _ in range(d + 1)]
    fwd[0].add(0)
    for layer in range(d):
        for (lyr, a, c) in abp.edges:
            if lyr == layer and a in fwd[layer]:
                fwd[layer + 1].add(c)
    bwd = [set() for _ in range(d + 1)]
    bwd[d].add(0)
    for layer in range(d - 1, -1, -1):
        for (lyr, a, c) in abp.edges:
            if lyr == layer and c in bwd[layer + 1]:
                bwd[layer].add(a)
    alive = [sorted(fwd[w] & bwd[w]) for w in range(d + 1)]
    if any(not nodes for nodes in alive):
        return zero_abp(abp.n_vars, abp.field)
    remap = [{node: i for i, node in enumerate(nodes)} for nodes in alive]
    edges = {}
    for (layer, a, c), form in abp.edges.items():
        if a in remap[layer] and c in remap[layer + 1]:
            edges[(layer, remap[layer][a], remap[layer + 1][c])] = form
    return ABP.build(abp.n_vars, abp.field, [len(nodes) for nodes in alive], edges)


# ---------------------------------------------------------------------------
# coefficient matrices and word coefficients


def coefficient_matrices(abp: ABP) -> list[dict[int, Matrix]]:
    """Per layer, per variable: the matrix of that variable's coefficients.

    Requires homogeneous edge labels.  The coefficient of the degree-d word
    w_1...w_d is then the 1x1 iterated product M[0][w_1] ... M[d-1][w_d].
    """
    if not is_homogeneous_program(abp):
        raise ValidationError("coefficient matrices require homogeneous edge labels")
    field = abp.field
    out = []
    for layer in range(abp.depth):
        r, c = abp.layer_sizes[layer], abp.layer_sizes[layer + 1]
        per_var: dict[int, list[list]] = {}
        for (lyr, a, b), form in abp.edges.items():
            if lyr != layer:
                continue
            for v, coeff in form.coeffs.items():
                grid = per_var.setdefault(v, [[field.zero()] * c for _ in range(r)])
                grid[a][b] = grid[a][b] + coeff
        out.append(
            {
                v: Matrix.from_rows(field, grid)
                for v, grid in sorted(per_var.items())
            }
        )
    return out


def coefficient_of(abp: ABP, word: Sequence[int]):
    """Coefficient of a word, via the matrix product of its homogeneous part."""
    word = tuple(int(v) for v in word)
    if any(not 0 <= v < abp.n_vars for v in word):
        raise ValidationError("word references a variable out of range")
    k = len(word)
    parts = homogeneous_parts(abp)
    if k >= len(parts):
        return abp.field.zero()
    if k == 0:
        form = parts[0].label(0, 0, 0)
        return form.const if form else abp.field.zero()
    mats = coefficient_matrices(parts[k])
    vec = Matrix.identity(abp.field, 1)
    for pos, v in enumerate(word):
        m = mats[pos].get(v)
        if m is None:
            return abp.field.zero()
        vec = vec.matmul(m)
        if vec.is_zero():
            return abp.field.zero()
    return vec.entry(0, 0)


# ---------------------------------------------------------------------------
# sub-programs (useful for testing intermediate semantics)


def prefix_subprogram(abp: ABP, layer: int, node: int) -> ABP:
    """The program computed from the source into the given node."""
    if not 0 <= layer <= abp.depth or not 0 <= node < abp.layer_sizes[layer]:
        raise ValidationError("node out of range")
    sizes = list(abp.layer_sizes[: layer + 1])
    sizes[-1] = 1
    edges = {}
    for (lyr, a, c), form in abp.edges.items():
        if lyr < layer - 1:
            edges[(lyr, a, c)] = form
        elif lyr == layer - 1 and c == node:
            edges[(lyr, a, 0)] = form
    if layer == 0:
        return ABP.build(abp.n_vars, abp.field, (1, 1), {(0, 0, 0): LinearForm.constant(abp.field, 1)})
    return ABP.build(abp.n_vars, abp.field, sizes, edges)


def subprogram(abp: ABP, i: int, a: int, j: int, b: int) -> ABP:
    """The program between node a of layer i and node b of layer j."""
    if not (0 <= i <= j <= abp.depth):
        raise ValidationError("bad layer interval")
    if i == j:
        return constant_abp(abp.n_vars, abp.field, 1 if a == b else 0)
    sizes = [1] + list(abp.layer_sizes[i + 1 : j]) + [1]
    edges = {}
    for (lyr, x, y), form in abp.edges.items():
        if not (i <= lyr < j):
            continue
        if lyr == i and x != a:
            continue
        if lyr == j - 1 and y != b:
            continue
        src = 0 if lyr == i else x
        dst = 0 if lyr == j - 1 else y
        edges[(lyr - i, src, dst)] = form
    return ABP.build(abp.n_vars, abp.field, sizes, edges)


# ---------------------------------------------------------------------------
# Nisan communication matrices


@dataclass
class NisanMatrix:
    k: int
    matrix: Matrix


def nisan_matrix(f: NCPoly, k: int, max_entries: int = DEFAULT_MAX_TERMS) -> NisanMatrix:
    """Rows are degree-k words, columns degree-(d-k) words, both lexicographic;
    the entry at (m, m') is the coefficient of the concatenation m m'."""
    if not f.is_homogeneous():
        raise ValidationError("Nisan matrices require a homogeneous polynomial")
    d = max(f.degree(), 0)
    if not 0 <= k <= d:
        raise ValidationError(f"k={k} outside 0..{d}")
    n = f.n_vars
    n_rows = n ** k
    n_cols = n ** (d - k)
    if n_rows * n_cols > max_entries:
        raise ResourceCapError(f"Nisan matrix would hold {n_rows * n_cols} entries")
    zero = f.field.zero()
    rows = []
    for left in _words(n, k):
        row = []
        for right in _words(n, d - k):
            row.append(f.terms.get(left + right, zero))
        rows.append(row)
    return NisanMatrix(k, Matrix.from_rows(f.field, rows))


def _words(n_vars: int, length: int):
    yield from itertools.product(range(n_vars), repeat=length)


def nisan_complexity(f: NCPoly, max_entries: int = DEFAULT_MAX_TERMS) -> int:
    """Sum of the ranks of all the communication matrices."""
    if f.is_zero():
        return 0
    d = f.degree()
    return sum(nisan_matrix(f, k, max_entries).matrix.rank() for k in range(d + 1))
