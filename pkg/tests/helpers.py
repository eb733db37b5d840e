"""Shared generators and independent oracles for the test suite.

Everything here is deliberately naive: cofactor expansion for determinants,
breadth-first search for reachability, permutation sums for permanents.
The library must agree with these on random instances.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from hadamard.abp import ABP, LinearForm
from hadamard.circuits import AddGate, Circuit, ConstGate, InputGate, MulGate
from hadamard.pit import Digraph


def lf(field, const=0, **kw):
    return LinearForm.make(field, const=const, coeffs={int(k[1:]): v for k, v in kw.items()})


def random_abp(rng, field, n_vars=3, depth=3, width=3, affine=True, density=0.7):
    sizes = [1] + [rng.randint(1, width) for _ in range(depth - 1)] + [1]
    edges = {}
    for layer in range(depth):
        for a in range(sizes[layer]):
            for c in range(sizes[layer + 1]):
                if rng.random() > density:
                    continue
                const = rng.randint(-2, 2) if affine and rng.random() < 0.5 else 0
                coeffs = {}
                for v in range(n_vars):
                    if rng.random() < 0.5:
                        coeffs[v] = rng.randint(-2, 2)
                form = LinearForm.make(field, const=const, coeffs=coeffs)
                if not form.is_zero():
                    edges[(layer, a, c)] = form
    return ABP.build(n_vars, field, sizes, edges)


def cancelling_abp(rng, field, **kw):
    """A program that computes the zero polynomial non-trivially: a random
    program joined with a copy of itself whose final-layer labels are negated."""
    from hadamard.abp import abp_sum

    while True:
        base = random_abp(rng, field, **kw)
        if not base.expand().is_zero():
            break
    flipped = {}
    minus_one = field.zero() - field.one()
    for (layer, a, c), form in base.edges.items():
        if layer == base.depth - 1:
            form = form.scale(minus_one, field)
        flipped[(layer, a, c)] = form
    negated = ABP.build(base.n_vars, field, base.layer_sizes, flipped)
    return abp_sum([base, negated])


def random_circuit(rng, field, n_vars=3, n_gates=8, max_degree=3):
    gates = [InputGate(rng.randrange(n_vars))]
    degs = [1]
    while len(gates) < n_gates:
        roll = rng.random()
        if roll < 0.25:
            gates.append(InputGate(rng.randrange(n_vars)))
            degs.append(1)
        elif roll < 0.4:
            gates.append(ConstGate(field.coerce(rng.randint(-2, 2))))
            degs.append(0)
        else:
            l = rng.randrange(len(gates))
            r = rng.randrange(len(gates))
            if roll < 0.7 and degs[l] + degs[r] <= max_degree:
                gates.append(MulGate(l, r))
                degs.append(degs[l] + degs[r])
            else:
                gates.append(AddGate(l, r))
                degs.append(max(degs[l], degs[r]))
    return Circuit.build(n_vars, field, gates, len(gates) - 1)


def random_monotone_circuit(rng, n_vars=3, n_gates=8, max_degree=4):
    from hadamard.fields import RationalField

    field = RationalField()
    gates = [InputGate(rng.randrange(n_vars))]
    degs = [1]
    while len(gates) < n_gates:
        roll = rng.random()
        if roll < 0.3:
            gates.append(InputGate(rng.randrange(n_vars)))
            degs.append(1)
        elif roll < 0.4:
            gates.append(ConstGate(Fraction(rng.randint(1, 3))))
            degs.append(0)
        else:
            l = rng.randrange(len(gates))
            r = rng.randrange(len(gates))
            if roll < 0.7 and degs[l] + degs[r] <= max_degree:
                gates.append(MulGate(l, r))
                degs.append(degs[l] + degs[r])
            else:
                gates.append(AddGate(l, r))
                degs.append(max(degs[l], degs[r]))
    return Circuit.build(n_vars, field, gates, len(gates) - 1)


def cofactor_det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        if not rows[0][j]:
            continue
        minor = [[rows[i][jj] for jj in range(n) if jj != j] for i in range(1, n)]
        term = rows[0][j] * cofactor_det(minor)
        total = total - term if j % 2 else total + term
    return total


def random_digraph(rng, n_vertices=10, n_edges=14):
    edges = set()
    n_edges = min(n_edges, n_vertices * n_vertices)
    while len(edges) < n_edges:
        u = rng.randrange(n_vertices)
        v = rng.randrange(n_vertices)
        edges.add((u, v))
    s = rng.randrange(n_vertices)
    t = rng.randrange(n_vertices)
    return Digraph(n_vertices, tuple(sorted(edges)), s, t)


def bfs_reachable(g: Digraph) -> bool:
    seen = {g.s}
    frontier = [g.s]
    adj = {}
    for (u, v) in g.edges:
        adj.setdefault(u, []).append(v)
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj.get(u, []):
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return g.t in seen


def permanent(rows):
    n = len(rows)
    total = 0
    for perm in itertools.permutations(range(n)):
        prod = 1
        for i, j in enumerate(perm):
            prod *= rows[i][j]
            if not prod:
                break
        total += prod
    return total


def random_grammar(rng, n_nonterminals=5, terminals=2, max_prods=3):
    """Acyclic by construction: each nonterminal only references earlier ones."""
    from hadamard.grammars import AcyclicCFG

    names = [f"N{i}" for i in range(n_nonterminals)]
    prods = {}
    for i, name in enumerate(names):
        rhss = []
        for _ in range(rng.randint(1, max_prods)):
            length = rng.choice([0, 1, 1, 2, 2])
            rhs = []
            for _ in range(length):
                if i > 0 and rng.random() < 0.5:
                    rhs.append(names[rng.randrange(i)])
                else:
                    rhs.append(rng.randrange(terminals))
            rhss.append(tuple(rhs))
        prods[name] = tuple(rhss)
    return AcyclicCFG.build(names, terminals, names[-1], prods)
