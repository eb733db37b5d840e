"""Coefficient-wise products: program x program and circuit x program."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from hadamard.abp import ABP, LinearForm, homogeneous_parts, normalize_edges
from hadamard.circuits import Circuit, InputGate, MulGate, AddGate, ConstGate
from hadamard.errors import ArityMismatchError, FieldMismatchError
from hadamard.fields import PrimeField, RationalField
from hadamard.polynomials import NCPoly
from hadamard.products import (
    hadamard_abp,
    hadamard_abp_detailed,
    hadamard_circuit_abp,
    hadamard_circuit_abp_detailed,
    hadamard_homogeneous,
)

Q = RationalField()
F5 = PrimeField(5)


def lf(field, const=0, **kw):
    return LinearForm.make(field, const=const, coeffs={int(k[1:]): v for k, v in kw.items()})


def random_abp(rng, field, n_vars=3, depth=3, width=3, affine=True):
    sizes = [1] + [rng.randint(1, width) for _ in range(depth - 1)] + [1]
    edges = {}
    for layer in range(depth):
        for a in range(sizes[layer]):
            for c in range(sizes[layer + 1]):
                if rng.random() < 0.3:
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


def test_homogeneous_product_small_example():
    # f = x0*x1 + x1*x0, g = x0*x1 - x1*x0; f o g = x0x1 - x1x0
    p = ABP.build(
        2, Q, (1, 2, 1),
        {
            (0, 0, 0): lf(Q, x0=1),
            (0, 0, 1): lf(Q, x1=1),
            (1, 0, 0): lf(Q, x1=1),
            (1, 1, 0): lf(Q, x0=1),
        },
    )
    q = ABP.build(
        2, Q, (1, 2, 1),
        {
            (0, 0, 0): lf(Q, x0=1),
            (0, 0, 1): lf(Q, x1=1),
            (1, 0, 0): lf(Q, x1=1),
            (1, 1, 0): lf(Q, x0=-1),
        },
    )
    r = hadamard_homogeneous(p, q)
    assert r.layer_sizes == (1, 4, 1)
    assert r.expand() == NCPoly.from_terms(2, Q, {(0, 1): 1, (1, 0): -1})


def test_full_pipeline_matches_polynomial_hadamard():
    rng = random.Random(2024)
    for _ in range(30):
        p = random_abp(rng, Q, depth=rng.randint(1, 4), width=2)
        q = random_abp(rng, Q, depth=rng.randint(1, 4), width=2)
        r = hadamard_abp(p, q)
        assert r.expand() == p.expand().hadamard(q.expand())
    for _ in range(10):
        p = random_abp(rng, F5, n_vars=2, depth=3, width=2)
        q = random_abp(rng, F5, n_vars=2, depth=3, width=2)
        assert hadamard_abp(p, q).expand() == p.expand().hadamard(q.expand())


def test_layer_sizes_are_exact_products():
    rng = random.Random(31337)
    for _ in range(20):
        p = random_abp(rng, Q, depth=rng.randint(1, 4))
        q = random_abp(rng, Q, depth=rng.randint(1, 4))
        detail = hadamard_abp_detailed(p, q)
        assert detail.per_degree, "at least the degree-0 record is always present"
        for rec in detail.per_degree:
            assert len(rec.product_sizes) == len(rec.left_sizes) == len(rec.right_sizes)
            for rw, pw, qw in zip(rec.product_sizes, rec.left_sizes, rec.right_sizes):
                assert rw == pw * qw


def test_product_rejects_mismatched_operands():
    p = random_abp(random.Random(1), Q)
    with pytest.raises(ArityMismatchError):
        hadamard_abp(p, random_abp(random.Random(2), Q, n_vars=2))
    with pytest.raises(FieldMismatchError):
        hadamard_abp(p, random_abp(random.Random(3), F5))


def test_cancelling_product_prunes_to_zero_structure():
    # f = x0x1, g = x1x0 share no monomial: product polynomial is zero
    p = ABP.build(2, Q, (1, 1, 1), {(0, 0, 0): lf(Q, x0=1), (1, 0, 0): lf(Q, x1=1)})
    q = ABP.build(2, Q, (1, 1, 1), {(0, 0, 0): lf(Q, x1=1), (1, 0, 0): lf(Q, x0=1)})
    r = hadamard_abp(p, q)
    assert r.expand().is_zero()


def test_circuit_abp_product_examples():
    # circuit: (x0 + x1)^2; program: x0*x1 + 3 x1*x0
    c = Circuit.build(
        2, Q, [InputGate(0), InputGate(1), AddGate(0, 1), MulGate(2, 2)], 3
    )
    p = ABP.build(
        2, Q, (1, 2, 1),
        {
            (0, 0, 0): lf(Q, x0=1),
            (0, 0, 1): lf(Q, x1=1),
            (1, 0, 0): lf(Q, x1=1),
            (1, 1, 0): lf(Q, x0=3),
        },
    )
    r = hadamard_circuit_abp(c, p)
    assert r.expand() == NCPoly.from_terms(2, Q, {(0, 1): 1, (1, 0): 3})


def test_circuit_abp_product_random():
    rng = random.Random(616)
    for _ in range(25):
        c = random_circuit(rng, Q, n_vars=2, n_gates=rng.randint(3, 8))
        p = random_abp(rng, Q, n_vars=2, depth=rng.randint(1, 3), width=2)
        expect = c.expand().hadamard(p.expand())
        detail = hadamard_circuit_abp_detailed(c, p)
        assert detail.circuit.expand() == expect
    for _ in range(10):
        c = random_circuit(rng, F5, n_vars=2, n_gates=6)
        p = random_abp(rng, F5, n_vars=2, depth=2, width=2)
        assert hadamard_circuit_abp(c, p).expand() == c.expand().hadamard(p.expand())


def test_circuit_abp_constant_only_operands():
    c = Circuit.build(1, Q, [ConstGate(Fraction(3))], 0)
    p = ABP.build(1, Q, (1, 1), {(0, 0, 0): lf(Q, const=2, x0=1)})
    r = hadamard_circuit_abp(c, p)
    assert r.expand() == NCPoly.const(1, Q, 6)
