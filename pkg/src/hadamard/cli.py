"""Command-line front end.

Every command reads JSON files, writes one JSON object to stdout (or
``--out``), and keeps diagnostics on stderr.  Output is serialized with
sorted keys and no whitespace, so identical inputs give identical bytes.

Exit codes: 0 success, 2 bad input or validation failure, 3 a resource cap
(term, degree, or word limits) was hit.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from typing import Optional

from .abp import ABP, nisan_matrix
from .circuits import Circuit
from .errors import (
    DEFAULT_MAX_DEGREE,
    DEFAULT_MAX_TERMS,
    HadamardError,
    ResourceCapError,
    ValidationError,
)
from .fields import Field, parse_field_spec
from .grammars import (
    AcyclicCFG,
    build_mirror_prefix_grammar,
    build_mirror_suffix_grammar,
    cfg_to_circuit,
    circuit_to_cfg,
    count_derivations,
    intersect_bruteforce,
)
from .lab import (
    ExplicitParams,
    build_f,
    build_f_prime,
    correlation_report,
    exp_sum,
    permanent_polynomials,
    permanent_via_hadamard,
    random_product_poly,
    sum_coeffs,
)
from .pit import (
    Digraph,
    det_to_abp,
    pit_bruteforce,
    pit_randomized,
    pit_rational,
    pit_span_basis,
    reach_to_abp,
)
from .polynomials import NCPoly
from .products import hadamard_abp_detailed, hadamard_circuit_abp_detailed


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})")


def _emit(obj, out: Optional[str]) -> None:
    text = json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _default_field(args) -> Optional[Field]:
    spec = getattr(args, "field", None)
    return parse_field_spec(spec) if spec else None


def _load_abp(path: str, args) -> ABP:
    obj = _read_json(path)
    if "layers" not in obj:
        raise ValidationError(f"{path}: not a branching program (no 'layers')")
    if "field" in obj:
        return ABP.from_json(obj)
    fallback = _default_field(args)
    if fallback is None:
        raise ValidationError(f"{path}: no field in file; pass --field")
    return ABP.from_json(obj, field=fallback)


def _load_circuit(path: str, args) -> Circuit:
    obj = _read_json(path)
    if "gates" not in obj:
        raise ValidationError(f"{path}: not a circuit (no 'gates')")
    if "field" in obj:
        return Circuit.from_json(obj)
    fallback = _default_field(args)
    if fallback is None:
        raise ValidationError(f"{path}: no field in file; pass --field")
    return Circuit.from_json(obj, field=fallback)


# ---------------------------------------------------------------------------
# subcommand handlers


def cmd_pit(args) -> dict:
    p = _load_abp(args.program, args)
    if args.tester == "det":
        verdict = pit_rational(p)
    elif args.tester == "span":
        verdict = pit_span_basis(p)
    elif args.tester == "rand":
        verdict = pit_randomized(p, trials=args.trials, seed=args.seed)
    else:
        verdict = pit_bruteforce(p, max_terms=args.max_terms)
    return verdict.to_json()


def cmd_hadamard_abp(args) -> dict:
    p = _load_abp(args.left, args)
    q = _load_abp(args.right, args)
    detail = hadamard_abp_detailed(p, q)
    return {
        "abp": detail.abp.to_json(),
        "nodes": detail.abp.node_count(),
        "edges": detail.abp.edge_count(),
        "unpruned_nodes": detail.unpruned.node_count(),
        "per_degree": [
            {
                "degree": rec.degree,
                "left_sizes": list(rec.left_sizes),
                "right_sizes": list(rec.right_sizes),
                "product_sizes": list(rec.product_sizes),
            }
            for rec in detail.per_degree
        ],
    }


def cmd_hadamard_circuit(args) -> dict:
    c = _load_circuit(args.circuit, args)
    p = _load_abp(args.program, args)
    detail = hadamard_circuit_abp_detailed(c, p)
    gates, wires = detail.circuit.size()
    return {
        "circuit": detail.circuit.to_json(),
        "gates": gates,
        "wires": wires,
        "per_degree": [
            {"degree": k, "present": gate is not None} for k, gate in detail.per_degree
        ],
    }


def cmd_nisan(args) -> dict:
    obj = _read_json(args.input)
    if "layers" in obj:
        f = _load_abp(args.input, args).expand(max_terms=args.max_terms)
    else:
        fallback = None if "field" in obj else _default_field(args)
        if "field" not in obj and fallback is None:
            raise ValidationError(f"{args.input}: no field in file; pass --field")
        f = NCPoly.from_json(obj, field=fallback)
    if f.is_zero():
        return {"degree": None, "ranks": [], "total": 0}
    d = f.degree()
    ranks = [nisan_matrix(f, k, args.max_terms).matrix.rank() for k in range(d + 1)]
    return {"degree": d, "ranks": ranks, "total": sum(ranks)}


def cmd_expand(args) -> dict:
    obj = _read_json(args.input)
    if "layers" in obj:
        f = _load_abp(args.input, args).expand(max_terms=args.max_terms)
    elif "gates" in obj:
        f = _load_circuit(args.input, args).expand(
            max_degree=args.max_degree, max_terms=args.max_terms
        )
    else:
        raise ValidationError(f"{args.input}: neither a program nor a circuit")
    return f.to_json()


def cmd_cfg(args) -> dict:
    needs_input = {"to-circuit", "from-circuit", "count", "intersect"}
    if args.action in needs_input and not args.input:
        raise ValidationError(f"cfg {args.action} needs an input file")
    if args.action == "to-circuit":
        g = AcyclicCFG.from_json(_read_json(args.input))
        return cfg_to_circuit(g).to_json()
    if args.action == "from-circuit":
        c = _load_circuit(args.input, args)
        return circuit_to_cfg(c).to_json()
    if args.action == "count":
        g = AcyclicCFG.from_json(_read_json(args.input))
        word = [int(x) for x in args.word.split(",")] if args.word else []
        return {"word": word, "count": count_derivations(g, word)}
    if args.action == "intersect":
        if not args.other:
            raise ValidationError("cfg intersect needs two grammar files")
        g1 = AcyclicCFG.from_json(_read_json(args.input))
        g2 = AcyclicCFG.from_json(_read_json(args.other))
        words = sorted(intersect_bruteforce(g1, g2, max_len=args.max_len))
        return {"words": [list(w) for w in words], "count": len(words)}
    if args.action == "gen-mirror-suffix":
        return build_mirror_suffix_grammar(args.n, args.alphabet).to_json()
    if args.action == "gen-mirror-prefix":
        return build_mirror_prefix_grammar(args.n, args.alphabet).to_json()
    raise ValidationError(f"unknown grammar action {args.action!r}")


def cmd_reduce(args) -> dict:
    obj = _read_json(args.input)
    if args.kind == "det2abp":
        if not isinstance(obj, list):
            raise ValidationError("determinant input must be a JSON array of rows")
        rows = [[Fraction(str(x)) for x in row] for row in obj]
        return det_to_abp(rows).to_json()
    g = Digraph.from_json(obj)
    return reach_to_abp(g).to_json()


def cmd_lab(args) -> dict:
    if args.action == "perm":
        if args.input:
            obj = _read_json(args.input)
            if not isinstance(obj, list):
                raise ValidationError("permanent input must be a JSON array of rows")
            rows = [[Fraction(str(x)) for x in row] for row in obj]
            return {"n": len(rows), "permanent": str(permanent_via_hadamard(rows))}
        # no matrix: emit the symbolic product, one monomial per permutation
        if args.n is None:
            raise ValidationError("lab perm needs a matrix file or --n")
        r, c = permanent_polynomials(args.n)
        prod = r.hadamard(c)
        return {"n": args.n, "monomials": len(prod.terms), "poly": prod.to_json()}
    params = ExplicitParams(args.t, args.p)
    if args.action == "build-f":
        f = build_f(params, max_terms=args.max_terms, threads=args.threads)
        return f.to_json()
    if args.action == "corr":
        f = build_f(params, max_terms=args.max_terms)
        fp = build_f_prime(params, max_terms=args.max_terms)
        rep = correlation_report(f, fp)
        out = rep.to_json()
        out["t"], out["p"] = args.t, args.p
        out["sum_coeffs"] = str(sum_coeffs(f))
        out["lower_bound"] = str(Fraction(2) ** (params.n - 1))
        out["meets_lower_bound"] = rep.corr >= Fraction(2) ** (params.n - 1)
        rng = random.Random(args.seed)
        battery = []
        for _ in range(args.battery):
            split = random_product_poly(params, rng)
            r = correlation_report(f, split.poly())
            battery.append({"corr": str(r.corr), "ratio_sq": str(r.ratio_sq)})
        out["product_battery"] = battery
        field = params.field
        out["exp_sum_samples"] = [
            {"z": code, "value": exp_sum(params, z=z, max_terms=args.max_terms)}
            for z, code in (
                (field.zero(), 0),
                (field.one(), 1),
                (field.gen(), field.p),
            )
        ]
        return out
    if args.action == "expsum":
        sets = None
        if args.sets is not None:
            sets = [_decode_set(params.field, group) for group in args.sets.split(";")]
        value = exp_sum(params, z=args.z, sets=sets, max_terms=args.max_terms)
        return {"t": args.t, "p": args.p, "z": args.z, "value": value}
    raise ValidationError(f"unknown lab action {args.action!r}")


def _decode_set(field, group: str) -> list:
    """Comma-separated element codes -> field elements (code digits base p)."""
    out = []
    for tok in group.split(","):
        tok = tok.strip()
        if not tok:
            continue
        code = int(tok)
        if not 0 <= code < field.order:
            raise ValidationError(f"element code {code} outside 0..{field.order - 1}")
        digits = []
        for _ in range(field.k):
            code, digit = divmod(code, field.p)
            digits.append(digit)
        out.append(field.from_coeffs(digits))
    return out


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="hadamard",
        description="Hadamard products of noncommutative polynomials: "
        "branching programs, circuits, identity tests, grammar bridges, "
        "and an exact correlation lab.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON result to this file")
    common.add_argument(
        "--field",
        help="fallback field for files without one: q, fp:P, or fpk:P:K",
    )
    common.add_argument(
        "--max-terms",
        type=int,
        default=DEFAULT_MAX_TERMS,
        help="cap on expanded terms / matrix entries",
    )
    common.add_argument(
        "--max-degree",
        type=int,
        default=DEFAULT_MAX_DEGREE,
        help="cap on circuit expansion degree",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p_pit = sub.add_parser(
        "pit", parents=[common], help="identity-test a branching program"
    )
    p_pit.add_argument("tester", choices=["det", "span", "rand", "brute"])
    p_pit.add_argument("program", help="branching-program JSON file")
    p_pit.add_argument("--trials", type=int, default=20)
    p_pit.add_argument("--seed", type=int, default=0)
    p_pit.set_defaults(handler=cmd_pit)

    p_had = sub.add_parser(
        "hadamard", parents=[common], help="build a coefficient-wise product"
    )
    had_sub = p_had.add_subparsers(dest="shape", required=True)
    h_abp = had_sub.add_parser("abp", parents=[common])
    h_abp.add_argument("left")
    h_abp.add_argument("right")
    h_abp.set_defaults(handler=cmd_hadamard_abp)
    h_cir = had_sub.add_parser("circuit-abp", parents=[common])
    h_cir.add_argument("circuit")
    h_cir.add_argument("program")
    h_cir.set_defaults(handler=cmd_hadamard_circuit)

    p_nis = sub.add_parser(
        "nisan", parents=[common], help="communication-matrix ranks of a polynomial"
    )
    p_nis.add_argument("input", help="polynomial or branching-program JSON")
    p_nis.set_defaults(handler=cmd_nisan)

    p_exp = sub.add_parser(
        "expand", parents=[common], help="expand a program or circuit into terms"
    )
    p_exp.add_argument("input")
    p_exp.set_defaults(handler=cmd_expand)

    p_cfg = sub.add_parser(
        "cfg", parents=[common], help="grammar/circuit translations and counting"
    )
    p_cfg.add_argument(
        "action",
        choices=[
            "to-circuit",
            "from-circuit",
            "count",
            "intersect",
            "gen-mirror-suffix",
            "gen-mirror-prefix",
        ],
    )
    p_cfg.add_argument("input", nargs="?", help="grammar or circuit JSON file")
    p_cfg.add_argument("other", nargs="?", help="second grammar (intersect)")
    p_cfg.add_argument("--word", help="comma-separated terminals (count)")
    p_cfg.add_argument("--max-len", type=int, default=None)
    p_cfg.add_argument("--n", type=int, default=1, help="mirror block length")
    p_cfg.add_argument("--alphabet", type=int, default=2)
    p_cfg.set_defaults(handler=cmd_cfg)

    p_red = sub.add_parser(
        "reduce", parents=[common], help="encode a determinant or reachability query"
    )
    p_red.add_argument("kind", choices=["det2abp", "reach2abp"])
    p_red.add_argument("input")
    p_red.set_defaults(handler=cmd_reduce)

    p_lab = sub.add_parser(
        "lab", parents=[common], help="sign-polynomial lab and the permanent"
    )
    p_lab.add_argument(
        "action", choices=["build-f", "corr", "expsum", "perm"]
    )
    p_lab.add_argument("input", nargs="?", help="matrix JSON (perm)")
    p_lab.add_argument("--n", type=int, default=None, help="grid size (perm)")
    p_lab.add_argument("--t", type=int, default=1, help="number of blocks")
    p_lab.add_argument("--p", type=int, default=2, help="block width (prime)")
    p_lab.add_argument("--z", type=int, default=1, help="character twist (expsum)")
    p_lab.add_argument(
        "--sets",
        help="expsum summation sets: groups split on ';', element codes on ','",
    )
    p_lab.add_argument("--battery", type=int, default=5, help="corr battery size")
    p_lab.add_argument("--seed", type=int, default=0, help="corr battery seed")
    p_lab.add_argument("--threads", type=int, default=1)
    p_lab.set_defaults(handler=cmd_lab)

    return top


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.handler(args)
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, HadamardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(result, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
