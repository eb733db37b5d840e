"""A desk-scale lab for an explicit sign polynomial over small binary fields.

Variables come in ``t`` blocks of ``p`` (a prime), one block per coordinate
of a vector over the 2^p-element field.  A multilinear monomial selects a
subset of each block; the subset's characteristic bits encode a field
element per block, and the monomial's coefficient is the +-1 additive
character of the product of those elements.  The resulting sign polynomial
F has full multilinear support, squared norm 2^n, and correlates strongly
with its own 0/1 shift — the quantities this module computes exactly.

Also here: the suitability predicate for variable restrictions (blocks that
lose at least half their variables must be pinned by the fixed monomial),
product polynomials on disjoint variable halves to correlate against, and
the permanent as a coefficient-wise product of row and column polynomials.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import DEFAULT_MAX_TERMS, ResourceCapError, ValidationError
from .fields import ExtElement, ExtField, RationalField, encode_bits, is_prime, psi
from .polynomials import CPoly, corr, norm_sq

_Q = RationalField()


@dataclass(frozen=True)
class ExplicitParams:
    t: int  # number of blocks
    p: int  # block width, prime

    def __post_init__(self):
        if self.t < 1:
            raise ValidationError("need at least one block")
        if not is_prime(self.p):
            raise ValidationError(f"block width {self.p} must be prime")
        object.__setattr__(self, "_field", ExtField.make(2, self.p))

    @property
    def n(self) -> int:
        return self.t * self.p

    @property
    def field(self) -> ExtField:
        return self._field  # type: ignore[attr-defined]

    def block(self, i: int) -> range:
        if not 0 <= i < self.t:
            raise ValidationError(f"block {i} out of range")
        return range(i * self.p, (i + 1) * self.p)


def y_vector(params: ExplicitParams, monomial: Iterable[int]) -> list[ExtElement]:
    """Per block, the field element whose basis bits say which of the
    block's variables the monomial uses."""
    chosen = set(monomial)
    if any(not 0 <= v < params.n for v in chosen):
        raise ValidationError("monomial references a variable out of range")
    out = []
    for i in range(params.t):
        bits = [1 if v in chosen else 0 for v in params.block(i)]
        out.append(encode_bits(params.field, bits))
    return out


def f_coefficient(params: ExplicitParams, monomial: Iterable[int]) -> int:
    """The sign (+1 or -1) attached to a multilinear monomial."""
    ys = y_vector(params, monomial)
    prod = params.field.one()
    for y in ys:
        prod = prod * y
    return psi(prod)


def _all_subsets(n: int):
    for size in range(n + 1):
        yield from itertools.combinations(range(n), size)


def build_f(
    params: ExplicitParams,
    max_terms: int = DEFAULT_MAX_TERMS,
    threads: int = 1,
) -> CPoly:
    """The full sign polynomial: all 2^n multilinear monomials, coefficients +-1.

    With ``threads`` > 1 the subsets are processed in fixed-size chunks on a
    thread pool; chunks are merged in order, so the result is identical to
    the single-threaded one."""
    n = params.n
    if 2**n > max_terms:
        raise ResourceCapError(f"2^{n} terms exceed the cap of {max_terms}")
    subsets = list(_all_subsets(n))

    def run(chunk):
        return [(m, Fraction(f_coefficient(params, m))) for m in chunk]

    if threads <= 1:
        pairs = run(subsets)
    else:
        size = max(64, (len(subsets) + 4 * threads - 1) // (4 * threads))
        chunks = [subsets[i : i + size] for i in range(0, len(subsets), size)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pairs = [pair for part in pool.map(run, chunks) for pair in part]
    return CPoly(n, _Q, dict(pairs))


def build_f_prime(params: ExplicitParams, max_terms: int = DEFAULT_MAX_TERMS) -> CPoly:
    """The 0/1 shift (F+1)/2: indicator of the monomials where F is +1."""
    f = build_f(params, max_terms=max_terms)
    half = Fraction(1, 2)
    terms = {}
    for m, c in f.terms.items():
        shifted = (c + 1) * half
        if shifted:
            terms[m] = shifted
    return CPoly(params.n, _Q, terms)


def sum_coeffs(f: CPoly) -> Fraction:
    """Exact coefficient sum over the multilinear monomials."""
    return sum(
        (c for m, c in f.terms.items() if len(set(m)) == len(m)), Fraction(0)
    )


def exp_sum(
    params: ExplicitParams,
    z=1,
    sets: Optional[Sequence[Iterable]] = None,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> int:
    """Character sum over a rectangle of field subsets: the sum of
    psi(z * y_1 * ... * y_s) with y_i ranging over the i-th set.

    ``sets`` defaults to t copies of the whole field.  Entries are field
    elements (plain ints coerce to prime-subfield constants, so pass real
    elements for anything outside {0, 1})."""
    field = params.field
    z = field.coerce(z)
    if sets is None:
        chosen = [list(field.elements()) for _ in range(params.t)]
    else:
        chosen = [[field.coerce(y) for y in group] for group in sets]
    if not chosen:
        return psi(z)
    count = 1
    for group in chosen:
        count *= len(group)
    if count > max_terms:
        raise ResourceCapError(f"character sum needs {count} evaluations")
    total = 0
    for combo in itertools.product(*chosen):
        prod = z
        for y in combo:
            prod = prod * y
        total += psi(prod)
    return total


@dataclass
class CorrelationReport:
    corr: Fraction
    norm_f_sq: Fraction
    norm_g_sq: Fraction
    ratio_sq: Fraction  # corr^2 / (|f|^2 |g|^2), 0 when either norm vanishes

    def to_json(self) -> dict:
        return {
            "corr": str(self.corr),
            "norm_f_sq": str(self.norm_f_sq),
            "norm_g_sq": str(self.norm_g_sq),
            "ratio_sq": str(self.ratio_sq),
        }


def correlation_report(f: CPoly, g: CPoly) -> CorrelationReport:
    c = corr(f, g)
    nf, ng = norm_sq(f), norm_sq(g)
    ratio = c * c / (nf * ng) if nf and ng else Fraction(0)
    return CorrelationReport(c, nf, ng, ratio)


def is_suitable_restriction(
    params: ExplicitParams,
    kept_vars: Iterable[int],
    fixed_vars: Iterable[int],
    fixed_monomial: Iterable[int],
) -> bool:
    """A restriction fixes the variables in ``fixed_vars`` and multiplies by
    the monomial on ``fixed_monomial``.  It is suitable when every block
    that loses at least half its variables keeps a foothold: the fixed
    monomial must touch that block."""
    kept = set(kept_vars)
    fixed = set(fixed_vars)
    mono = set(fixed_monomial)
    everything = set(range(params.n))
    if kept | fixed != everything or kept & fixed:
        raise ValidationError("kept and fixed variables must partition the variables")
    if not mono <= fixed:
        raise ValidationError("the fixed monomial must use only fixed variables")
    for i in range(params.t):
        block = set(params.block(i))
        if 2 * len(fixed & block) >= params.p and not (mono & block):
            return False
    return True


@dataclass(frozen=True)
class ProductPoly:
    """A polynomial split as g * h over disjoint variable sets, each set
    covering at least an eps fraction of all variables."""

    a_vars: frozenset
    b_vars: frozenset
    g: CPoly
    h: CPoly
    eps: Fraction

    def poly(self) -> CPoly:
        return self.g.mul(self.h)


def make_product_poly(
    a_vars: Iterable[int],
    b_vars: Iterable[int],
    g: CPoly,
    h: CPoly,
    eps: Fraction = Fraction(1, 3),
) -> ProductPoly:
    """Validate and package a product split: the variable sets must be
    disjoint and each hold at least ceil(eps * n) variables, and each
    factor must be multilinear and stay inside its own set."""
    if g.n_vars != h.n_vars:
        raise ValidationError("operands must share the variable space")
    n = g.n_vars
    a = frozenset(int(v) for v in a_vars)
    b = frozenset(int(v) for v in b_vars)
    if a & b:
        raise ValidationError("the two variable sets must be disjoint")
    if not (a <= set(range(n)) and b <= set(range(n))):
        raise ValidationError("variable sets out of range")
    if not (g.is_multilinear() and h.is_multilinear()):
        raise ValidationError("product factors must be multilinear")
    if not g.support_vars() <= a:
        raise ValidationError("first factor uses variables outside its set")
    if not h.support_vars() <= b:
        raise ValidationError("second factor uses variables outside its set")
    eps = Fraction(eps)
    need = -((-n * eps.numerator) // eps.denominator)
    if len(a) < need or len(b) < need:
        raise ValidationError(
            f"each variable set must hold at least {need} of {n} variables"
        )
    return ProductPoly(a, b, g, h, eps)


def random_product_poly(params: ExplicitParams, rng, eps: Fraction = Fraction(1, 3)) -> ProductPoly:
    """A random product split for correlation batteries: shuffle the
    variables, cut them in half, and draw sparse +-1 multilinear factors."""
    n = params.n
    order = list(range(n))
    rng.shuffle(order)
    half = n // 2
    a, b = sorted(order[:half]), sorted(order[half:])

    def draw(vars_):
        terms = {}
        for _ in range(rng.randint(1, 4)):
            size = rng.randint(0, len(vars_))
            mono = tuple(sorted(rng.sample(vars_, size)))
            terms[mono] = Fraction(rng.choice((-1, 1)))
        return CPoly.from_terms(n, _Q, terms)

    return make_product_poly(a, b, draw(a), draw(b), eps)


# ---------------------------------------------------------------------------
# the permanent as a coefficient-wise product


def permanent_polynomials(n: int, max_n: int = 5) -> tuple[CPoly, CPoly]:
    """Row and column polynomials on an n x n variable grid (x_ij at i*n+j):
    the product of row sums and the product of column sums.  Their
    coefficient-wise product keeps exactly the permutation monomials."""
    if not 1 <= n <= max_n:
        raise ValidationError(f"grid size must be between 1 and {max_n}")
    nv = n * n
    rows = CPoly.const(nv, _Q, 1)
    for i in range(n):
        rows = rows.mul(
            CPoly.from_terms(nv, _Q, {(i * n + j,): 1 for j in range(n)})
        )
    cols = CPoly.const(nv, _Q, 1)
    for j in range(n):
        cols = cols.mul(
            CPoly.from_terms(nv, _Q, {(i * n + j,): 1 for i in range(n)})
        )
    return rows, cols


def permanent_via_hadamard(matrix: Sequence[Sequence], max_n: int = 5) -> Fraction:
    """Permanent of a rational matrix, via the row/column product pair."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValidationError("permanent needs a square matrix")
    rows, cols = permanent_polynomials(n, max_n=max_n)
    point = [Fraction(matrix[i][j]) for i in range(n) for j in range(n)]
    return rows.hadamard(cols).evaluate(point)
