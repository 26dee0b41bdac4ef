"""Strong Groebner bases for ideals of Z[x1..xk] and Laurent unit-ideal tests.

Over the integers a Groebner basis must be *strong*: completion processes both
S-polynomials (monomial lcm / coefficient lcm) and G-polynomials (Bezout
gcd combinations), and reduction divides leading coefficients with remainder.
A strong basis makes ideal membership a single normal-form computation: the
normal form is zero exactly for members.

Cofactor tracking runs through the whole computation, so a positive
unit-ideal answer always comes with an explicit combination expressing 1 in
terms of the original generators, which is re-expanded and checked before the
answer is returned.

The unit-ideal question for the *Laurent* ring is reduced to the polynomial
ring by the Rabinowitsch trick: adjoin a fresh last variable t together with
t*x1*...*xk - 1, which inverts the product of the variables.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from math import gcd

from .laurent import (
    LaurentPoly,
    RankMismatchError,
    grevlex_key,
    lex_key,
)

__all__ = [
    "DEFAULT_BUDGET",
    "Budget",
    "BudgetExceeded",
    "PolyIdeal",
    "StrongBasis",
    "strong_groebner",
    "reduce",
    "reduce_with_combination",
    "contains_one",
    "unit_combination",
    "laurent_unit_ideal",
    "laurent_unit_combination",
    "EvaluationCertificate",
    "find_evaluation_certificate",
]

DEFAULT_BUDGET = 10**6

ORDERS = {"grevlex": grevlex_key, "lex": lex_key}


class BudgetExceeded(RuntimeError):
    """The step budget ran out; distinct from any mathematical failure."""

    def __init__(self, limit: int, used: int):
        super().__init__(f"budget exceeded: {used} steps used, limit {limit}")
        self.limit = limit
        self.used = used


class Budget:
    """Mutable counter of reduction steps shared across one computation."""

    __slots__ = ("limit", "used")

    def __init__(self, limit: int = DEFAULT_BUDGET):
        self.limit = limit
        self.used = 0

    def spend(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise BudgetExceeded(self.limit, self.used)


def _as_budget(budget) -> Budget:
    if budget is None:
        return Budget()
    if isinstance(budget, int):
        return Budget(budget)
    return budget


@dataclass(frozen=True)
class PolyIdeal:
    """An ideal of Z[x1..xk] given by true-polynomial generators.

    Zero generators are dropped; generators with negative exponents are
    rejected (lift Laurent data with clear_denominators first).
    """

    generators: tuple[LaurentPoly, ...]
    rank: int

    def __init__(self, generators, rank: int | None = None):
        gens = tuple(g for g in generators if not g.is_zero())
        if rank is None:
            if not gens:
                raise ValueError("rank is required for an empty generator list")
            rank = gens[0].rank
        for g in gens:
            if g.rank != rank:
                raise RankMismatchError("generators of mixed rank")
            if g.has_negative_exponent():
                raise ValueError(f"generator {g} is not a polynomial")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "rank", rank)


@dataclass(frozen=True)
class StrongBasis:
    """Autoreduced strong Groebner basis with tracked cofactors.

    ``elements[i] == sum(cofactors[i][j] * generators[j] for j)`` holds
    exactly; every S- and G-polynomial of pairs reduces to zero and no
    element's leading term is strongly reducible by another's.
    """

    elements: tuple[LaurentPoly, ...]
    order: str
    generators: tuple[LaurentPoly, ...]
    cofactors: tuple[tuple[LaurentPoly, ...], ...]

    @property
    def rank(self) -> int:
        if self.elements:
            return self.elements[0].rank
        if self.generators:
            return self.generators[0].rank
        return 0


class _Elem:
    """Basis element with cached leading term and generator cofactors."""

    __slots__ = ("poly", "lt_exp", "lt_coeff", "cofs")

    def __init__(self, poly: LaurentPoly, cofs: list[LaurentPoly], key):
        self.poly = poly
        self.lt_exp, self.lt_coeff = poly.leading_term(key)
        self.cofs = cofs


def _normalize_sign(poly, cofs, key):
    _, c = poly.leading_term(key)
    if c < 0:
        poly = -poly
        cofs = [-cf for cf in cofs]
    return poly, cofs


def _strong_reduce(p: LaurentPoly, elems: list[_Elem], key, budget: Budget,
                   ngens: int, rank: int):
    """Strong normal form of p modulo elems.

    Returns (remainder, used) with ``p == remainder + sum(used[j] * gen_j)``.
    Leading coefficients are divided with Euclidean remainder; a term moves to
    the remainder only once no basis element can shrink its coefficient.
    """
    used = [LaurentPoly.zero(rank) for _ in range(ngens)]
    rem_terms: dict[tuple[int, ...], int] = {}
    work = p
    while not work.is_zero():
        exp, c = work.leading_term(key)
        while c != 0:
            progressed = False
            for el in elems:
                diff = tuple(a - b for a, b in zip(exp, el.lt_exp))
                if any(d < 0 for d in diff):
                    continue
                q, r = divmod(c, el.lt_coeff)
                if q == 0:
                    continue
                budget.spend()
                mono = LaurentPoly.monomial(diff, q)
                work = work - mono * el.poly
                for j in range(ngens):
                    if not el.cofs[j].is_zero():
                        used[j] = used[j] + mono * el.cofs[j]
                c = r
                progressed = True
            if not progressed:
                break
        if c != 0:
            rem_terms[exp] = c
            work = work - LaurentPoly.monomial(exp, c)
    return LaurentPoly(rank, rem_terms), used


def strong_groebner(ideal: PolyIdeal, order: str = "grevlex",
                    budget=None) -> StrongBasis:
    """Buchberger completion over Z with S- and G-polynomial pairs.

    Pair selection is the normal strategy (minimal lcm total degree first)
    with insertion order breaking ties, so identical inputs always produce
    identical bases.
    """
    key = ORDERS[order]
    bud = _as_budget(budget)
    rank = ideal.rank
    gens = ideal.generators
    ngens = len(gens)

    elems: list[_Elem] = []
    for j, g in enumerate(gens):
        cofs = [
            LaurentPoly.one(rank) if i == j else LaurentPoly.zero(rank)
            for i in range(ngens)
        ]
        poly, cofs = _normalize_sign(g, cofs, key)
        elems.append(_Elem(poly, cofs, key))

    heap: list[tuple[int, int, str, int, int]] = []
    seq = itertools.count()

    def push_pairs(new: int):
        b = elems[new]
        for i in range(new):
            a = elems[i]
            lcm_exp = tuple(max(p, q) for p, q in zip(a.lt_exp, b.lt_exp))
            deg = sum(lcm_exp)
            heapq.heappush(heap, (deg, next(seq), "s", i, new))
            # a G-pair is redundant when one leading coefficient divides the
            # other: the Bezout combination is then a monomial multiple of
            # one element.
            if a.lt_coeff % b.lt_coeff and b.lt_coeff % a.lt_coeff:
                heapq.heappush(heap, (deg, next(seq), "g", i, new))

    for idx in range(1, len(elems)):
        push_pairs(idx)

    while heap:
        _, _, kind, i, j = heapq.heappop(heap)
        bud.spend()
        a, b = elems[i], elems[j]
        lcm_exp = tuple(max(p, q) for p, q in zip(a.lt_exp, b.lt_exp))
        da = tuple(l - e for l, e in zip(lcm_exp, a.lt_exp))
        db = tuple(l - e for l, e in zip(lcm_exp, b.lt_exp))
        if kind == "s":
            c = a.lt_coeff * b.lt_coeff // gcd(a.lt_coeff, b.lt_coeff)
            ma = LaurentPoly.monomial(da, c // a.lt_coeff)
            mb = LaurentPoly.monomial(db, c // b.lt_coeff)
            combo = ma * a.poly - mb * b.poly
            cofs = [ma * a.cofs[t] - mb * b.cofs[t] for t in range(ngens)]
        else:
            d, s, t = _xgcd(a.lt_coeff, b.lt_coeff)
            ma = LaurentPoly.monomial(da, s)
            mb = LaurentPoly.monomial(db, t)
            combo = ma * a.poly + mb * b.poly
            cofs = [ma * a.cofs[u] + mb * b.cofs[u] for u in range(ngens)]
        if combo.is_zero():
            continue
        rem, used = _strong_reduce(combo, elems, key, bud, ngens, rank)
        if rem.is_zero():
            continue
        cofs = [cofs[u] - used[u] for u in range(ngens)]
        poly, cofs = _normalize_sign(rem, cofs, key)
        elems.append(_Elem(poly, cofs, key))
        push_pairs(len(elems) - 1)

    return _autoreduce(elems, key, bud, gens, ngens, rank, order)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(d, s, t) with d = gcd(a, b) > 0 and d == s*a + t*b."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _strongly_divides(a: _Elem, exp, coeff) -> bool:
    return (
        all(p <= q for p, q in zip(a.lt_exp, exp))
        and coeff % a.lt_coeff == 0
    )


def _autoreduce(elems, key, bud, gens, ngens, rank, order) -> StrongBasis:
    ordered = sorted(
        range(len(elems)),
        key=lambda i: (key(elems[i].lt_exp), abs(elems[i].lt_coeff), i),
    )
    kept: list[_Elem] = []
    for i in ordered:
        e = elems[i]
        if any(_strongly_divides(h, e.lt_exp, e.lt_coeff) for h in kept):
            continue
        kept.append(e)
    # tail reduction: heads of a minimal strong basis are untouched, tails
    # are normal-formed against the other elements
    final: list[_Elem] = []
    for idx, e in enumerate(kept):
        others = kept[:idx] + kept[idx + 1:]
        head = LaurentPoly.monomial(e.lt_exp, e.lt_coeff)
        tail = e.poly - head
        if not tail.is_zero() and others:
            rem, used = _strong_reduce(tail, others, key, bud, ngens, rank)
            poly = head + rem
            cofs = [e.cofs[u] - used[u] for u in range(ngens)]
        else:
            poly, cofs = e.poly, list(e.cofs)
        final.append(_Elem(poly, cofs, key))
    return StrongBasis(
        elements=tuple(e.poly for e in final),
        order=order,
        generators=gens,
        cofactors=tuple(tuple(e.cofs) for e in final),
    )


def _basis_elems(basis: StrongBasis, key) -> list[_Elem]:
    return [
        _Elem(p, list(c), key)
        for p, c in zip(basis.elements, basis.cofactors)
    ]


def reduce(p: LaurentPoly, basis: StrongBasis, budget=None) -> LaurentPoly:
    """Strong normal form of p; zero exactly when p lies in the ideal."""
    return reduce_with_combination(p, basis, budget)[0]


def reduce_with_combination(p: LaurentPoly, basis: StrongBasis, budget=None):
    """Normal form plus cofactors: p == r + sum(cofs[j] * generators[j])."""
    if p.has_negative_exponent():
        raise ValueError("reduction requires a true polynomial")
    key = ORDERS[basis.order]
    bud = _as_budget(budget)
    rank = p.rank
    elems = _basis_elems(basis, key)
    rem, used = _strong_reduce(p, elems, key, bud, len(basis.generators), rank)
    return rem, tuple(used)


def contains_one(ideal: PolyIdeal, order: str = "grevlex", budget=None) -> bool:
    """Unit-ideal test for Z[x1..xk]; a positive answer is certificate-checked."""
    return unit_combination(ideal, order, budget) is not None


def unit_combination(ideal: PolyIdeal, order: str = "grevlex", budget=None):
    """Cofactors expressing 1 in the generators, or None when 1 is not a member."""
    bud = _as_budget(budget)
    basis = strong_groebner(ideal, order, bud)
    one = LaurentPoly.one(ideal.rank)
    rem, cofs = reduce_with_combination(one, basis, bud)
    if not rem.is_zero():
        return None
    total = LaurentPoly.zero(ideal.rank)
    for c, g in zip(cofs, ideal.generators):
        total = total + c * g
    if total != one:
        raise AssertionError("tracked cofactors failed to re-expand to 1")
    return cofs


def _drop_last_variable_inverting(p: LaurentPoly) -> LaurentPoly:
    """Substitute t -> (x1*...*xk)^-1 where t is the last variable."""
    rank = p.rank - 1
    out: dict[tuple[int, ...], int] = {}
    for exp, coeff in p.iter_terms():
        t = exp[-1]
        new = tuple(e - t for e in exp[:-1])
        acc = out.get(new, 0) + coeff
        if acc:
            out[new] = acc
        else:
            out.pop(new, None)
    return LaurentPoly(rank, out)


def laurent_unit_combination(gens, rank: int | None = None, budget=None):
    """Laurent cofactors with sum(cofs[i] * gens[i]) == 1, or None.

    Denominators are cleared (a unit shift, so the ideal is unchanged), the
    inverted-product variable t is adjoined along with t*x1*...*xk - 1, and
    the polynomial unit test runs in the enlarged ring.
    """
    gens = tuple(gens)
    if rank is None:
        if not gens:
            raise ValueError("rank is required for an empty generator list")
        rank = gens[0].rank
    live = [(i, g) for i, g in enumerate(gens) if not g.is_zero()]
    for _, g in live:
        if g.rank != rank:
            raise RankMismatchError("generators of mixed rank")
    if not live:
        return None
    lifted = []
    shifts = []
    for _, g in live:
        cleared, e = g.clear_denominators()
        lifted.append(
            LaurentPoly(
                rank + 1,
                {exp + (0,): c for exp, c in cleared.iter_terms()},
            )
        )
        shifts.append(e)
    rab = LaurentPoly(
        rank + 1,
        {(1,) * (rank + 1): 1, (0,) * (rank + 1): -1},
    )
    ideal = PolyIdeal(tuple(lifted) + (rab,), rank + 1)
    cofs = unit_combination(ideal, "grevlex", budget)
    if cofs is None:
        return None
    out = [LaurentPoly.zero(rank) for _ in gens]
    for (orig_idx, _), cof, shift in zip(live, cofs[:-1], shifts):
        out[orig_idx] = _drop_last_variable_inverting(cof).shift(shift)
    total = LaurentPoly.zero(rank)
    for c, g in zip(out, gens):
        total = total + c * g
    if total != LaurentPoly.one(rank):
        raise AssertionError("Laurent cofactors failed to re-expand to 1")
    return tuple(out)


def laurent_unit_ideal(gens, rank: int | None = None, budget=None) -> bool:
    """True iff the generators generate the unit ideal of the Laurent ring."""
    return laurent_unit_combination(gens, rank, budget) is not None


# -- negative certificates ----------------------------------------------------


@dataclass(frozen=True)
class EvaluationCertificate:
    """A ring map killing every generator but not the avoided element.

    ``modulus`` None means evaluation into Z (assignment values +-1);
    otherwise evaluation into Z/modulus with unit values.
    """

    modulus: int | None
    assignment: tuple[int, ...]

    def holds_for(self, gens, avoid: LaurentPoly) -> bool:
        for g in gens:
            if g.evaluate(self.assignment, self.modulus) != 0:
                return False
        value = avoid.evaluate(self.assignment, self.modulus)
        return value != 0

    def to_json_dict(self) -> dict:
        return {
            "modulus": self.modulus,
            "assignment": list(self.assignment),
        }


def _small_prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def find_evaluation_certificate(
    gens, rank: int, avoid: LaurentPoly | None = None,
    primes: tuple[int, ...] = (2, 3, 5),
) -> EvaluationCertificate | None:
    """Search unit evaluations into Z and small prime fields for a certificate."""
    gens = [g for g in gens if not g.is_zero()]
    if avoid is None:
        avoid = LaurentPoly.one(rank)
    for assignment in itertools.product((1, -1), repeat=rank):
        vals = [g.evaluate(assignment) for g in gens]
        avoid_val = avoid.evaluate(assignment)
        if all(v == 0 for v in vals):
            if avoid_val != 0:
                return EvaluationCertificate(None, assignment)
            continue
        d = 0
        for v in vals:
            d = gcd(d, v)
        for p in _small_prime_factors(d):
            if avoid_val % p != 0:
                return EvaluationCertificate(p, assignment)
    for p in primes:
        for assignment in itertools.product(range(1, p), repeat=rank):
            if all(g.evaluate(assignment, p) == 0 for g in gens):
                if avoid.evaluate(assignment, p) != 0:
                    return EvaluationCertificate(p, assignment)
    return None
