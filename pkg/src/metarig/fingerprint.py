"""Finite-quotient fingerprints: hom/epi counts and module quotient invariants.

Two finitely presented metabelian groups are compared through the shadows
their finite quotients cast at desk scale: exact counts of homomorphisms and
epimorphisms into a panel of small metabelian targets, plus invariant factors
of finite quotients of the relation module.  Any difference certifies that the
two groups have different collections of finite quotients; agreement only says
they are indistinguishable at this panel.

Targets must be metabelian: tuple enumeration counts homomorphisms from the
absolutely presented group, and that coincides with the metabelian quotient's
count exactly when the target satisfies the variety laws itself.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .grobner import BudgetExceeded
from .laurent import LaurentPoly
from .presentations import (
    GroupPresentation,
    PresMatrix,
    TorsionAbelianizationError,
    abelianization,
    alexander_matrix,
    smith_normal_form,
)

__all__ = [
    "FiniteGroup",
    "CayleyParseError",
    "NonMetabelianTargetError",
    "ENUMERATION_BUDGET",
    "is_metabelian",
    "hom_count",
    "epi_count",
    "module_quotient_invariants",
    "fingerprint_compare",
    "FingerprintReport",
    "TargetRecord",
    "ModuleRecord",
    "cyclic",
    "abelian_group",
    "dihedral",
    "quaternion8",
    "symmetric_group",
    "alternating_group",
    "default_panel",
    "default_ideals",
    "load_cayley_table",
    "invariant_factor_chains",
]

ENUMERATION_BUDGET = 10**8
MODULE_SIZE_BUDGET = 10**6


class CayleyParseError(ValueError):
    """Malformed Cayley table file or table failing the group laws."""


class NonMetabelianTargetError(ValueError):
    """Fingerprint targets must be metabelian for the counts to be meaningful."""


class FiniteGroup:
    """A finite group as a Cayley table of 0-based indices.

    The table is validated at construction: identity and inverse laws exactly,
    associativity exhaustively for order <= 64 and on a fixed sample of
    triples above that.
    """

    __slots__ = ("name", "table", "identity", "_inverse", "_is_metabelian",
                 "_closure_cache")

    def __init__(self, table: Sequence[Sequence[int]], name: str):
        n = len(table)
        rows = tuple(tuple(int(v) for v in row) for row in table)
        for row in rows:
            if len(row) != n or any(not 0 <= v < n for v in row):
                raise CayleyParseError(f"{name}: table is not {n} x {n} over 0..{n-1}")
        identity = None
        for e in range(n):
            if all(rows[e][j] == j for j in range(n)) and all(
                rows[i][e] == i for i in range(n)
            ):
                identity = e
                break
        if identity is None:
            raise CayleyParseError(f"{name}: no identity element")
        inverse = [None] * n
        for a in range(n):
            for b in range(n):
                if rows[a][b] == identity and rows[b][a] == identity:
                    inverse[a] = b
                    break
            if inverse[a] is None:
                raise CayleyParseError(f"{name}: element {a} has no inverse")
        if n <= 64:
            triples = itertools.product(range(n), repeat=3)
        else:
            import random

            rng = random.Random(0)
            triples = (
                (rng.randrange(n), rng.randrange(n), rng.randrange(n))
                for _ in range(20000)
            )
        for a, b, c in triples:
            if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
                raise CayleyParseError(f"{name}: not associative at ({a},{b},{c})")
        self.name = name
        self.table = rows
        self.identity = identity
        self._inverse = tuple(inverse)
        self._is_metabelian = None
        self._closure_cache = {}

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inverse[a]

    def generated_subgroup(self, gens: Iterable[int]) -> frozenset[int]:
        key = frozenset(gens)
        cached = self._closure_cache.get(key)
        if cached is not None:
            return cached
        members = {self.identity} | set(key)
        frontier = list(members)
        while frontier:
            nxt = []
            for a in frontier:
                for g in key:
                    for p in (self.table[a][g], self.table[g][a]):
                        if p not in members:
                            members.add(p)
                            nxt.append(p)
            frontier = nxt
        result = frozenset(members)
        self._closure_cache[key] = result
        return result

    def derived_subgroup(self) -> frozenset[int]:
        comms = {
            self.table[self.table[a][b]][
                self.table[self._inverse[a]][self._inverse[b]]
            ]
            for a in range(self.order)
            for b in range(self.order)
        }
        return self.generated_subgroup(comms)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name!r}, order={self.order})"


def is_metabelian(G: FiniteGroup) -> bool:
    """True when the derived subgroup is abelian."""
    if G._is_metabelian is None:
        derived = sorted(G.derived_subgroup())
        G._is_metabelian = all(
            G.table[a][b] == G.table[b][a]
            for a in derived
            for b in derived
        )
    return G._is_metabelian


# -- constructions -------------------------------------------------------------


def cyclic(n: int, name: str | None = None) -> FiniteGroup:
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup(table, name or f"C{n}")


def abelian_group(chain: Sequence[int], name: str | None = None) -> FiniteGroup:
    """Direct product of cyclic groups C_{d1} x ... x C_{dk}."""
    chain = tuple(chain)
    elements = list(itertools.product(*(range(d) for d in chain)))
    index = {e: i for i, e in enumerate(elements)}
    table = [
        [
            index[tuple((a + b) % d for a, b, d in zip(e1, e2, chain))]
            for e2 in elements
        ]
        for e1 in elements
    ]
    return FiniteGroup(table, name or "x".join(f"C{d}" for d in chain))


def dihedral(k: int, name: str | None = None) -> FiniteGroup:
    """Dihedral group of order 2k, elements (flip, rotation)."""
    elements = [(f, r) for f in range(2) for r in range(k)]
    index = {e: i for i, e in enumerate(elements)}

    def mul(e1, e2):
        f1, r1 = e1
        f2, r2 = e2
        r = (-r1 if f2 else r1) + r2
        return ((f1 + f2) % 2, r % k)

    table = [[index[mul(a, b)] for b in elements] for a in elements]
    return FiniteGroup(table, name or f"D{k}")


def quaternion8() -> FiniteGroup:
    """The quaternion group {+-1, +-i, +-j, +-k}."""
    units = ["1", "i", "j", "k"]
    rules = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"),
        ("1", "k"): (1, "k"), ("i", "1"): (1, "i"), ("j", "1"): (1, "j"),
        ("k", "1"): (1, "k"), ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"),
        ("k", "k"): (-1, "1"), ("i", "j"): (1, "k"), ("j", "i"): (-1, "k"),
        ("j", "k"): (1, "i"), ("k", "j"): (-1, "i"), ("k", "i"): (1, "j"),
        ("i", "k"): (-1, "j"),
    }
    elements = [(s, u) for u in units for s in (1, -1)]
    elements.sort(key=lambda e: (units.index(e[1]), -e[0]))
    index = {e: i for i, e in enumerate(elements)}

    def mul(a, b):
        s, u = rules[(a[1], b[1])]
        return (a[0] * b[0] * s, u)

    table = [[index[mul(a, b)] for b in elements] for a in elements]
    return FiniteGroup(table, "Q8")


def _perm_group(perms: list[tuple[int, ...]], name: str) -> FiniteGroup:
    perms = sorted(perms)
    index = {p: i for i, p in enumerate(perms)}
    table = [
        [index[tuple(a[b[i]] for i in range(len(b)))] for b in perms]
        for a in perms
    ]
    return FiniteGroup(table, name)


def symmetric_group(n: int) -> FiniteGroup:
    return _perm_group(
        [tuple(p) for p in itertools.permutations(range(n))], f"S{n}"
    )


def alternating_group(n: int) -> FiniteGroup:
    def parity(p):
        inv = sum(
            1
            for i in range(len(p))
            for j in range(i + 1, len(p))
            if p[i] > p[j]
        )
        return inv % 2

    return _perm_group(
        [tuple(p) for p in itertools.permutations(range(n)) if parity(p) == 0],
        f"A{n}",
    )


def invariant_factor_chains(m: int) -> list[tuple[int, ...]]:
    """All (d1, ..., dk) with d1 | d2 | ... | dk, each >= 2, product m."""
    out: list[tuple[int, ...]] = []

    def rec(rem: int, prev: int, acc: tuple[int, ...]):
        if rem == 1:
            out.append(acc)
            return
        for d in range(2, rem + 1):
            if rem % d == 0 and d % prev == 0:
                rec(rem // d, d, acc + (d,))

    rec(m, 1, ())
    return sorted(out)


def default_panel(max_order: int = 16) -> list[FiniteGroup]:
    """All abelian groups of order <= max_order plus S3, D4, Q8, D5, A4, D6."""
    panel: list[FiniteGroup] = [cyclic(1)]
    for m in range(2, max_order + 1):
        for chain in invariant_factor_chains(m):
            panel.append(abelian_group(chain))
    for G in (
        symmetric_group(3),
        dihedral(4),
        quaternion8(),
        dihedral(5),
        alternating_group(4),
        dihedral(6),
    ):
        if G.order <= max_order:
            panel.append(G)
    return panel


def default_ideals() -> tuple[tuple[int, int], ...]:
    """Default (prime, nilpotency degree) specs for module quotients."""
    return ((2, 1), (2, 2), (3, 1), (3, 2))


def load_cayley_table(path) -> FiniteGroup:
    """Read ``order N name`` then N rows of N indices; identity must be index 0."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise CayleyParseError(f"{path}: empty file")
    head = lines[0].split(None, 2)
    if len(head) < 3 or head[0] != "order":
        raise CayleyParseError(f"{path}: first line must be 'order N name'")
    try:
        n = int(head[1])
    except ValueError:
        raise CayleyParseError(f"{path}: bad order {head[1]!r}") from None
    name = head[2]
    if len(lines) != n + 1:
        raise CayleyParseError(f"{path}: expected {n} table rows, got {len(lines) - 1}")
    table = []
    for ln in lines[1:]:
        try:
            row = [int(v) for v in ln.split()]
        except ValueError:
            raise CayleyParseError(f"{path}: non-integer table entry") from None
        table.append(row)
    G = FiniteGroup(table, name)
    if G.identity != 0:
        raise CayleyParseError(f"{path}: identity must be index 0, found {G.identity}")
    return G


# -- counting -------------------------------------------------------------------


def _relator_holds(G: FiniteGroup, letters, images) -> bool:
    cur = G.identity
    table = G.table
    inv = G._inverse
    for g, s in letters:
        v = images[g]
        cur = table[cur][v if s == 1 else inv[v]]
    return cur == G.identity


def _check_target(P: GroupPresentation, G: FiniteGroup, budget: int):
    if not is_metabelian(G):
        raise NonMetabelianTargetError(
            f"target {G.name} is not metabelian; counts would not be "
            f"quotient counts of the metabelian group"
        )
    total = G.order ** P.ngens
    if total > budget:
        raise BudgetExceeded(budget, total)


def hom_count(P: GroupPresentation, G: FiniteGroup,
              budget: int = ENUMERATION_BUDGET) -> int:
    """Exact number of homomorphisms into G, by tuple enumeration."""
    _check_target(P, G, budget)
    letters = [w.letters for w in P.relators]
    count = 0
    for images in itertools.product(range(G.order), repeat=P.ngens):
        if all(_relator_holds(G, ls, images) for ls in letters):
            count += 1
    return count


def epi_count(P: GroupPresentation, G: FiniteGroup,
              budget: int = ENUMERATION_BUDGET) -> int:
    """Exact number of epimorphisms: homomorphisms whose images generate G."""
    _check_target(P, G, budget)
    letters = [w.letters for w in P.relators]
    count = 0
    for images in itertools.product(range(G.order), repeat=P.ngens):
        if all(_relator_holds(G, ls, images) for ls in letters):
            if len(G.generated_subgroup(images)) == G.order:
                count += 1
    return count


# -- module quotient invariants ---------------------------------------------------


def _binomial_general(m: int, j: int) -> int:
    # coefficient of u^j in (1 + u)^m, valid for negative m as well
    if m >= 0:
        return math.comb(m, j) if j <= m else 0
    return (-1) ** j * math.comb(-m + j - 1, j)


def _truncated_expansion(
    p: LaurentPoly, kvec: tuple[int, ...]
) -> dict[tuple[int, ...], int]:
    """Rewrite p in the variables u_i = x_i - 1, truncated at u_i^{k_i}.

    x_i = 1 + u_i is invertible modulo u_i^{k_i} over the integers, so
    negative exponents expand too.
    """
    n = p.rank
    out: dict[tuple[int, ...], int] = {}
    for exp, coeff in p.iter_terms():
        cur = {(0,) * n: coeff}
        for i, e in enumerate(exp):
            if e == 0:
                continue
            row = [_binomial_general(e, j) for j in range(kvec[i])]
            nxt: dict[tuple[int, ...], int] = {}
            for a, c in cur.items():
                for j in range(kvec[i] - a[i]):
                    if row[j] == 0:
                        continue
                    b = a[:i] + (a[i] + j,) + a[i + 1:]
                    nxt[b] = nxt.get(b, 0) + c * row[j]
            cur = nxt
        for a, c in cur.items():
            new = out.get(a, 0) + c
            if new:
                out[a] = new
            else:
                out.pop(a, None)
    return out


def module_quotient_invariants(
    M: PresMatrix, ideal_spec: tuple[int, int | Sequence[int]],
    size_budget: int = MODULE_SIZE_BUDGET,
) -> tuple[int, ...]:
    """Invariant factors of the finite quotient of coker(M) by the ideal
    (p, (x1-1)^k1, ..., (xn-1)^kn).

    ``ideal_spec`` is (prime, degree); the degree is one integer used for
    every variable or a per-variable sequence.  Each module generator is
    expanded over the monomial basis u^a, 0 <= a_i < k_i, of the coefficient
    quotient, the prime relations are appended, and the resulting integer
    matrix is put in Smith normal form.
    """
    p, k = ideal_spec
    if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"{p} is not prime")
    n = M.rank
    kvec = tuple(k for _ in range(n)) if isinstance(k, int) else tuple(k)
    if len(kvec) != n:
        raise ValueError("per-variable degrees must match the ring rank")
    if any(ki < 1 for ki in kvec):
        raise ValueError("nilpotency degrees must be >= 1")
    basis = sorted(itertools.product(*(range(ki) for ki in kvec)))
    dim = len(basis)
    bindex = {a: i for i, a in enumerate(basis)}
    cols = M.ncols * dim
    nrows = M.nrows * dim + cols
    if nrows * cols > size_budget:
        raise BudgetExceeded(size_budget, nrows * cols)
    expanded = [
        [_truncated_expansion(entry, kvec) for entry in row] for row in M.entries
    ]
    rows: list[list[int]] = []
    for exp_row in expanded:
        for b in basis:
            row = [0] * cols
            for c, terms in enumerate(exp_row):
                for a, coeff in terms.items():
                    shifted = tuple(ai + bi for ai, bi in zip(a, b))
                    if all(s < ki for s, ki in zip(shifted, kvec)):
                        row[c * dim + bindex[shifted]] += coeff
            rows.append(row)
    for j in range(cols):
        row = [0] * cols
        row[j] = p
        rows.append(row)
    data = smith_normal_form(rows, ncols=cols)
    return data.torsion


# -- comparison report -------------------------------------------------------------


@dataclass(frozen=True)
class TargetRecord:
    name: str
    hom: tuple[int, int] | None
    epi: tuple[int, int] | None
    error: str | None = None

    def to_json_dict(self) -> dict:
        if self.error is not None:
            return {"name": self.name, "error": self.error}
        return {"name": self.name, "hom": list(self.hom), "epi": list(self.epi)}


@dataclass(frozen=True)
class ModuleRecord:
    ideal: tuple[int, int]
    invariants: tuple[tuple[int, ...], tuple[int, ...]] | None
    error: str | None = None

    def to_json_dict(self) -> dict:
        if self.error is not None:
            return {"ideal": list(self.ideal), "error": self.error}
        return {
            "ideal": list(self.ideal),
            "invariants": [list(self.invariants[0]), list(self.invariants[1])],
        }


@dataclass(frozen=True)
class FingerprintReport:
    """Per-target counts and module invariants for two presentations."""

    targets: tuple[TargetRecord, ...]
    modules: tuple[ModuleRecord, ...]
    verdict: str
    witness: str | None

    def to_json_dict(self) -> dict:
        return {
            "targets": [t.to_json_dict() for t in self.targets],
            "modules": [m.to_json_dict() for m in self.modules],
            "verdict": self.verdict,
            "witness": self.witness,
        }


def _target_record(P1, P2, G, budget) -> TargetRecord:
    try:
        hom = (hom_count(P1, G, budget), hom_count(P2, G, budget))
        epi = (epi_count(P1, G, budget), epi_count(P2, G, budget))
        return TargetRecord(G.name, hom, epi)
    except (NonMetabelianTargetError, BudgetExceeded) as exc:
        return TargetRecord(G.name, None, None, error=str(exc))


def fingerprint_compare(
    P1: GroupPresentation,
    P2: GroupPresentation,
    panel: Sequence[FiniteGroup] | None = None,
    ideals: Sequence[tuple[int, int]] | None = None,
    budget: int = ENUMERATION_BUDGET,
    workers: int = 1,
) -> FingerprintReport:
    """Compare two presentations over a panel; any difference distinguishes them.

    Per-target failures are recorded in the report without aborting the rest
    of the panel.
    """
    panel = list(panel) if panel is not None else default_panel()
    ideals = tuple(ideals) if ideals is not None else default_ideals()
    if workers > 1 and len(panel) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            targets = tuple(
                pool.map(lambda G: _target_record(P1, P2, G, budget), panel)
            )
    else:
        targets = tuple(_target_record(P1, P2, G, budget) for G in panel)

    matrices: list[PresMatrix | None] = []
    matrix_errors: list[str | None] = []
    for P in (P1, P2):
        try:
            matrices.append(alexander_matrix(P))
            matrix_errors.append(None)
        except TorsionAbelianizationError as exc:
            matrices.append(None)
            matrix_errors.append(str(exc))
    modules: list[ModuleRecord] = []
    for spec in ideals:
        err = next((e for e in matrix_errors if e is not None), None)
        if err is not None:
            modules.append(ModuleRecord(spec, None, error=err))
            continue
        try:
            inv = (
                module_quotient_invariants(matrices[0], spec),
                module_quotient_invariants(matrices[1], spec),
            )
            modules.append(ModuleRecord(spec, inv))
        except BudgetExceeded as exc:
            modules.append(ModuleRecord(spec, None, error=str(exc)))

    verdict = "indistinguishable at this panel"
    witness = None
    for rec in targets:
        if rec.error is not None:
            continue
        if rec.hom[0] != rec.hom[1]:
            verdict = "distinguished"
            witness = (
                f"hom counts into {rec.name} differ: "
                f"{rec.hom[0]} vs {rec.hom[1]}"
            )
            break
        if rec.epi[0] != rec.epi[1]:
            verdict = "distinguished"
            witness = (
                f"epi counts into {rec.name} differ: "
                f"{rec.epi[0]} vs {rec.epi[1]}"
            )
            break
    if witness is None:
        for rec in modules:
            if rec.error is None and rec.invariants[0] != rec.invariants[1]:
                verdict = "distinguished"
                witness = (
                    f"module invariants at ideal {list(rec.ideal)} differ: "
                    f"{list(rec.invariants[0])} vs {list(rec.invariants[1])}"
                )
                break
    return FingerprintReport(targets, tuple(modules), verdict, witness)
