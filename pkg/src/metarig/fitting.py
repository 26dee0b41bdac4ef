"""Freeness verdicts for modules presented by a relation matrix.

A module presented by an r x g matrix over the rank-n integer Laurent ring is
free of rank n exactly when (a) every (g-n+1)-minor vanishes identically
(the lower Fitting ideal is zero -- a syntactic test, the ring is a domain)
and (b) the (g-n)-minors generate the unit ideal of the Laurent ring.  The
conjunction says the module is projective of rank n, and projective modules
over integer Laurent rings are free (Quillen-Suslin), so no basis extraction
is attempted; the verdict is what matters downstream.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Sequence

from .grobner import (
    Budget,
    BudgetExceeded,
    _as_budget,
    find_evaluation_certificate,
    laurent_unit_combination,
)
from .laurent import LaurentPoly, exact_div, render_poly
from .presentations import PresMatrix

__all__ = [
    "FreenessVerdict",
    "minors",
    "fitting_ideal",
    "freeness_verdict",
    "OUTCOME_FREE",
    "OUTCOME_NOT_FREE",
    "OUTCOME_OBSTRUCTION",
    "OUTCOME_INCONCLUSIVE",
]

OUTCOME_FREE = "free_of_rank"
OUTCOME_NOT_FREE = "not_free"
OUTCOME_OBSTRUCTION = "abelianization_obstruction"
OUTCOME_INCONCLUSIVE = "inconclusive"

TEST_LOWER_FITTING = "lower_fitting_nonzero"
TEST_UNIT_IDEAL = "rank_fitting_not_unit"


@dataclass(frozen=True)
class FreenessVerdict:
    """Outcome of the module-freeness decision, with machine-checkable witnesses."""

    outcome: str
    rank: int | None
    failing_test: str | None
    witness: Any
    budget_used: int

    @classmethod
    def free(cls, rank: int, witness, budget_used: int) -> "FreenessVerdict":
        return cls(OUTCOME_FREE, rank, None, witness, budget_used)

    @classmethod
    def not_free(cls, rank: int, failing_test: str, witness,
                 budget_used: int) -> "FreenessVerdict":
        return cls(OUTCOME_NOT_FREE, rank, failing_test, witness, budget_used)

    @classmethod
    def obstruction(cls, torsion: Sequence[int]) -> "FreenessVerdict":
        return cls(
            OUTCOME_OBSTRUCTION, None, None,
            {"torsion": [int(d) for d in torsion]}, 0,
        )

    @classmethod
    def inconclusive(cls, budget_used: int) -> "FreenessVerdict":
        return cls(OUTCOME_INCONCLUSIVE, None, None, None, budget_used)

    def to_json_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "rank": self.rank,
            "failing_test": self.failing_test,
            "witness": self.witness,
            "budget_used": self.budget_used,
        }


def _det_cofactor(rows: list[list[LaurentPoly]], rank: int) -> LaurentPoly:
    n = len(rows)
    if n == 0:
        return LaurentPoly.one(rank)
    if n == 1:
        return rows[0][0]
    total = LaurentPoly.zero(rank)
    for j, entry in enumerate(rows[0]):
        if entry.is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        term = entry * _det_cofactor(minor, rank)
        total = total + term if j % 2 == 0 else total - term
    return total


def _det_bareiss(rows: list[list[LaurentPoly]], rank: int) -> LaurentPoly:
    """Fraction-free elimination; every division is exact over the domain."""
    n = len(rows)
    M = [row[:] for row in rows]
    sign = 1
    prev = LaurentPoly.one(rank)
    for k in range(n - 1):
        if M[k][k].is_zero():
            swap = next(
                (i for i in range(k + 1, n) if not M[i][k].is_zero()), None
            )
            if swap is None:
                return LaurentPoly.zero(rank)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                quo = exact_div(num, prev)
                if quo is None:
                    raise AssertionError("Bareiss division was not exact")
                M[i][j] = quo
            M[i][k] = LaurentPoly.zero(rank)
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return det if sign == 1 else -det


def _submatrix_det(rows: list[list[LaurentPoly]], rank: int) -> LaurentPoly:
    if len(rows) <= 4:
        return _det_cofactor(rows, rank)
    return _det_bareiss(rows, rank)


def minors(M: PresMatrix, s: int, workers: int = 1) -> list[LaurentPoly]:
    """All s x s minors; the 0 x 0 minor is 1, oversize requests yield none."""
    if s < 0:
        raise ValueError("minor size must be nonnegative")
    if s == 0:
        return [LaurentPoly.one(M.rank)]
    if s > M.nrows or s > M.ncols:
        return []
    subs = [
        [[M.entries[i][j] for j in cols] for i in rows]
        for rows in combinations(range(M.nrows), s)
        for cols in combinations(range(M.ncols), s)
    ]
    if workers > 1 and len(subs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda sub: _submatrix_det(sub, M.rank), subs))
    return [_submatrix_det(sub, M.rank) for sub in subs]


def fitting_ideal(M: PresMatrix, i: int, workers: int = 1) -> list[LaurentPoly]:
    """Generators of the i-th Fitting ideal of the cokernel of M.

    For a presentation with g module generators these are the (g-i)-minors;
    i >= g gives the unit ideal, more minors than rows gives the zero ideal.
    """
    if i < 0:
        raise ValueError("Fitting index must be nonnegative")
    return minors(M, M.ncols - i, workers)


def freeness_verdict(M: PresMatrix, n: int, budget=None,
                     workers: int = 1) -> FreenessVerdict:
    """Decide whether the cokernel of M is free of rank n over the Laurent ring."""
    bud = _as_budget(budget)
    g = M.ncols
    lower = minors(M, g - n + 1, workers)
    nonzero = next((m for m in lower if not m.is_zero()), None)
    if nonzero is not None:
        return FreenessVerdict.not_free(
            n,
            TEST_LOWER_FITTING,
            {"nonzero_minor": render_poly(nonzero), "minor_size": g - n + 1},
            bud.used,
        )
    gens = minors(M, g - n, workers)
    try:
        cofs = laurent_unit_combination(gens, rank=M.rank, budget=bud)
    except BudgetExceeded as exc:
        return FreenessVerdict.inconclusive(exc.used)
    if cofs is not None:
        witness = {
            "unit_combination": [render_poly(c) for c in cofs],
            "ideal_generators": [render_poly(gp) for gp in gens],
        }
        return FreenessVerdict.free(n, witness, bud.used)
    cert = find_evaluation_certificate(gens, M.rank)
    if cert is not None:
        witness = {"evaluation_certificate": cert.to_json_dict()}
    else:
        witness = {"unit_normal_form_nonzero": True}
    return FreenessVerdict.not_free(n, TEST_UNIT_IDEAL, witness, bud.used)
