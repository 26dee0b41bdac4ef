"""Exact arithmetic in free metabelian groups via the Magnus embedding.

Elements live in the semidirect product Z^n x| Z[x1^pm..xn^pm]^n: an abelian
exponent vector plus a module vector, with the abelian part acting on the
module part by monomial multiplication.  Generator i maps to (e_i, t_i).  The
embedding is faithful on words in the generators, so the word problem is
equality of normal forms: a word is trivial in the free metabelian group
exactly when it maps to (0, 0).

The module part of a word equals its vector of abelianized free derivatives,
which cross-validates this module against the presentation machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .laurent import LaurentPoly, RankMismatchError, default_names, render_poly
from .presentations import Word

__all__ = [
    "MagnusElement",
    "word_to_magnus",
    "augmentation_image",
    "render_element",
]


@dataclass(frozen=True)
class MagnusElement:
    """Normal form (abelian vector, module vector) of a free metabelian element."""

    abelian: tuple[int, ...]
    module: tuple[LaurentPoly, ...]

    def __post_init__(self):
        n = len(self.abelian)
        if len(self.module) != n:
            raise RankMismatchError("abelian and module parts disagree on rank")
        for p in self.module:
            if p.rank != n:
                raise RankMismatchError("module coordinate of wrong rank")

    @property
    def rank(self) -> int:
        return len(self.abelian)

    @classmethod
    def identity(cls, rank: int) -> "MagnusElement":
        zero = LaurentPoly.zero(rank)
        return cls((0,) * rank, (zero,) * rank)

    @classmethod
    def generator(cls, i: int, rank: int) -> "MagnusElement":
        if not 0 <= i < rank:
            raise IndexError(f"generator index {i} out of range for rank {rank}")
        abelian = tuple(1 if k == i else 0 for k in range(rank))
        module = tuple(
            LaurentPoly.one(rank) if k == i else LaurentPoly.zero(rank)
            for k in range(rank)
        )
        return cls(abelian, module)

    def is_identity(self) -> bool:
        return not any(self.abelian) and all(p.is_zero() for p in self.module)

    def __mul__(self, other: "MagnusElement") -> "MagnusElement":
        if self.rank != other.rank:
            raise RankMismatchError("elements of different rank")
        abelian = tuple(a + b for a, b in zip(self.abelian, other.abelian))
        module = tuple(
            v + w.shift(self.abelian)
            for v, w in zip(self.module, other.module)
        )
        return MagnusElement(abelian, module)

    def inverse(self) -> "MagnusElement":
        neg = tuple(-a for a in self.abelian)
        module = tuple(-(v.shift(neg)) for v in self.module)
        return MagnusElement(neg, module)


def word_to_magnus(w: Word, rank: int) -> MagnusElement:
    """Image of a word in the rank-n free metabelian group.

    The word is trivial there exactly when the result is the identity, which
    solves the word problem.
    """
    if w.max_generator() >= rank:
        raise IndexError(
            f"word uses generator {w.max_generator()} beyond rank {rank}"
        )
    gens = [MagnusElement.generator(i, rank) for i in range(rank)]
    invs = [g.inverse() for g in gens]
    out = MagnusElement.identity(rank)
    for g, s in w.letters:
        out = out * (gens[g] if s == 1 else invs[g])
    return out


def augmentation_image(m: MagnusElement) -> LaurentPoly:
    """Pair the module part with (x_j - 1): zero exactly on the commutator fiber.

    Only defined for elements with zero abelian part; the kernel of this map
    is the commutator subgroup sitting inside the module.
    """
    if any(m.abelian):
        raise ValueError("element has nonzero abelian part")
    n = m.rank
    total = LaurentPoly.zero(n)
    one = LaurentPoly.one(n)
    for j, v in enumerate(m.module):
        total = total + v * (LaurentPoly.variable(j, n) - one)
    return total


def render_element(m: MagnusElement,
                   names: Sequence[str] | None = None) -> str:
    """CLI rendering ``(a1,...,an | p1, ..., pn)``."""
    names = names if names is not None else default_names(m.rank)
    abelian = ",".join(str(a) for a in m.abelian)
    module = ", ".join(render_poly(p, names) for p in m.module)
    return f"({abelian} | {module})"
