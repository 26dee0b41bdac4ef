"""Exact multivariate Laurent polynomials over arbitrary-precision integers.

This is the coefficient ring for everything else in the package: elements of
the group algebra of a free abelian group of rank n are Laurent polynomials in
n variables.  Coefficients are Python ints from the start, so nothing here can
overflow; values are immutable once constructed and safe to share.
"""

from __future__ import annotations

from typing import Iterator, Mapping, Sequence

__all__ = [
    "LaurentPoly",
    "RankMismatchError",
    "PolyParseError",
    "grevlex_key",
    "lex_key",
    "default_names",
    "exact_div",
    "render_poly",
    "parse_poly",
]

ExpVec = tuple[int, ...]


class RankMismatchError(ValueError):
    """Polynomials from rings of different rank were combined."""


class PolyParseError(ValueError):
    """Malformed polynomial text; carries the offending column (1-based)."""

    def __init__(self, message: str, col: int):
        super().__init__(f"col {col}: {message}")
        self.col = col


def grevlex_key(exp: Sequence[int]) -> tuple:
    """Sort key for graded reverse lexicographic order (ascending)."""
    return (sum(exp), tuple(-e for e in reversed(exp)))


def lex_key(exp: Sequence[int]) -> tuple:
    """Sort key for lexicographic order, earlier variables weigh more."""
    return tuple(exp)


def default_names(rank: int) -> tuple[str, ...]:
    """Rendering names: x, y, z up to rank 3, x1..xn beyond."""
    if rank <= 3:
        return ("x", "y", "z")[:rank]
    return tuple(f"x{i}" for i in range(1, rank + 1))


class LaurentPoly:
    """Sparse Laurent polynomial of a fixed rank.

    ``terms`` maps exponent vectors (tuples of signed ints, one entry per
    variable) to nonzero integer coefficients; the zero polynomial is the
    empty map.  The constructor drops zero coefficients, so no stored
    coefficient is ever zero and exponent vectors are unique.
    """

    __slots__ = ("rank", "_terms")

    def __init__(self, rank: int, terms: Mapping[ExpVec, int] | None = None):
        if rank < 0:
            raise ValueError("rank must be nonnegative")
        clean: dict[ExpVec, int] = {}
        if terms:
            for exp, coeff in terms.items():
                exp = tuple(exp)
                if len(exp) != rank:
                    raise RankMismatchError(
                        f"exponent vector {exp} does not have rank {rank}"
                    )
                if coeff:
                    clean[exp] = int(coeff)
        self.rank = rank
        self._terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, rank: int) -> "LaurentPoly":
        return cls(rank)

    @classmethod
    def one(cls, rank: int) -> "LaurentPoly":
        return cls(rank, {(0,) * rank: 1})

    @classmethod
    def constant(cls, value: int, rank: int) -> "LaurentPoly":
        return cls(rank, {(0,) * rank: value})

    @classmethod
    def monomial(cls, exp: Sequence[int], coeff: int = 1) -> "LaurentPoly":
        exp = tuple(exp)
        return cls(len(exp), {exp: coeff})

    @classmethod
    def variable(cls, index: int, rank: int, power: int = 1) -> "LaurentPoly":
        if not 0 <= index < rank:
            raise IndexError(f"variable index {index} out of range for rank {rank}")
        exp = tuple(power if i == index else 0 for i in range(rank))
        return cls(rank, {exp: 1})

    # -- basic queries -----------------------------------------------------

    @property
    def terms(self) -> dict[ExpVec, int]:
        """A copy of the term map (callers cannot mutate internal state)."""
        return dict(self._terms)

    def iter_terms(self) -> Iterator[tuple[ExpVec, int]]:
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_one(self) -> bool:
        return self._terms == {(0,) * self.rank: 1}

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self == LaurentPoly.constant(other, self.rank)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.rank == other.rank and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.rank, frozenset(self._terms.items())))

    def leading_term(self, key=grevlex_key) -> tuple[ExpVec, int]:
        """Largest term under the given monomial-order key."""
        if not self._terms:
            raise ValueError("the zero polynomial has no leading term")
        exp = max(self._terms, key=key)
        return exp, self._terms[exp]

    def total_degree(self) -> int:
        if not self._terms:
            return 0
        return max(sum(e) for e in self._terms)

    def min_exponents(self) -> ExpVec:
        """Componentwise minimum exponent over all terms (zero vector if empty)."""
        if not self._terms:
            return (0,) * self.rank
        return tuple(min(e[i] for e in self._terms) for i in range(self.rank))

    def has_negative_exponent(self) -> bool:
        return any(e < 0 for exp in self._terms for e in exp)

    # -- ring arithmetic ---------------------------------------------------

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.rank != self.rank:
                raise RankMismatchError(
                    f"rank {self.rank} vs rank {other.rank}"
                )
            return other
        if isinstance(other, int):
            return LaurentPoly.constant(other, self.rank)
        return NotImplemented

    def __add__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for exp, coeff in other._terms.items():
            new = out.get(exp, 0) + coeff
            if new:
                out[exp] = new
            else:
                out.pop(exp, None)
        return LaurentPoly(self.rank, out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.rank, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        return (-self) + other

    def __mul__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[ExpVec, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                new = out.get(exp, 0) + c1 * c2
                if new:
                    out[exp] = new
                else:
                    out.pop(exp, None)
        return LaurentPoly(self.rank, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise ValueError("negative powers are only defined for monomial units")
        result = LaurentPoly.one(self.rank)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, exp: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial with the given exponent vector."""
        exp = tuple(exp)
        if len(exp) != self.rank:
            raise RankMismatchError(f"shift vector {exp} has wrong rank")
        return LaurentPoly(
            self.rank,
            {tuple(a + b for a, b in zip(e, exp)): c for e, c in self._terms.items()},
        )

    # -- ring maps ---------------------------------------------------------

    def augmentation(self) -> int:
        """Sum of all coefficients: the ring map sending every variable to 1."""
        return sum(self._terms.values())

    def evaluate(self, values: Sequence[int], modulus: int | None = None) -> int:
        """Evaluate at the given variable values (units, so negative exponents work).

        Without a modulus the values must be +-1; with a modulus they must be
        invertible mod it.
        """
        if len(values) != self.rank:
            raise RankMismatchError("wrong number of values")
        total = 0
        for exp, coeff in self._terms.items():
            term = coeff
            for v, e in zip(values, exp):
                if modulus is None:
                    if v not in (1, -1):
                        raise ValueError(
                            "integer evaluation needs values in {1, -1}"
                        )
                    if v == -1 and e % 2:
                        term = -term
                else:
                    term = term * pow(v, e, modulus) % modulus
            total += term
        return total % modulus if modulus is not None else total

    def clear_denominators(self) -> tuple["LaurentPoly", ExpVec]:
        """Minimal monomial shift making every exponent nonnegative.

        Returns (m * self, e) with m = x^e; each variable occurring with a
        negative exponent is lifted so its minimum exponent becomes zero.
        """
        mins = self.min_exponents()
        e = tuple(-m if m < 0 else 0 for m in mins)
        if not any(e):
            return self, e
        return self.shift(e), e

    def __repr__(self) -> str:
        return f"LaurentPoly({render_poly(self)!r}, rank={self.rank})"

    def __str__(self) -> str:
        return render_poly(self)


# -- exact division ---------------------------------------------------------


def _strip_content(p: LaurentPoly) -> tuple[LaurentPoly, ExpVec]:
    """Shift so every variable's minimum exponent is exactly zero."""
    mins = p.min_exponents()
    if not any(mins):
        return p, mins
    return p.shift(tuple(-m for m in mins)), mins


def exact_div(num: LaurentPoly, den: LaurentPoly) -> LaurentPoly | None:
    """Exact quotient num/den in the Laurent ring, or None if den does not divide num."""
    if den.rank != num.rank:
        raise RankMismatchError(f"rank {num.rank} vs rank {den.rank}")
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if num.is_zero():
        return LaurentPoly.zero(num.rank)
    # With both sides content-free the Laurent quotient, if it exists, is an
    # ordinary polynomial, so plain leading-term division decides it.
    n_poly, n_shift = _strip_content(num)
    d_poly, d_shift = _strip_content(den)
    rem = n_poly
    quot: dict[ExpVec, int] = {}
    d_exp, d_coeff = d_poly.leading_term()
    while not rem.is_zero():
        r_exp, r_coeff = rem.leading_term()
        diff = tuple(a - b for a, b in zip(r_exp, d_exp))
        if any(d < 0 for d in diff):
            return None
        q, r = divmod(r_coeff, d_coeff)
        if r:
            return None
        quot[diff] = q
        rem = rem - d_poly.shift(diff) * q
    shift = tuple(a - b for a, b in zip(n_shift, d_shift))
    return LaurentPoly(num.rank, quot).shift(shift)


# -- text grammar -----------------------------------------------------------
#
#   poly   ::= ['-'] term (('+' | '-') term)*
#   term   ::= INT | [INT '*'] varpow ('*' varpow)*
#   varpow ::= NAME ['^' ['-'] INT]
#
# e.g. ``1 - x*y^-1 + 3*y``.  Rendering sorts terms grevlex-descending, so the
# serialized form is canonical and round-trips exactly.


def render_poly(p: LaurentPoly, names: Sequence[str] | None = None) -> str:
    if p.is_zero():
        return "0"
    names = tuple(names) if names is not None else default_names(p.rank)
    if len(names) != p.rank:
        raise RankMismatchError("wrong number of variable names")
    pieces: list[tuple[bool, str]] = []
    for exp in sorted(p._terms, key=grevlex_key, reverse=True):
        coeff = p._terms[exp]
        factors = [
            names[i] + (f"^{e}" if e != 1 else "")
            for i, e in enumerate(exp)
            if e != 0
        ]
        mag = abs(coeff)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(mag)] + factors)
        pieces.append((coeff < 0, body))
    neg0, body0 = pieces[0]
    out = ("-" if neg0 else "") + body0
    for neg, body in pieces[1:]:
        out += (" - " if neg else " + ") + body
    return out


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        col = i + 1
        if ch in "+-*^":
            tokens.append(("op", ch, col))
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], col))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], col))
            i = j
        else:
            raise PolyParseError(f"unexpected character {ch!r}", col)
    return tokens


def parse_poly(
    text: str, rank: int, names: Sequence[str] | None = None
) -> LaurentPoly:
    """Parse the textual polynomial grammar back into a LaurentPoly."""
    names = tuple(names) if names is not None else default_names(rank)
    if len(names) != rank:
        raise RankMismatchError("wrong number of variable names")
    index = {n: i for i, n in enumerate(names)}
    toks = _tokenize(text)
    if not toks:
        raise PolyParseError("empty polynomial", 1)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else ("end", "", len(text) + 1)

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def parse_signed_int(context: str) -> int:
        kind, val, col = take()
        sign = 1
        if kind == "op" and val == "-":
            sign = -1
            kind, val, col = take()
        if kind != "int":
            raise PolyParseError(f"expected integer {context}", col)
        return sign * int(val)

    def parse_varpow() -> tuple[int, int]:
        kind, val, col = take()
        if kind != "name":
            raise PolyParseError("expected variable name", col)
        if val not in index:
            raise PolyParseError(f"unknown variable {val!r}", col)
        power = 1
        if peek()[:2] == ("op", "^"):
            take()
            power = parse_signed_int("after '^'")
        return index[val], power

    terms: dict[ExpVec, int] = {}

    def add_term(coeff: int, exp: ExpVec):
        new = terms.get(exp, 0) + coeff
        if new:
            terms[exp] = new
        else:
            terms.pop(exp, None)

    def parse_term(sign: int):
        kind, val, col = peek()
        coeff = sign
        exp = [0] * rank
        saw_body = False
        if kind == "int":
            take()
            coeff *= int(val)
            saw_body = True
            if peek()[:2] == ("op", "*"):
                take()
                kind2, _, col2 = peek()
                if kind2 != "name":
                    raise PolyParseError("expected variable after '*'", col2)
            else:
                add_term(coeff, tuple(exp))
                return
        while True:
            kind, val, col = peek()
            if kind != "name":
                break
            i, power = parse_varpow()
            exp[i] += power
            saw_body = True
            if peek()[:2] == ("op", "*"):
                take()
                kind2, _, col2 = peek()
                if kind2 not in ("name", "int"):
                    raise PolyParseError("expected factor after '*'", col2)
                if kind2 == "int":
                    coeff *= int(take()[1])
            else:
                break
        if not saw_body:
            raise PolyParseError("expected term", col)
        add_term(coeff, tuple(exp))

    # leading sign
    sign = 1
    if peek()[:2] == ("op", "-"):
        take()
        sign = -1
    elif peek()[:2] == ("op", "+"):
        take()
    parse_term(sign)
    while pos < len(toks):
        kind, val, col = take()
        if kind != "op" or val not in "+-":
            raise PolyParseError("expected '+' or '-' between terms", col)
        parse_term(-1 if val == "-" else 1)
    return LaurentPoly(rank, terms)
