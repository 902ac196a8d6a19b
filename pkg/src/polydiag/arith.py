"""Exact sparse multivariate polynomial arithmetic over the rationals.

A polynomial in d variables t1..td is a finite sum of monomials.  Each
monomial is an exponent tuple (one nonnegative integer per variable) and
terms live in a dict mapping exponent tuples to nonzero Fraction
coefficients, so the representation is canonical: two polynomials are equal
iff their term dicts are equal, and the zero polynomial stores no terms.
All arithmetic is exact.

The text syntax (used by the file formats and the CLI) is a sum of terms
separated by + or -, where a term is an optional rational coefficient
(``3``, ``-1/2``), an optional ``*``, and ``*``-separated variable factors
``t<i>`` or ``t<i>^<e>``.  Example: ``3/2*t1^2*t2 - t2 + 1``.  Whitespace is
insignificant.  Printing uses graded lexicographic order with t1 > t2 > ...,
highest degree first, and round-trips through the parser.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .errors import ParseError


def _order_key(exps):
    # graded lex: compare total degree first, then the exponent tuple itself
    return (sum(exps), exps)


class Polynomial:
    """Immutable sparse polynomial with Fraction coefficients.

    ``terms`` maps exponent tuples of length ``nvars`` to nonzero Fractions.
    Instances are treated as immutable; the terms dict must not be mutated.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        if nvars < 1:
            raise ValueError(f"nvars must be positive, got {nvars}")
        clean = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent tuple {exps} has length {len(exps)}, expected {nvars}")
            if any(e < 0 or not isinstance(e, int) for e in exps):
                raise ValueError(f"exponents must be nonnegative integers, got {exps}")
            coeff = Fraction(coeff)
            if coeff:
                clean[exps] = coeff
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def const(cls, nvars, value):
        """Constant polynomial with the given rational value."""
        return cls(nvars, {(0,) * nvars: Fraction(value)})

    @classmethod
    def one(cls, nvars):
        return cls.const(nvars, 1)

    @classmethod
    def variable(cls, nvars, i):
        """The variable t<i>; i is 1-based, matching the text syntax."""
        if not 1 <= i <= nvars:
            raise ValueError(f"variable index {i} out of range for nvars={nvars}")
        exps = [0] * nvars
        exps[i - 1] = 1
        return cls(nvars, {tuple(exps): Fraction(1)})

    # -- queries ---------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def degree(self):
        """Max total degree of the stored monomials; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        """The value of a constant polynomial as a Fraction."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def leading(self):
        """Graded-lex leading (exponents, coefficient) pair; errors on zero."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self.terms, key=_order_key)
        return exps, self.terms[exps]

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError(f"variable-count mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.const(self.nvars, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            val = out.get(exps, Fraction(0)) + coeff
            if val:
                out[exps] = val
            else:
                out.pop(exps, None)
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        # clear denominators so the convolution runs on plain integers;
        # one Fraction per output term instead of one per term pair
        den1 = math.lcm(*(c.denominator for c in self.terms.values())) if self.terms else 1
        den2 = math.lcm(*(c.denominator for c in other.terms.values())) if other.terms else 1
        left = [(e, int(c * den1)) for e, c in self.terms.items()]
        right = [(e, int(c * den2)) for e, c in other.terms.items()]
        out = {}
        for e1, c1 in left:
            for e2, c2 in right:
                exps = tuple(a + b for a, b in zip(e1, e2))
                out[exps] = out.get(exps, 0) + c1 * c2
        den = den1 * den2
        return Polynomial(
            self.nvars, {e: Fraction(c, den) for e, c in out.items() if c}
        )

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError(f"exponent must be a nonnegative integer, got {n}")
        out = Polynomial.one(self.nvars)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(self.nvars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    __hash__ = None

    def exact_div(self, divisor):
        """Exact quotient self / divisor; raises ValueError if not divisible.

        Single-divisor long division: each step cancels the graded-lex
        leading term of the remainder and only introduces strictly smaller
        monomials, so the loop terminates.  A step whose monomial quotient
        has a negative exponent proves non-divisibility.
        """
        divisor = self._coerce(divisor)
        if divisor is None or not isinstance(divisor, Polynomial):
            raise TypeError("divisor must be a Polynomial or rational")
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return Polynomial.zero(self.nvars)
        dexps, dcoeff = divisor.leading()
        rem = dict(self.terms)
        quot = {}
        while rem:
            lexps = max(rem, key=_order_key)
            lcoeff = rem[lexps]
            qexps = tuple(a - b for a, b in zip(lexps, dexps))
            if any(e < 0 for e in qexps):
                raise ValueError(f"({divisor}) does not divide ({self})")
            qcoeff = lcoeff / dcoeff
            quot[qexps] = qcoeff
            for e2, c2 in divisor.terms.items():
                exps = tuple(a + b for a, b in zip(qexps, e2))
                val = rem.get(exps, Fraction(0)) - qcoeff * c2
                if val:
                    rem[exps] = val
                else:
                    rem.pop(exps, None)
        return Polynomial(self.nvars, quot)

    def evaluate(self, point):
        """Exact value at a rational point (sequence of length nvars)."""
        vals = [Fraction(v) for v in point]
        if len(vals) != self.nvars:
            raise ValueError(f"point has {len(vals)} coordinates, expected {self.nvars}")
        # exponents repeat across terms, so memoize coordinate powers
        pows = [{} for _ in vals]
        total = Fraction(0)
        for exps, coeff in self.terms.items():
            term = coeff
            for k, e in enumerate(exps):
                if e:
                    cache = pows[k]
                    p = cache.get(e)
                    if p is None:
                        p = vals[k] ** e
                        cache[e] = p
                    term *= p
            total += term
        return total

    # -- text ------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        ordered = sorted(self.terms.items(), key=lambda kv: _order_key(kv[0]), reverse=True)
        for pos, (exps, coeff) in enumerate(ordered):
            mono = "*".join(
                f"t{k + 1}" if e == 1 else f"t{k + 1}^{e}" for k, e in enumerate(exps) if e
            )
            mag = abs(coeff)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if pos == 0:
                parts.append(f"-{body}" if coeff < 0 else body)
            else:
                parts.append(f"- {body}" if coeff < 0 else f"+ {body}")
        return " ".join(parts)

    def __repr__(self):
        return f"Polynomial({self.nvars}, '{self}')"


_TOKEN_RE = re.compile(r"(\d+)|t(\d+)|([+\-*/^])|(\S)")


def _tokenize(text):
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        col = m.start() + 1
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), col))
        elif m.group(2) is not None:
            tokens.append(("var", int(m.group(2)), col))
        elif m.group(3) is not None:
            tokens.append(("op", m.group(3), col))
        else:
            raise ParseError(f"column {col}: unexpected character {m.group(4)!r}")
    return tokens


def parse_polynomial(text, nvars):
    """Parse the polynomial text syntax; raises ParseError with a column."""
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty polynomial")
    terms = {}
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else ("end", None, len(text) + 1)

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def parse_factor(exps):
        kind, val, col = take()
        if kind != "var":
            raise ParseError(f"column {col}: expected a variable factor")
        if not 1 <= val <= nvars:
            raise ParseError(f"column {col}: unknown variable t{val} (nvars={nvars})")
        exp = 1
        if peek()[0] == "op" and peek()[1] == "^":
            take()
            kind2, val2, col2 = take()
            if kind2 != "int":
                raise ParseError(f"column {col2}: expected an integer exponent")
            exp = val2
        exps[val - 1] += exp

    def parse_term(sign):
        coeff = Fraction(1)
        exps = [0] * nvars
        kind, val, col = peek()
        have_any = False
        if kind == "int":
            take()
            coeff = Fraction(val)
            have_any = True
            if peek()[0] == "op" and peek()[1] == "/":
                take()
                kind2, val2, col2 = take()
                if kind2 != "int":
                    raise ParseError(f"column {col2}: expected a denominator")
                if val2 == 0:
                    raise ParseError(f"column {col2}: zero denominator")
                coeff /= val2
            if peek()[0] == "op" and peek()[1] == "*":
                take()
                parse_factor(exps)
                have_any = True
        if peek()[0] == "var":
            parse_factor(exps)
            have_any = True
        while peek()[0] == "op" and peek()[1] == "*":
            take()
            parse_factor(exps)
        if not have_any:
            kind, val, col = peek()
            raise ParseError(f"column {col}: expected a term")
        key = tuple(exps)
        terms[key] = terms.get(key, Fraction(0)) + sign * coeff

    sign = Fraction(1)
    kind, val, col = peek()
    if kind == "op" and val in "+-":
        take()
        sign = Fraction(-1) if val == "-" else Fraction(1)
    parse_term(sign)
    while pos < len(tokens):
        kind, val, col = take()
        if kind != "op" or val not in "+-":
            raise ParseError(f"column {col}: expected '+' or '-' between terms")
        parse_term(Fraction(-1) if val == "-" else Fraction(1))
    return Polynomial(nvars, terms)
