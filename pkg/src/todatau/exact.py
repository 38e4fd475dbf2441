"""Exact scalar tower: rationals, Laurent polynomials in eps, polynomials in n.

``LatticePoly`` models functions of the lattice variable ``n`` that are
polynomial in ``n`` with coefficients Laurent-polynomial in ``eps``.  It is
the coefficient ring for everything computed from concrete initial data.
"""

from __future__ import annotations

from math import comb

import gmpy2

Rational = gmpy2.mpq

_ZERO = Rational(0)
_ONE = Rational(1)


def as_rational(x) -> Rational:
    """Coerce ints, strings like ``"3/4"`` and mpq values to a canonical mpq."""
    if isinstance(x, str):
        return Rational(x.strip())
    return Rational(x)


def _is_scalar(x) -> bool:
    return isinstance(x, (int, type(_ZERO))) and not isinstance(x, bool)


class EpsScalar:
    """Laurent polynomial in eps with rational coefficients.

    Stored as ``{exponent: coefficient}`` with zero coefficients dropped.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for e, c in terms.items():
                c = as_rational(c)
                if c:
                    clean[int(e)] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms):
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> EpsScalar:
        return cls({0: c})

    @classmethod
    def eps(cls, power: int = 1) -> EpsScalar:
        return cls({power: 1})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def __getitem__(self, e: int) -> Rational:
        return self._terms.get(e, _ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def min_power(self):
        return min(self._terms) if self._terms else None

    def max_power(self):
        return max(self._terms) if self._terms else None

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {0}

    def _coerce(self, other):
        if isinstance(other, EpsScalar):
            return other
        if _is_scalar(other):
            return EpsScalar.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, _ZERO) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return EpsScalar._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return EpsScalar._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            if not other:
                return EpsScalar._raw({})
            return EpsScalar._raw({e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = e1 + e2
                s = out.get(e, _ZERO) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return EpsScalar._raw(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = EpsScalar.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> EpsScalar:
        """Inverse of a single-term Laurent monomial ``c * eps^e``."""
        if len(self._terms) != 1:
            raise ZeroDivisionError(f"{self} is not a unit in Q[eps, 1/eps]")
        (e, c), = self._terms.items()
        return EpsScalar._raw({-e: 1 / c})

    def __truediv__(self, other):
        if _is_scalar(other):
            return self * (_ONE / as_rational(other))
        return self * self._coerce(other).inverse()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self._terms.items()):
            if e == 0:
                mono = ""
            elif e == 1:
                mono = "e"
            else:
                mono = f"e^{e}" if e > 0 else f"e^({e})"
            parts.append((c, mono))
        return _join_terms(parts)

    def __repr__(self):
        return f"EpsScalar({self.to_text()})"

    __str__ = to_text


def _format_coeff(c: Rational, mono: str) -> tuple[str, str]:
    """Return ``(sign, body)`` for one term of a rendered sum."""
    sign = "-" if c < 0 else "+"
    a = abs(c)
    if not mono:
        return sign, str(a)
    if a == 1:
        return sign, mono
    return sign, f"{a}*{mono}"


def _join_terms(parts) -> str:
    out = []
    for i, (c, mono) in enumerate(parts):
        sign, body = _format_coeff(c, mono)
        if i == 0:
            out.append(body if sign == "+" else "-" + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out) if out else "0"


class LatticePoly:
    """Polynomial in ``n`` whose coefficients are Laurent polynomials in eps.

    Internally a flat map ``(n_exponent, eps_exponent) -> Rational``.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for (i, e), c in terms.items():
                if i < 0:
                    raise ValueError("negative power of n in a LatticePoly")
                c = as_rational(c)
                if c:
                    clean[(int(i), int(e))] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms):
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> LatticePoly:
        if isinstance(c, EpsScalar):
            return cls._raw({(0, e): v for e, v in c._terms.items()})
        c = as_rational(c)
        return cls._raw({(0, 0): c} if c else {})

    @classmethod
    def n(cls) -> LatticePoly:
        return cls._raw({(1, 0): _ONE})

    @classmethod
    def eps(cls, power: int = 1) -> LatticePoly:
        return cls._raw({(0, power): _ONE})

    @classmethod
    def from_coefficients(cls, coeffs) -> LatticePoly:
        """Build from a map ``n_exponent -> EpsScalar | rational``."""
        out = {}
        for i, c in coeffs.items():
            if isinstance(c, EpsScalar):
                for e, v in c._terms.items():
                    out[(i, e)] = v
            elif c:
                out[(i, 0)] = as_rational(c)
        return cls._raw(out)

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def coefficient(self, i: int) -> EpsScalar:
        """Coefficient of ``n^i`` as an ``EpsScalar``."""
        return EpsScalar._raw({e: c for (j, e), c in self._terms.items() if j == i})

    def coefficients(self) -> dict:
        out = {}
        for (i, e), c in self._terms.items():
            out.setdefault(i, {})[e] = c
        return {i: EpsScalar._raw(t) for i, t in sorted(out.items())}

    def degree(self) -> int:
        """Degree in n; ``-1`` for the zero polynomial."""
        return max((i for i, _ in self._terms), default=-1)

    def eps_powers(self) -> set:
        return {e for _, e in self._terms}

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(i == 0 for i, _ in self._terms)

    def is_rational_constant(self) -> bool:
        return not self._terms or set(self._terms) == {(0, 0)}

    def _coerce(self, other):
        if isinstance(other, LatticePoly):
            return other
        if isinstance(other, EpsScalar) or _is_scalar(other):
            return LatticePoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for k, c in other._terms.items():
            s = out.get(k, _ZERO) + c
            if s:
                out[k] = s
            else:
                del out[k]
        return LatticePoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return LatticePoly._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            s = out.get(k, _ZERO) - c
            if s:
                out[k] = s
            else:
                del out[k]
        return LatticePoly._raw(out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            if not other:
                return LatticePoly._raw({})
            return LatticePoly._raw({k: c * other for k, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = {}
        get = out.get
        for (i1, e1), c1 in self._terms.items():
            for (i2, e2), c2 in other._terms.items():
                k = (i1 + i2, e1 + e2)
                out[k] = get(k, _ZERO) + c1 * c2
        return LatticePoly._raw({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            return self * (_ONE / as_rational(other))
        if isinstance(other, EpsScalar):
            return self * LatticePoly.const(other.inverse())
        if isinstance(other, LatticePoly):
            return self * other.inverse()
        return NotImplemented

    def inverse(self) -> LatticePoly:
        """Inverse of a unit: a single ``c * eps^e`` term with no n."""
        if len(self._terms) != 1:
            raise ZeroDivisionError(f"{self} is not a unit")
        ((i, e), c), = self._terms.items()
        if i:
            raise ZeroDivisionError(f"{self} is not a unit")
        return LatticePoly._raw({(0, -e): 1 / c})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = LatticePoly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def evaluate(self, n) -> EpsScalar:
        """Value at an integer (or rational) n."""
        n = as_rational(n)
        out = {}
        for (i, e), c in self._terms.items():
            out[e] = out.get(e, _ZERO) + c * n**i
        return EpsScalar({e: c for e, c in out.items() if c})

    def shift(self, k: int) -> LatticePoly:
        return shift_n(self, k)

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (i, e), c in sorted(self._terms.items(), key=lambda t: (-t[0][0], t[0][1])):
            factors = []
            if i == 1:
                factors.append("n")
            elif i > 1:
                factors.append(f"n^{i}")
            if e == 1:
                factors.append("e")
            elif e:
                factors.append(f"e^{e}" if e > 0 else f"e^({e})")
            parts.append((c, "*".join(factors)))
        return _join_terms(parts)

    def __repr__(self):
        return f"LatticePoly({self.to_text()})"

    __str__ = to_text


def shift_n(p: LatticePoly, k: int) -> LatticePoly:
    """Replace ``n`` by ``n + k`` and expand."""
    if k == 0 or not p._terms:
        return p
    out = {}
    for (i, e), c in p._terms.items():
        # (n + k)^i = sum_j C(i, j) k^(i-j) n^j
        for j in range(i + 1):
            key = (j, e)
            out[key] = out.get(key, _ZERO) + c * comb(i, j) * k ** (i - j)
    return LatticePoly._raw({key: c for key, c in out.items() if c})


def antidifference(p: LatticePoly) -> LatticePoly:
    """Return q with ``q(n+1) - q(n) = p`` and ``q(0) = 0``."""
    q = LatticePoly._raw({})
    rest = p
    while rest._terms:
        d = rest.degree()
        lead = {(d + 1, e): c / (d + 1) for (i, e), c in rest._terms.items() if i == d}
        t = LatticePoly._raw(lead)
        q = q + t
        rest = rest - (shift_n(t, 1) - t)
    # every correction term has positive n-degree, so q(0) = 0 already
    return q


def pochhammer(x, k: int):
    """Rising factorial ``x (x+1) ... (x+k-1)`` in whatever ring ``x`` lives."""
    out = 1
    for j in range(k):
        out = out * (x + j)
    return out
