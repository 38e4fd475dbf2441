"""The difference ring of polynomials in v_k, w_k with the shift operator.

Monomials are packed into a single Python int.  The low 16 bits hold the
total degree; above them every variable owns an 8-bit exponent slot, laid
out so that shifting all indices by k is a bit shift by 16*k.  Products of
monomials are then integer additions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .exact import LatticePoly, Rational, shift_n
from .parsing import ParseError, parse_expression

V, W = 0, 1
KIND_NAMES = ("v", "w")

OFFSET = 64
NSHIFTS = 2 * OFFSET
_DEG_BITS = 16
_DEG_MASK = (1 << _DEG_BITS) - 1
_SLOT_BITS = 8
_MAX_EXP = (1 << _SLOT_BITS) - 1
_VAR_BITS = 2 * _SLOT_BITS * NSHIFTS
_VAR_LIMIT = 1 << _VAR_BITS


class ShiftRangeError(OverflowError):
    """A shift index left the supported window of lattice offsets."""


@dataclass(frozen=True, order=True)
class TodaVar:
    kind: int
    shift: int

    def __post_init__(self):
        if self.kind not in (V, W):
            raise ValueError("kind must be V or W")
        if not -OFFSET <= self.shift < OFFSET:
            raise ShiftRangeError(f"shift {self.shift} outside [-{OFFSET}, {OFFSET})")

    def to_text(self) -> str:
        name = KIND_NAMES[self.kind]
        return f"{name}_{self.shift}" if self.shift >= 0 else f"{name}_{{{self.shift}}}"

    def __str__(self):
        return self.to_text()


def _slot(kind: int, shift: int) -> int:
    return 2 * (shift + OFFSET) + kind


def _var_unit(kind: int, shift: int) -> int:
    if not -OFFSET <= shift < OFFSET:
        raise ShiftRangeError(f"shift {shift} outside [-{OFFSET}, {OFFSET})")
    return (1 << (_DEG_BITS + _SLOT_BITS * _slot(kind, shift))) | 1


def mono_degree(m: int) -> int:
    return m & _DEG_MASK


def mono_decode(m: int):
    """List of ``(TodaVar, exponent)`` in canonical (kind, shift) order."""
    body = m >> _DEG_BITS
    out = []
    slot = 0
    while body:
        e = body & _MAX_EXP
        if e:
            shift, kind = divmod(slot, 2)
            out.append((TodaVar(kind, shift - OFFSET), e))
        body >>= _SLOT_BITS
        slot += 1
    out.sort()
    return out


def mono_encode(pairs) -> int:
    m = 0
    for var, e in pairs:
        if e < 0 or e > _MAX_EXP:
            raise OverflowError("exponent out of range")
        m += e * _var_unit(var.kind, var.shift)
    return m


def mono_shift(m: int, k: int) -> int:
    if k == 0 or m == 0:
        return m
    deg = m & _DEG_MASK
    body = m >> _DEG_BITS
    bits = 2 * _SLOT_BITS * k
    if k > 0:
        body <<= bits
        if body >= _VAR_LIMIT:
            raise ShiftRangeError("shift pushes a variable past the index window")
    else:
        if body & ((1 << -bits) - 1):
            raise ShiftRangeError("shift pushes a variable past the index window")
        body >>= -bits
    return (body << _DEG_BITS) | deg


class TodaPoly:
    """Sparse polynomial in the v_k, w_k with exact scalar coefficients."""

    __slots__ = ("_t", "_hash", "_deg")

    def __init__(self, terms=None):
        self._t = {m: c for m, c in (terms or {}).items() if c}
        self._hash = None
        self._deg = None

    @classmethod
    def _raw(cls, t):
        obj = cls.__new__(cls)
        obj._t = t
        obj._hash = None
        obj._deg = None
        return obj

    # construction
    @classmethod
    def zero(cls):
        return cls._raw({})

    @classmethod
    def const(cls, c):
        return cls._raw({0: c} if c else {})

    @classmethod
    def var(cls, kind: int, shift: int = 0):
        return cls._raw({_var_unit(kind, shift): 1})

    @classmethod
    def v(cls, shift: int = 0):
        return cls.var(V, shift)

    @classmethod
    def w(cls, shift: int = 0):
        return cls.var(W, shift)

    @classmethod
    def from_terms(cls, terms):
        """Build from ``[(coefficient, {TodaVar: exponent}), ...]``."""
        out = {}
        for c, mono in terms:
            m = mono_encode(mono.items())
            out[m] = out.get(m, 0) + c
        return cls(out)

    @classmethod
    def parse(cls, text: str) -> TodaPoly:
        def atom(base, idx):
            if base in ("v", "w") and idx is not None:
                return cls.var(V if base == "v" else W, idx)
            raise ParseError(f"unknown symbol {base!r}")

        return parse_expression(text, atom, cls.const(1))

    # inspection
    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def __len__(self):
        return len(self._t)

    def terms(self):
        """Canonically ordered list of ``(coefficient, [(TodaVar, exp), ...])``."""
        return [(self._t[m], mono_decode(m)) for m in self._sorted_monos()]

    def _sorted_monos(self):
        return sorted(self._t, key=lambda m: (m & _DEG_MASK, [(v.kind, v.shift, -e) for v, e in mono_decode(m)]))

    def coefficient_map(self) -> dict:
        return dict(self._t)

    def constant_term(self):
        return self._t.get(0, 0)

    def degree(self) -> int:
        if self._deg is None:
            self._deg = max((m & _DEG_MASK for m in self._t), default=-1)
        return self._deg

    def variables(self) -> set:
        out = set()
        for m in self._t:
            out.update(v for v, _ in mono_decode(m))
        return out

    def shift_range(self):
        """(min, max) shift index over all variables, or None for constants."""
        vs = self.variables()
        if not vs:
            return None
        return min(v.shift for v in vs), max(v.shift for v in vs)

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, TodaPoly):
            return other
        if isinstance(other, (int, type(Rational(0)))) and not isinstance(other, bool):
            return TodaPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._t:
            return self
        out = dict(self._t)
        for m, c in other._t.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                del out[m]
        return TodaPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return TodaPoly._raw({m: -c for m, c in self._t.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._t)
        for m, c in other._t.items():
            s = out.get(m, 0) - c
            if s:
                out[m] = s
            else:
                del out[m]
        return TodaPoly._raw(out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TodaPoly):
            if isinstance(other, (int, type(Rational(0)))) and not isinstance(other, bool):
                if not other:
                    return TodaPoly._raw({})
                return TodaPoly._raw({m: c * other for m, c in self._t.items()})
            return NotImplemented
        a, b = self._t, other._t
        if not a or not b:
            return TodaPoly._raw({})
        if self.degree() + other.degree() > _MAX_EXP:
            raise OverflowError("total degree exceeds the packed exponent width")
        if len(a) < len(b):
            a, b = b, a
        out = {}
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = ma + mb
                out[m] = get(m, 0) + ca * cb
        return TodaPoly._raw({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = TodaPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    # difference-ring structure
    def shift(self, k: int) -> TodaPoly:
        if k == 0:
            return self
        return TodaPoly._raw({mono_shift(m, k): c for m, c in self._t.items()})

    def partials(self) -> dict:
        """Map ``TodaVar -> d(self)/d(var)`` for every variable present."""
        out = {}
        for m, c in self._t.items():
            for var, e in mono_decode(m):
                dm = m - _var_unit(var.kind, var.shift)
                bucket = out.setdefault(var, {})
                bucket[dm] = bucket.get(dm, 0) + c * e
        return {v: TodaPoly(t) for v, t in out.items()}

    def substitute(self, image, one):
        """Ring homomorphism defined by ``image(TodaVar)``; ``one`` is the target unit."""
        cache = {}

        def power(var, e):
            key = (var, e)
            if key not in cache:
                cache[key] = image(var) ** e if e > 1 else image(var)
            return cache[key]

        total = one * 0
        for m, c in self._t.items():
            term = one * c
            for var, e in mono_decode(m):
                term = term * power(var, e)
            total = total + term
        return total

    # text
    def to_text(self) -> str:
        if not self._t:
            return "0"
        pieces = []
        for i, m in enumerate(self._sorted_monos()):
            c = self._t[m]
            mono = "*".join(v.to_text() if e == 1 else f"{v.to_text()}^{e}" for v, e in mono_decode(m))
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if i == 0:
                pieces.append(("-" if neg else "") + body)
            else:
                pieces.append((" - " if neg else " + ") + body)
        return "".join(pieces)

    def __repr__(self):
        return f"TodaPoly({self.to_text()})"

    __str__ = to_text

    def to_document(self) -> list:
        """JSON-friendly list of ``{"monomial": {...}, "coefficient": "p/q"}``."""
        return [
            {"monomial": {v.to_text(): e for v, e in mono}, "coefficient": str(c)}
            for c, mono in self.terms()
        ]


def ring_shift(p: TodaPoly, k: int) -> TodaPoly:
    return p.shift(k)


def v(k: int = 0) -> TodaPoly:
    return TodaPoly.v(k)


def w(k: int = 0) -> TodaPoly:
    return TodaPoly.w(k)


class AdmissibleDerivation:
    """Derivation commuting with the shift, fixed by its values on v_0 and w_0."""

    __slots__ = ("image_v", "image_w", "_cache")

    def __init__(self, image_v: TodaPoly, image_w: TodaPoly):
        self.image_v = image_v
        self.image_w = image_w
        self._cache = {}

    def on_var(self, var: TodaVar) -> TodaPoly:
        img = self._cache.get(var)
        if img is None:
            base = self.image_v if var.kind == V else self.image_w
            img = self._cache[var] = base.shift(var.shift)
        return img

    def __call__(self, p: TodaPoly) -> TodaPoly:
        return apply_derivation(self, p)

    def __repr__(self):
        return f"AdmissibleDerivation(v_0 -> {self.image_v}, w_0 -> {self.image_w})"


def apply_derivation(D: AdmissibleDerivation, p: TodaPoly) -> TodaPoly:
    out = TodaPoly.zero()
    for var, dp in p.partials().items():
        out = out + dp * D.on_var(var)
    return out


class DiffOp:
    """Finite sum of ``P_m * Lambda^m`` with ring coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {m: c for m, c in (coeffs or {}).items() if c}

    def __add__(self, other):
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out[m] + c if m in out else c
        return DiffOp(out)

    def __neg__(self):
        return DiffOp({m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        # (P_a L^a)(Q_b L^b) = P_a L^a(Q_b) L^(a+b)
        out = {}
        for a, pa in self.coeffs.items():
            for b, qb in other.coeffs.items():
                t = pa * qb.shift(a)
                out[a + b] = out[a + b] + t if a + b in out else t
        return DiffOp(out)

    def __pow__(self, k: int):
        out = DiffOp({0: TodaPoly.const(1)})
        for _ in range(k):
            out = out * self
        return out

    def plus(self) -> DiffOp:
        return DiffOp({m: c for m, c in self.coeffs.items() if m >= 0})

    def minus(self) -> DiffOp:
        return DiffOp({m: c for m, c in self.coeffs.items() if m < 0})

    def coef(self, m: int) -> TodaPoly:
        return self.coeffs.get(m, TodaPoly.zero())

    def commutator(self, other) -> DiffOp:
        return self * other - other * self

    def __eq__(self, other):
        return isinstance(other, DiffOp) and self.coeffs == other.coeffs


def lax_operator() -> DiffOp:
    return DiffOp({1: TodaPoly.const(1), 0: v(0), -1: w(0)})


@lru_cache(maxsize=None)
def lax_derivation_images(k: int):
    """Images of v_0 and w_0 under the k-th flow, straight from the Lax operator."""
    if k < 0:
        raise ValueError("k must be non-negative")
    L = lax_operator()
    A = (L ** (k + 1)).plus()
    C = A.commutator(L)
    return C.coef(0), C.coef(-1)


def lax_derivation(k: int) -> AdmissibleDerivation:
    return AdmissibleDerivation(*lax_derivation_images(k))


def substitute_initial(p: TodaPoly, f: LatticePoly, g: LatticePoly) -> LatticePoly:
    """Evaluate on the lattice data v_i = f(n+i), w_i = g(n+i)."""
    shifted = {}

    def image(var):
        key = (var.kind, var.shift)
        if key not in shifted:
            shifted[key] = shift_n(f if var.kind == V else g, var.shift)
        return shifted[key]

    return p.substitute(image, LatticePoly.const(1))
