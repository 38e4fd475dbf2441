"""Truncated series in 1/lambda, kernels with a diagonal pole, cyclic sums.

Coefficients live in any commutative ring of the tower (rationals,
``LatticePoly``, ``TodaPoly``) or in ``Mat2`` for matrix-valued data.
A series of order N knows the coefficients of lambda^0 .. lambda^-N.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter

from .exact import EpsScalar, LatticePoly, Rational


class TruncationError(ValueError):
    """Raised when a requested coefficient lies beyond the known order."""

    def __init__(self, message, needed=None):
        super().__init__(message)
        self.needed = needed


class SeriesError(ValueError):
    pass


def unit_inverse(x):
    """Inverse of a unit of the coefficient ring."""
    if isinstance(x, (LatticePoly, EpsScalar)):
        return x.inverse()
    if hasattr(x, "constant_term"):
        # a constant TodaPoly
        if len(x) != 1 or not x.constant_term():
            raise ZeroDivisionError(f"{x} is not a unit")
        return type(x).const(1 / Rational(x.constant_term()))
    if not x:
        raise ZeroDivisionError("zero is not a unit")
    return 1 / Rational(x)


class Mat2:
    """2x2 matrix over a commutative ring, stored row-major."""

    __slots__ = ("e",)

    def __init__(self, a, b, c, d):
        self.e = (a, b, c, d)

    def __add__(self, o):
        return Mat2(*(x + y for x, y in zip(self.e, o.e)))

    def __sub__(self, o):
        return Mat2(*(x - y for x, y in zip(self.e, o.e)))

    def __neg__(self):
        return Mat2(*(-x for x in self.e))

    def __mul__(self, o):
        if not isinstance(o, Mat2):
            return Mat2(*(x * o for x in self.e))
        a, b, c, d = self.e
        p, q, r, s = o.e
        return Mat2(a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s)

    __rmul__ = __mul__

    def trace(self):
        return self.e[0] + self.e[3]

    def det(self):
        a, b, c, d = self.e
        return a * d - b * c

    def map(self, fn):
        return Mat2(*(fn(x) for x in self.e))

    def __bool__(self):
        return any(bool(x) for x in self.e)

    def __eq__(self, o):
        return isinstance(o, Mat2) and all(x == y for x, y in zip(self.e, o.e))

    def __repr__(self):
        return "Mat2({}, {}; {}, {})".format(*self.e)


class TruncSeries:
    """sum_{i=0}^{N} c_i lambda^{-i}, known exactly up to order N.

    ``exact=True`` marks a series whose unlisted coefficients are known to
    vanish (a polynomial in 1/lambda); its order is then unbounded.
    """

    __slots__ = ("coeffs", "order", "zero", "exact")

    def __init__(self, coeffs, order=None, zero=0, exact=False):
        coeffs = list(coeffs)
        self.exact = exact
        self.zero = zero
        if exact:
            self.order = math.inf
        else:
            self.order = len(coeffs) - 1 if order is None else order
            if len(coeffs) < self.order + 1:
                coeffs = coeffs + [zero] * (self.order + 1 - len(coeffs))
            coeffs = coeffs[: self.order + 1]
        self.coeffs = coeffs

    @classmethod
    def constant(cls, c, zero=0):
        return cls([c], zero=zero, exact=True)

    def __getitem__(self, i: int):
        if i < 0:
            return self.zero
        if i > self.order:
            raise TruncationError(f"coefficient of lambda^-{i} requested, series known to order {self.order}", i)
        return self.coeffs[i] if i < len(self.coeffs) else self.zero

    def get(self, i: int):
        return self[i]

    def _bound(self, other):
        if isinstance(other, TruncSeries):
            return min(self.order, other.order)
        return self.order

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries.constant(other, self.zero)
        order = self._bound(other)
        n = max(len(self.coeffs), len(other.coeffs)) if order is math.inf else order + 1
        out = [self._at(i) + other._at(i) for i in range(n)]
        return TruncSeries(out, None if order is math.inf else order, self.zero, order is math.inf)

    __radd__ = __add__

    def _at(self, i):
        return self.coeffs[i] if i < len(self.coeffs) else self.zero

    def __neg__(self):
        return self.map(lambda c: -c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, TruncSeries) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return self.map(lambda c: c * other)
        order = self._bound(other)
        if order is math.inf:
            n = len(self.coeffs) + len(other.coeffs) - 1
        else:
            n = order + 1
        a, b = self.coeffs, other.coeffs
        out = []
        for i in range(n):
            s = self.zero
            for j in range(max(0, i - len(b) + 1), min(i, len(a) - 1) + 1):
                s = s + a[j] * b[i - j]
            out.append(s)
        return TruncSeries(out, None if order is math.inf else order, self.zero, order is math.inf)

    def __rmul__(self, other):
        return self.map(lambda c: other * c)

    def map(self, fn) -> TruncSeries:
        """Apply ``fn`` coefficientwise (for ring maps such as shifts)."""
        out = [fn(c) for c in self.coeffs]
        if self.exact:
            return TruncSeries(out, zero=self.zero, exact=True)
        return TruncSeries(out, self.order, self.zero)

    def truncate(self, order: int) -> TruncSeries:
        if order > self.order:
            raise TruncationError(f"cannot raise order {self.order} to {order}", order)
        return TruncSeries(self.coeffs[: order + 1], order, self.zero)

    def with_order(self, order: int) -> TruncSeries:
        """Exact series viewed at a finite order."""
        if not self.exact and order > self.order:
            raise TruncationError(f"cannot raise order {self.order} to {order}", order)
        return TruncSeries([self._at(i) for i in range(order + 1)], order, self.zero)

    def shift_power(self, k: int) -> TruncSeries:
        """Multiply by lambda^{-k} (k >= 0)."""
        out = [self.zero] * k + list(self.coeffs)
        if self.exact:
            return TruncSeries(out, zero=self.zero, exact=True)
        return TruncSeries(out, self.order + k, self.zero)

    def equal_to_order(self, other, order=None) -> bool:
        order = self._bound(other) if order is None else order
        if order is math.inf:
            order = max(len(self.coeffs), len(other.coeffs)) - 1
        return all(self[i] == other[i] for i in range(order + 1))

    def first_difference(self, other, order=None):
        """Smallest index where the two series differ, or None."""
        order = self._bound(other) if order is None else order
        if order is math.inf:
            order = max(len(self.coeffs), len(other.coeffs)) - 1
        for i in range(order + 1):
            if self[i] != other[i]:
                return i
        return None

    def __repr__(self):
        return f"TruncSeries(order={self.order}, coeffs={self.coeffs!r})"


def series_exp(s: TruncSeries, one=1) -> TruncSeries:
    """exp(s) for a series with vanishing constant term."""
    if s.coeffs and s.coeffs[0]:
        raise SeriesError("exp needs a series with zero constant term")
    order = s.order if not s.exact else len(s.coeffs) - 1
    if s.exact:
        raise SeriesError("exp of an exact series must be given an explicit order (use with_order)")
    e = [one]
    for n in range(1, order + 1):
        acc = s.zero
        for k in range(1, n + 1):
            sk = s[k]
            if sk:
                acc = acc + (sk * e[n - k]) * k
        e.append(acc * Rational(1, n))
    return TruncSeries(e, order, s.zero)


def series_log(s: TruncSeries) -> TruncSeries:
    """log(s) for a series with constant term 1."""
    order = s.order
    if order is math.inf:
        raise SeriesError("log of an exact series must be given an explicit order")
    if not s[0] == 1:
        raise SeriesError("log needs constant term 1")
    # n l_n = n s_n - sum_{k=1}^{n-1} k l_k s_{n-k}
    l = [s.zero]
    for n in range(1, order + 1):
        acc = s[n] * n
        for k in range(1, n):
            if l[k]:
                acc = acc - (l[k] * s[n - k]) * k
        l.append(acc * Rational(1, n))
    return TruncSeries(l, order, s.zero)


def series_invert(s: TruncSeries, order=None) -> TruncSeries:
    """Multiplicative inverse; the constant term must be a unit."""
    if order is None:
        order = s.order
    if order is math.inf:
        raise SeriesError("give an explicit order to invert an exact series")
    if order > s.order:
        raise TruncationError(f"series known to order {s.order}, inverse requested to {order}", order)
    u = unit_inverse(s[0])
    inv = [u]
    for n in range(1, order + 1):
        acc = s.zero
        for k in range(1, n + 1):
            sk = s[k]
            if sk:
                acc = acc + sk * inv[n - k]
        inv.append(-(acc * u))
    return TruncSeries(inv, order, s.zero)


class BiKernel:
    """p(lambda)/(lambda - mu) + sum h_{ij} lambda^{-i} mu^{-j}.

    The regular part is given by a memoized callable ``regular(i, j)``;
    it is known for ``i <= max_i``, ``j <= max_j`` and ``i + j <= max_total``.
    Indices below ``min_index`` vanish identically.
    """

    def __init__(self, pole: TruncSeries, regular=None, max_i=math.inf, max_j=math.inf,
                 max_total=math.inf, zero=0, min_index=1, matrix=False):
        self.pole = pole
        self._regular = regular
        self.max_i = max_i
        self.max_j = max_j
        self.max_total = max_total
        self.zero = zero
        self.min_index = min_index
        self.matrix = matrix
        self._memo = {}

    @property
    def has_regular(self) -> bool:
        return self._regular is not None

    def regular_known(self, i: int, j: int) -> bool:
        return i <= self.max_i and j <= self.max_j and i + j <= self.max_total

    def regular(self, i: int, j: int):
        if self._regular is None or i < self.min_index or j < self.min_index:
            return self.zero
        if not self.regular_known(i, j):
            raise TruncationError(f"regular coefficient ({i}, {j}) beyond known range", (i, j))
        key = (i, j)
        if key not in self._memo:
            self._memo[key] = self._regular(i, j)
        return self._memo[key]

    def regular_array(self, order: int) -> dict:
        """All regular coefficients with total index <= order."""
        return {(i, j): self.regular(i, j)
                for i in range(self.min_index, order + 1)
                for j in range(self.min_index, order + 1 - i)}

    def known_total(self):
        return min(self.max_total, self.pole.order + 1 if self.pole.order is not math.inf else math.inf)


def divide_by_difference(numerator, order_x, order_y, zero=0, check_pole=None):
    """Split numerator(lambda, mu)/(lambda - mu) into pole and regular parts.

    ``numerator(i, j)`` is the coefficient of lambda^{-i} mu^{-j}; it is
    known for ``i <= order_x`` and ``j <= order_y``.  The pole coefficient is
    the diagonal value numerator(lambda, lambda).  The remainder of the
    division is verified to vanish and a ``SeriesError`` raised otherwise.
    """
    memo = {}

    def n(i, j):
        key = (i, j)
        if key not in memo:
            memo[key] = numerator(i, j)
        return memo[key]

    diag_order = min(order_x, order_y)
    pole_coeffs = []
    for i in range(diag_order + 1):
        s = zero
        for a in range(i + 1):
            s = s + n(a, i - a)
        pole_coeffs.append(s)
    pole = TruncSeries(pole_coeffs, diag_order, zero)
    if check_pole is not None:
        bad = pole.first_difference(check_pole, diag_order)
        if bad is not None:
            raise SeriesError(f"diagonal value disagrees with the expected pole coefficient at order {bad}")

    def g(i, j):
        v = n(i, j)
        return v - pole[i] if j == 0 else v

    qmemo = {}

    def q(i, j):
        # (y - x) Q = G with x = 1/lambda, y = 1/mu
        key = (i, j)
        if key not in qmemo:
            s = zero
            for l in range(i + 1):
                s = s + g(i - l, j + 1 + l)
            qmemo[key] = s
        return qmemo[key]

    # remainder check: g_{i,0} + q_{i-1,0} = 0
    for i in range(min(order_x, order_y - 1) + 1):
        rem = g(i, 0) + (q(i - 1, 0) if i else zero)
        if rem:
            raise SeriesError(f"nonzero remainder dividing by (lambda - mu) at order {i}")

    def regular(i, j):
        return q(i - 1, j - 1)

    # q_{ij} needs x-index <= i and y-index <= i + j + 1
    return BiKernel(pole, regular, max_i=order_x + 1, max_total=order_y + 1, zero=zero)


def expand_pole(kernel: BiKernel, region: str, order: int) -> dict:
    """Expand the pole in a region and add the regular part.

    ``region`` is ``"lambda"`` (|lambda| > |mu|) or ``"mu"``.  Returns a map
    ``(i, j) -> coefficient of lambda^{-i} mu^{-j}`` holding every entry
    with ``|i| + |j| <= order`` among those that can be nonzero.
    """
    out = {}

    def add(key, val):
        if val:
            out[key] = out[key] + val if key in out else val

    for r in range(order + 1):
        p = kernel.pole[r]
        if not p:
            continue
        for m in range(order + 1):
            if region == "lambda":
                key = (r + m + 1, -m)
                if abs(key[0]) + abs(key[1]) <= order:
                    add(key, p)
            elif region == "mu":
                key = (r - m, m + 1)
                if abs(key[0]) + abs(key[1]) <= order:
                    add(key, -p)
            else:
                raise ValueError("region must be 'lambda' or 'mu'")
    for (i, j), h in kernel.regular_array(order).items():
        add((i, j), h)
    return out


def _edge_options(kernel, x_a, s, a_dominant):
    """Kernel entries at local exponents (x_a, s - x_a).

    Yields ``(factor_key, sign, missing)``; ``missing`` names a coefficient
    beyond the known truncation, in which case ``factor_key`` is None.
    """
    x_b = s - x_a
    r = s - 1
    if r >= 0 and (x_b <= 0 if a_dominant else x_b >= 1):
        sign = 1 if a_dominant else -1
        if r > kernel.pole.order:
            yield None, sign, ("pole", r)
        elif kernel.pole[r]:
            yield ("p", r), sign, None
    if kernel.has_regular and x_a >= kernel.min_index and x_b >= kernel.min_index:
        if kernel.regular_known(x_a, x_b):
            yield ("h", x_a, x_b), 1, None
        else:
            yield None, 1, ("regular", (x_a, x_b))


def _canonical(key, matrix):
    if not matrix:
        return tuple(sorted(key))
    rots = [key[i:] + key[:i] for i in range(len(key))]
    return min(rots)


def _paths(kernel, cycle, t, rank, bound_lo, bound_hi):
    """Enumerate closed paths for one cyclic ordering; returns Counter and shortfalls."""
    k = len(cycle)
    total = sum(t[v] for v in cycle)
    counts = Counter()
    shortfalls = []

    def rec(j, u_first, u_j, used, key, sign, missing):
        a = cycle[j]
        b = cycle[(j + 1) % k]
        a_dom = rank[a] < rank[b]
        last = j == k - 1
        remaining_edges = k - 1 - j
        for s in range(1, total - used - remaining_edges + 1):
            u_next = t[b] - (s - u_j)
            if last:
                if u_next != u_first or used + s != total:
                    continue
            elif not bound_lo <= u_next <= bound_hi:
                continue
            for factor, sg, miss in _edge_options(kernel, u_j, s, a_dom):
                path_missing = missing + (miss,) if miss else missing
                new_key = key + (factor,) if factor else key
                if last:
                    if path_missing:
                        shortfalls.extend(path_missing)
                    else:
                        counts[_canonical(new_key, kernel.matrix)] += sign * sg
                else:
                    rec(j + 1, u_first, u_next, used + s, new_key, sign * sg, path_missing)

    for u0 in range(bound_lo, bound_hi + 1):
        rec(0, u0, u0, 0, (), 1, ())
    return counts, shortfalls


class _Evaluator:
    """Memoized products of kernel coefficients keyed by factor tuples."""

    def __init__(self, kernel):
        self.kernel = kernel
        self.memo = {}

    def factor(self, f):
        if f[0] == "p":
            return self.kernel.pole[f[1]]
        return self.kernel.regular(f[1], f[2])

    def product(self, key):
        if key in self.memo:
            return self.memo[key]
        if len(key) == 1:
            val = self.factor(key[0])
        else:
            val = self.product(key[:-1]) * self.factor(key[-1])
        self.memo[key] = val
        return val


def cyclic_sum(kernel: BiKernel, targets, sign=1, region=None, double_pole=-1, evaluator=None):
    """Coefficients of the cyclic-class sum of kernel products.

    Computes, for each exponent tuple ``t`` in ``targets``, the coefficient of
    prod_j lambda_j^{-t_j} in

        sign * sum_{pi in S_k/C_k} prod_j kernel(lambda_pi(j), lambda_pi(j+1))
        + double_pole * delta_{k,2} / (lambda_1 - lambda_2)^2

    expanded in the region given by ``region`` (a permutation listing the
    variables from most to least dominant; default 0 > 1 > ... > k-1).
    Matrix kernels contribute the trace of the ordered product.
    """
    targets = [tuple(t) for t in targets]
    if not targets:
        return {}
    k = len(targets[0])
    if k < 2:
        raise ValueError("cyclic sums need at least two points")
    order = list(region) if region is not None else list(range(k))
    rank = {v: r for r, v in enumerate(order)}
    ev = evaluator or _Evaluator(kernel)
    results = {}
    for t in targets:
        if len(t) != k:
            raise ValueError("all targets must have the same length")
        T = sum(t)
        W = sum((rank[v] + 1) * t[v] for v in range(k))
        dmax = max(k * T - W, 0) + 1
        lo, hi = -dmax - T, dmax + T
        counts = Counter()
        shortfalls = []
        for perm in itertools.permutations(range(1, k)):
            cycle = (0,) + perm
            c, sf = _paths(kernel, cycle, t, rank, lo, hi)
            counts.update(c)
            shortfalls.extend(sf)
        if shortfalls:
            _raise_shortfall(shortfalls, kernel, t)
        total = kernel.zero.trace() if kernel.matrix else kernel.zero
        for key, weight in sorted(counts.items()):
            if not weight:
                continue
            val = ev.product(key)
            if kernel.matrix:
                val = val.trace()
            total = total + val * weight
        total = total * sign
        if k == 2 and double_pole:
            a, b = order
            ta, tb = t[a], t[b]
            if tb <= 0 and ta + tb == 2:
                total = total + (1 - tb) * double_pole
        results[t] = total
    return results


def _raise_shortfall(shortfalls, kernel, t):
    pole_need = max((n for kind, n in shortfalls if kind == "pole"), default=None)
    reg_need = max((sum(n) for kind, n in shortfalls if kind == "regular"), default=None)
    parts = []
    if pole_need is not None:
        parts.append(f"pole coefficient to order {pole_need} (have {kernel.pole.order})")
    if reg_need is not None:
        parts.append(f"regular part to total order {reg_need} (have {kernel.max_total})")
    raise TruncationError(f"target {t} needs " + " and ".join(parts),
                          needed=max(x for x in (pole_need, reg_need) if x is not None))


def symmetric_targets(k: int, max_index: int, shift: int):
    """Sorted index tuples with entries <= max_index, as (indices, exponents)."""
    out = []
    for idx in itertools.combinations_with_replacement(range(max_index + 1), k):
        out.append((idx, tuple(i + shift for i in idx)))
    return out
