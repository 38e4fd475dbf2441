"""Basic matrix resolvent R(lambda) of the Toda lattice and the local kernel K.

The recursion is written against a small ``DiffRing`` interface so the same
code runs over the abstract ring (``ALGEBRA``) and over concrete lattice
data, where v_i, w_i are replaced by f(n+i), g(n+i).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .exact import LatticePoly, shift_n
from .report import Report
from .ring import TodaPoly
from .series import BiKernel, Mat2, SeriesError, TruncSeries, divide_by_difference


class ConsistencyError(ArithmeticError):
    """An identity that must hold by construction failed."""


@dataclass(frozen=True)
class DiffRing:
    """Commutative ring with an automorphism and chosen elements v_k, w_k."""

    name: str
    zero: object
    one: object
    shift: Callable
    v: Callable
    w: Callable
    key: tuple = field(default=())


ALGEBRA = DiffRing(
    "A",
    TodaPoly.zero(),
    TodaPoly.const(1),
    lambda p, k: p.shift(k),
    TodaPoly.v,
    TodaPoly.w,
    ("A",),
)


def lattice_ring(f: LatticePoly, g: LatticePoly) -> DiffRing:
    """The lattice image of the abstract ring for initial data (f, g)."""
    f = f if isinstance(f, LatticePoly) else LatticePoly.const(f)
    g = g if isinstance(g, LatticePoly) else LatticePoly.const(g)
    return DiffRing(
        "V",
        LatticePoly.const(0),
        LatticePoly.const(1),
        shift_n,
        lambda k: shift_n(f, k),
        lambda k: shift_n(g, k),
        ("V", f, g),
    )


class _Recursion:
    """Growing lists a_j, b_j, c_j for one ring; extended on demand."""

    def __init__(self, ring: DiffRing):
        self.ring = ring
        self.a = [ring.zero]
        self.c = [ring.one]
        self.b = []
        self.shifted_c = [ring.shift(ring.one, 1)]
        self._w0 = ring.w(0)
        self._w1 = ring.w(1)
        self._v0 = ring.v(0)
        self._vm1 = ring.v(-1)
        self._extend_b()

    def _extend_b(self):
        while len(self.b) < len(self.c):
            j = len(self.b)
            self.b.append(-(self._w0 * self.shifted_c[j]))

    def extend(self, N: int):
        R = self.ring
        while len(self.a) <= N:
            l = len(self.a) - 1
            # c_{l+1} from the linear relation, a_{l+1} from the quadratic one
            c_next = self._vm1 * self.c[l] + self.a[l] + R.shift(self.a[l], -1)
            self.c.append(c_next)
            self.shifted_c.append(R.shift(c_next, 1))
            s = R.zero
            for i in range(l + 1):
                j = l - i
                s = s + self._w0 * (self.c[i] * self.shifted_c[j]) - self.a[i] * self.a[j]
            self.a.append(s)
            self._extend_b()
            self._check_linear(l)

    def _check_linear(self, j: int):
        R = self.ring
        a1, a0, c = self.a[j + 1], self.a[j], self.c[j]
        lhs = (a1 - R.shift(a1, 1)) + self._v0 * (R.shift(a0, 1) - a0) \
            + self._w1 * R.shift(c, 2) - self._w0 * c
        if lhs:
            raise ConsistencyError(f"linear resolvent relation fails at j = {j}")


_RECURSIONS: dict = {}


def _recursion(ring: DiffRing) -> _Recursion:
    rec = _RECURSIONS.get(ring.key)
    if rec is None:
        rec = _RECURSIONS[ring.key] = _Recursion(ring)
    return rec


@dataclass
class Resolvent:
    """Coefficients a_i, b_i, c_i (i <= order) of the basic resolvent."""

    a: list
    b: list
    c: list
    order: int
    ring: DiffRing = ALGEBRA

    def alpha(self) -> TruncSeries:
        return TruncSeries([self.ring.zero] + list(self.a), self.order + 1, self.ring.zero)

    def beta(self) -> TruncSeries:
        return TruncSeries([self.ring.zero] + list(self.b), self.order + 1, self.ring.zero)

    def gamma(self) -> TruncSeries:
        return TruncSeries([self.ring.zero] + list(self.c), self.order + 1, self.ring.zero)

    def one_plus_alpha(self) -> TruncSeries:
        return TruncSeries([self.ring.one] + list(self.a), self.order + 1, self.ring.zero)

    def matrix_coefficient(self, r: int) -> Mat2:
        """R_r, the coefficient of lambda^{-r}."""
        z, one = self.ring.zero, self.ring.one
        if r == 0:
            return Mat2(one, z, z, z)
        i = r - 1
        return Mat2(self.a[i], self.b[i], self.c[i], -self.a[i])

    def matrix(self) -> TruncSeries:
        z = self.ring.zero
        coeffs = [self.matrix_coefficient(r) for r in range(self.order + 2)]
        return TruncSeries(coeffs, self.order + 1, Mat2(z, z, z, z))

    def truncated(self, order: int) -> Resolvent:
        if order > self.order:
            raise ValueError("cannot extend a resolvent by truncation")
        return Resolvent(self.a[: order + 1], self.b[: order + 1], self.c[: order + 1], order, self.ring)

    def with_a(self, i: int, value) -> Resolvent:
        """Copy with a_i replaced (fault injection for the verifiers)."""
        a = list(self.a)
        a[i] = value
        return Resolvent(a, list(self.b), list(self.c), self.order, self.ring)

    def render(self) -> list:
        """Text blocks ``[[R11, R12], [R21, R22]]`` per power of 1/lambda."""
        out = []
        for r in range(self.order + 2):
            m = self.matrix_coefficient(r)
            out.append({"power": -r, "entries": [[str(m.e[0]), str(m.e[1])], [str(m.e[2]), str(m.e[3])]]})
        return out


def mr_compute(N: int, ring: DiffRing = ALGEBRA) -> Resolvent:
    """Resolvent coefficients up to index N by the matrix-resolvent recursion."""
    if N < 0:
        raise ValueError("order must be non-negative")
    rec = _recursion(ring)
    rec.extend(N)
    return Resolvent(rec.a[: N + 1], rec.b[: N + 1], rec.c[: N + 1], N, ring)


def verify_defining(r: Resolvent) -> Report:
    """Commutator equation, trace, determinant and leading normalization."""
    rep = Report("defining equations")
    R = r.ring
    z, one = R.zero, R.one
    U0 = Mat2(R.v(0), R.w(0), -one, z)
    E11 = Mat2(one, z, z, z)
    Rs = [r.matrix_coefficient(i) for i in range(r.order + 2)]
    shift = lambda m: m.map(lambda x: R.shift(x, 1))
    first_bad = None
    # coefficient of lambda^{-p}: L(R_p) U0 - U0 R_p - (L(R_{p+1}) E11 - E11 R_{p+1})
    for p in range(-1, r.order + 1):
        lhs = Mat2(z, z, z, z)
        if p >= 0:
            lhs = shift(Rs[p]) * U0 - U0 * Rs[p]
        lhs = lhs - (shift(Rs[p + 1]) * E11 - E11 * Rs[p + 1])
        if lhs and first_bad is None:
            first_bad = p
    rep.add("commutator", first_bad is None, "" if first_bad is None else f"first failure at lambda^-{first_bad}")
    tr_bad = next((i for i, m in enumerate(Rs) if m.trace() != (one if i == 0 else z)), None)
    rep.add("trace", tr_bad is None, "" if tr_bad is None else f"first failure at lambda^-{tr_bad}")
    det_bad = None
    for p in range(r.order + 2):
        s = z
        for i in range(p + 1):
            A, B = Rs[i], Rs[p - i]
            s = s + A.e[0] * B.e[3] - A.e[1] * B.e[2]
        if s:
            det_bad = p
            break
    rep.add("determinant", det_bad is None, "" if det_bad is None else f"first failure at lambda^-{det_bad}")
    rep.add("normalization", Rs[0] == E11)
    # express failures as the first resolvent index a_i, b_i, c_i involved
    failing = [x for x in (first_bad, None if tr_bad is None else tr_bad - 1,
                           None if det_bad is None else det_bad - 1) if x is not None]
    rep.first_failure = min(failing) if failing else None
    return rep


def verify_alpha_relations(r: Resolvent) -> Report:
    """beta = -w_0 L(gamma), gamma (lambda - v_{-1}) = 1 + alpha + L^{-1} alpha,
    alpha + alpha^2 + beta gamma = 0, and the closed equation for alpha."""
    rep = Report("alpha relations")
    R = r.ring
    N = r.order + 1
    al, be, ga = r.alpha(), r.beta(), r.gamma()
    sh = lambda s, k: s.map(lambda x: R.shift(x, k))
    rep.add("beta from gamma", be.equal_to_order(-(sh(ga, 1) * R.w(0))))
    # gamma * lambda is gamma shifted up one power
    lam_gamma = TruncSeries(ga.coeffs[1:], N - 1, R.zero)
    lhs = lam_gamma - ga.truncate(N - 1) * R.v(-1)
    rhs = (al + sh(al, -1)).truncate(N - 1) + R.one
    rep.add("gamma from alpha", lhs.equal_to_order(rhs))
    quad = al + al * al + be * ga
    rep.add("quadratic", all(not quad[i] for i in range(N + 1)))
    # (alpha - L alpha)(lambda - v_0)(lambda - v_{-1})(lambda - v_1)
    #   - w_0 (1 + alpha + L^{-1} alpha)(lambda - v_1) + w_1 (1 + L alpha + L^2 alpha)(lambda - v_{-1}) = 0
    one = TruncSeries.constant(R.one, R.zero)
    t1 = _times_linear(_times_linear(_times_linear(al - sh(al, 1), R.v(0), R), R.v(-1), R), R.v(1), R)
    t2 = _times_linear(one + al + sh(al, -1), R.v(1), R) * R.w(0)
    t3 = _times_linear(one + sh(al, 1) + sh(al, 2), R.v(-1), R) * R.w(1)
    total = t1 - t2.shift_power(2) + t3.shift_power(2)
    # total is the identity divided by lambda^3
    rep.add("closed alpha equation", all(not total[i] for i in range(min(t1.order, N - 2) + 1)))
    return rep


def _times_linear(s: TruncSeries, c, R) -> TruncSeries:
    """(lambda - c) * s, divided by lambda so the result stays a 1/lambda series."""
    # (lambda - c) s = lambda (s - c s / lambda)
    return s - (s * c).shift_power(1).truncate(s.order)


def verify_gradient_identity(r: Resolvent, orders=(6, 6)) -> Report:
    """Check nabla(mu) R(lambda) = [R(mu), R(lambda)]/(mu - lambda) + [Q(mu), R(lambda)].

    Both sides are compared on lambda^{-i} mu^{-j}, i <= N_l, j <= N_mu,
    with the difference quotient expanded separately in the two regions.
    """
    from .tau import toda_derivation

    n_l, n_m = orders
    need = n_l + n_m + 1
    if r.order < need:
        r = mr_compute(need, r.ring)
    R = r.ring
    z = R.zero
    rep = Report("gradient identity")
    Rc = [r.matrix_coefficient(i) for i in range(r.order + 2)]
    derivs = {j: toda_derivation(r, j) for j in range(max(n_m - 1, 0))}

    def lhs(i, j):
        # nabla(mu) = sum_j D_j mu^{-j-2}
        if j < 2:
            return Mat2(z, z, z, z)
        D = derivs[j - 2]
        return Rc[i].map(D)

    def comm(i, j):
        # coefficient of lambda^{-i} mu^{-j} in [R(mu), R(lambda)]
        A, B = Rc[j], Rc[i]
        return A * B - B * A

    def q_comm(i, j):
        # [diag(0, gamma(mu)), R(lambda)] = [[0, -g B], [g C, 0]]
        if j < 1:
            return Mat2(z, z, z, z)
        g = r.c[j - 1]
        B = Rc[i]
        return Mat2(z, -(g * B.e[1]), g * B.e[2], z)

    for region in ("mu", "lambda"):
        bad = None
        for i in range(n_l + 1):
            for j in range(n_m + 1):
                if region == "mu":
                    # 1/(mu - lambda) = sum_m lambda^m mu^{-m-1}
                    quo = Mat2(z, z, z, z)
                    for m in range(j):
                        quo = quo + comm(i + m, j - m - 1)
                else:
                    # 1/(mu - lambda) = -sum_m mu^m lambda^{-m-1}
                    quo = Mat2(z, z, z, z)
                    for m in range(i):
                        quo = quo - comm(i - m - 1, j + m)
                if lhs(i, j) != quo + q_comm(i, j):
                    bad = (i, j)
                    break
            if bad:
                break
        # positive powers of the subordinate variable must cancel
        stray = None
        for p in range(1, max(n_l, n_m) + 1):
            for q in range(max(n_l, n_m) + 1):
                acc = Mat2(z, z, z, z)
                if region == "mu":
                    # lambda^{p} mu^{-q}
                    for m in range(p, q):
                        acc = acc + comm(m - p, q - m - 1)
                else:
                    # lambda^{-q} mu^{p}
                    for m in range(p, q):
                        acc = acc - comm(q - m - 1, m - p)
                if acc:
                    stray = (p, q)
                    break
            if stray:
                break
        ok = bad is None and stray is None
        detail = ""
        if bad:
            detail = f"mismatch at lambda^-{bad[0]} mu^-{bad[1]}"
        elif stray:
            detail = f"uncancelled positive power, slot {stray}"
        rep.add(f"region {region}", ok, detail)
    return rep


def kernel_K(r: Resolvent) -> BiKernel:
    """K = ((1+alpha(l))(1+alpha(m)) - w_0 gamma(l) L(gamma(m)))/(l - m)."""
    R = r.ring
    A = r.one_plus_alpha()
    G = r.gamma()
    w0 = R.w(0)
    shifted = {}

    def LG(j):
        if j not in shifted:
            shifted[j] = R.shift(G[j], 1)
        return shifted[j]

    def numerator(i, j):
        out = A[i] * A[j]
        if i and j:
            out = out - w0 * (G[i] * LG(j))
        return out

    N = r.order + 1
    kern = divide_by_difference(numerator, N, N, R.zero, check_pole=A)
    kern.numerator = numerator
    kern.order = N
    return kern


def verify_K_subtractions(r: Resolvent, order: int = 6) -> Report:
    """The three pole subtractions of K each leave a regular double series."""
    if r.order + 1 < order:
        r = mr_compute(order, r.ring)
    rep = Report("K subtractions")
    K = kernel_K(r)
    A = r.one_plus_alpha()
    R = r.ring
    N = r.order + 1

    def shifted_numerator(sub):
        return lambda i, j: K.numerator(i, j) - sub(i, j)

    subs = {
        "1+alpha(lambda)": lambda i, j: A[i] if j == 0 else R.zero,
        "1+alpha(mu)": lambda i, j: A[j] if i == 0 else R.zero,
    }
    for name, sub in subs.items():
        try:
            k2 = divide_by_difference(shifted_numerator(sub), N, N, R.zero)
            pole_zero = all(not k2.pole[i] for i in range(k2.pole.order + 1))
            rep.add(name, pole_zero, "" if pole_zero else "residual diagonal pole")
        except SeriesError as exc:  # a nonzero remainder means a genuine pole remains
            rep.add(name, False, str(exc))
    # the symmetric one is the average of the two above, computed directly on doubled numerators
    try:
        k3 = divide_by_difference(
            lambda i, j: K.numerator(i, j) * 2 - (A[i] if j == 0 else R.zero) - (A[j] if i == 0 else R.zero),
            N, N, R.zero)
        ok = all(not k3.pole[i] for i in range(k3.pole.order + 1))
        rep.add("(2+alpha(lambda)+alpha(mu))/2", ok)
    except SeriesError as exc:
        rep.add("(2+alpha(lambda)+alpha(mu))/2", False, str(exc))
    return rep
