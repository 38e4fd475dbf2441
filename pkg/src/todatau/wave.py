"""Wave-function pairs built from initial data (f, g) and their reduced kernel.

The pair is stored in reduced form: chi_A and chi_B are the parts of the
type A and type B wave functions left after removing lambda^{+-n} and the
e^{-s(n)} factor.  In these variables the normalization reads

    chi_A(l, n) chi_B(l, n-1) - g(n) l^-2 chi_A(l, n-1) chi_B(l, n) = 1

and the kernel whose cyclic products give the correlators is

    D~(l, m) = [chi_A(l, n) chi_B(m, n-1) - g(n) (l m)^-1 chi_A(l, n-1) chi_B(m, n)] / (l - m).
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact import LatticePoly, Rational, antidifference, pochhammer, shift_n
from .report import Report
from .resolvent import DiffRing, Resolvent, kernel_K, lattice_ring, mr_compute
from .series import (BiKernel, TruncSeries, cyclic_sum, divide_by_difference, expand_pole,
                     series_exp, series_invert)
from .tau import StabilityError, index_tuples, ledger_order


class PairError(ArithmeticError):
    pass


def _lp(x) -> LatticePoly:
    return x if isinstance(x, LatticePoly) else LatticePoly.const(x)


_ZERO = LatticePoly.const(0)
_ONE = LatticePoly.const(1)


def _series(coeffs, order):
    return TruncSeries(coeffs, order, _ZERO)


def _shift_series(s: TruncSeries, k: int) -> TruncSeries:
    return s.map(lambda c: shift_n(c, k))


def ring_yz_recursion(R: DiffRing, N: int):
    """y_1..y_N and z_1..z_N over a difference ring, with f = v_0 and g = w_0.

    Each step isolates the linear term of the exponential identities; the
    identities themselves are re-checked to order N at the end.
    """
    zero, one = R.zero, R.one
    f, g = R.v(0), R.w(0)
    f1, g2 = R.v(1), R.w(2)

    def series(c, order):
        return TruncSeries(c, order, zero)

    y = [zero]
    z = [zero]
    for k in range(N):
        # coefficient of lambda^{-k}: [e^y]_{k+1} + f delta_{k0} + g [e^{-y(n-1)}]_{k-1} = 0
        nonlin_y = series_exp(series(y + [zero], k + 1), one)[k + 1]
        tail = zero
        if k >= 1:
            tail = g * series_exp(series([-R.shift(c, -1) for c in y[:k]], k - 1), one)[k - 1]
        y.append(-nonlin_y - (f if k == 0 else zero) - tail)
        # [e^{-z}]_{k+1} + f(n+1) delta_{k0} + g(n+2) [e^{z(n+1)}]_{k-1} = 0
        nonlin_z = series_exp(series([-c for c in z] + [zero], k + 1), one)[k + 1]
        tail = zero
        if k >= 1:
            tail = g2 * series_exp(series([R.shift(c, 1) for c in z[:k]], k - 1), one)[k - 1]
        z.append(nonlin_z + (f1 if k == 0 else zero) + tail)
    _check_exponential_identities(R, y, z, N)
    return y[1:], z[1:]


def yz_recursion(f, g, N: int):
    """Coefficients y_1..y_N and z_1..z_N of the two log-derivative series for data (f, g)."""
    return ring_yz_recursion(lattice_ring(_lp(f), _lp(g)), N)


def _check_exponential_identities(R, y, z, N):
    zero, one = R.zero, R.one
    f, g = R.v(0), R.w(0)
    ys = TruncSeries(y, N, zero)
    zs = TruncSeries(z, N, zero)
    ey = series_exp(ys, one)
    emy = series_exp(ys.map(lambda c: -R.shift(c, -1)), one)
    emz = series_exp(-zs, one)
    ezp = series_exp(zs.map(lambda c: R.shift(c, 1)), one)
    for k in range(N):
        lhs_y = ey[k + 1] + (f if k == 0 else zero) + (g * emy[k - 1] if k >= 1 else zero)
        # the z identity, shifted by one lattice step
        lhs_z = emz[k + 1] + (R.v(1) if k == 0 else zero) + (R.w(2) * ezp[k - 1] if k >= 1 else zero)
        if lhs_y or lhs_z:
            raise PairError(f"exponential identity fails at lambda^-{k}")


@dataclass
class WavePair:
    chi_A: TruncSeries
    chi_B: TruncSeries
    f: LatticePoly
    g: LatticePoly
    order: int

    def pair_defect(self) -> TruncSeries:
        """chi_A L^-1 chi_B - g lambda^-2 L^-1 chi_A chi_B (1 for a pair)."""
        return _defect(self.chi_A, self.chi_B, self.g, self.order)

    def regauged(self, G: TruncSeries) -> WavePair:
        """chi_A -> G chi_A, chi_B -> chi_B / G for a constant series G."""
        G = G.with_order(self.order) if G.exact else G.truncate(self.order)
        G = G.map(_lp)
        return WavePair(self.chi_A * G, self.chi_B * series_invert(G), self.f, self.g, self.order)

    def at(self, n) -> tuple:
        """Both series evaluated at an integer n (EpsScalar coefficients)."""
        return (self.chi_A.map(lambda c: c.evaluate(n)), self.chi_B.map(lambda c: c.evaluate(n)))


def _defect(A: TruncSeries, B: TruncSeries, g, N) -> TruncSeries:
    Am, Bm = _shift_series(A, -1), _shift_series(B, -1)
    return (A * Bm - (Am * B * g).shift_power(2).truncate(N)).truncate(N)


def build_pair(f, g, N: int) -> WavePair:
    """Normalized pair from initial data, with chi_A fixed by q(0) = 0 antidifferences."""
    f, g = _lp(f), _lp(g)
    if g.is_zero():
        raise ValueError("g must not vanish identically")
    y, z = yz_recursion(f, g, N)
    ya = _series([_ZERO] + [antidifference(c) for c in y], N)
    za = _series([_ZERO] + [antidifference(c) for c in z], N)
    A = series_exp(ya, _ONE)
    B = series_exp(za, _ONE)
    E = _defect(A, B, g, N)
    for i, c in enumerate(E.coeffs):
        if not c.is_constant():
            raise PairError(f"pair defect coefficient of lambda^-{i} depends on n: {c}")
    B = B * series_invert(E)
    pair = WavePair(A, B, f, g, N)
    if pair.pair_defect().first_difference(TruncSeries.constant(_ONE, _ZERO), N) is not None:
        raise PairError("normalization failed")
    return pair


def gue_pair_closed(N: int) -> WavePair:
    """Closed-form GUE pair for f = 0, g = n (Pochhammer coefficients)."""
    n = LatticePoly.n()
    A = [_ZERO] * (N + 1)
    B = [_ZERO] * (N + 1)
    fact = 1
    for j in range(N // 2 + 1):
        if j:
            fact *= j
        denom = Rational(1, 2 ** j * fact)
        A[2 * j] = pochhammer(n - 2 * j + 1, 2 * j) * denom * (-1) ** j
        B[2 * j] = pochhammer(n + 1, 2 * j) * denom
    A[0] = B[0] = _ONE
    return WavePair(_series(A, N), _series(B, N), _ZERO, n, N)


def reduced_kernel(p: WavePair) -> BiKernel:
    """D~(lambda, mu) with pole coefficient exactly 1."""
    A, B = p.chi_A, p.chi_B
    Am, Bm = _shift_series(A, -1), _shift_series(B, -1)
    g = p.g
    N = p.order

    def numerator(i, j):
        out = A[i] * Bm[j]
        if i and j:
            out = out - g * (Am[i - 1] * B[j - 1])
        return out

    kern = divide_by_difference(numerator, N, N, _ZERO, check_pole=TruncSeries.constant(_ONE, _ZERO))
    kern.numerator = numerator
    return kern


def correlators_wave(p_or_data, k: int, cap: int, indices=None, order=None, stable=True,
                     region=None, shift=2) -> dict:
    """k-point partial correlators Omega_{i_1..i_k}(n) from the reduced kernel.

    ``p_or_data`` is either a ``WavePair`` (used as is, without the stability
    recompute) or a tuple ``(f, g)`` from which pairs are built at the ledger
    order and at the ledger order + 2.
    """
    indices = index_tuples(k, cap) if indices is None else [tuple(i) for i in indices]
    sign = (-1) ** (k - 1)
    targets = [tuple(i + shift for i in idx) for idx in indices]

    def run(pair):
        vals = cyclic_sum(reduced_kernel(pair), targets, sign=sign, region=region)
        return {idx: vals[t] for idx, t in zip(indices, targets)}

    if isinstance(p_or_data, WavePair):
        return run(p_or_data)
    f, g = p_or_data
    if order is None:
        order = ledger_order(k, max(sum(i) for i in indices))
    out = run(build_pair(f, g, order))
    if stable:
        again = run(build_pair(f, g, order + 2))
        bad = [i for i in indices if out[i] != again[i]]
        if bad:
            raise StabilityError(f"coefficients {bad[:3]} changed between orders {order} and {order + 2}")
    return out


def projector_entries(p: WavePair):
    """The four entries of Psi diag(1, 0) Psi^{-1}, in reduced variables."""
    A, B, g, N = p.chi_A, p.chi_B, p.g, p.order
    Am, Bm = _shift_series(A, -1), _shift_series(B, -1)
    m11 = (A * Bm).truncate(N)
    m12 = -(A * B * g).shift_power(1).truncate(N)
    m21 = (Am * Bm).shift_power(1).truncate(N)
    m22 = -(Am * B * g).shift_power(2).truncate(N)
    return m11, m12, m21, m22


def verify_rp_initial(p: WavePair, r: Resolvent = None, N: int = None) -> Report:
    """Projector built from the pair equals the resolvent on the initial data."""
    N = p.order if N is None else min(N, p.order)
    ring = lattice_ring(p.f, p.g)
    if r is None or r.ring.key != ring.key:
        r = mr_compute(N, ring)
    rep = Report("projector vs resolvent")
    m11, m12, m21, m22 = projector_entries(p)
    onea = r.one_plus_alpha()
    al = r.alpha()
    names = (("(1,1) = 1 + alpha", m11, onea), ("(1,2) = beta", m12, r.beta()),
             ("(2,1) = gamma", m21, r.gamma()), ("(2,2) = -alpha", m22, -al))
    for name, lhs, rhs in names:
        bad = lhs.first_difference(rhs, N)
        rep.add(name, bad is None, "" if bad is None else f"differs at lambda^-{bad}")
    return rep


def _bi_product(F1: TruncSeries, F2: TruncSeries, num, i, j, zero):
    """Coefficient (i, j) of F1(lambda) F2(mu) num(lambda, mu)."""
    s = zero
    for a in range(i + 1):
        for b in range(j + 1):
            c = F1[a] * F2[b]
            if c:
                s = s + c * num(i - a, j - b)
    return s


def verify_K_D_relation(p: WavePair, r: Resolvent = None, N: int = None) -> Report:
    """K = (1 + alpha(lambda)) chi_A(mu)/chi_A(lambda) D~ on the initial data."""
    N = p.order if N is None else min(N, p.order)
    ring = lattice_ring(p.f, p.g)
    if r is None or r.ring.key != ring.key:
        r = mr_compute(N, ring)
    rep = Report("K versus D")
    K = kernel_K(r)
    D = reduced_kernel(p)
    onea = r.one_plus_alpha()
    F1 = (onea * series_invert(p.chi_A)).truncate(N)
    F2 = p.chi_A
    order = min(N, r.order + 1)

    def rhs_num(i, j):
        return _bi_product(F1, F2, D.numerator, i, j, _ZERO)

    bad = None
    for i in range(order + 1):
        for j in range(order + 1 - i):
            if K.numerator(i, j) != rhs_num(i, j):
                bad = (i, j)
                break
        if bad:
            break
    rep.add("numerators", bad is None, "" if bad is None else f"differs at {bad}")
    rhs = divide_by_difference(rhs_num, order, order, _ZERO, check_pole=onea)
    rep.add("pole coefficients", rhs.pole.first_difference(K.pole, order) is None)
    for region in ("lambda", "mu"):
        ek = expand_pole(K, region, order)
        er = expand_pole(rhs, region, order)
        rep.add(f"region {region}", ek == er)
    return rep
