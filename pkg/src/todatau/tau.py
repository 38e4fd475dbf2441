"""Canonical tau-structure, Toda derivations and k-point correlators over the ring.

Two independent generating-function pipelines are provided: the trace of
cyclic resolvent products (``correlators_mr``) and cyclic products of the
local kernel K (``correlators_kernel``).  ``omega_multi`` applies the flows
to the two-point functions directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .report import Report
from .resolvent import ALGEBRA, DiffRing, Resolvent, kernel_K, mr_compute
from .ring import AdmissibleDerivation, TodaPoly, apply_derivation
from .series import BiKernel, Mat2, TruncSeries, TruncationError, cyclic_sum, series_invert


class RegionMismatch(ArithmeticError):
    pass


class StabilityError(ArithmeticError):
    """Recomputing at a higher truncation order changed a retained coefficient."""


def toda_derivation(r: Resolvent, k: int) -> AdmissibleDerivation:
    """D_k with D_k(v_0) = (L - 1) a_{k+1} and D_k(w_0) = w_0 (L - 1) c_{k+1}."""
    if r.order < k + 1:
        r = mr_compute(k + 1, r.ring)
    R = r.ring
    a, c = r.a[k + 1], r.c[k + 1]
    img_v = R.shift(a, 1) - a
    img_w = R.w(0) * (R.shift(c, 1) - c)
    return AdmissibleDerivation(img_v, img_w)


def resolvent_kernel(r: Resolvent) -> BiKernel:
    """R(lambda)/(lambda - mu) as a matrix kernel with no regular part."""
    z = r.ring.zero
    return BiKernel(r.matrix(), None, zero=Mat2(z, z, z, z), matrix=True)


def ledger_order(k: int, index_sum: int) -> int:
    """Resolvent order used to extract indices summing to ``index_sum``."""
    return index_sum + 2 * k + 2


def index_tuples(k: int, cap: int):
    """Sorted index tuples of length k with entries in 0..cap."""
    return list(itertools.combinations_with_replacement(range(cap + 1), k))


def _extract(build, k, indices, shift, order, stable, region=None):
    """Run ``build(order)`` -> (kernel, sign); extract, optionally recheck at order+2."""
    targets = [tuple(i + shift for i in idx) for idx in indices]

    def run(o):
        kernel, sign = build(o)
        vals = cyclic_sum(kernel, targets, sign=sign, region=region)
        return {idx: vals[t] for idx, t in zip(indices, targets)}

    out = run(order)
    if stable:
        again = run(order + 2)
        bad = [idx for idx in indices if out[idx] != again[idx]]
        if bad:
            raise StabilityError(f"coefficients {bad[:3]} changed between orders {order} and {order + 2}")
    return out


def correlators_mr(k: int, cap: int, ring: DiffRing = ALGEBRA, indices=None, order=None,
                   stable=True, region=None, shift=2) -> dict:
    """Omega_{i_1..i_k} from minus the cyclic sum of traces of resolvent products.

    Returns ``{sorted index tuple: value}`` for all tuples with entries <= cap
    (or for ``indices`` if given).
    """
    indices = index_tuples(k, cap) if indices is None else [tuple(i) for i in indices]
    if order is None:
        order = ledger_order(k, max(sum(i) for i in indices))

    def build(o):
        return resolvent_kernel(mr_compute(o, ring)), -1

    return _extract(build, k, indices, shift, order, stable, region)


def normalized_kernel_K(r: Resolvent) -> BiKernel:
    """K(lambda, mu)/(1 + alpha(lambda)): pole coefficient 1."""
    K = kernel_K(r)
    R = r.ring
    inv = series_invert(r.one_plus_alpha())

    def regular(i, j):
        s = R.zero
        for l in range(i):
            s = s + inv[l] * K.regular(i - l, j)
        return s

    return BiKernel(TruncSeries.constant(R.one, R.zero), regular, max_i=min(K.max_i, inv.order + 1),
                    max_total=K.max_total, zero=R.zero)


def correlators_kernel(k: int, cap: int, ring: DiffRing = ALGEBRA, indices=None, order=None,
                       stable=True, region=None) -> dict:
    """Omega_{i_1..i_k} from cyclic products of the local kernel K."""
    indices = index_tuples(k, cap) if indices is None else [tuple(i) for i in indices]
    if order is None:
        order = ledger_order(k, max(sum(i) for i in indices))
    sign = (-1) ** (k - 1)

    def build(o):
        return normalized_kernel_K(mr_compute(o, ring)), sign

    return _extract(build, k, indices, 2, order, stable, region)


@dataclass
class TauTables:
    omega: dict
    S: dict
    order: int
    P: int = 0


def tau_tables(r: Resolvent, P: int) -> TauTables:
    """Omega_{p,q} and S_p for p, q <= P.

    S_p is read off L(gamma); Omega_{p,q} is the two-point coefficient,
    extracted in both expansion regions, which must agree.
    """
    need = 2 * P + 1
    if r.order < need:
        raise TruncationError(f"two-point functions up to index {P} need resolvent order {need}, have {r.order}", need)
    R = r.ring
    S = {p: R.shift(r.c[p + 1], 1) for p in range(P + 1)}
    pairs = index_tuples(2, P)
    kernel = resolvent_kernel(r)
    targets = [(p + 2, q + 2) for p, q in pairs]
    fwd = cyclic_sum(kernel, targets, sign=-1, region=(0, 1))
    bwd = cyclic_sum(kernel, targets, sign=-1, region=(1, 0))
    omega = {}
    for (p, q), t in zip(pairs, targets):
        if fwd[t] != bwd[t]:
            raise RegionMismatch(f"two-point coefficient ({p}, {q}) depends on the expansion region")
        omega[(p, q)] = omega[(q, p)] = fwd[t]
    return TauTables(omega, S, r.order, P)


class TauStructure:
    """Lazily grown tau-structure data for one difference ring."""

    def __init__(self, ring: DiffRing = ALGEBRA):
        self.ring = ring
        self._omega = {}
        self._derivs = {}

    def resolvent(self, N: int) -> Resolvent:
        return mr_compute(N, self.ring)

    def derivation(self, k: int) -> AdmissibleDerivation:
        if k not in self._derivs:
            self._derivs[k] = toda_derivation(self.resolvent(k + 1), k)
        return self._derivs[k]

    def S(self, p: int):
        return self.ring.shift(self.resolvent(p + 1).c[p + 1], 1)

    def omega2(self, p: int, q: int):
        key = (min(p, q), max(p, q))
        if key not in self._omega:
            r = self.resolvent(p + q + 1)
            kernel = resolvent_kernel(r)
            t = (p + 2, q + 2)
            val = cyclic_sum(kernel, [t], sign=-1)[t]
            self._omega[key] = val
        return self._omega[key]

    def omega_multi(self, indices, seed=None):
        """D_{p_1} ... D_{p_{m-2}} (Omega_{p_{m-1}, p_m}); ``seed`` picks the two seed positions."""
        idx = list(indices)
        if len(idx) < 2:
            raise ValueError("need at least two indices")
        if seed is None:
            seed = (len(idx) - 2, len(idx) - 1)
        i, j = seed
        if i == j:
            raise ValueError("seed positions must differ")
        val = self.omega2(idx[i], idx[j])
        rest = [p for t, p in enumerate(idx) if t not in (i, j)]
        for p in reversed(rest):
            val = apply_derivation(self.derivation(p), val)
        return val


_STRUCTURES: dict = {}


def tau_structure(ring: DiffRing = ALGEBRA) -> TauStructure:
    ts = _STRUCTURES.get(ring.key)
    if ts is None:
        ts = _STRUCTURES[ring.key] = TauStructure(ring)
    return ts


def omega_multi(indices, ring: DiffRing = ALGEBRA, check_seeds: bool = True):
    """Multi-point polynomial; with ``check_seeds`` every seed choice must agree."""
    ts = tau_structure(ring)
    val = ts.omega_multi(indices)
    if check_seeds and len(indices) > 2:
        for seed in itertools.combinations(range(len(indices)), 2):
            if ts.omega_multi(indices, seed) != val:
                raise ArithmeticError(f"seed dependence in Omega{tuple(indices)} at seed {seed}")
    return val


def verify_tau_axioms(P: int, ring: DiffRing = ALGEBRA) -> Report:
    """Symmetry, flow compatibility and the two S-relations for indices <= P."""
    ts = tau_structure(ring)
    R = ring
    rep = Report(f"tau-structure axioms (indices <= {P})")
    r = ts.resolvent(2 * P + 1)
    tables = tau_tables(r, P)
    for (p, q), val in tables.omega.items():
        if p <= q and val != ts.omega2(p, q):
            rep.add(f"Omega table ({p},{q})", False, "table and lazy value differ")
    for p, q, s in itertools.product(range(P + 1), repeat=3):
        if q < s:
            ok = apply_derivation(ts.derivation(s), ts.omega2(p, q)) == apply_derivation(ts.derivation(q), ts.omega2(p, s))
            rep.add(f"D_{s} Omega_{p},{q} = D_{q} Omega_{p},{s}", ok)
    for p, q in itertools.product(range(P + 1), repeat=2):
        om = ts.omega2(p, q)
        ok = R.shift(om, 1) - om == apply_derivation(ts.derivation(q), ts.S(p))
        rep.add(f"(L-1) Omega_{p},{q} = D_{q} S_{p}", ok)
    w0 = R.w(0)
    for p in range(P + 1):
        sp = ts.S(p)
        ok = w0 * (sp - R.shift(sp, -1)) == apply_derivation(ts.derivation(p), w0)
        rep.add(f"w_0 (1 - L^-1) S_{p} = D_{p} w_0", ok)
    if ring is ALGEBRA:
        for (p, q), val in tables.omega.items():
            if p <= q:
                rep.add(f"canonical Omega_{p},{q}", not val.constant_term())
        for p in range(P + 1):
            rep.add(f"canonical S_{p}", not ts.S(p).constant_term())
    return rep


def verify_commutativity(P: int) -> Report:
    """D_p D_q = D_q D_p on v_0 and w_0 for p, q <= P."""
    ts = tau_structure(ALGEBRA)
    rep = Report(f"flow commutativity (indices <= {P})")
    v0, w0 = TodaPoly.v(0), TodaPoly.w(0)
    for p in range(P + 1):
        for q in range(p + 1, P + 1):
            Dp, Dq = ts.derivation(p), ts.derivation(q)
            for name, x in (("v_0", v0), ("w_0", w0)):
                ok = apply_derivation(Dp, apply_derivation(Dq, x)) == apply_derivation(Dq, apply_derivation(Dp, x))
                rep.add(f"[D_{p}, D_{q}] {name}", ok)
    return rep
