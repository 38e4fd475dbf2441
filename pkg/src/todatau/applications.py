"""GUE ribbon-graph correlators and stationary GW invariants of P^1.

The GUE side has two kernels (the closed-form A(lambda, mu, n) series and
the reduced kernel of the pair from f = 0, g = n) and an independent
brute-force oracle summing over Wick pairings.  The GW side runs the
generic wave-pair pipeline on f = n e + e/2, g = 1 at n = 0.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb, factorial

from .exact import EpsScalar, LatticePoly, Rational
from .report import Report
from .resolvent import lattice_ring
from .series import BiKernel, TruncSeries, cyclic_sum, series_invert
from .tau import correlators_mr
from .wave import build_pair, correlators_wave, reduced_kernel

GUE_F = LatticePoly.const(0)
GUE_G = LatticePoly.n()


def gw_data():
    n, e = LatticePoly.n(), LatticePoly.eps()
    return n * e + e * Rational(1, 2), LatticePoly.const(1)


def _double_factorial(m: int) -> int:
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def gue_closed_coefficient(i: int, j: int) -> LatticePoly:
    """Coefficient of lambda^{-i} mu^{-j} in the closed GUE series A(lambda, mu, n)."""
    if i < 1 or (i + j - 1) % 2:
        return LatticePoly.const(0)
    k = (i + j - 1) // 2
    p = i - 1
    if k < 1 or p > 2 * k - 1:
        return LatticePoly.const(0)
    n = LatticePoly.n()
    prod = LatticePoly.const(1)
    for t in range(-p, 2 * k - p):
        prod = prod * (n + t)
    sign = (-1) ** (p + (p + 1) // 2)
    c = Rational(_double_factorial(2 * k - 1), factorial(2 * k)) * sign * comb(k - 1, p // 2)
    return prod * c


def gue_kernel_closed(N: int) -> BiKernel:
    """1/(lambda - mu) + A(lambda, mu, n) with A known to total order N."""
    zero = LatticePoly.const(0)
    return BiKernel(TruncSeries.constant(LatticePoly.const(1), zero), gue_closed_coefficient,
                    max_total=N, zero=zero)


def gue_correlators(degrees, method: str = "closed"):
    """Connected <tr M^{i_1} ... tr M^{i_k}> as a polynomial in n.

    The generating series uses lambda^{-i-1}; that is the same exponent as
    the Omega convention lambda^{-(i-1)-2}, so degree i corresponds to the
    Omega index i - 1.
    """
    degrees = tuple(degrees)
    k = len(degrees)
    if k < 2 or min(degrees) < 1:
        raise ValueError("need k >= 2 degrees, each >= 1")
    target = tuple(d + 1 for d in degrees)
    if method == "closed":
        total = sum(target)
        val = cyclic_sum(gue_kernel_closed(total + 2), [target], sign=(-1) ** (k - 1))[target]
        return val
    indices = [tuple(d - 1 for d in degrees)]
    if method == "wave":
        return correlators_wave((GUE_F, GUE_G), k, 0, indices=indices)[indices[0]]
    if method == "mr":
        return correlators_mr(k, 0, ring=lattice_ring(GUE_F, GUE_G), indices=indices)[indices[0]]
    raise ValueError(f"unknown method {method!r}")


def _matchings(items):
    if not items:
        yield []
        return
    first = items[0]
    for idx in range(1, len(items)):
        rest = items[1:idx] + items[idx + 1:]
        for m in _matchings(rest):
            yield [(first, items[idx])] + m


def _set_partitions(elements):
    if not elements:
        yield []
        return
    first, rest = elements[0], elements[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


@lru_cache(maxsize=None)
def _face_polynomial(degrees: tuple) -> tuple:
    """Counts c_f of Wick pairings with f faces, as a tuple indexed by f."""
    half_edges = []
    rotation = {}
    for v, d in enumerate(degrees):
        hs = [(v, t) for t in range(d)]
        for t, h in enumerate(hs):
            rotation[h] = hs[(t + 1) % d]
        half_edges.extend(hs)
    counts = {}
    if len(half_edges) % 2:
        return ()
    for m in _matchings(half_edges):
        inv = {}
        for a, b in m:
            inv[a] = b
            inv[b] = a
        seen = set()
        faces = 0
        for h in half_edges:
            if h in seen:
                continue
            faces += 1
            x = h
            while x not in seen:
                seen.add(x)
                x = rotation[inv[x]]
        counts[faces] = counts.get(faces, 0) + 1
    top = max(counts, default=-1)
    return tuple(counts.get(f, 0) for f in range(top + 1))


def _full_moment(degrees: tuple, n: int) -> int:
    poly = _face_polynomial(tuple(sorted(degrees)))
    return sum(c * n ** f for f, c in enumerate(poly))


def gue_wick_oracle(degrees, n: int, connected: bool = True) -> Rational:
    """GUE moment from explicit Wick pairings with weight n^{#faces}.

    Faces are the cycles of (vertex rotation) o (pairing involution).  The
    connected part is obtained by Moebius inversion over set partitions of
    the vertices.
    """
    degrees = tuple(degrees)
    if n < 1:
        raise ValueError("n must be a positive integer")
    if sum(degrees) % 2:
        return Rational(0)
    if not connected:
        return Rational(_full_moment(degrees, n))
    total = Rational(0)
    for part in _set_partitions(list(range(len(degrees)))):
        b = len(part)
        term = Rational((-1) ** (b - 1) * factorial(b - 1))
        for block in part:
            term *= _full_moment(tuple(degrees[v] for v in block), n)
        total += term
    return total


def _binom_poly(shift: int, m: int) -> LatticePoly:
    """C(n + shift, m) as a polynomial in n."""
    n = LatticePoly.n()
    out = LatticePoly.const(1)
    for t in range(m):
        out = out * (n + (shift - t))
    return out * Rational(1, factorial(m))


def binomial_identity_lhs(j: int) -> LatticePoly:
    n = LatticePoly.n()
    first = LatticePoly.const(0)
    for j1 in range(j + 2):
        first = first + _binom_poly(2 * j1 - 1, 2 * j + 1) * (Rational((-1) ** j1, 2) * comb(j + 1, j1))
    second = LatticePoly.const(0)
    for j1 in range(j + 1):
        second = second + _binom_poly(2 * j1, 2 * j + 1) * ((-1) ** j1 * comb(j, j1))
    return n * first * Rational(1, j + 1) + second


def verify_binomial_identities(J: int) -> Report:
    rep = Report(f"binomial identities (j <= {J})")
    for j in range(J + 1):
        lhs = binomial_identity_lhs(j)
        rep.add(f"j={j}", lhs.is_zero(), "" if lhs.is_zero() else f"left side = {lhs}")
    return rep


def gw_correlators(indices, genus_max: int, method: str = "wave") -> EpsScalar:
    """<tau_{i_1}(w) ... tau_{i_k}(w)>(eps), truncated above eps^{2G-2}.

    Odd powers of eps are rejected as an internal error.
    """
    indices = tuple(indices)
    k = len(indices)
    if k < 2:
        raise ValueError("need at least two insertions")
    f, g = gw_data()
    key = tuple(sorted(indices))
    if method == "wave":
        omega = correlators_wave((f, g), k, 0, indices=[key])[key]
    elif method == "mr":
        omega = correlators_mr(k, 0, ring=lattice_ring(f, g), indices=[key])[key]
    else:
        raise ValueError(f"unknown method {method!r}")
    val = omega.evaluate(0)
    norm = 1
    for i in indices:
        norm *= factorial(i + 1)
    val = val * EpsScalar({-k: Rational(1, norm)})
    odd = [e for e in val.terms if e % 2]
    if odd:
        raise ArithmeticError(f"odd eps powers {odd} in a GW correlator")
    return EpsScalar({e: c for e, c in val.terms.items() if e <= 2 * genus_max - 2})


def bessel_gauge_series(N: int) -> TruncSeries:
    """G(lambda) = sum_m (-1)^m e^{-2m} / (m! (lambda/e + 1/2)_m), expanded in 1/lambda.

    This is the n = 0 value of the Bessel type A wave function; the closed GW
    kernel is the recursion kernel regauged by G(lambda)/G(mu).
    """
    zero = EpsScalar()
    one = EpsScalar.const(1)
    total = TruncSeries([one], N, zero)
    term = TruncSeries([one], N, zero)
    for m in range(1, N + 1):
        l = m - 1
        # 1/(lambda/e + l + 1/2) = (e/lambda) sum_t (-(l + 1/2) e / lambda)^t
        c = -(Rational(2 * l + 1, 2))
        factor = TruncSeries([zero] + [EpsScalar({t + 1: c ** t}) for t in range(N)], N, zero)
        term = term * factor * Rational(1, m)
        total = total + term * EpsScalar({-2 * m: (-1) ** m})
    return total


def closed_gw_slot(p: int, q: int, k: int) -> Rational:
    """Coefficient of e^{p+q+1-2k} in the lambda^{-(q+1)} mu^{-(p+1)} entry of the closed kernel."""
    s = Rational(0)
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            poch = 1
            for t in range(k - 1):
                poch *= i + j - 2 * k + t
            s += Rational((-1) ** (i + j) * poch, factorial(i - 1) * factorial(j - 1) * factorial(k - i) * factorial(k - j)) \
                * Rational(2 * i - 1, 2) ** p * Rational(2 * j - 1, 2) ** q
    return -((-1) ** (q + 1)) * s / factorial(k)


def gw_closed_kernel_regular(N: int) -> dict:
    """Regular part of the recursion kernel at n = 0 in the Bessel gauge, total order <= N."""
    f, g = gw_data()
    pair = build_pair(f, g, N)
    D = reduced_kernel(pair)
    G = bessel_gauge_series(N)
    Ginv = series_invert(G)
    zero = EpsScalar()
    reg = {(i, j): D.regular(i, j).evaluate(0) for i in range(1, N + 1) for j in range(1, N + 1 - i)}
    # G(l)/G(m) (1/(l - m) + H) = 1/(l - m) + (G(l) Ginv(m) - 1)/(l - m) + G(l) Ginv(m) H
    out = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1 - i):
            s = zero
            for a in range(i):
                for b in range(j):
                    h = reg.get((i - a, j - b))
                    if h:
                        s = s + G[a] * Ginv[b] * h
            out[(i, j)] = s
    # (G(x) Ginv(y) - 1)/(l - m) with x = 1/l, y = 1/m is x y (P(x, y) - 1)/(y - x)
    cross = {(a, b): G[a] * Ginv[b] for a in range(N + 1) for b in range(N + 1 - a)}

    def q(i, j):
        # quotient of (P - 1)/(y - x) at x^i y^j
        acc = zero
        for l in range(i + 1):
            key = (i - l, j + 1 + l)
            if key in cross:
                acc = acc + cross[key]
        return acc

    for i in range(1, N + 1):
        for j in range(1, N + 1 - i):
            out[(i, j)] = out[(i, j)] + q(i - 1, j - 1)
    return out


def gw_kernel_check(max_pq: int = 4, max_k: int = 3) -> Report:
    """Closed hypergeometric kernel slots versus the recursion-route kernel."""
    rep = Report(f"GW closed kernel (p+q <= {max_pq}, k <= {max_k})")
    N = max_pq + 2
    reg = gw_closed_kernel_regular(N)
    for p in range(max_pq + 1):
        for q in range(max_pq + 1 - p):
            entry = reg[(q + 1, p + 1)]
            for k in range(1, max_k + 1):
                e = p + q + 1 - 2 * k
                ok = entry[e] == closed_gw_slot(p, q, k)
                rep.add(f"(p={p}, q={q}, k={k})", ok, "" if ok else f"recursion {entry[e]} vs closed {closed_gw_slot(p, q, k)}")
            # e-powers never produced by the closed form must be absent
            allowed = {p + q + 1 - 2 * k for k in range(1, p + q + 2)}
            stray = [x for x in entry.terms if x not in allowed]
            rep.add(f"(p={p}, q={q}) support", not stray, "" if not stray else f"unexpected powers {stray}")
    return rep


def gw_pole_datum() -> LatticePoly:
    """Pole coefficient of the GW reduced kernel (1 on a normalized pair)."""
    f, g = gw_data()
    return reduced_kernel(build_pair(f, g, 2)).pole[0]


def all_degree_tuples(k: int, max_total: int):
    """Sorted degree tuples (each >= 1) of length k with even sum <= max_total."""
    out = []
    for t in itertools.combinations_with_replacement(range(1, max_total + 1), k):
        if sum(t) <= max_total and sum(t) % 2 == 0:
            out.append(t)
    return out


def verify_gue_closed(N: int = 8) -> Report:
    """Reduced kernel of the GUE pair against the closed series, total order <= N."""
    rep = Report(f"GUE reduced kernel vs closed series (total order {N})")
    D = reduced_kernel(build_pair(GUE_F, GUE_G, N + 1))
    rep.add("pole coefficient 1", D.pole.first_difference(TruncSeries.constant(LatticePoly.const(1), LatticePoly.const(0)), N) is None)
    for i in range(1, N):
        for j in range(1, N + 1 - i):
            a, b = D.regular(i, j), gue_closed_coefficient(i, j)
            rep.add(f"({i}, {j})", a == b, "" if a == b else f"pair {a} vs closed {b}")
    return rep


def verify_gue_wick(max_k: int = 3, max_total: int = 8, samples=None) -> Report:
    """Kernel-route GUE correlators against the Wick oracle at sample sizes n.

    With no ``samples`` given, n runs from 1 past the degree bound
    1 + sum(i)/2 + k, so agreement is a polynomial identity.
    """
    rep = Report(f"GUE correlators vs Wick pairings (k <= {max_k}, total <= {max_total})")
    for k in range(2, max_k + 1):
        for degrees in all_degree_tuples(k, max_total):
            poly = gue_correlators(degrees)
            ns = samples if samples is not None else range(1, 3 + sum(degrees) // 2 + k)
            bad = [n for n in ns if poly.evaluate(n)[0] != gue_wick_oracle(degrees, n) or not poly.evaluate(n).is_constant()]
            rep.add(f"{degrees}", not bad, "" if not bad else f"differs at n = {bad}")
    return rep


def verify_gue_routes(k: int, cap: int) -> Report:
    """Wave-pair route versus MR route on f = 0, g = n for all index tuples <= cap."""
    rep = Report(f"GUE wave route vs MR route (k = {k}, indices <= {cap})")
    wave = correlators_wave((GUE_F, GUE_G), k, cap)
    mr = correlators_mr(k, cap, ring=lattice_ring(GUE_F, GUE_G))
    for idx in wave:
        ok = wave[idx] == mr[idx]
        rep.add(f"{idx}", ok, "" if ok else f"{wave[idx]} vs {mr[idx]}")
    return rep


def verify_gw_routes(k: int = 2, cap: int = 4) -> Report:
    """Wave route versus MR route on the GW data, plus the eps parity at n = 0."""
    rep = Report(f"GW wave route vs MR route (k = {k}, indices <= {cap})")
    f, g = gw_data()
    wave = correlators_wave((f, g), k, cap)
    mr = correlators_mr(k, cap, ring=lattice_ring(f, g))
    for idx in wave:
        ok = wave[idx] == mr[idx]
        rep.add(f"{idx}", ok, "" if ok else f"{wave[idx]} vs {mr[idx]}")
        at0 = wave[idx].evaluate(0)
        odd = sorted(e for e in at0.terms if (e - k) % 2)
        rep.add(f"{idx} parity", not odd, "" if not odd else f"odd genus powers {odd}")
    return rep
