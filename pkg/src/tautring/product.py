"""Multiplication of decorated stratum classes.

The product of two stratum classes [S_A], [S_B] on Mbar_{g,n} is computed by
excess intersection on common degenerations.  For each stable graph G with at
most e_A + e_B edges, a generic structure is a pair of edge subsets
K_A, K_B of E(G) with K_A union K_B = E(G), together with isomorphisms

    phi_A : graph(S_A) -> G / (E - K_A),    phi_B : graph(S_B) -> G / (E - K_B)

(contract the complementary edges).  Each structure contributes the
decoration of G obtained by transporting both decorations along the
contractions (psi classes land on the corresponding legs and surviving
half-edges; a kappa_a on a vertex distributes as a sum over the preimage
vertices) times the excess factor

    prod over e in K_A cap K_B of (- psi_h(e) - psi_h'(e)),

expanded into monomials.  With stratum classes normalized by 1/|Aut|, the
total product is 1/(|Aut A| * |Aut B|) times the sum over all structures of
the resulting canonical decorated strata.  Monomials exceeding a vertex
moduli dimension vanish and are pruned.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterator

from .graphs import (
    DomainError,
    StableGraph,
    automorphism_count,
    contract,
    enumerate_stable_graphs,
    isomorphisms,
)
from .strata import DecoratedStratum, MixedClass, TautClass, \
    fundamental_stratum, make_stratum, single

# A contraction structure of G onto a target graph GA:
#   (kept edge subset K, half-edge transport GA-he -> G-he,
#    per-GA-vertex tuple of preimage vertices of G)
Structure = tuple[frozenset[int], dict[int, int], tuple[tuple[int, ...], ...]]

_STRUCT_CACHE: dict[tuple[StableGraph, StableGraph], tuple[Structure, ...]] = {}


def contraction_structures(G: StableGraph, target: StableGraph) -> tuple[Structure, ...]:
    """All ways G contracts onto ``target``: choices of kept edges K with
    G/(E-K) isomorphic to target, times the isomorphisms."""
    key = (G, target)
    hit = _STRUCT_CACHE.get(key)
    if hit is not None:
        return hit
    out: list[Structure] = []
    E = G.num_edges
    eT = target.num_edges
    if eT <= E and target.genus() == G.genus() and target.markings() == G.markings():
        for kept in itertools.combinations(range(E), eT):
            dropped = frozenset(range(E)) - frozenset(kept)
            H, vmap, hemap_c = contract(G, dropped)
            if sorted(H.genera) != sorted(target.genera):
                continue
            inv_c = {w: h for h, w in hemap_c.items()}
            for vperm, hemap_phi in isomorphisms(target, H):
                he_transport = {h: inv_c[hemap_phi[h]]
                                for h in range(2 * eT)}
                vpre = tuple(
                    tuple(w for w in range(G.num_vertices)
                          if vmap[w] == vperm[v])
                    for v in range(target.num_vertices))
                out.append((frozenset(kept), he_transport, vpre))
    result = tuple(out)
    _STRUCT_CACHE[key] = result
    return result


_PRODUCT_CACHE: dict[tuple[DecoratedStratum, DecoratedStratum], TautClass] = {}


def multiply_strata(sa: DecoratedStratum, sb: DecoratedStratum) -> TautClass:
    """Product of two stratum classes as a TautClass."""
    if sb.sort_key() < sa.sort_key():
        sa, sb = sb, sa
    hit = _PRODUCT_CACHE.get((sa, sb))
    if hit is not None:
        return hit.copy()
    GA, GB = sa.graph, sb.graph
    g, n = GA.genus(), GA.num_legs
    if (GB.genus(), GB.num_legs) != (g, n):
        raise DomainError("cannot multiply classes on different moduli spaces")
    dim = 3 * g - 3 + n
    out = TautClass(g, n, sa.degree + sb.degree)
    if out.degree > dim:
        _PRODUCT_CACHE[(sa, sb)] = out
        return out.copy()
    eA, eB = GA.num_edges, GB.num_edges
    pref = Fraction(1, automorphism_count(GA) * automorphism_count(GB))
    pl = dict(sa.psi_leg)
    for m, e in sb.psi_leg:
        pl[m] = pl.get(m, 0) + e
    for G in enumerate_stable_graphs(g, n, min(eA + eB, dim)):
        E = G.num_edges
        if E < eA or E < eB:
            continue
        structs_a = contraction_structures(G, GA)
        if not structs_a:
            continue
        structs_b = contraction_structures(G, GB)
        if not structs_b:
            continue
        all_edges = frozenset(range(E))
        for ka, he_a, vpre_a in structs_a:
            need = all_edges - ka
            for kb, he_b, vpre_b in structs_b:
                if not need <= kb:
                    continue
                shared = sorted(ka & kb)
                ph0: dict[int, int] = {}
                for h, e in sa.psi_he:
                    h2 = he_a[h]
                    ph0[h2] = ph0.get(h2, 0) + e
                for h, e in sb.psi_he:
                    h2 = he_b[h]
                    ph0[h2] = ph0.get(h2, 0) + e
                factors: list[tuple[int, tuple[int, ...]]] = []
                for v, parts in sa.kappa:
                    factors.extend((a, vpre_a[v]) for a in parts)
                for v, parts in sb.kappa:
                    factors.extend((a, vpre_b[v]) for a in parts)
                coeff = pref * (-1 if len(shared) % 2 else 1)
                options = [opts for _, opts in factors]
                options += [(2 * e, 2 * e + 1) for e in shared]
                nk = len(factors)
                for choice in itertools.product(*options):
                    ph = dict(ph0)
                    for h in choice[nk:]:
                        ph[h] = ph.get(h, 0) + 1
                    kp: dict[int, list[int]] = {}
                    for (a, _), w in zip(factors, choice[:nk]):
                        kp.setdefault(w, []).append(a)
                    out.iadd_term(make_stratum(G, pl, ph, kp), coeff)
    _PRODUCT_CACHE[(sa, sb)] = out
    return out.copy()


def multiply(x: TautClass, y: TautClass) -> TautClass:
    """Bilinear extension of multiply_strata."""
    if (x.g, x.n) != (y.g, y.n):
        raise DomainError("cannot multiply classes on different moduli spaces")
    out = TautClass(x.g, x.n, x.degree + y.degree)
    if out.degree > 3 * x.g - 3 + x.n:
        return out
    for sa, ca in x.terms.items():
        for sb, cb in y.terms.items():
            c = ca * cb
            for s, coeff in multiply_strata(sa, sb).terms.items():
                out.iadd_term(s, c * coeff)
    return out


def multiply_mixed(x: MixedClass, y: MixedClass) -> MixedClass:
    """Degree-wise convolution of mixed classes, truncated at the dimension."""
    if (x.g, x.n) != (y.g, y.n):
        raise DomainError("cannot multiply classes on different moduli spaces")
    out = MixedClass(x.g, x.n)
    acc: dict[int, TautClass] = {}
    for da, xa in x.parts.items():
        for db, yb in y.parts.items():
            d = da + db
            if d > out.dim:
                continue
            p = multiply(xa, yb)
            if d in acc:
                acc[d] = acc[d].add(p)
            else:
                acc[d] = p
    for part in acc.values():
        out.set_part(part)
    return out


def power(x: TautClass, k: int) -> TautClass:
    """k-th power; the zeroth power is the fundamental class."""
    if k < 0:
        raise DomainError("power expects k >= 0")
    if k == 0:
        return single(x.g, x.n, fundamental_stratum(x.g, x.n))
    out = x
    for _ in range(k - 1):
        out = multiply(out, x)
    return out


# ---------------------------------------------------------------------------
# fast divisor actions (agree with the general product; kept for speed)


def psi_times(i: int, x: TautClass) -> TautClass:
    """Product with the psi class at marking i."""
    out = TautClass(x.g, x.n, x.degree + 1)
    for s, c in x.terms.items():
        pl = dict(s.psi_leg)
        pl[i] = pl.get(i, 0) + 1
        out.iadd_term(make_stratum(s.graph, pl, dict(s.psi_he),
                                   {v: parts for v, parts in s.kappa}), c)
    return out


def kappa1_times(x: TautClass) -> TautClass:
    """Product with kappa_1: the kappa factor distributes over vertices."""
    out = TautClass(x.g, x.n, x.degree + 1)
    for s, c in x.terms.items():
        kp0 = {v: parts for v, parts in s.kappa}
        for v in range(s.graph.num_vertices):
            kp = dict(kp0)
            kp[v] = tuple(kp.get(v, ())) + (1,)
            out.iadd_term(make_stratum(s.graph, dict(s.psi_leg),
                                       dict(s.psi_he), kp), c)
    return out
