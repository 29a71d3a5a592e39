"""Exact intersection numbers on Mbar_{g,n}.

psi_integral computes correlators <tau_{d_1} ... tau_{d_n}>_g by the
KdV/Virasoro recursion on the largest index, with exact Fraction arithmetic,
memoization, and an optional on-disk cache (set TAUTRING_CACHE_DIR).

kappa_psi_integral reduces mixed kappa-psi integrals to pure psi integrals by
pushing kappa classes to an extra marked point, one kappa factor at a time:

    <psi^d kappa_{b_1..b_m}>_{g,n}
      = sum over T subset of {1..m-1} of (-1)^{|T|}
            <psi^d, psi_{new}^{b_m + 1 + sum_{j in T} b_j},
             kappa_{b_j : j not in T, j < m}>_{g,n+1}

evaluate integrates a top-degree TautClass: each decorated stratum
contributes coeff / |Aut(graph)| times the product of local vertex integrals.
"""

from __future__ import annotations

import atexit
import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .graphs import DomainError, automorphism_count
from .strata import DecoratedStratum, TautClass, generators


def double_factorial(k: int) -> int:
    """(k)!! for odd k >= -1, with (-1)!! = 1."""
    if k < -1 or k % 2 == 0:
        raise DomainError("double factorial needs odd k >= -1, got %d" % k)
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


# ---------------------------------------------------------------------------
# disk cache for psi correlators

_WK_HEADER = "# tautring-wk-cache v1"


def cache_dir() -> str:
    """Directory for persistent caches: TAUTRING_CACHE_DIR if set,
    otherwise ~/.cache/tautring."""
    root = os.environ.get("TAUTRING_CACHE_DIR")
    if root:
        return root
    return os.path.join(os.path.expanduser("~"), ".cache", "tautring")


class _WKCache:
    """Memo for <tau_...>_g values, mirrored to disk when configured."""

    def __init__(self) -> None:
        self.mem: dict[tuple[int, tuple[int, ...]], Fraction] = {}
        self._loaded_from: str | None = None
        self._dirty = False

    def _path(self) -> str | None:
        return os.path.join(cache_dir(), "wk_integrals.txt")

    def _ensure_loaded(self) -> None:
        path = self._path()
        if path is None or path == self._loaded_from:
            return
        self._loaded_from = path
        if not os.path.exists(path):
            return
        try:
            with open(path, "r", encoding="ascii") as fh:
                lines = fh.read().splitlines()
        except OSError:
            return
        if not lines or lines[0].strip() != _WK_HEADER:
            self._dirty = True  # stale or foreign file: rewrite on flush
            return
        try:
            for line in lines[1:]:
                line = line.strip()
                if not line:
                    continue
                gtxt, dtxt, vtxt = line.split(";")
                g = int(gtxt)
                exps = tuple(int(x) for x in dtxt.split(",")) if dtxt else ()
                self.mem.setdefault((g, exps), Fraction(vtxt))
        except (ValueError, ZeroDivisionError):
            self.mem.clear()
            self._dirty = True

    def get(self, key: tuple[int, tuple[int, ...]]) -> Fraction | None:
        self._ensure_loaded()
        return self.mem.get(key)

    def put(self, key: tuple[int, tuple[int, ...]], value: Fraction) -> None:
        self.mem[key] = value
        self._dirty = True

    def flush(self) -> None:
        path = self._path()
        if path is None or not self._dirty:
            return
        try:
            os.makedirs(os.path.dirname(path), exist_ok=True)
            tmp = path + ".tmp"
            with open(tmp, "w", encoding="ascii") as fh:
                fh.write(_WK_HEADER + "\n")
                for (g, exps), value in sorted(self.mem.items()):
                    fh.write("%d;%s;%s\n" % (g, ",".join(map(str, exps)), value))
            os.replace(tmp, path)
            self._dirty = False
        except OSError:
            pass


_WK = _WKCache()
atexit.register(_WK.flush)


def wk_cache_status() -> dict:
    """Entry counts for the persistent and in-process caches."""
    path = _WK._path()
    disk = 0
    if path and os.path.exists(path):
        try:
            with open(path, "r", encoding="ascii") as fh:
                lines = fh.read().splitlines()
            if lines and lines[0].strip() == _WK_HEADER:
                disk = sum(1 for ln in lines[1:] if ln.strip())
        except OSError:
            pass
    writable = os.access(cache_dir(), os.W_OK) if os.path.isdir(cache_dir()) \
        else os.access(os.path.dirname(cache_dir()) or ".", os.W_OK)
    return {
        "dir": cache_dir(),
        "writable": writable,
        "wk_disk_entries": disk,
        "wk_memory_entries": len(_WK.mem),
    }


def wk_cache_clear() -> None:
    """Drop the in-memory memo and delete the on-disk cache file."""
    _WK.mem.clear()
    _WK._dirty = False
    _WK._loaded_from = None
    path = _WK._path()
    if path and os.path.exists(path):
        try:
            os.remove(path)
        except OSError:
            pass


def psi_integral(g: int, exps: Sequence[int]) -> Fraction:
    """<tau_{exps[0]} ... tau_{exps[-1]}>_g, zero off dimension or unstable."""
    if g < 0 or any(e < 0 for e in exps):
        return Fraction(0)
    key = (g, tuple(sorted(exps, reverse=True)))
    exps = key[1]
    n = len(exps)
    if 2 * g - 2 + n <= 0:
        return Fraction(0)
    if sum(exps) != 3 * g - 3 + n:
        return Fraction(0)
    if g == 0 and n == 3:
        return Fraction(1)
    if g == 1 and n == 1:
        return Fraction(1, 24)
    hit = _WK.get(key)
    if hit is not None:
        return hit
    # recurse on the largest index, which is >= 1 here
    k = exps[0] - 1
    rest = exps[1:]
    total = Fraction(0)
    for j, dj in enumerate(rest):
        merged = rest[:j] + (dj + k,) + rest[j + 1:]
        total += (Fraction(double_factorial(2 * k + 2 * dj + 1),
                           double_factorial(2 * dj - 1))
                  * psi_integral(g, merged))
    for a in range(k):
        b = k - 1 - a
        w = Fraction(double_factorial(2 * a + 1) * double_factorial(2 * b + 1), 2)
        nonsep = psi_integral(g - 1, (a, b) + rest)
        if nonsep:
            total += w * nonsep
        for mask in range(1 << len(rest)):
            part = tuple(rest[i] for i in range(len(rest)) if mask >> i & 1)
            comp = tuple(rest[i] for i in range(len(rest)) if not mask >> i & 1)
            for g1 in range(g + 1):
                left = psi_integral(g1, (a,) + part)
                if left:
                    total += w * left * psi_integral(g - g1, (b,) + comp)
    value = total / double_factorial(2 * k + 3)
    _WK.put(key, value)
    return value


_KP_CACHE: dict[tuple[int, tuple[int, ...], tuple[int, ...]], Fraction] = {}


def kappa_psi_integral(g: int, psi_exps: Sequence[int],
                       kappa_parts: Sequence[int]) -> Fraction:
    """Integral of psi_1^{e_1}..psi_n^{e_n} * prod_a kappa_a over Mbar_{g,n},
    where n = len(psi_exps) and kappa_parts lists kappa indices (each >= 1)."""
    if any(a < 1 for a in kappa_parts):
        raise DomainError("kappa indices must be >= 1")
    kappa_parts = tuple(sorted(kappa_parts))
    if not kappa_parts:
        return psi_integral(g, psi_exps)
    psi_key = tuple(sorted(psi_exps, reverse=True))
    key = (g, psi_key, kappa_parts)
    hit = _KP_CACHE.get(key)
    if hit is not None:
        return hit
    last = kappa_parts[-1]
    others = kappa_parts[:-1]
    total = Fraction(0)
    for mask in range(1 << len(others)):
        chosen = [others[i] for i in range(len(others)) if mask >> i & 1]
        kept = tuple(others[i] for i in range(len(others)) if not mask >> i & 1)
        sign = -1 if len(chosen) % 2 else 1
        new_exp = last + 1 + sum(chosen)
        total += sign * kappa_psi_integral(g, psi_key + (new_exp,), kept)
    _KP_CACHE[key] = total
    return total


# ---------------------------------------------------------------------------
# evaluation of classes


def stratum_integral(s: DecoratedStratum) -> Fraction:
    """Integral of the stratum class over Mbar_{g,n} (top degree only)."""
    G = s.graph
    if s.degree != 3 * G.genus() - 3 + G.num_legs:
        return Fraction(0)
    pl = dict(s.psi_leg)
    ph = dict(s.psi_he)
    kp = dict(s.kappa)
    value = Fraction(1, automorphism_count(G))
    for v in range(G.num_vertices):
        exps = [pl.get(m, 0) for m in G.legs[v]]
        exps += [ph.get(h, 0) for h in G.half_edges_at(v)]
        local = kappa_psi_integral(G.genera[v], exps, kp.get(v, ()))
        if not local:
            return Fraction(0)
        value *= local
    return value


def evaluate(x: TautClass) -> Fraction:
    """Integral of a top-degree class; zero when the degree is not top."""
    if x.degree != 3 * x.g - 3 + x.n:
        return Fraction(0)
    return sum((c * stratum_integral(s) for s, c in x.terms.items()),
               Fraction(0))


_PAIR_CACHE: dict[tuple[DecoratedStratum, DecoratedStratum], Fraction] = {}


def pair_strata(s: DecoratedStratum, t: DecoratedStratum) -> Fraction:
    """Integral of the product of two stratum classes of complementary degree."""
    if t.sort_key() < s.sort_key():
        s, t = t, s
    hit = _PAIR_CACHE.get((s, t))
    if hit is not None:
        return hit
    from .product import multiply_strata
    value = evaluate(multiply_strata(s, t))
    _PAIR_CACHE[(s, t)] = value
    return value


def pairing_vector(s: DecoratedStratum,
                   cogens: Iterable[DecoratedStratum]) -> tuple[Fraction, ...]:
    return tuple(pair_strata(s, t) for t in cogens)


def class_pairing_vector(x: TautClass,
                         cogens: Sequence[DecoratedStratum]) -> tuple[Fraction, ...]:
    """Pairing of a class against a list of complementary-degree generators."""
    out = [Fraction(0)] * len(cogens)
    for s, c in x.terms.items():
        for j, t in enumerate(cogens):
            out[j] += c * pair_strata(s, t)
    return tuple(out)


def pair_classes(x: TautClass, y: TautClass) -> Fraction:
    """Bilinear extension of the stratum pairing."""
    if (x.g, x.n) != (y.g, y.n):
        raise DomainError("pairing type mismatch")
    total = Fraction(0)
    for s, c in x.terms.items():
        for t, d in y.terms.items():
            total += c * d * pair_strata(s, t)
    return total


# ---------------------------------------------------------------------------
# exact linear algebra (fraction-free)


def _clear_row(row: Sequence[Fraction]) -> list[int]:
    denom = 1
    for x in row:
        f = Fraction(x)
        denom = denom * f.denominator // gcd(denom, f.denominator)
    return [int(Fraction(x) * denom) for x in row]


def fraction_free_echelon(rows: Sequence[Sequence[Fraction]]
                          ) -> tuple[int, tuple[int, ...], list[list[int]]]:
    """Bareiss elimination after per-row denominator clearing.

    Returns (rank, pivot column indices, echelon matrix as integer rows).
    Row scaling by positive integers preserves rank and, on an augmented
    matrix, the solution set.
    """
    mat = [_clear_row(r) for r in rows]
    nrows = len(mat)
    ncols = len(mat[0]) if mat else 0
    pivots: list[int] = []
    rank = 0
    prev = 1
    for col in range(ncols):
        piv = next((i for i in range(rank, nrows) if mat[i][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        for i in range(rank + 1, nrows):
            head = mat[i][col]
            for j in range(col, ncols):
                num = mat[i][j] * mat[rank][col] - mat[rank][j] * head
                q, rem = divmod(num, prev)
                if rem:
                    raise DomainError("fraction-free elimination lost exactness")
                mat[i][j] = q
        prev = mat[rank][col]
        pivots.append(col)
        rank += 1
        if rank == nrows:
            break
    return rank, tuple(pivots), mat


def matrix_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    if not rows:
        return 0
    return fraction_free_echelon(rows)[0]


def solve_linear_system(rows: Sequence[Sequence[Fraction]],
                        rhs: Sequence[Fraction]
                        ) -> tuple[list[Fraction] | None, list[Fraction] | None]:
    """Solve A x = b exactly.  Returns (solution, None) with free variables
    set to zero, or (None, residual_row) where residual_row is an
    unsatisfiable echelon row of the augmented matrix (all-zero coefficients
    with nonzero right side)."""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    if nrows == 0:
        return [], None
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    rank, pivots, ech = fraction_free_echelon(aug)
    if pivots and pivots[-1] == ncols:
        bad = ech[rank - 1]
        return None, [Fraction(x) for x in bad]
    sol = [Fraction(0)] * ncols
    for i in range(rank - 1, -1, -1):
        col = pivots[i]
        acc = Fraction(ech[i][ncols])
        for j in range(col + 1, ncols):
            acc -= ech[i][j] * sol[j]
        sol[col] = acc / ech[i][col]
    return sol, None


@dataclass(frozen=True)
class PairingMatrix:
    """Intersection pairing of degree-d generators against the complementary
    generators, with an echelon certificate for rank queries."""

    g: int
    n: int
    d: int
    rows: tuple[DecoratedStratum, ...]
    cols: tuple[DecoratedStratum, ...]
    entries: tuple[tuple[Fraction, ...], ...]

    def echelon(self) -> tuple[int, tuple[int, ...], list[list[int]]]:
        key = (self.g, self.n, self.d)
        hit = _ECHELON_CACHE.get(key)
        if hit is None:
            if self.entries:
                hit = fraction_free_echelon(self.entries)
            else:
                hit = (0, (), [])
            _ECHELON_CACHE[key] = hit
        return hit

    @property
    def rank(self) -> int:
        return self.echelon()[0]


_ECHELON_CACHE: dict[tuple[int, int, int], tuple] = {}
_PAIRING_MATRIX_CACHE: dict[tuple[int, int, int], PairingMatrix] = {}


def pairing_matrix(g: int, n: int, d: int) -> PairingMatrix:
    """Rows are degree-d generators, columns the complementary generators,
    entries the integrals of the products; cached by (g, n, d)."""
    dim = 3 * g - 3 + n
    key = (g, n, d)
    hit = _PAIRING_MATRIX_CACHE.get(key)
    if hit is not None:
        return hit
    if d < 0 or d > dim:
        out = PairingMatrix(g, n, d, (), (), ())
    else:
        rows = generators(g, n, d)
        cols = generators(g, n, dim - d)
        out = PairingMatrix(g, n, d, rows, cols,
                            tuple(pairing_vector(s, cols) for s in rows))
    _PAIRING_MATRIX_CACHE[key] = out
    return out
