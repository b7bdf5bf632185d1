"""Local theory at odd primes and a definite-lattice representation oracle.

Jordan decomposition by symmetric elimination over the localization at p,
hyperbolic-plane split checks from the valuation-zero block, the explicit
representation construction through hyperbolic planes, and exhaustive search
of representations in a positive definite lattice.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import bilinear, det_rational, mat_frac, mat_vec, vec_frac
from .lattice import EvenLattice, split_hyperbolic, unit_vector


def vp(x: Fraction | int, p: int) -> int:
    """p-adic valuation; raises on zero."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_mod(x: Fraction, p: int, k: int) -> int:
    """The p-unit rational x as an integer mod p^k."""
    mod = p ** k
    num = x.numerator % mod
    den = x.denominator % mod
    return num * pow(den, -1, mod) % mod


def legendre(a: Fraction | int, p: int) -> int:
    """Legendre symbol of a p-unit rational mod the odd prime p."""
    a = Fraction(a)
    r = a.numerator * pow(a.denominator, -1, p) % p
    if r == 0:
        raise ValueError("not a p-unit")
    s = pow(r, (p - 1) // 2, p)
    return 1 if s == 1 else -1


@dataclass
class JordanDecomposition:
    prime: int
    precision: int
    blocks: list[tuple[int, list[list[int]]]]
    transform: list[list[Fraction]]
    diag_exact: list[Fraction]

    @property
    def rank(self) -> int:
        return sum(len(b) for _, b in self.blocks)

    def valuation_zero_block(self) -> list[Fraction]:
        """Exact unit diagonal entries at valuation zero."""
        return [d for d in self.diag_exact if vp(d, self.prime) == 0]


def _check_odd_prime(p: int) -> None:
    if p == 2:
        raise ValueError("p = 2 is unsupported for the Jordan decomposition")
    if p < 2 or any(p % q == 0 for q in range(2, int(math.isqrt(p)) + 1)):
        raise ValueError(f"{p} is not prime")


def jordan_decompose_odd(lattice: EvenLattice, p: int, precision: int | None = None
                         ) -> JordanDecomposition:
    """Diagonalize the Gram over Z localized at the odd prime p.

    Pivots on a minimal-valuation entry; an off-diagonal minimum is moved to
    the diagonal by adding the partner row and column, which cannot cancel
    when p is odd.  Returns exact unit diagonal entries grouped by valuation
    together with the rational congruence witness.
    """
    _check_odd_prime(p)
    n = lattice.rank
    k = precision if precision is not None else max(12, vp(lattice.det, p) + 2)
    if k < vp(lattice.det, p) + 2:
        raise ValueError("precision too small for this determinant")
    a = mat_frac(lattice.gram)
    b = mat_frac([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def add_into(dst: int, src: int, f: Fraction) -> None:
        for i in range(n):
            a[i][dst] += f * a[i][src]
        for j in range(n):
            a[dst][j] += f * a[src][j]
        for i in range(n):
            b[i][dst] += f * b[i][src]

    def swap(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        a[i], a[j] = a[j], a[i]
        for row in b:
            row[i], row[j] = row[j], row[i]

    for t in range(n):
        best = None
        for i in range(t, n):
            for j in range(i, n):
                if a[i][j] == 0:
                    continue
                v = vp(a[i][j], p)
                key = (v, i != j, i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
        if best is None:
            raise ValueError("degenerate gram matrix")
        (_, offdiag, _, _), i, j = best
        if offdiag:
            add_into(i, j, Fraction(1))
        if i != t:
            swap(t, i)
        pivot = a[t][t]
        for j in range(t + 1, n):
            if a[t][j] != 0:
                add_into(j, t, -a[t][j] / pivot)

    diag = [a[i][i] for i in range(n)]
    order = sorted(range(n), key=lambda i: (vp(diag[i], p), i))
    grouped: dict[int, list[int]] = {}
    for i in order:
        grouped.setdefault(vp(diag[i], p), []).append(i)
    blocks = []
    for val in sorted(grouped):
        units = [unit_mod(diag[i] / Fraction(p) ** val, p, k) for i in grouped[val]]
        blocks.append((val, [[units[r] if r == c else 0 for c in range(len(units))]
                             for r in range(len(units))]))
    return JordanDecomposition(p, k, blocks, b, diag)


def verify_jordan_witness(lattice: EvenLattice, dec: JordanDecomposition) -> bool:
    """Congruence check: B^t G B = direct sum of p^val blocks mod p^precision."""
    p, k = dec.prime, dec.precision
    mod = p ** k
    n = lattice.rank
    den = 1
    for row in dec.transform:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    if den % p == 0:
        return False
    bi = [[int(x * den) for x in row] for row in dec.transform]
    if vp(det_rational(dec.transform), p) != 0:
        return False
    target = []
    for val, block in dec.blocks:
        for r, row in enumerate(block):
            target.append((val, row[r]))
    lhs = [[0] * n for _ in range(n)]
    g = lattice.gram
    for i in range(n):
        for j in range(n):
            s = 0
            for r in range(n):
                for c in range(n):
                    s += bi[r][i] * g[r][c] * bi[c][j]
            lhs[i][j] = s % mod
    # block order must match the column order induced by the diag sort
    order = sorted(range(n), key=lambda i: (vp(dec.diag_exact[i], dec.prime), i))
    for pos in range(n):
        val, unit = target[pos]
        col = order[pos]
        want = (p ** val * unit * den * den) % mod
        if lhs[col][col] % mod != want:
            return False
    for i in range(n):
        for j in range(n):
            if i != j and lhs[i][j] % mod != 0:
                return False
    return True


def splits_hyperbolic_planes_local(lattice: EvenLattice, p: int, r: int) -> bool:
    """Whether L tensor Z_p splits r hyperbolic planes, for odd p.

    The planes must come from the valuation-zero Jordan block; a unimodular
    p-adic space of rank n contains them iff n > 2r, or n = 2r with
    determinant class (-1)^r.
    """
    _check_odd_prime(p)
    if r < 0:
        raise ValueError("negative plane count")
    if r == 0:
        return True
    dec = jordan_decompose_odd(lattice, p)
    units = dec.valuation_zero_block()
    n0 = len(units)
    if n0 > 2 * r:
        return True
    if n0 < 2 * r:
        return False
    det0 = Fraction(1)
    for u in units:
        det0 *= u
    return legendre(det0 * (-1) ** r, p) == 1


class HyperbolicBasisError(ValueError):
    """The lattice does not expose the requested number of integral planes."""


def find_hyperbolic_planes(lattice: EvenLattice, r: int
                           ) -> list[tuple[list[int], list[int]]]:
    """r pairwise orthogonal pairs (f, f') in L with (f,f') = 1, q(f) = q(f') = 0.

    Each unimodular plane is split off integrally; the recursion continues on
    the orthogonal complement of the plane itself, so the planes come out
    pairwise orthogonal.
    """
    from .exact import gram_of_sublist, smith_normal_form

    planes: list[tuple[list[int], list[int]]] = []
    n = lattice.rank
    embed = [[Fraction(1) if i == j else Fraction(0) for j in range(n)]
             for i in range(n)]
    cur = lattice
    for _ in range(r):
        try:
            s = split_hyperbolic(cur)
        except ValueError as exc:
            raise HyperbolicBasisError(str(exc)) from exc
        if s.level != 1:
            raise HyperbolicBasisError("isotropic vector has level > 1")
        m = cur.rank
        pairings = mat_vec(cur.gram, s.u)
        w = _bezout(pairings)
        qw = cur.q(w)
        assert qw.denominator == 1
        fp = [w[i] - int(qw) * s.u[i] for i in range(m)]
        f_amb = _apply_embed(embed, s.u)
        fp_amb = _apply_embed(embed, fp)
        planes.append(([int(x) for x in f_amb], [int(x) for x in fp_amb]))
        if len(planes) == r:
            break
        if m <= 2:
            raise HyperbolicBasisError("ran out of rank")
        rows = [[int(x) for x in mat_vec(cur.gram, s.u)],
                [int(x) for x in mat_vec(cur.gram, fp)]]
        _, d, v = smith_normal_form(rows)
        rk = sum(1 for i in range(2) if d[i][i] != 0)
        k_basis = [[v[i][j] for i in range(m)] for j in range(rk, m)]
        k_gram = gram_of_sublist(cur.gram, k_basis)
        embed = [[sum(embed[i][t] * Fraction(bvec[t]) for t in range(m))
                  for bvec in k_basis] for i in range(n)]
        cur = EvenLattice([[int(x) for x in row] for row in k_gram])
    if len(planes) != r:
        raise HyperbolicBasisError("could not find enough planes")
    return planes


def _apply_embed(embed, v):
    return [sum(embed[i][j] * Fraction(v[j]) for j in range(len(v)))
            for i in range(len(embed))]


def _bezout(pairings) -> list[int]:
    vals = [int(x) for x in pairings]
    g = 0
    coeff = [0] * len(vals)
    for i, x in enumerate(vals):
        if x == 0:
            continue
        if g == 0:
            g = abs(x)
            coeff[i] = 1 if x > 0 else -1
            continue
        gn, a, b = _ext_gcd(g, x)
        for j in range(i):
            coeff[j] *= a
        coeff[i] = b
        g = gn
    if g != 1:
        raise HyperbolicBasisError("pairings are not coprime")
    return coeff


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


class CongruenceError(ValueError):
    """Target Gram incompatible with the residue classes."""


def construct_local_representation(lattice: EvenLattice, gamma_lifts, target_gram,
                                   planes=None) -> list[list[Fraction]]:
    """Vectors in L' with bilinear Gram exactly target_gram, congruent to gamma.

    gamma_lifts are dual vectors; target_gram is the bilinear matrix of the
    wanted tuple.  Needs target_gram[i][i]/2 = q(gamma_i) mod Z and
    target_gram[i][j] = (gamma_i, gamma_j) mod 2Z, which makes the correction
    coefficients integral.
    """
    r = len(gamma_lifts)
    t = mat_frac(target_gram)
    if any(len(row) != r for row in t) or len(t) != r:
        raise ValueError("target gram must be r x r")
    for i in range(r):
        for j in range(r):
            if t[i][j] != t[j][i]:
                raise ValueError("target gram must be symmetric")
    if planes is None:
        planes = find_hyperbolic_planes(lattice, r)
    if len(planes) < r:
        raise ValueError("need r hyperbolic planes")
    gam = [vec_frac(list(g)) for g in gamma_lifts]
    n = lattice.rank
    # push the lifts into the orthogonal complement of the planes (integral shifts)
    for g in gam:
        for f, fp in planes:
            cf = lattice.pair(g, fp)
            cfp = lattice.pair(g, f)
            if cf.denominator != 1 or cfp.denominator != 1:
                raise ValueError("gamma lift is not in the dual lattice")
            for i in range(n):
                g[i] -= cf * Fraction(f[i]) + cfp * Fraction(fp[i])
    coeffs = [[Fraction(0)] * r for _ in range(r)]
    for i in range(r):
        for j in range(r):
            c = (t[i][j] - lattice.pair(gam[i], gam[j])) / 2
            if c.denominator != 1:
                raise CongruenceError(
                    f"target entry ({i},{j}) incompatible with the classes")
            coeffs[i][j] = c
    out = []
    for i in range(r):
        f_i = planes[i][0]
        v = [gam[i][k] + Fraction(f_i[k]) for k in range(n)]
        for j in range(r):
            fp_j = planes[j][1]
            for k in range(n):
                v[k] += coeffs[i][j] * Fraction(fp_j[k])
        out.append(v)
    for i in range(r):
        pairings = mat_vec(lattice.gram, out[i])
        assert all(x.denominator == 1 for x in pairings), "result left the dual"
        for j in range(r):
            assert lattice.pair(out[i], out[j]) == t[i][j]
        diff = [out[i][k] - vec_frac(list(gamma_lifts[i]))[k] for k in range(n)]
        assert all(x.denominator == 1 for x in diff), "residue class changed"
    return out


def min_eigenvalue_bound(gram) -> Fraction:
    """Exact positive rational lower bound on the least eigenvalue of a PD Gram."""
    g = mat_frac(gram)
    n = len(g)
    gersh = min(g[i][i] - sum(abs(g[i][j]) for j in range(n) if j != i)
                for i in range(n))
    rowsum = max(sum(abs(x) for x in row) for row in g)
    det = det_rational(g)
    if det <= 0:
        raise ValueError("gram is not positive definite")
    alt = det / rowsum ** (n - 1) if n > 1 else det
    bound = max(gersh, alt)
    if bound <= 0:
        raise ValueError("could not certify positive definiteness")
    return bound


def brute_force_representation_search(lattice: EvenLattice, gamma_lifts, target_q,
                                      bound: int | None = None):
    """All tuples in the given classes with exact q-matrix target_q.

    target_q has q-values on the diagonal and half the bilinear pairings off
    it.  Exhaustive for positive definite lattices: coordinates are boxed by
    the exact eigenvalue bound (or the explicit bound if given).
    """
    r = len(gamma_lifts)
    t = mat_frac(target_q)
    lam_min = min_eigenvalue_bound(lattice.gram)
    n = lattice.rank
    per_class_candidates = []
    for i in range(r):
        qi = t[i][i]
        if qi < 0:
            return []
        g = vec_frac(list(gamma_lifts[i]))
        if bound is not None:
            radius = Fraction(bound)
        else:
            radius = Fraction(math.isqrt(math.ceil(2 * qi / lam_min)) + 1)
        cands = []
        ranges = []
        for k in range(n):
            lo = math.floor(-radius - g[k])
            hi = math.ceil(radius - g[k])
            ranges.append(range(lo, hi + 1))
        for shift in itertools.product(*ranges):
            v = [g[k] + shift[k] for k in range(n)]
            if lattice.q(v) == qi:
                cands.append(tuple(v))
        per_class_candidates.append(sorted(cands))
    results = []
    for combo in itertools.product(*per_class_candidates):
        ok = True
        for i in range(r):
            for j in range(i + 1, r):
                if bilinear(lattice.gram, list(combo[i]), list(combo[j])) != 2 * t[i][j]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            results.append([list(v) for v in combo])
    results.sort(key=lambda sol: [tuple(v) for v in sol])
    return results
