"""Even lattices and their geometry.

Covers discriminant groups with their Q/Z-valued quadratic forms, Gauss sums,
Grassmannian frames (isometries onto the standard R^{b+,b-}), hyperbolic-plane
splittings with their levels and mu-vectors, and Eichler transformations.

Everything upstream of frames is exact rational arithmetic; frames themselves
are double precision since a negative-definite plane is inherently real.
"""

from __future__ import annotations

import cmath
import itertools
import json
import math
from fractions import Fraction

import numpy as np

from .exact import (
    bilinear,
    det_rational,
    identity_matrix,
    mat_frac,
    mat_vec,
    rat_inverse,
    smith_normal_form,
    vec_frac,
)


def e2pi(t) -> complex:
    """e(t) = exp(2 pi i t)."""
    return cmath.exp(2j * cmath.pi * complex(t))


def sqrt_i_power(s: int) -> complex:
    """Principal sqrt(i) raised to an integer power: e^{i pi s / 4}."""
    return cmath.exp(1j * cmath.pi * s / 4)


def diagonalize_symmetric(gram: list[list]) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Exact congruent diagonalization of a symmetric rational matrix.

    Returns (P, diag) with P^t * gram * P diagonal; columns of P are a
    pairwise-orthogonal rational basis.  Raises on a degenerate form.
    """
    n = len(gram)
    a = mat_frac(gram)
    p = mat_frac(identity_matrix(n))

    def add_col(dst: int, src: int, f: Fraction) -> None:
        # congruent: column op followed by the matching row op
        for i in range(n):
            a[i][dst] += f * a[i][src]
        for j in range(n):
            a[dst][j] += f * a[src][j]
        for i in range(n):
            p[i][dst] += f * p[i][src]

    def swap_col(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        a[i], a[j] = a[j], a[i]
        for row in p:
            row[i], row[j] = row[j], row[i]

    for k in range(n):
        if a[k][k] == 0:
            j = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if j is not None:
                swap_col(k, j)
            else:
                j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if j is None:
                    raise ValueError("degenerate symmetric form")
                # a[k][k] and a[j][j] both vanish, so this produces 2*a[k][j] != 0
                add_col(k, j, Fraction(1))
        pivot = a[k][k]
        for j in range(k + 1, n):
            if a[k][j] != 0:
                add_col(j, k, -a[k][j] / pivot)
    return p, [a[k][k] for k in range(n)]


class EvenLattice:
    """Nondegenerate even lattice given by an integral Gram matrix."""

    def __init__(self, gram: list[list[int]], name: str = ""):
        n = len(gram)
        if n == 0 or any(len(row) != n for row in gram):
            raise ValueError("gram matrix must be square and nonempty")
        gram = [[int(x) for x in row] for row in gram]
        for i in range(n):
            if gram[i][i] % 2 != 0:
                raise ValueError("even lattice needs even diagonal entries")
            for j in range(n):
                if gram[i][j] != gram[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        if det_rational(gram) == 0:
            raise ValueError("gram matrix must be nondegenerate")
        self.gram = gram
        self.name = name or f"rank{n}"
        self._signature: tuple[int, int] | None = None
        self._disc: DiscriminantGroup | None = None

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def det(self) -> int:
        d = det_rational(self.gram)
        assert d.denominator == 1
        return int(d)

    @property
    def signature(self) -> tuple[int, int]:
        if self._signature is None:
            _, diag = diagonalize_symmetric(self.gram)
            pos = sum(1 for c in diag if c > 0)
            neg = sum(1 for c in diag if c < 0)
            self._signature = (pos, neg)
        return self._signature

    @property
    def sig_diff(self) -> int:
        bp, bm = self.signature
        return bp - bm

    def pair(self, v, w) -> Fraction:
        return bilinear(self.gram, list(v), list(w))

    def q(self, v) -> Fraction:
        return self.pair(v, v) / 2

    def in_dual(self, v) -> bool:
        return all(self.pair(v, e).denominator == 1
                   for e in (unit_vector(self.rank, i) for i in range(self.rank)))

    def discriminant_group(self) -> "DiscriminantGroup":
        if self._disc is None:
            self._disc = DiscriminantGroup(self)
        return self._disc

    def direct_sum(self, other: "EvenLattice", name: str = "") -> "EvenLattice":
        n, m = self.rank, other.rank
        gram = [[0] * (n + m) for _ in range(n + m)]
        for i in range(n):
            for j in range(n):
                gram[i][j] = self.gram[i][j]
        for i in range(m):
            for j in range(m):
                gram[n + i][n + j] = other.gram[i][j]
        return EvenLattice(gram, name or f"{self.name}+{other.name}")

    def to_json(self) -> str:
        return json.dumps({"gram": self.gram, "name": self.name})

    @classmethod
    def from_json(cls, text: str) -> "EvenLattice":
        data = json.loads(text)
        return cls(data["gram"], data.get("name", ""))


def unit_vector(n: int, i: int) -> list[int]:
    v = [0] * n
    v[i] = 1
    return v


def hyperbolic_plane(scale: int = 1) -> EvenLattice:
    return EvenLattice([[0, scale], [scale, 0]], f"U({scale})" if scale != 1 else "U")


def a1_lattice(scale: int = 1) -> EvenLattice:
    return EvenLattice([[2 * scale]], "A1" if scale == 1 else f"A1({scale})")


def a2_lattice() -> EvenLattice:
    return EvenLattice([[2, -1], [-1, 2]], "A2")


def rank_one(n: int) -> EvenLattice:
    """The lattice <n> generated by a vector of even norm n."""
    if n % 2 != 0:
        raise ValueError("even lattice needs an even norm")
    return EvenLattice([[n]], f"<{n}>")


_E8_EDGES = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)]


def e8_lattice() -> EvenLattice:
    gram = [[2 if i == j else 0 for j in range(8)] for i in range(8)]
    for i, j in _E8_EDGES:
        gram[i][j] = gram[j][i] = -1
    return EvenLattice(gram, "E8")


def standard_corpus() -> dict[str, EvenLattice]:
    u = hyperbolic_plane()
    return {
        "U": u,
        "A1": a1_lattice(),
        "A1(-1)": a1_lattice(-1),
        "A2": a2_lattice(),
        "U+A1": u.direct_sum(a1_lattice(), "U+A1"),
        "U+U": u.direct_sum(u, "U+U"),
        "U+U+A1": u.direct_sum(u, "U+U").direct_sum(a1_lattice(), "U+U+A1"),
        "U(2)+A1": hyperbolic_plane(2).direct_sum(a1_lattice(), "U(2)+A1"),
        "U+A2": u.direct_sum(a2_lattice(), "U+A2"),
    }


def frac_mod1(x: Fraction) -> Fraction:
    return x - Fraction(math.floor(x))


class DiscriminantElement:
    """A class in L'/L, stored as the coordinate tuple reduced into [0,1)^n."""

    __slots__ = ("group", "vec", "index")

    def __init__(self, group: "DiscriminantGroup", vec: tuple[Fraction, ...], index: int):
        self.group = group
        self.vec = vec
        self.index = index

    @property
    def q(self) -> Fraction:
        return self.group.q_value(self)

    def __eq__(self, other) -> bool:
        return isinstance(other, DiscriminantElement) and self.vec == other.vec

    def __hash__(self):
        return hash(self.vec)

    def __repr__(self):
        return f"D[{','.join(str(x) for x in self.vec)}]"


class DiscriminantGroup:
    """L'/L with its Q/Z quadratic form, enumerated from the Smith form."""

    def __init__(self, lattice: EvenLattice):
        self.lattice = lattice
        n = lattice.rank
        u, d, v = smith_normal_form(lattice.gram)
        orders = [d[i][i] for i in range(n)]
        self.generator_orders = [o for o in orders if o > 1]
        gens = []
        for i in range(n):
            if orders[i] > 1:
                gens.append(tuple(Fraction(v[r][i], orders[i]) for r in range(n)))
        self._gens = gens
        elements: list[DiscriminantElement] = []
        lookup: dict[tuple[Fraction, ...], DiscriminantElement] = {}
        for residues in itertools.product(*(range(o) for o in self.generator_orders)):
            vec = tuple(
                frac_mod1(sum((Fraction(r) * g[k] for r, g in zip(residues, gens)),
                              Fraction(0)))
                for k in range(n)
            )
            if vec in lookup:
                raise ValueError("discriminant enumeration collided")
            el = DiscriminantElement(self, vec, len(elements))
            elements.append(el)
            lookup[vec] = el
        self.elements = elements
        self._lookup = lookup
        self._q_cache = [frac_mod1(lattice.q(el.vec)) for el in elements]
        if len(elements) != abs(lattice.det):
            raise ValueError("group order does not match |det|")

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def zero(self) -> DiscriminantElement:
        return self.class_of([0] * self.lattice.rank)

    def q_value(self, el: DiscriminantElement) -> Fraction:
        return self._q_cache[el.index]

    def bilinear_value(self, a: DiscriminantElement, b: DiscriminantElement) -> Fraction:
        return frac_mod1(self.lattice.pair(a.vec, b.vec))

    def class_of(self, vector) -> DiscriminantElement:
        v = vec_frac(list(vector))
        pairings = mat_vec(self.lattice.gram, v)
        if any(p.denominator != 1 for p in pairings):
            raise ValueError("vector is not in the dual lattice")
        key = tuple(frac_mod1(x) for x in v)
        return self._lookup[key]

    def add(self, a: DiscriminantElement, b: DiscriminantElement) -> DiscriminantElement:
        return self._lookup[tuple(frac_mod1(x + y) for x, y in zip(a.vec, b.vec))]

    def neg(self, a: DiscriminantElement) -> DiscriminantElement:
        return self._lookup[tuple(frac_mod1(-x) for x in a.vec)]

    def lift(self, el: DiscriminantElement) -> list[Fraction]:
        return list(el.vec)

    def milgram_sum(self) -> complex:
        return sum(e2pi(q) for q in self._q_cache)

    def milgram_reference(self) -> complex:
        return math.sqrt(self.order) * sqrt_i_power(self.lattice.sig_diff)


class Frame:
    """Isometry g0 o g from lattice coordinates to standard R^{b+,b-} coordinates.

    matrix rows 0..b+-1 are the positive axes, the rest negative; the frame's
    negative plane z is the preimage of the span of the negative axes.
    """

    def __init__(self, lattice: EvenLattice, matrix: np.ndarray, z_basis: np.ndarray):
        self.lattice = lattice
        self.matrix = np.asarray(matrix, dtype=float)
        self.z_basis = np.asarray(z_basis, dtype=float)
        bp, bm = lattice.signature
        self.bpos, self.bneg = bp, bm
        j = np.diag([1.0] * bp + [-1.0] * bm)
        gram = np.array(lattice.gram, dtype=float)
        err = np.max(np.abs(self.matrix.T @ j @ self.matrix - gram))
        if err > 1e-8 * (1 + np.max(np.abs(gram))):
            raise ValueError(f"not an isometry onto R^({bp},{bm}): error {err:.2e}")
        self._inv = np.linalg.inv(self.matrix)

    def standard(self, v) -> np.ndarray:
        return self.matrix @ np.asarray([float(x) for x in v])

    def x_pos(self, v) -> np.ndarray:
        return self.standard(v)[: self.bpos]

    def x_neg(self, v) -> np.ndarray:
        return self.standard(v)[self.bpos:]

    def q_pos(self, v) -> float:
        x = self.x_pos(v)
        return 0.5 * float(x @ x)

    def q_neg(self, v) -> float:
        x = self.x_neg(v)
        return -0.5 * float(x @ x)

    def majorant_matrix(self) -> np.ndarray:
        return self.matrix.T @ self.matrix

    def from_standard(self, x: np.ndarray) -> np.ndarray:
        return self._inv @ np.asarray(x, dtype=float)

    def compose_with(self, coord_map: np.ndarray, z_basis: np.ndarray | None = None) -> "Frame":
        """Frame g o E for a coordinate-space isometry E."""
        e = np.asarray(coord_map, dtype=float)
        if z_basis is None:
            einv = np.linalg.inv(e)
            z_basis = self.z_basis @ einv.T
        return Frame(self.lattice, self.matrix @ e, z_basis)


def base_frame(lattice: EvenLattice) -> Frame:
    """Canonical frame from the exact congruent diagonalization of the Gram."""
    p, diag = diagonalize_symmetric(lattice.gram)
    n = lattice.rank
    cols = list(range(n))
    pos = [k for k in cols if diag[k] > 0]
    neg = [k for k in cols if diag[k] < 0]
    gram = np.array(lattice.gram, dtype=float)
    rows = []
    for sign, order in ((1.0, pos), (-1.0, neg)):
        for k in order:
            vk = np.array([float(p[i][k]) for i in range(n)])
            scale = math.sqrt(abs(float(diag[k])))
            rows.append(sign * (gram @ vk) / scale)
    z_basis = np.array([[float(p[i][k]) for i in range(n)] for k in neg])
    return Frame(lattice, np.array(rows), z_basis)


def frame_from_plane(lattice: EvenLattice, z_basis) -> Frame:
    """Gram-Schmidt frame for a given negative-definite plane.

    The plane's vectors are orthonormalized under -(.,.) first, then the
    orthogonal complement is orthonormalized under (.,.) in basis order.
    """
    gram = np.array(lattice.gram, dtype=float)
    z = [np.asarray([float(x) for x in b]) for b in z_basis]
    bp, bm = lattice.signature
    if len(z) != bm:
        raise ValueError(f"z_basis must have {bm} vectors")

    def form(v, w):
        return float(v @ gram @ w)

    neg_rows = []
    for b in z:
        w = b.copy()
        for nvec in neg_rows:
            w = w + form(w, nvec) * nvec  # (n,n) = -1
        nrm = -form(w, w)
        if nrm <= 1e-12:
            raise ValueError("plane not negative definite")
        neg_rows.append(w / math.sqrt(nrm))
    pos_rows = []
    n = lattice.rank
    for i in range(n):
        w = np.zeros(n)
        w[i] = 1.0
        for nvec in neg_rows:
            w = w + form(w, nvec) * nvec
        for pvec in pos_rows:
            w = w - form(w, pvec) * pvec
        nrm = form(w, w)
        if nrm > 1e-10:
            pos_rows.append(w / math.sqrt(nrm))
    if len(pos_rows) != bp:
        raise ValueError("could not complete the positive part of the frame")
    rows = [gram @ p for p in pos_rows] + [-(gram @ nvec) for nvec in neg_rows]
    return Frame(lattice, np.array(rows), np.array([list(b) for b in z]))


def frame_swap(frame: Frame, i: int, j: int) -> Frame:
    """Frame composed with the transposition of standard axes i and j."""
    bp = frame.bpos
    if (i < bp) != (j < bp):
        raise ValueError("cannot swap a positive axis with a negative one")
    m = frame.matrix.copy()
    m[[i, j]] = m[[j, i]]
    return Frame(frame.lattice, m, frame.z_basis)


def random_negative_plane(lattice: EvenLattice, rng: np.random.Generator,
                          spread: float = 0.25) -> np.ndarray:
    """A random negative-definite plane obtained by perturbing the base one."""
    base = base_frame(lattice)
    gram = np.array(lattice.gram, dtype=float)
    for _ in range(100):
        z = base.z_basis + spread * rng.standard_normal(base.z_basis.shape)
        g = z @ gram @ z.T
        if np.all(np.linalg.eigvalsh(g) < -1e-9):
            return z
    raise RuntimeError("failed to sample a negative plane")


class SplitError(ValueError):
    """No hyperbolic pair found within the search bound."""


def _isotropic_candidates(n: int, bound: int):
    for m in range(1, bound + 1):
        shell = [v for v in itertools.product(range(-m, m + 1), repeat=n)
                 if max(abs(x) for x in v) == m]
        shell.sort(key=lambda v: (sum(1 for x in v if x != 0),
                                  tuple(-x for x in v)))
        yield from shell


class HyperbolicSplit:
    """A primitive isotropic u with dual partner u' and complement K."""

    def __init__(self, lattice: EvenLattice, u: list[int]):
        if lattice.q(u) != 0:
            raise ValueError("u must be isotropic")
        g = math.gcd(*[abs(int(x)) for x in u])
        if g != 1:
            raise ValueError("u must be primitive")
        self.lattice = lattice
        self.u = [int(x) for x in u]
        n = lattice.rank
        pairings = mat_vec(lattice.gram, self.u)
        self.level = math.gcd(*[abs(int(p)) for p in pairings])
        # u' in L' with (u, u') = 1: solve <u, y> = 1 over Z, set u' = G^{-1} y
        y = _bezout_combination([int(x) for x in self.u])
        ginv = rat_inverse(lattice.gram)
        self.u_prime = mat_vec(ginv, vec_frac(y))
        assert bilinear(lattice.gram, self.u, self.u_prime) == 1
        # K = L upon u^perp and u'^perp; primitive kernel via the Smith form
        den = 1
        for x in self.u_prime:
            den = den * x.denominator // math.gcd(den, x.denominator)
        rows = [
            [int(p) for p in pairings],
            [int(den * x) for x in mat_vec(lattice.gram, self.u_prime)],
        ]
        _, d, v = smith_normal_form(rows)
        r = sum(1 for i in range(min(2, n)) if d[i][i] != 0)
        self.k_basis = [[v[i][j] for i in range(n)] for j in range(r, n)]
        from .exact import gram_of_sublist
        kg = gram_of_sublist(lattice.gram, self.k_basis)
        self.k_gram = [[int(x) for x in row] for row in kg]
        self.k_lattice = EvenLattice(self.k_gram, f"{lattice.name}|K") if self.k_basis else None

    @property
    def q_u_prime(self) -> Fraction:
        return self.lattice.q(self.u_prime)

    def k_to_ambient(self, kv) -> list[Fraction]:
        n = self.lattice.rank
        out = [Fraction(0)] * n
        for c, b in zip(kv, self.k_basis):
            for i in range(n):
                out[i] += Fraction(c) * b[i]
        return out

    def project_to_k(self, v) -> list[Fraction]:
        """v - (v,u)u' - [(v,u') - (v,u)(u',u')]u, the K-component for level 1."""
        lat = self.lattice
        vu = lat.pair(v, self.u)
        vup = lat.pair(v, self.u_prime)
        upup = lat.pair(self.u_prime, self.u_prime)
        v = vec_frac(list(v))
        for i in range(lat.rank):
            v[i] -= vu * self.u_prime[i] + (vup - vu * upup) * Fraction(self.u[i])
        return v

    def ambient_to_k_coords(self, v) -> list[Fraction]:
        """Coordinates of a vector of K (x) R in the K-basis."""
        if not self.k_basis:
            return []
        kg = mat_frac(self.k_gram)
        rhs = [bilinear(self.lattice.gram, v, b) for b in self.k_basis]
        from .exact import solve_rational
        return solve_rational(kg, rhs)


def split_hyperbolic(lattice: EvenLattice, bound: int = 10,
                     u: list[int] | None = None) -> HyperbolicSplit:
    """Hyperbolic splitting data for the first primitive isotropic vector found.

    Candidates are scanned by growing max-norm shells, fewest nonzero
    coordinates first, then descending lexicographic order; a caller-supplied
    u overrides the search.
    """
    if u is not None:
        return HyperbolicSplit(lattice, u)
    n = lattice.rank
    for v in _isotropic_candidates(n, bound):
        if lattice.q(v) != 0:
            continue
        g = math.gcd(*[abs(x) for x in v])
        if g == 1:
            return HyperbolicSplit(lattice, list(v))
    raise SplitError(
        f"no primitive isotropic vector with coordinates up to {bound}; "
        "increase the bound or the lattice may not split a hyperbolic plane"
    )


def _bezout_combination(u: list[int]) -> list[int]:
    """y with <u, y> = gcd(u) = 1, built by sequential extended gcd."""
    y = [0] * len(u)
    g = 0
    for i, x in enumerate(u):
        if x == 0:
            continue
        if g == 0:
            g = abs(x)
            y[i] = 1 if x > 0 else -1
            continue
        gn, a, b = _xgcd(g, x)
        for j in range(i):
            y[j] *= a
        y[i] = b
        g = gn
    if g != 1:
        raise ValueError("vector is not primitive")
    return y


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
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


class FrameSplitGeometry:
    """Projections and derived vectors for a frame together with a splitting."""

    def __init__(self, frame: Frame, split: HyperbolicSplit, tol: float = 1e-10):
        if frame.lattice.gram != split.lattice.gram:
            raise ValueError("frame and split belong to different lattices")
        self.frame = frame
        self.split = split
        xu = frame.standard(split.u)
        self.xu_pos = xu[: frame.bpos]
        self.xu_neg = xu[frame.bpos:]
        self.u2_zperp = float(self.xu_pos @ self.xu_pos)
        self.u2_z = -float(self.xu_neg @ self.xu_neg)
        if self.u2_zperp < tol:
            raise ValueError("degenerate frame: u has no positive component")

    def projections(self, v) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(v_z, v_zperp, v_w, v_wperp) as coordinate vectors."""
        f = self.frame
        x = f.standard(v)
        xp = x[: f.bpos].copy()
        xm = x[f.bpos:].copy()
        z_std = np.concatenate([np.zeros_like(xp), xm])
        zperp_std = np.concatenate([xp, np.zeros_like(xm)])
        # subtract the u_z / u_zperp components inside each part
        w_m = xm - (xm @ self.xu_neg) / (self.xu_neg @ self.xu_neg) * self.xu_neg
        w_p = xp - (xp @ self.xu_pos) / (self.xu_pos @ self.xu_pos) * self.xu_pos
        w_std = np.concatenate([np.zeros_like(xp), w_m])
        wperp_std = np.concatenate([w_p, np.zeros_like(xm)])
        inv = f.from_standard
        return inv(z_std), inv(zperp_std), inv(w_std), inv(wperp_std)

    def borw_std(self, v) -> np.ndarray:
        """Standard coordinates of g(v_wperp + v_w)."""
        f = self.frame
        x = f.standard(v)
        xp = x[: f.bpos]
        xm = x[f.bpos:]
        w_p = xp - (xp @ self.xu_pos) / (self.xu_pos @ self.xu_pos) * self.xu_pos
        w_m = xm - (xm @ self.xu_neg) / (self.xu_neg @ self.xu_neg) * self.xu_neg
        return np.concatenate([w_p, w_m])

    def borw_matrix(self) -> np.ndarray:
        """Matrix taking coordinates to the standard coordinates of borw."""
        f = self.frame
        p = np.eye(f.bpos + f.bneg)
        up = self.xu_pos / math.sqrt(self.xu_pos @ self.xu_pos)
        um = self.xu_neg / math.sqrt(self.xu_neg @ self.xu_neg)
        p[: f.bpos, : f.bpos] -= np.outer(up, up)
        p[f.bpos:, f.bpos:] -= np.outer(um, um)
        return p @ f.matrix

    def mu(self) -> np.ndarray:
        """mu = -u' + u_zperp / u_zperp^2 / 2 + u_z / u_z^2 / 2, in coordinates."""
        f = self.frame
        uperp_std = np.concatenate([self.xu_pos, np.zeros(f.bneg)])
        uz_std = np.concatenate([np.zeros(f.bpos), self.xu_neg])
        mu_std = uperp_std / (2 * self.u2_zperp) + uz_std / (2 * self.u2_z)
        return -np.array([float(x) for x in self.split.u_prime]) + f.from_standard(mu_std)


def eichler_transform(lattice: EvenLattice, u, lam) -> list[list[Fraction]]:
    """Matrix of E(u, lam): v -> v - (v,u)lam + (v,lam)u - q(lam)(v,u)u.

    Requires q(u) = 0 and (u, lam) = 0 exactly.
    """
    u = vec_frac(list(u))
    lam = vec_frac(list(lam))
    if lattice.q(u) != 0:
        raise ValueError("u must be isotropic")
    if lattice.pair(u, lam) != 0:
        raise ValueError("lam must be orthogonal to u")
    qlam = lattice.q(lam)
    n = lattice.rank
    cols = []
    for i in range(n):
        v = vec_frac(unit_vector(n, i))
        vu = lattice.pair(v, u)
        vl = lattice.pair(v, lam)
        col = [v[k] - vu * lam[k] + vl * u[k] - qlam * vu * u[k] for k in range(n)]
        cols.append(col)
    return [[cols[j][i] for j in range(n)] for i in range(n)]
