"""Truncated theta series: genus-2, Jacobi, and their reduction identities.

Every series is evaluated per discriminant class by summing over lattice
points inside a majorant ellipsoid.  Enumeration is lexicographic so sums
are reproducible; an adaptive radius grows until successive partial sums
agree and a Gaussian shell bound certifies the tail.  Value vectors are
indexed compatibly with the Weil representation matrices: single classes by
element index, class pairs by a.index * |D| + b.index.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

from .lattice import (EvenLattice, Frame, FrameSplitGeometry, HyperbolicSplit,
                      e2pi)
from .polynomials import (IndexTuple, Poly, build_Q_alpha, decompose_P_w,
                          eval_poly_on_grid, exp_operator, xvar)
from .weil import mp2_word_phi, mp4_word_phi, rho1_word, rho2_word, standard_lift

TWOPI = 2.0 * math.pi
_CHUNK = 1 << 18
_MAX_POINTS = 3 * 10 ** 7


class SiegelPoint:
    """Point tau = x + iy of the genus-2 Siegel upper half space."""

    def __init__(self, tau, tol: float = 1e-12):
        t = np.asarray(tau, dtype=complex)
        if t.shape == (3,):
            t = np.array([[t[0], t[1]], [t[1], t[2]]])
        if t.shape != (2, 2):
            raise ValueError("tau must be a 2x2 matrix or a triple")
        if abs(t[0, 1] - t[1, 0]) > 1e-10:
            raise ValueError("tau must be symmetric")
        mid = 0.5 * (t[0, 1] + t[1, 0])
        self.tau = np.array([[t[0, 0], mid], [mid, t[1, 1]]])
        self.x = self.tau.real.copy()
        self.y = self.tau.imag.copy()
        # positive definiteness via leading principal minors
        if self.y[0, 0] <= tol or float(np.linalg.det(self.y)) <= tol:
            raise ValueError("Im tau is not positive definite")
        self.yinv = np.linalg.inv(self.y)
        self.dety = float(np.linalg.det(self.y))
        self._sqrty = None

    @property
    def sqrty(self) -> np.ndarray:
        if self._sqrty is None:
            w, v = np.linalg.eigh(self.y)
            self._sqrty = (v * np.sqrt(w)) @ v.T
        return self._sqrty

    def translate(self, bmat) -> "SiegelPoint":
        return SiegelPoint(self.tau + np.asarray(bmat, dtype=float))


class JacobiPoint:
    """Point (tau1, tau2) of the Jacobi upper half space H x C."""

    def __init__(self, tau1: complex, tau2: complex, tol: float = 1e-12):
        self.tau1 = complex(tau1)
        self.tau2 = complex(tau2)
        if self.tau1.imag <= tol:
            raise ValueError("Im tau1 must be positive")
        self.y1 = self.tau1.imag
        self.y2 = self.tau2.imag


class TruncatedThetaValue:
    """Finite truncation of a theta vector plus error bookkeeping."""

    def __init__(self, value, radius: float, terms_used: int,
                 tail_estimate: float):
        self.value = np.asarray(value, dtype=complex)
        self.radius = float(radius)
        self.terms_used = int(terms_used)
        self.tail_estimate = abs(float(tail_estimate))

    def __repr__(self) -> str:
        return (f"TruncatedThetaValue(dim={self.value.size}, "
                f"radius={self.radius:.3f}, terms={self.terms_used}, "
                f"tail={self.tail_estimate:.2e})")


def ellipsoid_points(gram, center, bound) -> np.ndarray:
    """All integer v with (v + center)^T gram (v + center) <= bound.

    gram must be positive definite.  Rows come back lexicographically sorted
    so downstream summation order is stable.
    """
    G = np.asanyarray(gram, dtype=float)
    n = G.shape[0]
    if n == 0:
        return np.zeros((1, 0), dtype=np.int32)
    c = np.asarray(center, dtype=float).reshape(n)
    if bound < 0:
        return np.zeros((0, n), dtype=np.int32)
    R = np.linalg.cholesky(G).T
    fuzz = 1e-9 * (1.0 + abs(float(bound)))
    V = np.zeros((1, n), dtype=np.int32)
    T = np.zeros((1, n))
    rem = np.array([float(bound) + fuzz])
    for i in range(n - 1, -1, -1):
        root = np.sqrt(np.maximum(rem, 0.0))
        lo = np.ceil((-root - T[:, i]) / R[i, i] - c[i] - 1e-9).astype(np.int64)
        hi = np.floor((root - T[:, i]) / R[i, i] - c[i] + 1e-9).astype(np.int64)
        cnt = np.maximum(hi - lo + 1, 0)
        total = int(cnt.sum())
        if total == 0:
            return np.zeros((0, n), dtype=np.int32)
        if total > _MAX_POINTS:
            raise RuntimeError(
                "ellipsoid enumeration exceeds %d points; "
                "the truncation bound is too large for this precision"
                % _MAX_POINTS)
        idx = np.repeat(np.arange(lo.size), cnt)
        starts = np.cumsum(cnt) - cnt
        vi = np.repeat(lo, cnt) + (np.arange(total) - np.repeat(starts, cnt))
        wi = vi + c[i]
        contrib = R[i, i] * wi + T[idx, i]
        rem = rem[idx] - contrib * contrib
        keep = rem >= -fuzz
        idx, vi, rem = idx[keep], vi[keep], rem[keep]
        wi = wi[keep]
        V = V[idx]
        V[:, i] = vi.astype(np.int32)
        T = T[idx]
        if i > 0:
            T[:, :i] += wi[:, None] * R[:i, i][None, :]
    return V[np.lexsort(V.T[::-1])]


def enumerate_majorant(lattice: EvenLattice, frame: Frame, center,
                       radius: float) -> np.ndarray:
    """Lattice vectors v with majorant norm of v + center at most radius^2."""
    c = np.array([float(t) for t in center])
    if c.size != lattice.rank:
        raise ValueError("center has the wrong length")
    return ellipsoid_points(frame.majorant_matrix(), c, float(radius) ** 2)


class _Geometry:
    """Coordinate maps shared by the theta evaluators.

    full_map sends lattice coordinates to the frame's grid rows (positive
    rows first).  For a split-off sublattice the map composes the embedding
    with the projection away from the split directions, so polynomials keep
    their ambient row indices and the effective negative rank drops by one.
    """

    def __init__(self, gram, full_map, bpos: int, b_neg_eff: int, disc):
        self.gram = np.asarray(gram, dtype=float)
        self.full_map = np.asarray(full_map, dtype=float)
        self.bpos = bpos
        self.rows = self.full_map.shape[0]
        self.b_neg_eff = b_neg_eff
        self.majorant = self.full_map.T @ self.full_map
        self.disc = disc
        self.lifts = [np.array([float(t) for t in disc.lift(el)])
                      for el in disc.elements]


def _frame_geometry(lattice: EvenLattice, frame: Frame) -> _Geometry:
    return _Geometry(np.array(lattice.gram, dtype=float), frame.matrix,
                     frame.bpos, frame.bneg, lattice.discriminant_group())


def _k_geometry(splitg: FrameSplitGeometry) -> _Geometry:
    split = splitg.split
    embed = np.array([[float(x) for x in vec] for vec in split.k_basis]).T
    kmap = splitg.borw_matrix() @ embed
    return _Geometry(np.array(split.k_gram, dtype=float), kmap,
                     splitg.frame.bpos, splitg.frame.bneg - 1,
                     split.k_lattice.discriminant_group())


def _k_coords(split: HyperbolicSplit, ambient_vec, lattice: EvenLattice
              ) -> np.ndarray:
    """Sublattice coordinates of the orthogonal projection of a real vector."""
    G = np.array(lattice.gram, dtype=float)
    KE = np.array([[float(x) for x in vec] for vec in split.k_basis]).T
    KG = KE.T @ G @ KE
    return np.linalg.solve(KG, KE.T @ G @ np.asarray(ambient_vec, dtype=float))


def _pair_rows(v, n: int) -> np.ndarray:
    if v is None:
        return np.zeros((2, n))
    a = np.array([[float(t) for t in row] for row in v])
    if a.shape != (2, n):
        raise ValueError("expected a pair of coordinate vectors")
    return a


def _single_row(v, n: int) -> np.ndarray:
    if v is None:
        return np.zeros(n)
    a = np.array([float(t) for t in v])
    if a.shape != (n,):
        raise ValueError("expected one coordinate vector")
    return a


def _yl(point: SiegelPoint) -> list:
    return [[float(point.yinv[0, 0]), float(point.yinv[0, 1])],
            [float(point.yinv[1, 0]), float(point.yinv[1, 1])]]


def _accumulate(tv: np.ndarray, reference: bool) -> complex:
    if reference:
        return complex(math.fsum(tv.real), math.fsum(tv.imag))
    return complex(tv.sum())


def _adaptive(eval_at, eps: float, deg: int):
    """Grow the cut until the rim of the ball certifies the tail.

    Terms live under exp(-pi * qf) with qf the majorant form, so each unit
    step outward shrinks the largest surviving term by exp(-pi) while point
    counts grow only polynomially.  The absolute mass of the width-1 rim
    therefore dominates the whole remaining tail by a wide margin; three
    times the rim is the certificate.  A successive-cut difference is folded
    in whenever a previous evaluation exists.
    """
    bound = (math.log(1.0 / eps) + 2.0
             + 0.6 * deg * math.log(2.0 + math.log(1.0 / eps))) / math.pi
    prev = None
    for _ in range(12):
        vals, rim, used = eval_at(bound)
        diff = 0.0
        if prev is not None and vals.size:
            diff = float(np.max(np.abs(vals - prev)))
        if 3.0 * rim <= 0.5 * eps and diff <= 0.5 * eps:
            tail = diff + 3.0 * rim + 1e-15 * (1.0 + used)
            return vals, bound, used, tail
        prev = vals
        bound *= 1.25
    raise RuntimeError("theta truncation did not stabilize")


def _theta2_eval(geo: _Geometry, point: SiegelPoint, alpha: np.ndarray,
                 beta: np.ndarray, op: Poly, bound: float,
                 reference: bool = False):
    """One fixed-cut pass of the genus-2 sum; raw values without prefactor."""
    disc = geo.disc
    nd = disc.order
    bp = geo.bpos
    nlat = geo.gram.shape[0]
    t1, t2, t3 = point.tau[0, 0], point.tau[0, 1], point.tau[1, 1]
    c1, c2, c3 = t1.conjugate(), t2.conjugate(), t3.conjugate()
    y1, y2, y3 = point.y[0, 0], point.y[0, 1], point.y[1, 1]
    G2 = np.kron(point.y, geo.majorant)
    ga1 = geo.gram @ alpha[0]
    ga2 = geo.gram @ alpha[1]
    out = np.zeros(nd * nd, dtype=complex)
    shell = 0.0
    used = 0
    for g1 in disc.elements:
        off1 = geo.lifts[g1.index] + beta[0]
        for g2 in disc.elements:
            off2 = geo.lifts[g2.index] + beta[1]
            center = np.concatenate([off1, off2])
            pts = ellipsoid_points(G2, center, bound)
            used += pts.shape[0]
            if pts.shape[0] == 0:
                continue
            parts = []
            for start in range(0, pts.shape[0], _CHUNK):
                W = pts[start:start + _CHUNK] + center
                v1, v2 = W[:, :nlat], W[:, nlat:]
                X1 = v1 @ geo.full_map.T
                X2 = v2 @ geo.full_map.T
                p1, m1 = X1[:, :bp], X1[:, bp:]
                p2, m2 = X2[:, :bp], X2[:, bp:]
                qp1 = 0.5 * np.einsum("ij,ij->i", p1, p1)
                qp2 = 0.5 * np.einsum("ij,ij->i", p2, p2)
                qm1 = -0.5 * np.einsum("ij,ij->i", m1, m1)
                qm2 = -0.5 * np.einsum("ij,ij->i", m2, m2)
                pp = np.einsum("ij,ij->i", p1, p2)
                pm = -np.einsum("ij,ij->i", m1, m2)
                phase = (qp1 * t1 + pp * t2 + qp2 * t3
                         + qm1 * c1 + pm * c2 + qm2 * c3
                         - (v1 - 0.5 * beta[0]) @ ga1
                         - (v2 - 0.5 * beta[1]) @ ga2)
                grid = np.stack([X1, X2], axis=2)
                tv = eval_poly_on_grid(op, grid) * np.exp(1j * TWOPI * phase)
                maj1 = 2.0 * (qp1 - qm1)
                maj2 = 2.0 * (qp2 - qm2)
                qf = y1 * maj1 + 2.0 * y2 * (pp - pm) + y3 * maj2
                shell += float(np.abs(tv)[qf >= bound - 1.0].sum())
                parts.append(_accumulate(tv, reference))
            if reference:
                out[g1.index * nd + g2.index] = complex(
                    math.fsum(z.real for z in parts),
                    math.fsum(z.imag for z in parts))
            else:
                out[g1.index * nd + g2.index] = sum(parts)
    return out, shell, used


def _theta2_geo(geo: _Geometry, point: SiegelPoint, alpha, beta,
                poly: Poly | None, eps: float, m_minus: int = 0,
                reference: bool = False) -> TruncatedThetaValue:
    nlat = geo.gram.shape[0]
    a = _pair_rows(alpha, nlat)
    b = _pair_rows(beta, nlat)
    p = Poly.const(1) if poly is None else poly
    op = exp_operator(p, _yl(point), geo.rows)
    vals, bound, used, tail = _adaptive(
        lambda B: _theta2_eval(geo, point, a, b, op, B, reference),
        eps, max(p.total_degree(), 0))
    pref = point.dety ** (0.5 * geo.b_neg_eff + m_minus)
    return TruncatedThetaValue(pref * vals, math.sqrt(bound), used,
                               pref * tail)


def theta_genus2(lattice: EvenLattice, point: SiegelPoint, alpha, beta,
                 frame: Frame, poly: Poly | None, eps: float = 1e-8,
                 m_minus: int = 0, reference: bool = False
                 ) -> TruncatedThetaValue:
    """Genus-2 theta with polynomial insertion, valued on class pairs.

    alpha and beta are pairs of real coordinate vectors (rows), or None for
    zero.  m_minus adds to the imaginary-part determinant power in front.
    """
    geo = _frame_geometry(lattice, frame)
    return _theta2_geo(geo, point, alpha, beta, poly, eps, m_minus, reference)


def _thetaJ_eval(geo: _Geometry, eta_coords: np.ndarray, point: JacobiPoint,
                 alpha: np.ndarray, beta: np.ndarray, op: Poly, bound: float):
    """One fixed-cut pass of the Jacobi sum; raw values without prefactor."""
    disc = geo.disc
    bp = geo.bpos
    t1, t2 = point.tau1, point.tau2
    c1, c2 = t1.conjugate(), t2.conjugate()
    ratio = point.y2 / point.y1
    xeta = geo.full_map @ eta_coords
    shift = ratio * eta_coords
    ga = geo.gram @ alpha
    G1 = point.y1 * geo.majorant
    out = np.zeros(disc.order, dtype=complex)
    shell = 0.0
    used = 0
    for el in disc.elements:
        base = geo.lifts[el.index] + beta
        pts = ellipsoid_points(G1, base + shift, bound)
        used += pts.shape[0]
        if pts.shape[0] == 0:
            continue
        V = pts + base
        X = V @ geo.full_map.T
        p, m = X[:, :bp], X[:, bp:]
        qp = 0.5 * np.einsum("ij,ij->i", p, p)
        qm = -0.5 * np.einsum("ij,ij->i", m, m)
        lp = p @ xeta[:bp]
        lm = -(m @ xeta[bp:])
        phase = (qp * t1 + qm * c1 + lp * t2 + lm * c2
                 - (V - 0.5 * beta) @ ga)
        grid = np.zeros((pts.shape[0], geo.rows, 2))
        grid[:, :, 0] = X + ratio * xeta[None, :]
        tv = eval_poly_on_grid(op, grid) * np.exp(1j * TWOPI * phase)
        Vs = V + shift
        qf = point.y1 * np.einsum("ij,ij->i", Vs @ geo.majorant, Vs)
        shell += float(np.abs(tv)[qf >= bound - 1.0].sum())
        out[el.index] = complex(tv.sum())
    return out, shell, used


def _theta_jacobi_geo(geo: _Geometry, eta_coords: np.ndarray,
                      point: JacobiPoint, alpha, beta, poly: Poly | None,
                      eps: float) -> TruncatedThetaValue:
    nlat = geo.gram.shape[0]
    a = _single_row(alpha, nlat)
    b = _single_row(beta, nlat)
    p = Poly.const(1) if poly is None else poly
    op = exp_operator(p, [[1.0 / point.y1, 0.0], [0.0, 0.0]], geo.rows)
    vals, bound, used, tail = _adaptive(
        lambda B: _thetaJ_eval(geo, eta_coords, point, a, b, op, B),
        eps, max(p.total_degree(), 0))
    xeta = geo.full_map @ eta_coords
    qm_eta = -0.5 * float(xeta[geo.bpos:] @ xeta[geo.bpos:])
    pref = (point.y1 ** (0.5 * geo.b_neg_eff)
            * math.exp(2.0 * TWOPI * qm_eta * point.y2 ** 2 / point.y1))
    return TruncatedThetaValue(pref * vals, math.sqrt(bound), used,
                               pref * tail)


def theta_jacobi(lattice: EvenLattice, eta, point: JacobiPoint, alpha, beta,
                 frame: Frame, poly: Poly | None, eps: float = 1e-8
                 ) -> TruncatedThetaValue:
    """Jacobi theta of index eta (a dual vector), valued on classes.

    eta is given in lattice coordinates and may be rational; the polynomial
    uses only the first grid column.
    """
    geo = _frame_geometry(lattice, frame)
    ec = np.array([float(t) for t in eta])
    return _theta_jacobi_geo(geo, ec, point, alpha, beta, poly, eps)


def schrodinger_F_alpha(lattice: EvenLattice, point: SiegelPoint,
                        frame: Frame, alpha: IndexTuple, eps: float = 1e-8
                        ) -> TruncatedThetaValue:
    """Theta sum of the index-polynomial Gaussian in the oscillator model.

    No imaginary-part prefactor appears; agreement with theta_genus2 on the
    matching quartic is the headline identity this pairs with.
    """
    geo = _frame_geometry(lattice, frame)
    q = build_Q_alpha(alpha, frame.bpos)
    disc = geo.disc
    nd = disc.order
    nlat = lattice.rank
    sq = point.sqrty
    x1, x2, x3 = point.x[0, 0], point.x[0, 1], point.x[1, 1]
    y1, y2, y3 = point.y[0, 0], point.y[0, 1], point.y[1, 1]
    G2 = np.kron(point.y, geo.majorant)
    bp = geo.bpos

    def eval_at(bound):
        out = np.zeros(nd * nd, dtype=complex)
        shell = 0.0
        used = 0
        for g1 in disc.elements:
            for g2 in disc.elements:
                center = np.concatenate([geo.lifts[g1.index],
                                         geo.lifts[g2.index]])
                pts = ellipsoid_points(G2, center, bound)
                used += pts.shape[0]
                if pts.shape[0] == 0:
                    continue
                W = pts + center
                v1, v2 = W[:, :nlat], W[:, nlat:]
                X1 = v1 @ geo.full_map.T
                X2 = v2 @ geo.full_map.T
                q1 = 0.5 * (np.einsum("ij,ij->i", X1[:, :bp], X1[:, :bp])
                            - np.einsum("ij,ij->i", X1[:, bp:], X1[:, bp:]))
                q2 = 0.5 * (np.einsum("ij,ij->i", X2[:, :bp], X2[:, :bp])
                            - np.einsum("ij,ij->i", X2[:, bp:], X2[:, bp:]))
                q12 = (np.einsum("ij,ij->i", X1[:, :bp], X2[:, :bp])
                       - np.einsum("ij,ij->i", X1[:, bp:], X2[:, bp:]))
                grid = np.stack([X1, X2], axis=2)
                grids = np.einsum("nrj,jk->nrk", grid, sq)
                gauss = np.exp(-math.pi * np.einsum("nrk,nrk->n", grids,
                                                    grids))
                tv = (eval_poly_on_grid(q, grids) * gauss
                      * np.exp(1j * TWOPI * (q1 * x1 + q12 * x2 + q2 * x3)))
                maj1 = np.einsum("ij,ij->i", X1, X1)
                maj2 = np.einsum("ij,ij->i", X2, X2)
                m12 = np.einsum("ij,ij->i", X1, X2)
                qf = y1 * maj1 + 2.0 * y2 * m12 + y3 * maj2
                shell += float(np.abs(tv)[qf >= bound - 1.0].sum())
                out[g1.index * nd + g2.index] = complex(tv.sum())
        return out, shell, used

    vals, bound, used, tail = _adaptive(eval_at, eps, 4)
    return TruncatedThetaValue(vals, math.sqrt(bound), used, tail)


def km_schwartz_coefficients(vpair, frame: Frame) -> dict:
    """Values of the special Schwartz functions at one pair of real vectors.

    Keys are the admissible index 4-tuples (a1, a2, b1, b2) with a1 < b1 and
    a2 < b2; values are the real numbers (Q_alpha phi_0)(g(v)).
    """
    b = frame.bpos
    X = np.stack([frame.standard(np.array([float(t) for t in vpair[0]])),
                  frame.standard(np.array([float(t) for t in vpair[1]]))],
                 axis=1)
    gauss = math.exp(-math.pi * float(np.sum(X * X)))
    out = {}
    for a1 in range(1, b + 1):
        for b1 in range(a1 + 1, b + 1):
            for a2 in range(1, b + 1):
                for b2 in range(a2 + 1, b + 1):
                    alpha = IndexTuple(a1, a2, b1, b2)
                    q = build_Q_alpha(alpha, b)
                    val = complex(eval_poly_on_grid(q, X[None, :, :])[0])
                    out[alpha.as_tuple()] = float(val.real) * gauss
    return out


def cd_rows(bound: int) -> np.ndarray:
    """Integer rows (c1, c2, d1, d2) with max-norm at most bound, lex order."""
    rng = np.arange(-bound, bound + 1)
    grids = np.meshgrid(rng, rng, rng, rng, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def splitting_rhs(lattice: EvenLattice, split: HyperbolicSplit, frame: Frame,
                  point: SiegelPoint, poly: Poly | None, bound: int,
                  eps: float = 1e-8) -> TruncatedThetaValue:
    """Genus-2 theta rebuilt from the split-off sublattice.

    Sums translated sublattice thetas over all integer rows (c, d) up to the
    given max-norm; the isotropic vector must have level one so the two
    discriminant groups match.  Rows whose Gaussian weight is below 1e-18
    are skipped.
    """
    if split.level != 1:
        raise ValueError("splitting needs a level-one isotropic vector")
    splitg = FrameSplitGeometry(frame, split)
    kgeo = _k_geometry(splitg)
    disc = lattice.discriminant_group()
    kdisc = kgeo.disc
    nd, nk = disc.order, kdisc.order
    if nd != nk:
        raise ValueError("discriminant groups do not match")
    kindex = [kdisc.class_of(split.ambient_to_k_coords(
        split.project_to_k(disc.lift(el)))).index for el in disc.elements]
    pairmap = np.array([kindex[a] * nk + kindex[b]
                        for a in range(nd) for b in range(nd)])
    u2p = splitg.u2_zperp
    mu_k = _k_coords(split, splitg.mu(), lattice)
    p = Poly.const(1) if poly is None else poly
    comps = decompose_P_w(p, [float(v) for v in splitg.xu_pos], frame.bpos)
    deg = max(p.total_degree(), 0)
    ops = {key: exp_operator(cp, _yl(point), kgeo.rows)
           for key, cp in comps.items() if not cp.is_zero()}
    pref = point.dety ** (0.5 * kgeo.b_neg_eff)
    scale = 1.0 / (2.0 * u2p)
    out = np.zeros(nd * nd, dtype=complex)
    tail = 0.0
    used = 0
    radius = 0.0
    edge = 0.0
    for row in cd_rows(bound):
        c, d = row[:2], row[2:]
        w = c @ point.tau + d
        damp = math.exp(-math.pi * scale
                        * float((w.conj() @ point.yinv @ w).real))
        if damp < 1e-18:
            continue
        avec = w.conj() @ point.yinv
        alph = np.stack([d[0] * mu_k, d[1] * mu_k])
        bet = np.stack([-c[0] * mu_k, -c[1] * mu_k])
        local = np.zeros(nd * nd, dtype=complex)
        for (h1, h2), op in ops.items():
            coeff = (damp * avec[0] ** h1 * avec[1] ** h2
                     / (-2j) ** (h1 + h2))
            if coeff == 0:
                continue
            kv, kb, ku, kt = _adaptive(
                lambda B: _theta2_eval(kgeo, point, alph, bet, op, B),
                eps, deg)
            local += (pref * scale) * coeff * kv[pairmap]
            tail += abs(coeff) * pref * scale * kt
            used += ku
            radius = max(radius, math.sqrt(kb))
        out += local
        if bound >= 1 and int(np.max(np.abs(row))) == bound:
            edge = max(edge, float(np.max(np.abs(local))))
    return TruncatedThetaValue(out, radius, used, tail + 2.0 * edge)


def fourier_jacobi_rhs(lattice: EvenLattice, point: SiegelPoint, frame: Frame,
                       poly: Poly | None, delta=None, eps: float = 1e-8,
                       layer=None) -> TruncatedThetaValue:
    """Genus-2 theta rebuilt from its Jacobi pieces along the last variable.

    delta is an optional pair shift entering like the genus-2 alpha.  With
    layer=(class2, m) only the indices of norm m in that class are kept and
    the returned vector runs over first classes, with the last-variable
    phase replaced by its absolute value.
    """
    geo = _frame_geometry(lattice, frame)
    disc = geo.disc
    nd = disc.order
    nlat = lattice.rank
    dpair = _pair_rows(delta, nlat)
    t3 = point.tau[1, 1]
    y1 = float(point.y[0, 0])
    y3 = float(point.y[1, 1])
    dety = point.dety
    # (det y / y1)^(b-/2) balances the two prefactor conventions: det y^(b-/2)
    # in front of the genus-2 sum against y1^(b-/2) in front of each Jacobi
    # piece.  Any fixed exponent works only at the matching negative rank.
    fj_pref = (dety / y1) ** (0.5 * frame.bneg)
    c22 = float(point.yinv[1, 1])
    p = Poly.const(1) if poly is None else poly
    deg = max(p.total_degree(), 0)
    op2 = exp_operator(p, [[0.0, 0.0], [0.0, c22]], geo.rows)
    jp = JacobiPoint(point.tau[0, 0], point.tau[0, 1])
    geta = (dety / y1) * geo.majorant
    bp = geo.bpos
    gdelta2 = geo.gram @ dpair[1]
    classes2 = disc.elements if layer is None else [layer[0]]
    zero = np.zeros(nlat)

    def eval_at(bound):
        out = np.zeros(nd if layer is not None else nd * nd, dtype=complex)
        shell = 0.0
        used = 0
        for g2 in classes2:
            lift2 = geo.lifts[g2.index]
            pts = ellipsoid_points(geta, lift2, bound)
            for pt in pts:
                ec = pt + lift2
                xeta = geo.full_map @ ec
                qpe = 0.5 * float(xeta[:bp] @ xeta[:bp])
                qme = -0.5 * float(xeta[bp:] @ xeta[bp:])
                qe = qpe + qme
                if layer is not None and abs(qe - layer[1]) > 1e-9:
                    continue
                sub = {xvar(i, 1): Poly.const(float(xeta[i]))
                       for i in range(geo.rows)}
                opj = exp_operator(op2.subs(sub),
                                   [[1.0 / y1, 0.0], [0.0, 0.0]], geo.rows)
                vals, sh, us = _thetaJ_eval(geo, ec, jp, dpair[0], zero, opj,
                                            bound)
                used += us
                prefj = (y1 ** (0.5 * geo.b_neg_eff)
                         * math.exp(2.0 * TWOPI * qme * jp.y2 ** 2 / y1))
                factor = (math.exp(2.0 * TWOPI * qme * dety / y1)
                          * cmath.exp(-1j * TWOPI * float(ec @ gdelta2)))
                if layer is None:
                    factor *= cmath.exp(1j * TWOPI * qe * t3)
                else:
                    factor *= math.exp(-TWOPI * qe * y3)
                contrib = fj_pref * prefj * factor * vals
                scalar = abs(fj_pref * prefj * factor)
                shell += sh * scalar
                mform = (dety / y1) * float(ec @ geo.majorant @ ec)
                if mform >= bound - 1.0:
                    shell += float(np.max(np.abs(contrib)))
                if layer is None:
                    out[g2.index::nd] += contrib
                else:
                    out += contrib
        return out, shell, used

    vals, bound, used, tail = _adaptive(eval_at, eps, deg)
    return TruncatedThetaValue(vals, math.sqrt(bound), used, tail)


def genus2_layer_quadrature(lattice: EvenLattice, point: SiegelPoint,
                            frame: Frame, poly: Poly | None, class2, m,
                            delta=None, nodes: int = 32, eps: float = 1e-8
                            ) -> np.ndarray:
    """Rectangle-rule extraction of one Fourier layer in the last variable.

    Averages the genus-2 theta over unit translates of Re tau_3 against the
    matching character; the result is comparable with the layer mode of
    fourier_jacobi_rhs.
    """
    nd = lattice.discriminant_group().order
    acc = np.zeros(nd, dtype=complex)
    for k in range(nodes):
        t = k / nodes
        shifted = SiegelPoint(point.tau + np.array([[0.0, 0.0], [0.0, t]]))
        th = theta_genus2(lattice, shifted, delta, None, frame, poly, eps)
        x3 = float(shifted.x[1, 1])
        acc += th.value[class2.index::nd] * cmath.exp(-1j * TWOPI * m * x3)
    return acc / nodes


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_s, s = s, old_s - qt * s
        old_t, t = t, old_t - qt * t
    return old_r, old_s, old_t


def jacobi_poincare_rhs(lattice: EvenLattice, eta, split: HyperbolicSplit,
                        frame: Frame, point: JacobiPoint, poly: Poly | None,
                        coset_bound: int, n_bound: int, eps: float = 1e-8
                        ) -> TruncatedThetaValue:
    """Jacobi theta rebuilt from the split sublattice plus parabolic cosets.

    eta must pair to zero with the isotropic vector.  Cosets run over
    coprime (c, d) with entries up to coset_bound; the inner index runs to
    n_bound.  Contributions whose Gaussian weight is negligible are skipped.
    """
    eta = [Fraction(t) for t in eta]
    if lattice.pair(eta, split.u) != 0:
        raise ValueError("eta must pair to zero with the isotropic vector")
    splitg = FrameSplitGeometry(frame, split)
    kgeo = _k_geometry(splitg)
    disc = lattice.discriminant_group()
    kdisc = kgeo.disc
    N = split.level
    u2p = splitg.u2_zperp
    root = math.sqrt(2.0 * u2p)
    cpe = lattice.pair(eta, split.u_prime)
    eta_k_amb = [e - cpe * u for e, u in zip(eta, split.u)]
    ek = np.array([float(t) for t in split.ambient_to_k_coords(eta_k_amb)])
    q_eta = float(lattice.q(eta))
    xe = frame.standard(np.array([float(t) for t in eta]))
    lin = float(xe[:frame.bpos] @ splitg.xu_pos)
    mu_k = _k_coords(split, splitg.mu(), lattice)
    p = Poly.const(1) if poly is None else poly
    deg = max(p.total_degree(), 0)
    comps = decompose_P_w(p, [float(v) for v in splitg.xu_pos], frame.bpos)
    ph = {h1: cp for (h1, h2), cp in comps.items()
          if h2 == 0 and not cp.is_zero()}
    imap = np.zeros((kdisc.order, N), dtype=np.int64)
    for el in kdisc.elements:
        amb = split.k_to_ambient(kdisc.lift(el))
        for m in range(N):
            vec = [a + Fraction(m * u, N) for a, u in zip(amb, split.u)]
            imap[el.index, m] = disc.class_of(vec).index
    zk = np.zeros(kgeo.gram.shape[0])
    out = np.zeros(disc.order, dtype=complex)
    main = _theta_jacobi_geo(kgeo, ek, point, None, None,
                             ph.get(0, Poly()), eps)
    for el in kdisc.elements:
        for m in range(N):
            out[imap[el.index, m]] += main.value[el.index] / root
    tail = N * main.tail_estimate / root
    used = main.terms_used
    radius = main.radius
    for c in range(-coset_bound, coset_bound + 1):
        for d in range(-coset_bound, coset_bound + 1):
            if math.gcd(c, d) != 1:
                continue
            g, xx, yy = _xgcd(d, c)
            if g < 0:
                xx, yy = -xx, -yy
            a, b = xx, -yy
            word = standard_lift(((a, b), (c, d)))
            phi = mp2_word_phi(word, point.tau1)
            pw = phi ** (-2 * deg + frame.bneg - frame.bpos)
            den = c * point.tau1 + d
            mp = JacobiPoint((a * point.tau1 + b) / den, point.tau2 / den)
            pre_eta = cmath.exp(1j * TWOPI
                                * (-q_eta * c * point.tau2 ** 2 / den))
            acc = np.zeros(disc.order, dtype=complex)
            hit = False
            for n_ in range(1, n_bound + 1):
                pre_n = cmath.exp(1j * TWOPI * (
                    -(n_ ** 2 + 4j * n_ * mp.y2 * lin)
                    / (4j * mp.y1 * u2p)))
                base = abs(pre_eta * pw * pre_n)
                for h, cp in ph.items():
                    coef = (pre_eta * pw * pre_n * n_ ** h
                            / (-2j * mp.y1) ** h)
                    if abs(coef) * 50.0 < eps * 1e-2:
                        continue
                    hit = True
                    tk = _theta_jacobi_geo(kgeo, ek, mp, n_ * mu_k, None,
                                           cp, eps)
                    used += tk.terms_used
                    radius = max(radius, tk.radius)
                    tail += abs(coef) * tk.tail_estimate / root
                    for el in kdisc.elements:
                        for m in range(N):
                            acc[imap[el.index, m]] += (
                                coef * tk.value[el.index]
                                * e2pi(Fraction(-m * n_, N)))
            if hit:
                rinv = rho1_word(disc, word).conj().T
                out += (rinv @ acc) / root
    return TruncatedThetaValue(out, radius, used, tail)


def s_case_identities_check(splitg: FrameSplitGeometry, point: SiegelPoint,
                            components: dict, eps: float = 1e-8,
                            alpha=None, beta=None) -> list[tuple[str, float]]:
    """Deviations of the three index-two component identities under inversion.

    components maps (h1, h2) to the polynomial pieces of a decomposed
    quartic; the value vectors live on class pairs of the split sublattice.
    """
    kgeo = _k_geometry(splitg)
    nk = kgeo.gram.shape[0]
    a = _pair_rows(alpha, nk)
    b = _pair_rows(beta, nk)
    inv = SiegelPoint(-np.linalg.inv(point.tau))
    rho_s = rho2_word(kgeo.disc, [("S",)])
    # The scalar in front of the mixed right side is
    #   |det tau| * det(tau)^(-(b-1)/2-2) * det(conj tau)^(-1/2)
    # which collapses to -phi_S^-(b+2) since phi_S(tau)^2 = det tau on the
    # continuous branch.  A naive det(tau)^(-b/2-2) is off by |det tau|.
    power = -mp4_word_phi([("S",)], point.tau) ** (-(splitg.frame.bpos + 2))
    t1, t2, t3 = point.tau[0, 0], point.tau[0, 1], point.tau[1, 1]
    dim = kgeo.disc.order ** 2

    def th(pt, aa, bb, key):
        cp = components.get(key, Poly())
        if cp.is_zero():
            return np.zeros(dim, dtype=complex)
        return _theta2_geo(kgeo, pt, aa, bb, cp, eps).value

    lhs = {key: th(point, a, b, key) for key in [(0, 2), (1, 1), (2, 0)]}
    far = {key: rho_s @ th(inv, -b, a, key) for key in [(0, 2), (1, 1), (2, 0)]}
    rhs = {
        (0, 2): power * (t3 * t3 * far[(0, 2)] + t2 * t3 * far[(1, 1)]
                         + t2 * t2 * far[(2, 0)]),
        (1, 1): power * (2 * t2 * t3 * far[(0, 2)]
                         + (t1 * t3 + t2 * t2) * far[(1, 1)]
                         + 2 * t1 * t2 * far[(2, 0)]),
        (2, 0): power * (t2 * t2 * far[(0, 2)] + t1 * t2 * far[(1, 1)]
                         + t1 * t1 * far[(2, 0)]),
    }
    return [("%d%d" % key, float(np.max(np.abs(lhs[key] - rhs[key]))))
            for key in [(0, 2), (1, 1), (2, 0)]]
