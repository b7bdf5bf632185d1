"""Weil representations attached to an even lattice, in genus 1 and 2.

Metaplectic elements are words in generator tokens with the automorphy
factor tracked functionally, so half-integral powers of det(C tau + D) always
refer to the branch determined by the word.  Includes the Jacobi group, its
embedding into the genus-2 group, the induced representation of fixed index,
and the coset identity used for Poincare rewriting.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

from .lattice import (
    DiscriminantGroup,
    EvenLattice,
    HyperbolicSplit,
    e2pi,
    frac_mod1,
    sqrt_i_power,
)

# ---------------------------------------------------------------------------
# genus 1: Mp2 words


def mp2_token_matrix(token) -> np.ndarray:
    kind = token[0]
    if kind == "T":
        return np.array([[1, token[1]], [0, 1]], dtype=object)
    if kind == "S":
        return np.array([[0, -1], [1, 0]], dtype=object)
    raise ValueError(f"unknown Mp2 token {token!r}")


def mp2_word_matrix(word) -> np.ndarray:
    m = np.eye(2, dtype=object)
    for token in word:
        m = m @ mp2_token_matrix(token)
    return m


def mp2_act(matrix, tau1: complex) -> complex:
    a, b = matrix[0]
    c, d = matrix[1]
    return (a * tau1 + b) / (c * tau1 + d)


def mp2_word_phi(word, tau1: complex) -> complex:
    """Automorphy factor of the word at tau1, composed right to left."""
    phi = 1.0 + 0j
    cur = tau1
    for token in reversed(word):
        if token[0] == "S":
            phi = cmath.sqrt(cur) * phi
        cur = mp2_act(mp2_token_matrix(token), cur)
    return phi


def standard_lift(m) -> list:
    """Word in T, S tokens for m in SL2(Z), matching the principal branch.

    The branch is normalized so the word's automorphy factor equals the
    principal sqrt(c tau + d); the Euclidean descent uses floor division so
    only nonnegative powers of S appear.
    """
    a, b, c, d = int(m[0][0]), int(m[0][1]), int(m[1][0]), int(m[1][1])
    if a * d - b * c != 1:
        raise ValueError("matrix is not in SL2(Z)")

    word = []
    while c != 0:
        a1 = a // c
        if a1 != 0:
            word.append(("T", a1))
        word.append(("S",))
        a, b, c, d = c, d, -(a - a1 * c), -(b - a1 * d)
    if a == 1:
        if b != 0:
            word.append(("T", b))
    else:
        word.extend([("S",), ("S",)])
        if b != 0:
            word.append(("T", -b))
    built = mp2_word_matrix(word)
    assert [[int(x) for x in row] for row in built] == \
        [[int(m[0][0]), int(m[0][1])], [int(m[1][0]), int(m[1][1])]]
    tau0 = 2j
    target = cmath.sqrt(int(m[1][0]) * tau0 + int(m[1][1]))
    if abs(mp2_word_phi(word, tau0) - target) > 1e-9:
        word.extend([("S",)] * 4)
    assert abs(mp2_word_phi(word, tau0) - target) < 1e-9
    return word


def rho1_token(disc: DiscriminantGroup, token) -> np.ndarray:
    """Genus-1 action of a single T or S token on C[D_L]."""
    n = disc.order
    sig = disc.lattice.signature
    s = sig[1] - sig[0]
    if token[0] == "T":
        phases = np.array([e2pi(disc.q_value(el) * token[1])
                           for el in disc.elements])
        return np.diag(phases)
    if token[0] == "S":
        p = np.empty((n, n), dtype=complex)
        for col in disc.elements:
            for row in disc.elements:
                p[row.index, col.index] = e2pi(-disc.bilinear_value(col, row))
        return (sqrt_i_power(s) / math.sqrt(n)) * p
    raise ValueError(f"unknown Mp2 token {token!r}")


def rho1_word(disc: DiscriminantGroup, word) -> np.ndarray:
    out = np.eye(disc.order, dtype=complex)
    for token in word:
        out = out @ rho1_token(disc, token)
    return out


# ---------------------------------------------------------------------------
# genus 2: Mp4 words

I2 = ((1, 0), (0, 1))


def mp4_token_matrix(token) -> np.ndarray:
    kind = token[0]
    if kind == "A":
        a = np.array(token[1], dtype=object)
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        if det not in (1, -1):
            raise ValueError("A block must have determinant +-1")
        ainvt = np.array([[a[1, 1], -a[1, 0]], [-a[0, 1], a[0, 0]]],
                         dtype=object) * det
        m = np.zeros((4, 4), dtype=object)
        m[:2, :2] = a
        m[2:, 2:] = ainvt
        return m
    if kind == "T":
        b = np.array(token[1], dtype=object)
        if not (b[0, 1] == b[1, 0]):
            raise ValueError("T block must be symmetric")
        m = np.eye(4, dtype=object)
        m[:2, 2:] = b
        return m
    if kind == "S":
        m = np.zeros((4, 4), dtype=object)
        m[:2, 2:] = -np.eye(2, dtype=object)
        m[2:, :2] = np.eye(2, dtype=object)
        return m
    if kind == "Z":
        return -np.eye(4, dtype=object)
    raise ValueError(f"unknown Mp4 token {token!r}")


def mp4_word_matrix(word) -> np.ndarray:
    m = np.eye(4, dtype=object)
    for token in word:
        m = m @ mp4_token_matrix(token)
    return m


def siegel_act(matrix, tau: np.ndarray) -> np.ndarray:
    m = np.array(matrix, dtype=complex)
    a, b = m[:2, :2], m[:2, 2:]
    c, d = m[2:, :2], m[2:, 2:]
    return (a @ tau + b) @ np.linalg.inv(c @ tau + d)


def _det2(m) -> complex:
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def mp4_word_phi(word, tau: np.ndarray) -> complex:
    """Automorphy factor at tau; squares to det(C tau + D) of the product.

    The S token uses i sqrt(det(-i tau)): det(-i tau) stays off the negative
    real axis on the whole upper half space, so this branch is continuous
    and matches sqrt(tau1) sqrt(tau3) at diagonal points, which is what the
    theta inversion needs; the pointwise principal sqrt(det tau) flips sign
    once the diagonal arguments add up past pi.
    """
    phi = 1.0 + 0j
    cur = np.array(tau, dtype=complex)
    for token in reversed(word):
        kind = token[0]
        if kind == "S":
            phi = 1j * cmath.sqrt(_det2(-1j * cur)) * phi
        elif kind == "Z":
            phi = -phi
        elif kind == "A":
            a = token[1]
            det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
            if det == -1:
                phi = 1j * phi
        cur = siegel_act(mp4_token_matrix(token), cur)
    return phi


def pair_elements(disc: DiscriminantGroup):
    """Basis order of C[D_L^2]: index = a.index * |D| + b.index."""
    return [(a, b) for a in disc.elements for b in disc.elements]


def pair_index(disc: DiscriminantGroup, a, b) -> int:
    return a.index * disc.order + b.index


def rho2_generator(disc: DiscriminantGroup, token) -> np.ndarray:
    """Genus-2 Weil action of one token on C[D_L^2]."""
    n = disc.order
    dim = n * n
    sig = disc.lattice.signature
    s = sig[1] - sig[0]
    kind = token[0]
    if kind == "T":
        b = token[1]
        phases = np.empty(dim, dtype=complex)
        for a_el, b_el in pair_elements(disc):
            t = (disc.q_value(a_el) * b[0][0]
                 + disc.bilinear_value(a_el, b_el) * b[0][1]
                 + disc.q_value(b_el) * b[1][1])
            phases[pair_index(disc, a_el, b_el)] = e2pi(frac_mod1(Fraction(t)))
        return np.diag(phases)
    if kind == "A":
        a = token[1]
        det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
        inv = [[a[1][1] * det, -a[0][1] * det], [-a[1][0] * det, a[0][0] * det]]
        scale = (1j if det == -1 else 1.0) ** ((s % 8 + 8) % 8)
        out = np.zeros((dim, dim), dtype=complex)
        for a_el, b_el in pair_elements(disc):
            v1 = tuple(frac_mod1(inv[0][0] * x + inv[1][0] * y)
                       for x, y in zip(a_el.vec, b_el.vec))
            v2 = tuple(frac_mod1(inv[0][1] * x + inv[1][1] * y)
                       for x, y in zip(a_el.vec, b_el.vec))
            new1 = disc._lookup[v1]
            new2 = disc._lookup[v2]
            out[pair_index(disc, new1, new2), pair_index(disc, a_el, b_el)] = scale
        return out
    if kind == "S":
        p = np.empty((n, n), dtype=complex)
        for col in disc.elements:
            for row in disc.elements:
                p[row.index, col.index] = e2pi(-disc.bilinear_value(col, row))
        return (1j ** ((s % 4 + 4) % 4) / n) * np.kron(p, p)
    if kind == "Z":
        out = np.zeros((dim, dim), dtype=complex)
        scale = 1j ** ((2 * s % 4 + 4) % 4)
        for a_el, b_el in pair_elements(disc):
            out[pair_index(disc, disc.neg(a_el), disc.neg(b_el)),
                pair_index(disc, a_el, b_el)] = scale
        return out
    raise ValueError(f"unknown Mp4 token {token!r}")


def rho2_word(disc: DiscriminantGroup, word) -> np.ndarray:
    dim = disc.order ** 2
    out = np.eye(dim, dtype=complex)
    for token in word:
        out = out @ rho2_generator(disc, token)
    return out


# ---------------------------------------------------------------------------
# Jacobi group

E11 = ((1, 0), (0, 0))

_EMBEDDED_S_TARGET = np.array(
    [[0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1]], dtype=object)


def _build_embedded_s() -> list:
    """Genus-2 word over the embedded S, on the same sheet as the genus-1 S.

    The matrix identity leaves a sign ambiguity; it is resolved by requiring
    that the genus-2 action on C[D^2] restrict to the genus-1 S-action in the
    first slot, calibrated on a lattice of odd signature where the sign acts
    faithfully.
    """
    from .lattice import a1_lattice

    neg_e11 = ((-1, 0), (0, 0))
    word = [("T", neg_e11), ("S",), ("T", neg_e11), ("S",), ("Z",),
            ("T", neg_e11)]
    assert (mp4_word_matrix(word) == _EMBEDDED_S_TARGET).all()
    disc = a1_lattice().discriminant_group()
    big = rho2_word(disc, word)
    small = rho1_word(disc, [("S",)])
    sigma2 = disc.elements[0]
    got = big[pair_index(disc, disc.elements[0], sigma2),
              pair_index(disc, disc.elements[0], sigma2)]
    want = small[0, 0]
    if abs(got - want) > 1e-9:
        word = word + [("Z",), ("A", ((-1, 0), (0, -1)))]
        big = rho2_word(disc, word)
    for s1 in disc.elements:
        for s2 in disc.elements:
            col = big[:, pair_index(disc, s1, s2)]
            for row in disc.elements:
                assert abs(col[pair_index(disc, row, s2)]
                           - small[row.index, s1.index]) < 1e-9
    return word


EMBEDDED_S_WORD = _build_embedded_s()


class JacobiElement:
    """Pair h * M with h = (lam, mu, kappa) in H(Z) and M an Mp2 word."""

    __slots__ = ("lam", "mu", "kappa", "word")

    def __init__(self, lam: int = 0, mu: int = 0, kappa: int = 0, word=()):
        self.lam, self.mu, self.kappa = int(lam), int(mu), int(kappa)
        self.word = list(word)

    def act(self, tau1: complex, tau2: complex) -> tuple[complex, complex]:
        m = mp2_word_matrix(self.word)
        a, b = int(m[0][0]), int(m[0][1])
        c, d = int(m[1][0]), int(m[1][1])
        t1 = (a * tau1 + b) / (c * tau1 + d)
        t2 = tau2 / (c * tau1 + d)
        return t1, t2 + self.lam + self.mu * t1

    def phi(self, tau1: complex) -> complex:
        return mp2_word_phi(self.word, tau1)

    def __repr__(self):
        return f"JacobiElement({self.lam},{self.mu},{self.kappa},{self.word})"


def heisenberg_mul(h1, h2) -> tuple[int, int, int]:
    """Product in the convention where (lam, mu, kappa) acts on C[D_L] by a
    mu-shift and a lam-weighted phase; the induced action forces this
    commutator sign."""
    l1, m1, k1 = h1
    l2, m2, k2 = h2
    return (l1 + l2, m1 + m2, k1 + k2 + l2 * m1 - l1 * m2)


def embed_heisenberg(lam: int, mu: int, kappa: int) -> list:
    return [("A", ((1, 0), (mu, 1))),
            ("T", ((0, lam), (lam, kappa - lam * mu)))]


def embed_jacobi(elem: JacobiElement) -> list:
    """Genus-2 word of h * M; its automorphy factor is phi_M(tau_11)."""
    word = embed_heisenberg(elem.lam, elem.mu, elem.kappa)
    for token in elem.word:
        if token[0] == "T":
            n = token[1]
            word.append(("T", ((n, 0), (0, 0))))
        elif token[0] == "S":
            word.extend(EMBEDDED_S_WORD)
        else:
            raise ValueError(f"unknown Mp2 token {token!r}")
    return word


def rho_jacobi(disc: DiscriminantGroup, eta_lift, elem: JacobiElement
               ) -> np.ndarray:
    """Induced representation of index eta on C[D_L].

    The Mp2 part acts by the genus-1 formulas; the Heisenberg part shifts by
    -mu * eta and multiplies by e(lam(sigma,eta) + (kappa - lam mu) q(eta)).
    Independent of the choice of lift of eta's class.
    """
    eta_class = disc.class_of(eta_lift)
    n = disc.order
    heis = np.zeros((n, n), dtype=complex)
    q_eta = disc.q_value(eta_class)
    for el in disc.elements:
        shift_vec = tuple(frac_mod1(x - elem.mu * y)
                          for x, y in zip(el.vec, eta_class.vec))
        target = disc._lookup[shift_vec]
        phase = e2pi(frac_mod1(elem.lam * disc.bilinear_value(el, eta_class)
                               + (elem.kappa - elem.lam * elem.mu) * q_eta))
        heis[target.index, el.index] = phase
    return heis @ rho1_word(disc, elem.word)


# ---------------------------------------------------------------------------
# coset identity for the Poincare rewriting


def kiefer_identity_check(lattice: EvenLattice, split: HyperbolicSplit,
                          word, n: int) -> float:
    """Max deviation over sigma in D_K between the two sides of the identity
    relating rho_L and rho_K on the u-isotropic coset sums."""
    disc_l = lattice.discriminant_group()
    if split.k_lattice is None:
        raise ValueError("split has trivial complement")
    disc_k = split.k_lattice.discriminant_group()
    nu = split.level
    m2 = mp2_word_matrix(word)
    a, c = int(m2[0][0]), int(m2[1][0])
    rho_l = rho1_word(disc_l, word)
    rho_k = rho1_word(disc_k, word)
    qup = split.q_u_prime
    worst = 0.0
    for sigma in disc_k.elements:
        amb = split.k_to_ambient(sigma.vec)
        lhs_vec = np.zeros(disc_l.order, dtype=complex)
        for m in range(nu):
            v = [amb[i] + Fraction(m * split.u[i], nu)
                 for i in range(lattice.rank)]
            cls = disc_l.class_of(v)
            lhs_vec[cls.index] += e2pi(Fraction(-m * n, nu))
        lhs = rho_l @ lhs_vec
        rhs = np.zeros(disc_l.order, dtype=complex)
        kcol = rho_k[:, sigma.index]
        for sig_p in disc_k.elements:
            coeff = kcol[sig_p.index]
            if coeff == 0:
                continue
            amb_p = split.k_to_ambient(sig_p.vec)
            for m in range(nu):
                v = [amb_p[i] + Fraction(m * split.u[i], nu)
                     - n * c * split.u_prime[i] for i in range(lattice.rank)]
                cls = disc_l.class_of(v)
                phase = e2pi(frac_mod1(Fraction(-a * m * n, nu)
                                       + qup * a * c * n * n))
                rhs[cls.index] += coeff * phase
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst
