"""Metaplectic words, Weil representation matrices, Jacobi embedding."""

import cmath

import numpy as np
import pytest

from siegeltheta.lattice import split_hyperbolic, standard_corpus
from siegeltheta.weil import (
    EMBEDDED_S_WORD,
    JacobiElement,
    embed_heisenberg,
    embed_jacobi,
    heisenberg_mul,
    kiefer_identity_check,
    mp2_word_matrix,
    mp2_word_phi,
    mp4_word_matrix,
    mp4_word_phi,
    pair_index,
    rho1_word,
    rho2_word,
    rho_jacobi,
    siegel_act,
    standard_lift,
)

CORPUS = standard_corpus()


def as_int_matrix(m):
    return [[int(x) for x in row] for row in m]


class TestMp2Words:
    def test_word_matrix_t_s(self):
        assert as_int_matrix(mp2_word_matrix([("T", 3)])) == [[1, 3], [0, 1]]
        assert as_int_matrix(mp2_word_matrix([("S",)])) == [[0, -1], [1, 0]]
        assert as_int_matrix(mp2_word_matrix([("S",), ("S",)])) == [[-1, 0], [0, -1]]

    def test_phi_of_s_is_principal_sqrt(self):
        for tau in (2j, 0.5 + 1.25j, -3.0 + 0.25j):
            assert mp2_word_phi([("S",)], tau) == pytest.approx(cmath.sqrt(tau))

    def test_phi_square_is_cocycle(self):
        word = [("T", 2), ("S",), ("T", -1), ("S",)]
        m = mp2_word_matrix(word)
        c, d = int(m[1][0]), int(m[1][1])
        for tau in (1j, 0.3 + 0.7j):
            assert mp2_word_phi(word, tau) ** 2 == pytest.approx(c * tau + d)

    @pytest.mark.parametrize("matrix", [
        [[1, 0], [0, 1]],
        [[1, 5], [0, 1]],
        [[0, -1], [1, 0]],
        [[-1, 0], [0, -1]],
        [[-1, 3], [0, -1]],
        [[2, 1], [1, 1]],
        [[1, 0], [4, 1]],
        [[5, 2], [2, 1]],
        [[7, -4], [-5, 3]],
        [[-2, -1], [5, 2]],
    ])
    def test_standard_lift_reproduces_matrix_and_branch(self, matrix):
        word = standard_lift(matrix)
        assert as_int_matrix(mp2_word_matrix(word)) == matrix
        c, d = matrix[1]
        for tau in (2j, 0.4 + 0.9j):
            assert mp2_word_phi(word, tau) == pytest.approx(cmath.sqrt(c * tau + d))

    def test_standard_lift_rejects_non_unimodular(self):
        with pytest.raises(ValueError):
            standard_lift([[2, 0], [0, 1]])


class TestGenusOneRepresentation:
    def test_t_action_is_quadratic_phases(self):
        disc = CORPUS["A1"].discriminant_group()
        m = rho1_word(disc, [("T", 1)])
        assert np.allclose(np.diag(m), [1.0, 1j])

    def test_generators_unitary(self):
        for name in ("A1", "A2", "U(2)+A1"):
            disc = CORPUS[name].discriminant_group()
            for word in ([("T", 1)], [("S",)]):
                m = rho1_word(disc, word)
                assert np.allclose(m @ m.conj().T, np.eye(disc.order), atol=1e-12)

    def test_s_squared_is_minus_one_element(self):
        # S^2 = (-I, i); on D_L it is i^s times negation
        for name in ("A1", "A2", "U+A1"):
            lat = CORPUS[name]
            disc = lat.discriminant_group()
            s = lat.signature[1] - lat.signature[0]
            m = rho1_word(disc, [("S",), ("S",)])
            want = np.zeros((disc.order, disc.order), dtype=complex)
            for el in disc.elements:
                want[disc.neg(el).index, el.index] = 1j ** (s % 4)
            assert np.allclose(m, want, atol=1e-12)

    def test_s_fourth_power_scalar(self):
        # S^4 = (I, -1) acts by e(s/2)
        for name in ("A1", "A1(-1)", "A2"):
            lat = CORPUS[name]
            disc = lat.discriminant_group()
            s = lat.signature[1] - lat.signature[0]
            m = rho1_word(disc, [("S",)] * 4)
            assert np.allclose(m, cmath.exp(1j * cmath.pi * s) * np.eye(disc.order),
                               atol=1e-12)

    def test_braid_relation(self):
        # (ST)^3 = S^2 in Mp2 with matching phi, so the matrices agree
        disc = CORPUS["A2"].discriminant_group()
        st = [("S",), ("T", 1)]
        lhs = rho1_word(disc, st * 3)
        rhs = rho1_word(disc, [("S",), ("S",)])
        tau = 0.7 + 1.1j
        assert mp2_word_phi(st * 3, tau) == pytest.approx(
            mp2_word_phi([("S",), ("S",)], tau))
        assert np.allclose(lhs, rhs, atol=1e-12)


class TestMp4Words:
    def test_siegel_action_of_s(self):
        tau = np.array([[0.2 + 1.0j, 0.1j], [0.1j, 1.5j]])
        out = siegel_act(mp4_word_matrix([("S",)]), tau)
        assert np.allclose(out, -np.linalg.inv(tau))

    def test_a_token_is_symplectic_for_gl2(self):
        j = np.zeros((4, 4))
        j[:2, 2:] = np.eye(2)
        j[2:, :2] = -np.eye(2)
        for a in (((1, 1), (0, 1)), ((0, 1), (1, 0)), ((2, 1), (1, 1))):
            m = np.array(mp4_word_matrix([("A", a)]), dtype=float)
            assert np.allclose(m.T @ j @ m, j)

    def test_phi_squares_to_det_block(self):
        word = [("T", ((1, 1), (1, 0))), ("S",), ("A", ((0, 1), (1, 0))), ("S",)]
        m = np.array(mp4_word_matrix(word), dtype=complex)
        tau = np.array([[0.1 + 0.9j, 0.05 + 0.02j], [0.05 + 0.02j, -0.3 + 1.2j]])
        c, d = m[2:, :2], m[2:, 2:]
        det = np.linalg.det(c @ tau + d)
        assert mp4_word_phi(word, tau) ** 2 == pytest.approx(det)

    def test_embedded_s_word_matrix(self):
        target = [[0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1]]
        assert as_int_matrix(mp4_word_matrix(EMBEDDED_S_WORD)) == target

    def test_embedded_s_phi_squares_to_tau11(self):
        # C tau + D of the embedded S has determinant tau_11
        for tau in (np.array([[0.6 + 1.4j, -0.2 + 0.1j], [-0.2 + 0.1j, 0.3 + 0.8j]]),
                    np.array([[1.2j, 0.0], [0.0, 0.9j]])):
            assert mp4_word_phi(EMBEDDED_S_WORD, tau) ** 2 == pytest.approx(
                tau[0, 0])


class TestGenusTwoRepresentation:
    def test_generators_unitary(self):
        disc = CORPUS["A1"].discriminant_group()
        words = ([("S",)], [("T", ((1, 1), (1, 0)))], [("A", ((0, 1), (1, 0)))],
                 [("Z",)])
        for word in words:
            m = rho2_word(disc, word)
            assert np.allclose(m @ m.conj().T, np.eye(disc.order ** 2), atol=1e-12)

    def test_s_squared_equals_z(self):
        for name in ("A1", "A2", "U(2)+A1"):
            disc = CORPUS[name].discriminant_group()
            assert np.allclose(rho2_word(disc, [("S",), ("S",)]),
                               rho2_word(disc, [("Z",)]), atol=1e-12)

    def test_s_fourth_power_is_identity(self):
        for name in ("A1", "A2"):
            disc = CORPUS[name].discriminant_group()
            m = rho2_word(disc, [("S",)] * 4)
            assert np.allclose(m, np.eye(disc.order ** 2), atol=1e-12)

    def test_t_then_t_adds_blocks(self):
        disc = CORPUS["A2"].discriminant_group()
        b1 = ((1, 0), (0, 1))
        b2 = ((0, 1), (1, 1))
        lhs = rho2_word(disc, [("T", b1), ("T", b2)])
        rhs = rho2_word(disc, [("T", ((1, 1), (1, 2)))])
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_a_inverse_pair(self):
        disc = CORPUS["A1"].discriminant_group()
        a = ((1, 1), (0, 1))
        ainv = ((1, -1), (0, 1))
        m = rho2_word(disc, [("A", a), ("A", ainv)])
        assert np.allclose(m, np.eye(disc.order ** 2), atol=1e-12)


class TestJacobiEmbedding:
    def test_heisenberg_matrix_form(self):
        for lam, mu, kappa in ((1, 0, 0), (0, 1, 0), (0, 0, 1), (2, -1, 3)):
            m = as_int_matrix(mp4_word_matrix(embed_heisenberg(lam, mu, kappa)))
            assert m == [[1, 0, 0, lam], [mu, 1, lam, kappa],
                         [0, 0, 1, -mu], [0, 0, 0, 1]]

    def test_heisenberg_group_law_in_matrices(self):
        h1, h2 = (1, 2, 0), (0, 1, -1)
        prod = heisenberg_mul(h1, h2)
        lhs = mp4_word_matrix(embed_heisenberg(*h1) + embed_heisenberg(*h2))
        assert as_int_matrix(lhs) == as_int_matrix(
            mp4_word_matrix(embed_heisenberg(*prod)))

    def test_heisenberg_group_law_in_representation(self):
        disc = CORPUS["A1"].discriminant_group()
        h1, h2 = (1, 1, 0), (2, -1, 1)
        prod = heisenberg_mul(h1, h2)
        lhs = rho2_word(disc, embed_heisenberg(*h1) + embed_heisenberg(*h2))
        rhs = rho2_word(disc, embed_heisenberg(*prod))
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_jacobi_action_on_half_plane(self):
        elem = JacobiElement(1, 2, 0, [("S",)])
        tau1, tau2 = 0.3 + 1.1j, 0.2 + 0.4j
        t1, t2 = elem.act(tau1, tau2)
        assert t1 == pytest.approx(-1 / tau1)
        assert t2 == pytest.approx(tau2 / tau1 + 1 + 2 * t1)

    def test_embedded_word_acts_like_jacobi_element(self):
        elem = JacobiElement(1, -1, 2, [("T", 1), ("S",)])
        tau1, tau2 = 0.25 + 0.9j, -0.1 + 0.3j
        tau3 = 0.4 + 1.3j
        tau = np.array([[tau1, tau2], [tau2, tau3]])
        out = siegel_act(mp4_word_matrix(embed_jacobi(elem)), tau)
        t1, t2 = elem.act(tau1, tau2)
        assert out[0, 0] == pytest.approx(t1)
        assert out[0, 1] == pytest.approx(t2)

    def test_embedded_phi_cocycle_matches_genus_one(self):
        elem = JacobiElement(2, 1, -1, [("S",), ("T", -2), ("S",)])
        tau = np.array([[0.15 + 1.0j, 0.1 + 0.2j], [0.1 + 0.2j, -0.2 + 1.1j]])
        assert mp4_word_phi(embed_jacobi(elem), tau) ** 2 == pytest.approx(
            mp2_word_phi(elem.word, tau[0, 0]) ** 2)

    @pytest.mark.parametrize("name", ["A1", "U(2)+A1"])
    def test_induced_representation_compatibility(self, name):
        disc = CORPUS[name].discriminant_group()
        elements = [
            JacobiElement(1, 0, 0, []),
            JacobiElement(0, 1, 0, [("T", 1)]),
            JacobiElement(1, 1, 1, [("S",)]),
            JacobiElement(-1, 2, 0, [("T", 1), ("S",)]),
        ]
        for elem in elements:
            big = rho2_word(disc, embed_jacobi(elem))
            for sigma2 in disc.elements:
                small = rho_jacobi(disc, disc.lift(sigma2), elem)
                for sigma1 in disc.elements:
                    col = big[:, pair_index(disc, sigma1, sigma2)]
                    want = np.zeros_like(col)
                    for row in disc.elements:
                        want[pair_index(disc, row, sigma2)] = \
                            small[row.index, sigma1.index]
                    assert np.allclose(col, want, atol=1e-12)

    def test_induced_representation_lift_independent(self):
        lat = CORPUS["U(2)+A1"]
        disc = lat.discriminant_group()
        elem = JacobiElement(1, 1, 0, [("S",)])
        base = disc.lift(disc.elements[3])
        shifted = [x + s for x, s in zip(base, [1, -2, 1])]
        assert np.allclose(rho_jacobi(disc, base, elem),
                           rho_jacobi(disc, shifted, elem), atol=1e-12)


class TestKieferIdentity:
    def test_level_one(self):
        lat = CORPUS["U+A1"]
        split = split_hyperbolic(lat)
        for word in ([("T", 1)], [("S",)], [("T", 1), ("S",)]):
            for n in (0, 1, 2):
                assert kiefer_identity_check(lat, split, word, n) < 1e-12

    def test_level_two(self):
        lat = CORPUS["U(2)+A1"]
        split = split_hyperbolic(lat)
        assert split.level == 2
        for word in ([("T", 1)], [("S",)], [("T", 1), ("S",)]):
            for n in (0, 1, 2):
                assert kiefer_identity_check(lat, split, word, n) < 1e-12

    def test_longer_word(self):
        lat = CORPUS["U+A1"]
        split = split_hyperbolic(lat)
        word = standard_lift([[2, 1], [1, 1]])
        assert kiefer_identity_check(lat, split, word, 1) < 1e-12
