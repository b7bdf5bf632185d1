import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from siegeltheta.lattice import (
    DiscriminantGroup,
    EvenLattice,
    Frame,
    FrameSplitGeometry,
    HyperbolicSplit,
    SplitError,
    a1_lattice,
    a2_lattice,
    base_frame,
    diagonalize_symmetric,
    e8_lattice,
    eichler_transform,
    frame_from_plane,
    frame_swap,
    hyperbolic_plane,
    random_negative_plane,
    split_hyperbolic,
    standard_corpus,
)

U = hyperbolic_plane()
A1 = a1_lattice()
A2 = a2_lattice()


def test_signatures():
    assert U.signature == (1, 1)
    assert A1.signature == (1, 0)
    assert a1_lattice(-1).signature == (0, 1)
    assert A2.signature == (2, 0)
    assert e8_lattice().signature == (8, 0)
    assert U.direct_sum(U).direct_sum(A1).signature == (3, 2)


def test_determinants():
    assert U.det == -1
    assert A1.det == 2
    assert A2.det == 3
    assert e8_lattice().det == 1
    assert hyperbolic_plane(2).det == -4


def test_even_validation():
    with pytest.raises(ValueError):
        EvenLattice([[1]])
    with pytest.raises(ValueError):
        EvenLattice([[2, 1], [0, 2]])
    with pytest.raises(ValueError):
        EvenLattice([[2, 2], [2, 2]])


def test_diagonalize_symmetric_exact():
    for lat in standard_corpus().values():
        p, diag = diagonalize_symmetric(lat.gram)
        n = lat.rank
        for i in range(n):
            for j in range(n):
                vi = [p[k][i] for k in range(n)]
                vj = [p[k][j] for k in range(n)]
                expected = diag[i] if i == j else Fraction(0)
                assert lat.pair(vi, vj) == expected


def test_discriminant_orders():
    assert DiscriminantGroup(U).order == 1
    assert DiscriminantGroup(A1).order == 2
    assert DiscriminantGroup(A2).order == 3
    assert DiscriminantGroup(hyperbolic_plane(2).direct_sum(A1)).order == 8
    assert DiscriminantGroup(U.direct_sum(U).direct_sum(A1)).order == 2


def test_a1_discriminant_values():
    d = DiscriminantGroup(A1)
    qs = sorted(d.q_value(el) for el in d.elements)
    assert qs == [Fraction(0), Fraction(1, 4)]


def test_a2_discriminant_values():
    d = DiscriminantGroup(A2)
    qs = sorted(d.q_value(el) for el in d.elements)
    assert qs == [Fraction(0), Fraction(1, 3), Fraction(1, 3)]


def test_discriminant_group_arithmetic():
    d = DiscriminantGroup(hyperbolic_plane(2).direct_sum(A1))
    for a in d.elements:
        assert d.add(a, d.neg(a)) == d.zero
        for b in d.elements:
            lhs = d.q_value(d.add(a, b))
            rhs = (d.q_value(a) + d.q_value(b) + d.bilinear_value(a, b)) % 1
            assert lhs == rhs


def test_class_of_rejects_non_dual():
    d = DiscriminantGroup(A1)
    with pytest.raises(ValueError):
        d.class_of([Fraction(1, 3)])


def test_milgram_corpus():
    for name, lat in standard_corpus().items():
        d = DiscriminantGroup(lat)
        assert abs(d.milgram_sum() - d.milgram_reference()) < 1e-12, name


def test_milgram_a1_value():
    d = DiscriminantGroup(A1)
    assert abs(d.milgram_sum() - (1 + 1j)) < 1e-12
    dm = DiscriminantGroup(a1_lattice(-1))
    assert abs(dm.milgram_sum() - (1 - 1j)) < 1e-12


def test_milgram_a2_value():
    d = DiscriminantGroup(A2)
    assert abs(d.milgram_sum() - 1j * math.sqrt(3)) < 1e-12


def frame_defect(frame):
    bp, bm = frame.lattice.signature
    j = np.diag([1.0] * bp + [-1.0] * bm)
    gram = np.array(frame.lattice.gram, dtype=float)
    return np.max(np.abs(frame.matrix.T @ j @ frame.matrix - gram))


def test_base_frame_isometry():
    for lat in standard_corpus().values():
        assert frame_defect(base_frame(lat)) < 1e-12


def test_base_frame_u_example():
    f = base_frame(U)
    assert abs(f.q_pos([1, 0]) - 0.25) < 1e-14
    assert abs(f.q_neg([1, 0]) + 0.25) < 1e-14
    assert abs(f.q_pos([0, 1]) - 0.25) < 1e-14
    np.testing.assert_allclose(abs(f.standard([1, 0])),
                               [1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-14)


def test_frame_from_plane_matches_span():
    lat = U.direct_sum(U).direct_sum(A1)
    rng = np.random.default_rng(7)
    gram = np.array(lat.gram, dtype=float)
    for _ in range(5):
        z = random_negative_plane(lat, rng)
        f = frame_from_plane(lat, z)
        assert frame_defect(f) < 1e-10
        # the plane maps into the negative axes
        for b in z:
            assert np.max(np.abs(f.x_pos(b))) < 1e-9


def test_frame_from_plane_rejects_positive():
    with pytest.raises(ValueError):
        frame_from_plane(U, [[1, 1]])


def test_frame_swap():
    lat = U.direct_sum(A1)
    f = base_frame(lat)
    g = frame_swap(f, 0, 1)
    assert frame_defect(g) < 1e-12
    v = [1, 2, 3]
    np.testing.assert_allclose(g.standard(v)[0], f.standard(v)[1])
    with pytest.raises(ValueError):
        frame_swap(f, 0, 2)


def test_split_hyperbolic_u():
    s = split_hyperbolic(U)
    assert s.u == [1, 0]
    assert s.u_prime == [Fraction(0), Fraction(1)]
    assert s.level == 1
    assert s.k_basis == []


def test_split_hyperbolic_u_a1():
    lat = U.direct_sum(A1)
    s = split_hyperbolic(lat)
    assert s.u == [1, 0, 0]
    assert s.level == 1
    assert s.k_gram == [[2]]


def test_split_hyperbolic_u2_a1():
    lat = hyperbolic_plane(2).direct_sum(A1)
    s = split_hyperbolic(lat)
    assert s.u == [1, 0, 0]
    assert s.u_prime == [Fraction(0), Fraction(1, 2), Fraction(0)]
    assert s.level == 2
    assert s.k_gram == [[2]]
    assert s.q_u_prime == 0


def test_split_hyperbolic_no_isotropic():
    with pytest.raises(SplitError):
        split_hyperbolic(A1, bound=3)


def test_k_projection_level_one():
    lat = U.direct_sum(A1)
    s = split_hyperbolic(lat)
    for v in ([1, 2, 3], [0, 1, 1], [5, -2, 0]):
        pk = s.project_to_k(v)
        assert lat.pair(pk, s.u) == 0
        assert lat.pair(pk, s.u_prime) == 0
        # difference lies in the plane spanned by u, u'
        diff = [Fraction(a) - b for a, b in zip(v, pk)]
        for b in s.k_basis:
            assert lat.pair(diff, b) == 0


def test_mu_base_frame_of_u_is_zero():
    s = split_hyperbolic(U)
    geo = FrameSplitGeometry(base_frame(U), s)
    np.testing.assert_allclose(geo.mu(), [0.0, 0.0], atol=1e-12)


def test_mu_orthogonal_to_u():
    lat = U.direct_sum(U).direct_sum(A1)
    s = split_hyperbolic(lat)
    rng = np.random.default_rng(3)
    gram = np.array(lat.gram, dtype=float)
    for _ in range(5):
        f = frame_from_plane(lat, random_negative_plane(lat, rng))
        geo = FrameSplitGeometry(f, s)
        mu = geo.mu()
        assert abs(mu @ gram @ np.array(s.u, dtype=float)) < 1e-9


def test_projections_decompose():
    lat = U.direct_sum(U).direct_sum(A1)
    s = split_hyperbolic(lat)
    rng = np.random.default_rng(11)
    f = frame_from_plane(lat, random_negative_plane(lat, rng))
    geo = FrameSplitGeometry(f, s)
    for _ in range(5):
        v = rng.standard_normal(lat.rank)
        vz, vzp, vw, vwp = geo.projections(v)
        np.testing.assert_allclose(vz + vzp, v, atol=1e-9)
        gram = np.array(lat.gram, dtype=float)
        u = np.array(s.u, dtype=float)
        # w-parts are orthogonal to u
        assert abs(vw @ gram @ u) < 1e-8
        assert abs(vwp @ gram @ u) < 1e-8
        np.testing.assert_allclose(geo.borw_std(v),
                                   f.standard(vw + vwp), atol=1e-9)


def test_borw_matrix_consistency():
    lat = U.direct_sum(A1)
    s = split_hyperbolic(lat)
    rng = np.random.default_rng(5)
    f = frame_from_plane(lat, random_negative_plane(lat, rng))
    geo = FrameSplitGeometry(f, s)
    m = geo.borw_matrix()
    for _ in range(4):
        v = rng.standard_normal(lat.rank)
        np.testing.assert_allclose(m @ v, geo.borw_std(v), atol=1e-10)


def test_u2_split_opposite():
    lat = U.direct_sum(U).direct_sum(A1)
    s = split_hyperbolic(lat)
    rng = np.random.default_rng(13)
    f = frame_from_plane(lat, random_negative_plane(lat, rng))
    geo = FrameSplitGeometry(f, s)
    assert abs(geo.u2_zperp + geo.u2_z) < 1e-9
    assert geo.u2_zperp > 0


def test_eichler_is_isometry_fixing_u():
    lat = U.direct_sum(A1)
    s = split_hyperbolic(lat)
    lam = [0, 0, 1]
    e = eichler_transform(lat, s.u, lam)
    n = lat.rank
    for i in range(n):
        for j in range(n):
            vi = [e[k][i] for k in range(n)]
            vj = [e[k][j] for k in range(n)]
            assert lat.pair(vi, vj) == lat.gram[i][j]
    eu = [sum(e[i][j] * Fraction(s.u[j]) for j in range(n)) for i in range(n)]
    assert eu == [Fraction(x) for x in s.u]


def test_eichler_rejects_bad_input():
    lat = U.direct_sum(A1)
    with pytest.raises(ValueError):
        eichler_transform(lat, [0, 0, 1], [1, 0, 0])  # u not isotropic
    with pytest.raises(ValueError):
        eichler_transform(lat, [1, 0, 0], [0, 1, 0])  # lam not orthogonal


def test_json_roundtrip():
    lat = U.direct_sum(A1)
    again = EvenLattice.from_json(lat.to_json())
    assert again.gram == lat.gram
    assert again.name == lat.name


small_gram = st.integers(min_value=-4, max_value=4)


@st.composite
def even_lattices(draw):
    n = draw(st.integers(min_value=1, max_value=3))
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = 2 * draw(st.integers(min_value=-3, max_value=3))
        for j in range(i):
            g[i][j] = g[j][i] = draw(small_gram)
    from siegeltheta.exact import det_rational
    if det_rational(g) == 0:
        for i in range(n):
            g[i][i] += 20
    return EvenLattice(g)


@given(even_lattices())
@settings(max_examples=40, deadline=None)
def test_milgram_property(lat):
    d = DiscriminantGroup(lat)
    assert abs(d.milgram_sum() - d.milgram_reference()) < 1e-9 * max(1, d.order)


@given(even_lattices())
@settings(max_examples=25, deadline=None)
def test_discriminant_q_well_defined(lat):
    d = DiscriminantGroup(lat)
    for el in d.elements[: min(len(d.elements), 12)]:
        shifted = [x + 1 for x in el.vec]
        assert (lat.q(shifted) - lat.q(el.vec)).denominator == 1
