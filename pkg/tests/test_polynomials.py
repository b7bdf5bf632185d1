import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from siegeltheta.polynomials import (
    INVPI,
    IndexTuple,
    Poly,
    build_P_alpha,
    build_Q_alpha,
    combine_P_w_h,
    decompose_P_w,
    eval_poly_on_grid,
    exp_operator,
    is_homogeneous_of_degree,
    laplacian_trace_apply,
    poly_from_json,
    poly_to_json,
    tau_transform_check,
    very_homogeneous_check,
    xvar,
)

I2 = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]


def x(i, j):
    return Poly.var(xvar(i, j))


def test_poly_arithmetic():
    p = x(0, 0) + x(1, 1)
    q = x(0, 0) - x(1, 1)
    assert p * q == x(0, 0) ** 2 - x(1, 1) ** 2
    assert (p - p).is_zero()
    assert p * 0 == Poly()
    assert 2 * p == p + p


def test_poly_diff():
    p = x(0, 0) ** 3 * x(0, 1)
    assert p.diff(xvar(0, 0)) == 3 * x(0, 0) ** 2 * x(0, 1)
    assert p.diff(xvar(0, 1)) == x(0, 0) ** 3
    assert p.diff(xvar(1, 0)).is_zero()


def test_poly_subs_and_eval():
    p = x(0, 0) ** 2 + 2 * x(0, 1)
    q = p.subs({xvar(0, 0): x(0, 1) + 1})
    assert q == x(0, 1) ** 2 + 4 * x(0, 1) + 1
    assert p.eval({xvar(0, 0): Fraction(3), xvar(0, 1): Fraction(1, 2)}) == 10


def test_poly_collect():
    from siegeltheta.polynomials import svar
    s1 = Poly.var(svar(1))
    p = s1 ** 2 * x(0, 0) + s1 * x(1, 0) + 7
    c = p.collect([svar(1), svar(2)])
    assert c[(2, 0)] == x(0, 0)
    assert c[(1, 0)] == x(1, 0)
    assert c[(0, 0)] == Poly.const(Fraction(7))


def test_laplacian_constant():
    assert laplacian_trace_apply(Poly.const(Fraction(5)), I2, 4).is_zero()


def test_laplacian_square():
    p = x(0, 0) ** 2
    assert laplacian_trace_apply(p, I2, 4) == Poly.const(Fraction(2))


def test_laplacian_offdiag_yinv():
    yinv = [[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]]
    p = x(0, 0) * x(0, 1)
    assert laplacian_trace_apply(p, yinv, 1) == Poly.const(Fraction(2))


def test_exp_operator_square():
    p = x(0, 0) ** 2
    got = exp_operator(p, I2, 4)
    expected = p + Poly.var(INVPI, 1, Fraction(-1, 4))
    assert got == expected


def test_exp_operator_constant():
    p = Poly.const(Fraction(3))
    assert exp_operator(p, I2, 4) == p


def test_exp_operator_linear():
    p = x(0, 0) ** 2
    q = x(1, 0) ** 2 * x(1, 1) ** 2
    lhs = exp_operator(p + 2 * q, I2, 4)
    rhs = exp_operator(p, I2, 4) + 2 * exp_operator(q, I2, 4)
    assert lhs == rhs


def test_index_tuple_validation():
    IndexTuple(1, 2, 3, 4)
    with pytest.raises(ValueError):
        IndexTuple(3, 2, 1, 4)
    with pytest.raises(ValueError):
        IndexTuple(1, 4, 3, 4)
    assert IndexTuple(1, 2, 3, 4).distinct_pairs
    assert not IndexTuple(1, 1, 2, 2).distinct_pairs


def test_build_P_alpha_explicit():
    alpha = IndexTuple(1, 2, 3, 4)
    p = build_P_alpha(alpha, 4)
    f1 = x(0, 0) * x(2, 1) - x(0, 1) * x(2, 0)
    f2 = x(1, 0) * x(3, 1) - x(1, 1) * x(3, 0)
    assert p == 4 * f1 * f2


def test_build_P_alpha_range_check():
    with pytest.raises(ValueError):
        build_P_alpha(IndexTuple(1, 2, 3, 4), 3)


def test_P_alpha_quartic_scaling():
    p = build_P_alpha(IndexTuple(1, 2, 3, 4), 4)
    doubled = p.subs({xvar(i, j): 2 * x(i, j)
                      for i in range(4) for j in range(2)})
    assert doubled == 16 * p


def test_harmonicity_hypothesis():
    harmonic = build_P_alpha(IndexTuple(1, 2, 3, 4), 4)
    assert laplacian_trace_apply(harmonic, I2, 6).is_zero()
    assert build_Q_alpha(IndexTuple(1, 2, 3, 4), 4) == harmonic
    not_harmonic = build_P_alpha(IndexTuple(1, 1, 2, 2), 2)
    assert not laplacian_trace_apply(not_harmonic, I2, 4).is_zero()
    assert build_Q_alpha(IndexTuple(1, 1, 2, 2), 2) != not_harmonic


def test_very_homogeneous_P_alpha():
    p = build_P_alpha(IndexTuple(1, 2, 3, 4), 4)
    assert very_homogeneous_check(p, 2, 0, 4)
    assert not very_homogeneous_check(p, 1, 0, 4)


def test_very_homogeneous_counterexamples():
    assert not very_homogeneous_check(x(0, 0), 0, 0, 2)
    assert not very_homogeneous_check(x(0, 0), 1, 0, 2)
    assert very_homogeneous_check(Poly.const(Fraction(3)), 0, 0, 2)


def all_admissible_alphas(b):
    out = []
    for a1, b1 in itertools.combinations(range(1, b + 1), 2):
        for a2, b2 in itertools.combinations(range(1, b + 1), 2):
            out.append(IndexTuple(a1, a2, b1, b2))
    return out


def test_very_homogeneous_all_alphas_small():
    for b in (2, 3):
        for alpha in all_admissible_alphas(b):
            p = build_P_alpha(alpha, b)
            assert very_homogeneous_check(p, 2, 0, b)


def test_decompose_axis_aligned_trivial():
    # P avoids the u-direction row, so only the (0,0) component remains
    p = x(0, 0) * x(1, 1)
    comps = decompose_P_w(p, [Fraction(0), Fraction(0), Fraction(1)], 3)
    assert set(comps) == {(0, 0)}
    assert comps[(0, 0)] == p


def test_decompose_reconstruction_exact():
    alpha = IndexTuple(1, 2, 3, 3)
    b = 3
    p = build_P_alpha(alpha, b)
    u = [Fraction(0), Fraction(0), Fraction(1)]
    comps = decompose_P_w(p, u, b)
    rng = np.random.default_rng(2)
    for _ in range(20):
        v1 = [Fraction(int(a), int(bb)) for a, bb in
              zip(rng.integers(-9, 10, b), rng.integers(1, 5, b))]
        v2 = [Fraction(int(a), int(bb)) for a, bb in
              zip(rng.integers(-9, 10, b), rng.integers(1, 5, b))]
        assign = {}
        for i in range(b):
            assign[xvar(i, 0)] = v1[i]
            assign[xvar(i, 1)] = v2[i]
        lhs = p.eval(assign)
        s1 = sum(a * c for a, c in zip(v1, u))
        s2 = sum(a * c for a, c in zip(v2, u))
        rhs = sum(s1 ** h1 * s2 ** h2 * comp.eval(assign)
                  for (h1, h2), comp in comps.items())
        assert lhs == rhs


def test_decompose_general_rational_u():
    p = build_P_alpha(IndexTuple(1, 2, 3, 3), 3)
    u = [Fraction(1, 2), Fraction(1), Fraction(1)]
    comps = decompose_P_w(p, u, 3)
    rng = np.random.default_rng(4)
    for _ in range(10):
        v1 = [Fraction(int(a)) for a in rng.integers(-5, 6, 3)]
        v2 = [Fraction(int(a)) for a in rng.integers(-5, 6, 3)]
        assign = {xvar(i, 0): v1[i] for i in range(3)}
        assign.update({xvar(i, 1): v2[i] for i in range(3)})
        s1 = sum(a * c for a, c in zip(v1, u))
        s2 = sum(a * c for a, c in zip(v2, u))
        rhs = sum(s1 ** h1 * s2 ** h2 * comp.eval(assign)
                  for (h1, h2), comp in comps.items())
        assert p.eval(assign) == rhs


def test_decompose_components_ignore_u_direction():
    p = build_P_alpha(IndexTuple(1, 2, 3, 3), 3)
    u = [Fraction(1, 2), Fraction(1), Fraction(1)]
    comps = decompose_P_w(p, u, 3)
    for comp in comps.values():
        # shifting the grid columns along u leaves each component unchanged
        shifted = comp.subs({xvar(i, 0): x(i, 0) + 5 * u[i] for i in range(3)})
        shifted = shifted.subs({xvar(i, 1): x(i, 1) - 3 * u[i] for i in range(3)})
        assert shifted == comp


def test_decompose_homogeneity_grading():
    p = build_P_alpha(IndexTuple(1, 2, 3, 3), 3)
    comps = decompose_P_w(p, [Fraction(0), Fraction(0), Fraction(1)], 3)
    for (h1, h2), comp in comps.items():
        assert is_homogeneous_of_degree(comp, 4 - h1 - h2)


def test_decompose_very_homogeneity_pattern():
    p = build_P_alpha(IndexTuple(1, 2, 3, 3), 3)
    comps = decompose_P_w(p, [Fraction(1, 2), Fraction(1), Fraction(1)], 3)
    assert not comps[(0, 0)].is_zero()
    assert very_homogeneous_check(comps[(0, 0)], 2, 0, 3)
    saw_failure = False
    for (h1, h2), comp in comps.items():
        if 1 <= h1 + h2 <= 2 and not comp.is_zero():
            ok = any(very_homogeneous_check(comp, m, 0, 3) for m in (0, 1, 2))
            assert not ok, (h1, h2)
            saw_failure = True
    assert saw_failure


def test_combine_P_w_h():
    p = build_P_alpha(IndexTuple(1, 2, 3, 3), 3)
    comps = decompose_P_w(p, [Fraction(1, 2), Fraction(1), Fraction(1)], 3)
    assert combine_P_w_h(comps, 0, Fraction(7)) == comps[(0, 0)]
    for h in (1, 2):
        assert combine_P_w_h(comps, h, Fraction(0)) == comps.get((0, h), Poly())


def test_combine_shear_identity():
    # P_{w,h}(borw(v), r) = P_{w,0,h}(borw(v1 + r v2, v2))
    p = build_P_alpha(IndexTuple(1, 2, 3, 3), 3)
    u = [Fraction(0), Fraction(0), Fraction(1)]
    comps = decompose_P_w(p, u, 3)
    rng = np.random.default_rng(9)
    for _ in range(8):
        r = Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 5)))
        v1 = [Fraction(int(a)) for a in rng.integers(-4, 5, 3)]
        v2 = [Fraction(int(a)) for a in rng.integers(-4, 5, 3)]
        sheared = {xvar(i, 0): v1[i] + r * v2[i] for i in range(3)}
        sheared.update({xvar(i, 1): v2[i] for i in range(3)})
        plain = {xvar(i, 0): v1[i] for i in range(3)}
        plain.update({xvar(i, 1): v2[i] for i in range(3)})
        for h in (0, 1, 2):
            lhs = combine_P_w_h(comps, h, r).eval(plain)
            rhs = comps.get((0, h), Poly()).eval(sheared)
            assert lhs == rhs, h


def test_tau_transform_bullets():
    p = build_P_alpha(IndexTuple(1, 2, 3, 3), 3)
    comps = decompose_P_w(p, [Fraction(0), Fraction(0), Fraction(1)], 3)
    assert tau_transform_check(comps, 3)


def test_tau_transform_bullets_more_alphas():
    for alpha in (IndexTuple(1, 1, 3, 3), IndexTuple(2, 2, 3, 3),
                  IndexTuple(1, 2, 2, 3)):
        p = build_P_alpha(alpha, 3)
        comps = decompose_P_w(p, [Fraction(0), Fraction(0), Fraction(1)], 3)
        assert tau_transform_check(comps, 3), alpha.as_tuple()


def test_eval_on_grid():
    p = 2 * x(0, 0) ** 2 + x(1, 1)
    grid = np.zeros((3, 2, 2))
    grid[:, 0, 0] = [1.0, 2.0, 3.0]
    grid[:, 1, 1] = [4.0, 5.0, 6.0]
    got = eval_poly_on_grid(p, grid)
    np.testing.assert_allclose(got.real, [6.0, 13.0, 24.0])


def test_json_roundtrip():
    p = build_P_alpha(IndexTuple(1, 2, 3, 4), 4) + Poly.const(Fraction(1, 3))
    again = poly_from_json(poly_to_json(p))
    assert again == p


@given(st.integers(min_value=0, max_value=3), st.integers(min_value=0, max_value=3))
@settings(max_examples=20, deadline=None)
def test_monomial_laplacian_degree_drop(a, b):
    p = x(0, 0) ** a * x(0, 1) ** b
    lap = laplacian_trace_apply(p, I2, 2)
    if a + b >= 2:
        assert lap.total_degree() <= max(a + b - 2, 0)
    else:
        assert lap.is_zero()
