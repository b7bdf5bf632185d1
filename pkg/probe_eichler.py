import numpy as np
from fractions import Fraction
from itertools import product

from siegeltheta.lattice import (standard_corpus, split_hyperbolic, frame_from_plane,
                                 random_negative_plane, FrameSplitGeometry,
                                 eichler_transform)

L = standard_corpus()['U+U+A1']
split = split_hyperbolic(L)
print("u =", split.u, "k_basis =", split.k_basis)
gram = np.array(L.gram, dtype=float)

# eta in K with positive norm
eta = None
for c in product(range(-2, 3), repeat=len(split.k_basis)):
    v = [sum(c[i] * split.k_basis[i][k] for i in range(len(split.k_basis)))
         for k in range(L.rank)]
    if L.q(v) > 0:
        eta = v
        break
print("eta =", eta, "q(eta) =", L.q(eta))

# exact basis of eta^perp inside K: combinations x of k-basis with sum x_j (b_j, eta) = 0
r = len(split.k_basis)
p = [L.pair(b, eta) for b in split.k_basis]
perp_basis = []
j0 = next(j for j in range(r) if p[j] != 0)
for j in range(r):
    if j == j0:
        continue
    # p[j0]*b_j - p[j]*b_j0
    vec = [p[j0] * Fraction(split.k_basis[j][k]) - p[j] * Fraction(split.k_basis[j0][k])
           for k in range(L.rank)]
    perp_basis.append(vec)
print("perp basis:", perp_basis, [L.pair(v, eta) for v in perp_basis], [L.pair(v, split.u) for v in perp_basis])

rng = np.random.default_rng(20240817)
worst = 0.0
for trial in range(20):
    # rational lambda in eta^perp cap K otimes R
    lam = [Fraction(0)] * L.rank
    for vec in perp_basis:
        c = Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 5)))
        lam = [lam[k] + c * vec[k] for k in range(L.rank)]
    z = random_negative_plane(L, rng)
    frame = frame_from_plane(L, z)
    E = np.array([[float(x) for x in row] for row in eichler_transform(L, split.u, lam)])
    frame2 = frame.compose_with(E)
    geo = FrameSplitGeometry(frame, split)
    geo2 = FrameSplitGeometry(frame2, split)
    lamf = np.array([float(x) for x in lam])
    uf = np.array([float(x) for x in split.u])
    qlam = float(L.q(lam))

    devs = {}
    # (i) E(v_{w'}) = (Ev)_w and same for wperp, over spanning test vectors
    di = 0.0
    for t in range(L.rank + 3):
        v = np.eye(L.rank)[t] if t < L.rank else rng.standard_normal(L.rank)
        pr2 = geo2.projections(v)
        pr = geo.projections(E @ v)
        di = max(di, np.max(np.abs(E @ pr2[2] - pr[2])), np.max(np.abs(E @ pr2[3] - pr[3])))
    devs['i'] = di
    # (ii) E(mu') = mu + lam + q(lam) u
    devs['ii'] = float(np.max(np.abs(E @ geo2.mu() - (geo.mu() + lamf + qlam * uf))))
    # (iii) borw equality on K tensor R
    dk = 0.0
    for t in range(6):
        cs = rng.standard_normal(r)
        v = sum(cs[i] * np.array([float(x) for x in split.k_basis[i]]) for i in range(r))
        dk = max(dk, float(np.max(np.abs(geo.borw_std(v) - geo2.borw_std(v)))))
    devs['iii'] = dk
    # (iv) u^2_{zperp} invariance
    devs['iv'] = abs(geo.u2_zperp - geo2.u2_zperp)
    # (v) v^2_{wperp} invariance on K tensor R
    dv = 0.0
    for t in range(6):
        cs = rng.standard_normal(r)
        v = sum(cs[i] * np.array([float(x) for x in split.k_basis[i]]) for i in range(r))
        a = geo.projections(v)[3]
        b = geo2.projections(v)[3]
        dv = max(dv, abs(float(a @ gram @ a) - float(b @ gram @ b)))
    devs['v'] = dv
    m = max(devs.values())
    worst = max(worst, m)
    if trial < 3 or m > 1e-10:
        print(trial, {k: f"{x:.2e}" for k, x in devs.items()})
print("worst over 20 pairs:", worst)
