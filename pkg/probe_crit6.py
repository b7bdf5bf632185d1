import time
import numpy as np

from siegeltheta.lattice import standard_corpus, base_frame
from siegeltheta.polynomials import build_P_alpha, IndexTuple
from siegeltheta.theta import SiegelPoint, theta_genus2
from siegeltheta.weil import mp4_word_matrix, mp4_word_phi, rho2_word, siegel_act

TAUS = [
    [[0.04 + 1.10j, 0.03 + 0.02j], [0.03 + 0.02j, -0.05 + 1.12j]],
    [[-0.06 + 1.05j, 0.02 - 0.03j], [0.02 - 0.03j, 0.08 + 1.18j]],
    [[0.10 + 1.15j, -0.04 + 0.04j], [-0.04 + 0.04j, 0.03 + 1.08j]],
    [[0.00 + 1.20j, 0.05 + 0.00j], [0.05 + 0.00j, -0.08 + 1.10j]],
    [[0.07 + 1.12j, 0.00 - 0.02j], [0.00 - 0.02j, 0.00 + 1.15j]],
]
B1 = ((1, 1), (1, 0))
B2 = ((1, 0), (0, 0))
WORDS = [[("T", B1)], [("S",)], [("S",), ("T", B2)]]
EPS = 1e-8

rng = np.random.default_rng(1202)
t_all = time.time()
worst = 0.0
for name in ["U+U", "U+U+A1"]:
    L = standard_corpus()[name]
    frame = base_frame(L)
    n = L.rank
    poly = build_P_alpha(IndexTuple(1, 1, 2, 2), frame.bpos)
    expo = frame.bpos - frame.bneg + 4
    for ti, traw in enumerate(TAUS):
        point = SiegelPoint(traw)
        alpha = rng.uniform(-0.5, 0.5, (2, n))
        beta = rng.uniform(-0.5, 0.5, (2, n))
        t0 = time.time()
        base = theta_genus2(L, point, alpha, beta, frame, poly, EPS)
        tb = time.time() - t0
        for word in WORDS:
            W = np.array(mp4_word_matrix(word), dtype=float)
            A, Bb = W[:2, :2], W[:2, 2:]
            C, D = W[2:, :2], W[2:, 2:]
            ipoint = SiegelPoint(siegel_act(mp4_word_matrix(word), point.tau))
            ia = A @ alpha + Bb @ beta
            ib = C @ alpha + D @ beta
            t0 = time.time()
            img = theta_genus2(L, ipoint, ia, ib, frame, poly, EPS)
            tw = time.time() - t0
            rhs = (mp4_word_phi(word, point.tau) ** expo
                   * (rho2_word(L.discriminant_group(), word) @ base.value))
            dev = float(np.max(np.abs(img.value - rhs)))
            worst = max(worst, dev)
            print(f"{name} tau{ti} {word!r}: dev={dev:.2e} "
                  f"base={tb:.1f}s img={tw:.1f}s dety'={ipoint.dety:.3f} "
                  f"pts={img.terms_used}")
            assert dev < 5 * EPS, (name, ti, word, dev)
print(f"TOTAL {time.time() - t_all:.1f}s worst={worst:.2e}")
