"""Sparse exact polynomials on the (b+2) x 2 coordinate grid.

One flat representation covers grid variables x_{i,j}, the symbolic 2x2
matrix entries n_{kl} used by homogeneity checks, symbolic tau entries,
auxiliary collection scalars s_j, and a symbolic 1/pi, so operator identities
stay exact.  Coefficients are Fractions unless a float or complex enters.
"""

from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction

import numpy as np

X = "x"
NVAR = "n"
TAU = "tau"
SVAR = "s"
INVPI = ("invpi",)


def xvar(i: int, j: int) -> tuple:
    return (X, i, j)


def nvar(k: int, l: int) -> tuple:
    return (NVAR, k, l)


def tauvar(m: int) -> tuple:
    return (TAU, m)


def svar(j: int) -> tuple:
    return (SVAR, j)


class Poly:
    """Sparse polynomial: monomial key (sorted ((var), exp) tuple) -> coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for k, c in terms.items():
                if c != 0:
                    self.terms[k] = self.terms.get(k, 0) + c
            self.terms = {k: c for k, c in self.terms.items() if c != 0}

    @staticmethod
    def const(c) -> "Poly":
        if c == 0:
            return Poly()
        return Poly({(): c})

    @staticmethod
    def var(v, exp: int = 1, coeff=Fraction(1)) -> "Poly":
        if exp == 0:
            return Poly.const(coeff)
        return Poly({((v, exp),): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, 0) + c
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        p = Poly()
        p.terms = out
        return p

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        p = Poly()
        p.terms = {k: -c for k, c in self.terms.items()}
        return p

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return Poly.const(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            if other == 0:
                return Poly()
            p = Poly()
            p.terms = {k: c * other for k, c in self.terms.items()}
            return p
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = _merge_keys(k1, k2)
                s = out.get(k, 0) + c1 * c2
                if s == 0:
                    out.pop(k, None)
                else:
                    out[k] = s
        p = Poly()
        p.terms = {k: c for k, c in out.items() if c != 0}
        return p

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power")
        out = Poly.const(Fraction(1))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def diff(self, v) -> "Poly":
        out: dict = {}
        for k, c in self.terms.items():
            for idx, (var, exp) in enumerate(k):
                if var == v:
                    if exp == 1:
                        nk = k[:idx] + k[idx + 1:]
                    else:
                        nk = k[:idx] + ((var, exp - 1),) + k[idx + 1:]
                    s = out.get(nk, 0) + c * exp
                    if s == 0:
                        out.pop(nk, None)
                    else:
                        out[nk] = s
                    break
        p = Poly()
        p.terms = {k: c for k, c in out.items() if c != 0}
        return p

    def subs(self, mapping: dict) -> "Poly":
        """Replace each listed variable by a Poly or scalar; others untouched."""
        reps = {v: (r if isinstance(r, Poly) else Poly.const(r))
                for v, r in mapping.items()}
        out = Poly()
        for k, c in self.terms.items():
            term = Poly.const(c)
            for var, exp in k:
                if var in reps:
                    term = term * (reps[var] ** exp)
                else:
                    term = term * Poly.var(var, exp)
            out = out + term
        return out

    def eval(self, assign: dict):
        """Full numeric evaluation; every variable present must be assigned."""
        total = 0
        for k, c in self.terms.items():
            v = c
            for var, exp in k:
                v = v * assign[var] ** exp
            total = total + v
        return total

    def variables(self) -> set:
        return {var for k in self.terms for var, _ in k}

    def collect(self, vars_to_collect) -> dict:
        """Map from exponent tuples of the given variables to coefficient Polys."""
        vs = list(vars_to_collect)
        out: dict[tuple, Poly] = {}
        for k, c in self.terms.items():
            exps = [0] * len(vs)
            rest = []
            for var, exp in k:
                if var in vs:
                    exps[vs.index(var)] = exp
                else:
                    rest.append((var, exp))
            key = tuple(exps)
            out.setdefault(key, Poly())
            out[key] = out[key] + Poly({tuple(rest): c})
        return {k: p for k, p in out.items() if not p.is_zero()}

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e for _, e in k) for k in self.terms)

    def degree_in(self, prefix: str) -> int:
        best = 0
        for k in self.terms:
            best = max(best, sum(e for var, e in k if var[0] == prefix))
        return best

    def map_coeffs(self, f) -> "Poly":
        p = Poly()
        p.terms = {k: f(c) for k, c in self.terms.items() if f(c) != 0}
        return p

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        parts = []
        for k in sorted(self.terms, key=lambda key: (len(key), key)):
            mono = "*".join(f"{var}^{e}" if e > 1 else f"{var}"
                            for var, e in k) or "1"
            parts.append(f"({self.terms[k]})*{mono}")
        return "Poly(" + " + ".join(parts) + ")"


def _merge_keys(k1, k2):
    d = {}
    for var, exp in itertools.chain(k1, k2):
        d[var] = d.get(var, 0) + exp
    return tuple(sorted(d.items()))


ONE = Poly.const(Fraction(1))


class IndexTuple:
    """Index data (a1, a2, b1, b2), 1-based rows, with a1 < b1 and a2 < b2."""

    __slots__ = ("a1", "a2", "b1", "b2")

    def __init__(self, a1: int, a2: int, b1: int, b2: int):
        if not (1 <= a1 < b1 and 1 <= a2 < b2):
            raise ValueError("need a1 < b1 and a2 < b2, all >= 1")
        self.a1, self.a2, self.b1, self.b2 = a1, a2, b1, b2

    @property
    def distinct_pairs(self) -> bool:
        """Hypothesis used for harmonicity: a1 != a2 and b1 != b2."""
        return self.a1 != self.a2 and self.b1 != self.b2

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a1, self.a2, self.b1, self.b2)

    def __repr__(self):
        return f"IndexTuple{self.as_tuple()}"


def laplacian_trace_apply(p: Poly, yinv, rows: int) -> Poly:
    """tr(Delta yinv) P = sum_i sum_{eta,xi} yinv[xi][eta] d^2 P/dx_{i,eta}dx_{i,xi}."""
    out = Poly()
    for i in range(rows):
        for eta in range(2):
            for xi in range(2):
                c = yinv[xi][eta]
                if c == 0:
                    continue
                out = out + c * p.diff(xvar(i, eta)).diff(xvar(i, xi))
    return out


def exp_operator(p: Poly, yinv, rows: int) -> Poly:
    """exp(-tr(Delta yinv)/(8 pi)) P, exact with a symbolic 1/pi."""
    out = p
    term = p
    m = 0
    fact = 1
    while True:
        term = laplacian_trace_apply(term, yinv, rows)
        if term.is_zero():
            return out
        m += 1
        fact *= m
        scale = Poly.var(INVPI, m, Fraction((-1) ** m, 8 ** m * fact))
        out = out + scale * term


def build_P_alpha(alpha: IndexTuple, b: int) -> Poly:
    """4 sum over the two transpositions of (a1,b1) and of (a2,b2)."""
    if alpha.b1 > b or alpha.b2 > b:
        raise ValueError("index exceeds the positive rank")
    total = Poly()
    for s1, sgn1 in (((alpha.a1, alpha.b1), 1), ((alpha.b1, alpha.a1), -1)):
        for s2, sgn2 in (((alpha.a2, alpha.b2), 1), ((alpha.b2, alpha.a2), -1)):
            term = (Poly.var(xvar(s1[0] - 1, 0)) * Poly.var(xvar(s2[0] - 1, 0))
                    * Poly.var(xvar(s1[1] - 1, 1)) * Poly.var(xvar(s2[1] - 1, 1)))
            total = total + Fraction(sgn1 * sgn2) * term
    return Fraction(4) * total


def build_Q_alpha(alpha: IndexTuple, b: int) -> Poly:
    identity = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    return exp_operator(build_P_alpha(alpha, b), identity, b + 2)


def _row_mix_sub(rows) -> dict:
    """x_{i,1} -> x_{i,1}n11 + x_{i,2}n21 and the j=2 analogue, on given rows."""
    sub = {}
    for i in rows:
        sub[xvar(i, 0)] = (Poly.var(xvar(i, 0)) * Poly.var(nvar(0, 0))
                           + Poly.var(xvar(i, 1)) * Poly.var(nvar(1, 0)))
        sub[xvar(i, 1)] = (Poly.var(xvar(i, 0)) * Poly.var(nvar(0, 1))
                           + Poly.var(xvar(i, 1)) * Poly.var(nvar(1, 1)))
    return sub


def symbolic_det_n() -> Poly:
    return (Poly.var(nvar(0, 0)) * Poly.var(nvar(1, 1))
            - Poly.var(nvar(0, 1)) * Poly.var(nvar(1, 0)))


def very_homogeneous_check(p: Poly, mplus: int, mminus: int,
                           bpos: int, btotal: int | None = None) -> bool:
    """P(x+ N) = det(N)^{m+} P and the negative-row analogue, exactly."""
    btotal = btotal if btotal is not None else bpos + 2
    det = symbolic_det_n()
    lhs_pos = p.subs(_row_mix_sub(range(bpos)))
    if lhs_pos != det ** mplus * p:
        return False
    lhs_neg = p.subs(_row_mix_sub(range(bpos, btotal)))
    return lhs_neg == det ** mminus * p


def decompose_P_w(p: Poly, u_pos, bpos: int) -> dict[tuple[int, int], Poly]:
    """Components P_{w,h1,h2} with P(v) = sum (v1,u+)^{h1}(v2,u+)^{h2} P_{w,h}(borw v).

    u_pos is the positive-part coordinate vector of u (rational for the exact
    path, float otherwise); P must involve positive rows only.
    """
    for var in p.variables():
        if var[0] == X and var[1] >= bpos:
            raise ValueError("polynomial involves negative rows")
    float_mode = any(isinstance(c, float) for c in u_pos)
    if float_mode:
        u = [float(c) for c in u_pos]
        one, zero = 1.0, 0.0
    else:
        u = [Fraction(c) for c in u_pos]
        one, zero = Fraction(1), Fraction(0)
    u2 = sum(c * c for c in u)
    if u2 == 0:
        raise ValueError("u has no positive component")
    sub = {}
    for i in range(bpos):
        for j in range(2):
            repl = Poly.var(svar(j + 1), coeff=u[i] / u2)
            for k in range(bpos):
                proj = (one if i == k else zero) - u[i] * u[k] / u2
                if proj != 0:
                    repl = repl + proj * Poly.var(xvar(k, j))
            sub[xvar(i, j)] = repl
    expanded = p.subs(sub)
    collected = expanded.collect([svar(1), svar(2)])
    return {key: poly for key, poly in collected.items()}


def combine_P_w_h(components: dict, h: int, r) -> Poly:
    """P_{w,h}(., r) = sum_{h1} (-r)^{h1} P_{w,h1,h-h1}."""
    out = Poly()
    for h1 in range(h + 1):
        comp = components.get((h1, h - h1))
        if comp is None:
            continue
        out = out + (-r) ** h1 * comp
    return out


def _tau_sub(bpos: int) -> dict:
    """Right multiplication of the positive grid by [[tau1,tau2],[tau2,tau3]]."""
    t1, t2, t3 = (Poly.var(tauvar(m)) for m in (1, 2, 3))
    sub = {}
    for i in range(bpos):
        sub[xvar(i, 0)] = Poly.var(xvar(i, 0)) * t1 + Poly.var(xvar(i, 1)) * t2
        sub[xvar(i, 1)] = Poly.var(xvar(i, 0)) * t2 + Poly.var(xvar(i, 1)) * t3
    return sub


def tau_transform_check(components: dict, bpos: int) -> bool:
    """Exact symbolic transformation of the components under x -> x tau."""
    t1, t2, t3 = (Poly.var(tauvar(m)) for m in (1, 2, 3))
    det = t1 * t3 - t2 * t2
    sub = _tau_sub(bpos)

    def c(h1, h2):
        return components.get((h1, h2), Poly())

    checks = [
        (c(0, 2).subs(sub),
         t1 ** 2 * c(0, 2) + t2 ** 2 * c(2, 0) - t1 * t2 * c(1, 1)),
        (c(1, 1).subs(sub),
         -2 * t1 * t2 * c(0, 2) - 2 * t2 * t3 * c(2, 0)
         + (t1 * t3 + t2 * t2) * c(1, 1)),
        (c(2, 0).subs(sub),
         t2 ** 2 * c(0, 2) + t3 ** 2 * c(2, 0) - t2 * t3 * c(1, 1)),
        (c(0, 1).subs(sub), t1 * det * c(0, 1) - t2 * det * c(1, 0)),
        (c(1, 0).subs(sub), -t2 * det * c(0, 1) + t3 * det * c(1, 0)),
    ]
    return all(lhs == rhs for lhs, rhs in checks)


def is_homogeneous_of_degree(p: Poly, d: int) -> bool:
    return all(sum(e for var, e in k if var[0] == X) == d for k in p.terms)


def eval_poly_on_grid(p: Poly, xgrid: np.ndarray, extra: dict | None = None
                      ) -> np.ndarray:
    """Vectorized evaluation: xgrid has shape (N, rows, 2)."""
    n = xgrid.shape[0]
    values = {INVPI: 1.0 / math.pi}
    if extra:
        values.update(extra)
    total = np.zeros(n, dtype=complex)
    for k, c in p.terms.items():
        term = np.full(n, complex(c))
        for var, exp in k:
            if var[0] == X:
                term = term * xgrid[:, var[1], var[2]] ** exp
            else:
                term = term * complex(values[var]) ** exp
        total = total + term
    return total


def poly_to_json(p: Poly) -> str:
    monos = []
    for k in sorted(p.terms, key=lambda key: (len(key), key)):
        entry = []
        for var, exp in k:
            if var[0] != X:
                raise ValueError("only grid variables serialize to JSON")
            entry.append([var[1], var[2], exp])
        c = p.terms[k]
        if isinstance(c, Fraction):
            coeff = [c.numerator, c.denominator]
        elif isinstance(c, int):
            coeff = [c, 1]
        else:
            c = complex(c)
            coeff = [c.real, c.imag]
        monos.append({"monomial": entry, "coeff": coeff})
    return json.dumps(monos)


def poly_from_json(text: str) -> Poly:
    data = json.loads(text)
    out = Poly()
    for item in data:
        key = tuple(sorted((xvar(i, j), exp) for i, j, exp in item["monomial"]))
        a, b = item["coeff"]
        if isinstance(a, int) and isinstance(b, int):
            coeff = Fraction(a, b)
        else:
            coeff = complex(a, b)
        out = out + Poly({key: coeff})
    return out
