"""Symbolic sources for the manufactured cases, evaluated at sample points.

Differentiates the closed forms with sympy, independently of the C++ jets,
and prints values pinned in test_mms.cpp.
"""
import sympy as sp

x, y, z, t = sp.symbols("x y z t", real=True)
X = (x, y, z)


def stress(p, E):
    mu_e, lam_e, mu_c = p[0], p[1], p[2]
    sym = (E + E.T) / 2
    skw = (E - E.T) / 2
    return 2 * mu_e * sym + 2 * mu_c * skw + lam_e * E.trace() * sp.eye(3)


def micro(p, P):
    return 2 * p[3] * (P + P.T) / 2 + p[4] * P.trace() * sp.eye(3)


def curl_rows(P):
    C = sp.zeros(3, 3)
    for i in range(3):
        v = P.row(i)
        C[i, 0] = sp.diff(v[2], y) - sp.diff(v[1], z)
        C[i, 1] = sp.diff(v[0], z) - sp.diff(v[2], x)
        C[i, 2] = sp.diff(v[1], x) - sp.diff(v[0], y)
    return C


def sources(p, u, P):
    grad = sp.Matrix(3, 3, lambda i, j: sp.diff(u[i], X[j]))
    S = stress(p, grad - P)
    div = sp.Matrix([sum(sp.diff(S[i, j], X[j]) for j in range(3)) for i in range(3)])
    f = sp.diff(u, t, 2) - div
    M = sp.diff(P, t, 2) - S + micro(p, P) + p[3] * p[5] ** 2 * curl_rows(curl_rows(P))
    return f, M


def trig1():
    s = sp.sin(sp.pi * x) * sp.sin(sp.pi * y) * sp.sin(sp.pi * z)
    tau = sp.cos(2 * t)
    u = sp.Matrix([1, sp.Rational(1, 2), -sp.Rational(1, 4)]) * s * tau
    b = [0.2, 0.1, -0.3, 0.05, -0.15, 0.25, 0.3, 0.1, 0.2]
    b = [sp.nsimplify(v) for v in b]
    cols = [sp.cos(sp.pi * x) * sp.sin(sp.pi * y) * sp.sin(sp.pi * z),
            sp.sin(sp.pi * x) * sp.cos(sp.pi * y) * sp.sin(sp.pi * z),
            sp.sin(sp.pi * x) * sp.sin(sp.pi * y) * sp.cos(sp.pi * z)]
    P = sp.Matrix(3, 3, lambda i, j: b[3 * i + j] * cols[j] * tau)
    return u, P


def trig_mixed():
    u, P = trig1()
    P = P.copy()
    P[0, 0] += sp.Rational(1, 2) * sp.Abs(x - sp.Rational(1, 2)) ** sp.Rational(5, 2) * sp.sin(sp.pi * y) * sp.sin(
        sp.pi * z) * sp.cos(2 * t)
    return u, P


def poly2():
    tu = 1 + t + t**2 / 2
    tp = sp.Rational(1, 2) - t + sp.Rational(3, 4) * t**2
    u = sp.Matrix([(1 + x / 2) * (sp.Rational(1, 2) - y),
                   (sp.Rational(1, 5) + y) * (1 + sp.Rational(3, 10) * z),
                   (-sp.Rational(2, 5) + x) * (sp.Rational(1, 10) - sp.Rational(3, 5) * z)]) * tu
    P = sp.zeros(3, 3)
    for q in range(9):
        a = sp.Rational(q, 10) - sp.Rational(3, 10)
        b = sp.Rational(1, 4) - sp.Rational(q, 20)
        ax, ay = q % 3, (q // 3 + 1) % 3
        e = a + X[ax]
        if ay != ax:
            e *= 1 + b * X[ay]
        P[q // 3, q % 3] = e * tp
    return u, P


PARAMS = {"ref": (1, 0, 0, 1, 0, 1),
          "mixed": (2, 1, sp.Rational(1, 2), sp.Rational(3, 2), sp.Rational(1, 4), sp.Rational(7, 10))}
POINTS = [((sp.Rational(1, 2),) * 3, 0), ((sp.Rational(3, 10), sp.Rational(3, 5), sp.Rational(4, 5)), sp.Rational(2, 5))]

if __name__ == "__main__":
    for name, case in (("trig1", trig1), ("trig-mixed", trig_mixed), ("poly2", poly2)):
        u, P = case()
        for pname, p in PARAMS.items():
            f, M = sources(p, u, P)
            for (pt, tv) in POINTS:
                sub = {x: pt[0], y: pt[1], z: pt[2], t: tv}
                fv = [sp.N(v.subs(sub), 17) for v in f]
                Mv = [sp.N(v.subs(sub), 17) for v in M]
                print(name, pname, [float(c) for c in pt], float(tv))
                print("  f", ", ".join(f"{float(v):.15e}" for v in fv))
                print("  M", ", ".join(f"{float(v):.15e}" for v in Mv))
