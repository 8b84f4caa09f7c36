#!/usr/bin/env python3
"""Independent reference values frozen into the unit tests.

Uses sympy for exact derivatives and mpmath for high-precision eigenpairs,
quadrature and root finding. Run: python3 tools/oracles.py
"""

import mpmath as mp
import sympy as sp

mp.mp.dps = 40


def num(v):
    if isinstance(v, sp.Basic):
        v = sp.N(v, 50)
    return mp.nstr(mp.mpf(v), 17)


def show(name, value):
    if isinstance(value, (list, tuple)):
        print(f"{name} = {{{', '.join(num(v) for v in value)}}}")
    else:
        print(f"{name} = {num(value)}")


def threefold():
    x1, x2 = sp.symbols("x1 x2", real=True)
    eta = sp.Rational(7, 10)
    J = (x1**2 + x2**2) / 2 + (x1**2 + x2**2) ** 2 / 4 - eta * (x1**3 - 3 * x1 * x2**2)
    g = [sp.diff(J, v) for v in (x1, x2)]
    H = sp.hessian(J, (x1, x2))

    pt = {x1: sp.Rational(3, 10), x2: sp.Rational(-7, 10)}
    show("threefold J(0.3,-0.7)", J.subs(pt))
    show("threefold grad(0.3,-0.7)", [e.subs(pt) for e in g])
    show("threefold hess(0.3,-0.7)", [H[0, 0].subs(pt), H[0, 1].subs(pt), H[1, 1].subs(pt)])

    r = sp.symbols("r", positive=True)
    rs, rm = sorted(sp.solve(r**2 - 3 * eta * r + 1, r), key=lambda v: float(v))
    show("r_s", rs)
    show("r_m", rm)
    for name, rv in (("saddle", rs), ("outer min", rm)):
        p = {x1: rv, x2: 0}
        show(f"J({name})", J.subs(p))
        show(f"hess eigs({name})", sorted([H[0, 0].subs(p), H[1, 1].subs(p)], key=float))

    # Augmented cost on the negative-curvature side, beta = 1.
    a, b, c = H[0, 0], H[0, 1], H[1, 1]
    lam = (a + c) / 2 - sp.sqrt(((a - c) / 2) ** 2 + b**2)
    beta = 1
    Phi = J + sp.Rational(beta**2, 2) * lam**2
    q = {x1: sp.Rational(1, 2), x2: sp.Rational(1, 5)}
    show("lambda_min(0.5,0.2)", lam.subs(q))
    show("Phi(0.5,0.2)", Phi.subs(q))
    show("grad Phi(0.5,0.2)", [sp.diff(Phi, v).subs(q) for v in (x1, x2)])
    HPhi = sp.hessian(Phi, (x1, x2)).subs(q)
    Hq = mp.matrix([[mp.mpf(sp.N(H[i, j].subs(q), 50)) for j in range(2)] for i in range(2)])
    E, Q = mp.eigsy(Hq)
    k = 0 if E[0] < E[1] else 1
    u = [Q[0, k], Q[1, k]]
    HP = [[mp.mpf(sp.N(HPhi[i, j], 50)) for j in range(2)] for i in range(2)]
    quad = sum(u[i] * HP[i][j] * u[j] for i in range(2) for j in range(2))
    show("u^T HPhi u (0.5,0.2)", quad)


def matfac():
    lam = [mp.mpf(1), mp.mpf("0.9"), mp.mpf("0.25"), mp.mpf(0)]  # n = 4, delta = 0.1
    M = mp.diag(lam)
    x = mp.matrix([mp.mpf("0.3"), mp.mpf("-0.2"), mp.mpf("0.5"), mp.mpf("0.1")])
    R = x * x.T - M
    J = sum(R[i, j] ** 2 for i in range(4) for j in range(4)) / 4
    g = R * x
    nx2 = (x.T * x)[0]
    H = nx2 * mp.eye(4) + 2 * x * x.T - M
    E, Q = mp.eigsy(H)
    order = sorted(range(4), key=lambda i: E[i])
    u = [Q[i, order[0]] for i in range(4)]
    s = 1 if max(u, key=abs) > 0 else -1
    show("matfac J", J)
    show("matfac grad", [g[i] for i in range(4)])
    show("matfac lambda_min", E[order[0]])
    show("matfac gap", E[order[1]] - E[order[0]])
    show("matfac u_min", [s * v for v in u])

    n, delta = 50, mp.mpf("0.01")
    spec = [mp.mpf(1), 1 - delta] + [mp.mpf("0.5") * (n - i) / (n - 2) for i in range(3, n + 1)]
    show("matfac n=50 delta=0.01 J(0)", sum(v**2 for v in spec) / 4)
    show("matfac n=50 delta=0.01 J*", (sum(v**2 for v in spec) - 1) / 4)


def laws():
    # Fixed time: dV/dt = -(c1 V^a + c2 V^p), c1 = c2 = 1, a = 0.5, p = 1.5.
    def elapsed(V, V0):
        return mp.quad(lambda v: 1 / (v ** mp.mpf("0.5") + v ** mp.mpf("1.5")), [V, V0])

    for V0, t in ((1, "0.5"), (3, "0.25"), (3, "1.2")):
        V = mp.findroot(lambda v: elapsed(v, V0) - mp.mpf(t), (mp.mpf("1e-30"), mp.mpf(V0)), solver="illinois")
        show(f"fixed V({V0}, {t})", V)
    show("fixed settling(V0=1)", elapsed(0, 1))
    show("fixed settling(V0=3)", elapsed(0, 3))


if __name__ == "__main__":
    threefold()
    matfac()
    laws()
