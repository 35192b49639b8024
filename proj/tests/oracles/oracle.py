"""Independent reference values for the frozen-value unit tests.

Everything here is computed symbolically (sympy) or by adaptive quadrature
(mpmath) without touching the C++ library. Run it and paste the printed
constants into test_frozen.cpp when a fixture changes.
"""
import mpmath as mp
import sympy as sp

mp.mp.dps = 30


def show(name, value):
    print(f"{name} = {sp.N(value, 20)}")


x0, x1 = sp.symbols("x0 x1", real=True)

# Intrinsic determinant and cofactor of a map between non-orthonormal bases.
# Cof A = Det A * (A*)^{-1}, A* = G_V^{-1} M^T G_W.
gv = sp.Matrix([[2, sp.Rational(1, 2)], [sp.Rational(1, 2), 1]])
gw = sp.Matrix([[1, sp.Rational(1, 5)], [sp.Rational(1, 5), 3]])
m = sp.Matrix([[1, 2], [3, 4]])
det = sp.sqrt(gw.det() / gv.det()) * m.det()
show("det_2d", det)
cof = det * (gv.inv() * m.T * gw).inv()
for a in range(2):
    for i in range(2):
        show(f"cof_2d[{a}][{i}]", cof[a, i])

# Hodge star of e_0 and e_1 in the same G_V, from <a, b> Vol = a ^ *b with
# Vol = e_0 ^ e_1 / sqrt(det G).
s = sp.sqrt(gv.det())
for b in range(2):
    c0, c1 = sp.symbols("c0 c1")
    eqs = []
    for a in range(2):
        alpha = [1 if k == a else 0 for k in range(2)]
        inner = sum(alpha[i] * gv[i, b] for i in range(2))
        eqs.append(sp.Eq(alpha[0] * c1 - alpha[1] * c0, inner / s))
    sol = sp.solve(eqs, [c0, c1])
    show(f"star_e{b}[0]", sol[c0])
    show(f"star_e{b}[1]", sol[c1])


def christoffel(g, p):
    ginv = g.inv()
    xs = [x0, x1]
    out = {}
    for k in range(2):
        for i in range(2):
            for j in range(2):
                expr = sum(ginv[k, l] * (sp.diff(g[l, i], xs[j]) + sp.diff(g[l, j], xs[i]) - sp.diff(g[i, j], xs[l]))
                           for l in range(2)) / 2
                out[(k, i, j)] = sp.simplify(expr.subs({x0: p[0], x1: p[1]}))
    return out


aniso = sp.Matrix([[1 + x0**2, 0], [0, sp.exp(x1)]])
p = (sp.Rational(3, 10), sp.Rational(7, 10))
for (k, i, j), v in christoffel(aniso, p).items():
    if v != 0:
        show(f"aniso_gamma[{k}][{i}][{j}]", v)

sphere = 4 / (1 + x0**2 + x1**2) ** 2 * sp.eye(2)
q = (sp.Rational(1, 5), -sp.Rational(2, 5))
for (k, i, j), v in christoffel(sphere, q).items():
    show(f"sphere_gamma[{k}][{i}][{j}]", v)

# Divergence (1/sqrt g) d_i(sqrt g X^i) of X = (0.5 x1, -0.5 x0 + 0.1) on the sphere chart.
sg = sp.sqrt(sphere.det())
X = [x1 / 2, -x0 / 2 + sp.Rational(1, 10)]
div = sum(sp.diff(sg * X[i], v) for i, v in enumerate([x0, x1])) / sg
show("sphere_div", div.subs({x0: q[0], x1: q[1]}))

# Energy of the sphere-stereographic map over [-1,1]^2.
f0 = x0 + sp.Rational(1, 5) * x1**2
f1 = x1 + sp.Rational(3, 10) * sp.sin(x0)
jac = sp.Matrix([[sp.diff(f0, x0), sp.diff(f0, x1)], [sp.diff(f1, x0), sp.diff(f1, x1)]]).det()
h = 4 / (1 + f0**2 + f1**2) ** 2
integrand = sp.lambdify((x0, x1), h * jac, "mpmath")
energy = mp.quad(lambda a, b: integrand(a, b), [-1, 1], [-1, 1])
print(f"sphere_energy = {mp.nstr(energy, 20)}")

# Energy of the hyperbolic-halfplane map over [-1,1] x [0.5,2].
f0 = x0 + sp.Rational(1, 5) * x1**2
f1 = x1 + sp.Rational(1, 10) * sp.sin(x0) * x1
jac = sp.Matrix([[sp.diff(f0, x0), sp.diff(f0, x1)], [sp.diff(f1, x0), sp.diff(f1, x1)]]).det()
integrand = sp.lambdify((x0, x1), jac / f1**2, "mpmath")
energy = mp.quad(lambda a, b: integrand(a, b), [-1, 1], [0.5, 2])
print(f"hyperbolic_energy = {mp.nstr(energy, 20)}")

# Published coordinate residual on the polar target with f = id at r = 1.5:
# (Gamma^beta_{beta gamma}) Cof + ... reduces to (1/r) * r * e_0 = (1, 0).
print("mh83_polar = (1, 0)")
