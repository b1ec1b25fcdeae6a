"""Independent sympy evaluation of the values frozen in the C++ tests.

Run: python3 tests/oracle/oracle.py
Everything here is written from the defining formulas, without the C++ code.
"""
from itertools import permutations, product

from sympy import Rational as Q, Matrix, binomial, eye, factorial, zeros


def qnum(j, q):
    if j == 0:
        return Q(0)
    return (q**j - q**-j) / (q - 1 / q)


def qfact(j, q):
    out = Q(1)
    for m in range(1, j + 1):
        out *= qnum(m, q)
    return out


def f(p, beta, q):
    return q**-p + qnum(p, q) * beta


def betas(chain, q):
    n = len(chain) + 1
    lam = q - 1 / q
    B = [[Q(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            prod, shifted = Q(1), Q(1)
            for k in range(i, j):
                prod *= chain[k]
                shifted *= chain[k] - lam
            B[i][j] = lam * prod / (prod - shifted)
            B[j][i] = lam - B[i][j]
    return B


class Params:
    def __init__(self, q, chain, alpha):
        self.q, self.n = q, len(chain) + 1
        self.B = betas(chain, q)
        self.alpha = alpha  # {(i, j): (c, w)} for i < j

    def al(self, i, j, x):
        if i == j:
            return Q(1)
        if i < j:
            c, w = self.alpha[(i, j)]
            return c * w**x
        c, w = self.alpha[(j, i)]
        return w**x / c

    def xi(self, i, j, x):
        if i == j:
            return self.q
        b = self.B[i][j]
        return f(x - 1, b, self.q) / f(x, b, self.q)

    def a(self, i, j, p):
        if i == j:
            return self.q
        return self.al(i, j, p[i] - p[j]) * self.xi(i, j, p[i] - p[j])

    def b(self, i, j, p):
        if i == j:
            return Q(0)
        return self.q - self.xi(i, j, p[i] - p[j])

    def R(self, p):
        n = self.n
        M = zeros(n * n, n * n)
        for i in range(n):
            for j in range(n):
                M[i * n + j, j * n + i] += self.a(i, j, p)
                if i != j:
                    M[i * n + j, i * n + j] += self.b(i, j, p)
        return M

    def E(self, p, upper):
        n = self.n
        out = {}
        for s in permutations(range(n)):
            inv = [(s[a], s[b]) for a in range(n) for b in range(a + 1, n) if s[a] > s[b]]
            v = Q(-1) ** len(inv)
            for (i, j) in inv:
                # pairs (i_a, i_b) with a < b and i_a > i_b
                v *= self.al(i, j, p[i] - p[j]) if upper else self.al(j, i, p[j] - p[i])
            if upper:
                for a_ in range(n):
                    for b_ in range(a_ + 1, n):
                        v *= self.xi(s[a_], s[b_], p[s[a_]] - p[s[b_]])
            out[s] = v
        return out


def shifted(p, i):
    p = list(p)
    p[i] -= 1
    return p


def n_diag(P, p):
    n, q = P.n, P.q
    c = Q(-1) ** (n - 1) / qfact(n - 1, q)
    out = []
    for i in range(n):
        lo, up = P.E(shifted(p, i), False), P.E(p, True)
        s = Q(0)
        for ks in product(range(n), repeat=n - 1):
            s += lo.get(tuple(ks) + (i,), 0) * up.get((i,) + tuple(ks), 0)
        out.append(c * s)
    return out


def antisym2_rank(n):
    # q = 1: (1 - P)/2 on V (x) V
    P = zeros(n * n, n * n)
    for i in range(n):
        for j in range(n):
            P[i * n + j, j * n + i] = 1
    return ((eye(n * n) - P) / 2).rank()


def casimir(p):
    n = len(p)
    m = Q(sum(p), n)
    c = [Q(x) - m for x in p]
    s = sum((c[i] - c[k]) ** 2 for i in range(n) for k in range(i + 1, n))
    return s / n - Q(n * (n * n - 1), 12)


def main():
    q = Q(2)
    print("[2] q=2:", qnum(2, q), " [3]! q=2:", qfact(3, q))
    print("f(2,1) q=2:", f(2, 1, q))
    print("beta_13 n=3 q=2 chain (1,3):", betas([Q(1), Q(3)], q)[0][2])
    print("pi_12 q=2 beta=1:", (1 - (q - 1 / q)) / 1)
    P2 = Params(q, [Q(1)], {(0, 1): (Q(1), Q(1))})
    print("xi_12(2) q=2 beta=1:", P2.xi(0, 1, 2))
    print("R(p12=2) n=2 q=2 beta=1:", [(r, c, P2.R([2, 0])[r, c]) for r in range(4) for c in range(4) if P2.R([2, 0])[r, c] != 0])
    print("E n=2 p12=2 upper:", P2.E([2, 0], True), "lower:", P2.E([2, 0], False))
    # eigenvector check of the first generator, which acts undressed
    Pg = Params(Q(2), [Q(1)], {(0, 1): (Q(3), Q(1, 2))})
    up, lo = Pg.E([5, 0], True), Pg.E([5, 0], False)
    col = Matrix([up.get((i, j), 0) for i in range(2) for j in range(2)])
    row = Matrix([[lo.get((i, j), 0) for i in range(2) for j in range(2)]])
    Rg = Pg.R([5, 0])
    print("eigen n=2:", (Rg * col + col / 2).is_zero_matrix, (row * Rg + row / 2).is_zero_matrix)

    P3 = Params(Q(3, 2), [Q(2), Q(-1, 3)], {(0, 1): (Q(2), Q(1, 3)), (0, 2): (Q(-1, 2), Q(3)), (1, 2): (Q(5, 4), Q(2))})
    p3 = [4, 1, 0]
    R3 = P3.R(p3)
    print("R n=3 entries:", [(r, c, R3[r, c]) for r in range(9) for c in range(9) if R3[r, c] != 0])
    lam = P3.q - 1 / P3.q
    print("hecke residual n=3:", (R3 * R3 - eye(9) - lam * R3).is_zero_matrix)
    print("E n=3 upper:", P3.E(p3, True))
    print("E n=3 lower:", P3.E(p3, False))
    up, lo = P3.E(p3, True), P3.E(p3, False)
    print("contraction n=3:", sum(lo[s] * up[s] for s in up), " [3]!:", qfact(3, P3.q))
    nd = n_diag(P3, p3)
    print("N diag n=3:", nd)
    # closed form: prod_{j != i} alpha_ij(p_ij - theta_ji) xi_ij(p_ij), theta_ji = 1 for j > i
    cf = []
    for i in range(3):
        v = Q(1)
        for j in range(3):
            if j == i:
                continue
            x = p3[i] - p3[j]
            v *= P3.al(i, j, x - (1 if j > i else 0)) * P3.xi(i, j, x)
        cf.append(v)
    print("N closed form n=3:", cf)
    print("rank A2 q=1 n=2,3:", antisym2_rank(2), antisym2_rank(3))
    print("casimir:", casimir([1, 0]), casimir([1, 0, -1]), casimir([2, 0]))
    for n in (2, 3, 4):
        r = Q(3, 2)
        qq = r**n
        prod_ = (qq / r) ** binomial(n + 1, 2) * (-1 / (qq * r)) ** binomial(n, 2)
        print("det product n=%d:" % n, prod_)
    # ordered sums for the n=3 xi table at p3
    I = Q(0)
    for s in permutations(range(3)):
        v = Q(1)
        for a_ in range(3):
            for b_ in range(a_ + 1, 3):
                v *= P3.xi(s[a_], s[b_], p3[s[a_]] - p3[s[b_]])
        I += v
    print("I_3 =", I, " [3]! =", qfact(3, P3.q))
    print("5! terms:", factorial(5))


if __name__ == "__main__":
    main()
