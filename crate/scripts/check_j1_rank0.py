#!/usr/bin/env python3
"""Print min |L(f, 1)| over the embeddings of each newform in S_2(Gamma_1(N))
for N given on the command line (default 31). If every value is nonzero,
J_1(N)(Q) is finite by Kato's theorem.

Requires cypari2."""
import sys
import cypari2

pari = cypari2.Pari()
pari.allocatemem(10**9, silent=True)
pari.default("realprecision", 38)

GP = """
(N) -> my(L = List(), G = znstar(N, 1));
for (a = 1, N - 1,
  if (gcd(a, N) != 1 || zncharisodd(G, znconreylog(G, a)), next);
  my(mf = mfinit([N, 2, Mod(a, N)], 0));
  if (mfdim(mf) == 0, next);
  my(B = mfeigenbasis(mf));
  for (i = 1, #B,
    my(Ls = lfunmf(mf, B[i]), v);
    v = iferr([abs(lfun(Ls, 1))], E, vector(#Ls, j, abs(lfun(Ls[j], 1))));
    listput(L, [a, i, vecmin(v)])));
Vec(L)
"""


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 31
    f = pari(GP)
    rows = f(n)
    for a, i, v in rows:
        print(f"chi = Mod({a},{n}) form {i}: min |L(f,1)| = {float(v):.6g}")
    ok = all(float(v) > 1e-20 for _, _, v in rows)
    print("all nonzero" if ok else "some L(f,1) vanishes")
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
