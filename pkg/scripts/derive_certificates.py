"""Produce the bundled Köhler boundary certificates.

Run once offline:  python3 scripts/derive_certificates.py
For each endomorphism ring a Frobenius functional is found by bounded search;
for each off-diagonal Hom bimodule the candidate factorizations are tried and
an equivariant isomorphism is found by solving the intertwining system and
searching small combinations of its solutions for a unimodular one.
"""
import itertools
import json
import sys
from pathlib import Path

from uctkit.gorenstein import (FGRing, _precompose_matrix, build_mf_module, check_frobenius_over_Z,
                               mf_from_cert, _ring_from_cert)
from uctkit.lattice import IntMatrix, kernel_basis
from uctkit.zcat import koehler_cat

OUT = Path(__file__).resolve().parent.parent / "src" / "uctkit" / "data" / "certs"


def frobenius(U, bound=1):
    yield_first = [list(U.unit)]
    for lam in yield_first + [list(v) for v in itertools.product(range(-bound, bound + 1), repeat=U.rank)]:
        if check_frobenius_over_Z(U, lam)[0]:
            return lam
    return None


def ring_spec(C, c):
    names = C.basis(c, c)
    pre = "S" if c.startswith("S") else ""
    if c.endswith("A0"):
        return {"vars": ["t"], "images": {"t": pre + "t0"}, "relations": []}
    if c.endswith("A1"):
        return {"vars": ["t"], "images": {"t": pre + "s1"}, "relations": []}
    assert pre + "s2" in names
    return {"vars": ["s", "t"], "images": {"s": pre + "s2", "t": pre + "t2"}, "relations": [None]}


def candidates(p, spec):
    N = lambda x: "+".join(["1"] + [x if k == 1 else f"{x}^{k}" for k in range(1, p)])
    if spec["vars"] == ["t"]:
        w = f"1-t^{p}"
        return [{"w": w, "A": [[N("t")]], "B": [["1-t"]]}, {"w": w, "A": [["1-t"]], "B": [[N("t")]]}]
    w = "1-s-t+s*t"
    return [{"w": w, "A": [["1-t"]], "B": [["1-s"]]}, {"w": w, "A": [["1-s"]], "B": [["1-t"]]}]


def find_iso(C, c, d, M, bound=1):
    r, m, h = C.rank(c, c), M.rank, C.rank(c, d)
    if m != h:
        return None
    acts = [_precompose_matrix(C, c, d, k) for k in range(r)]
    nvar = h * m
    eqs = []
    for k in range(r):
        for i in range(h):
            for j in range(m):
                row = [0] * nvar
                for t in range(m):
                    row[i * m + t] += M.action[k][t, j]
                for t in range(h):
                    row[t * m + j] -= acts[k][i, t]
                eqs.append(row)
    sols = kernel_basis(IntMatrix.from_rows(eqs, nvar))
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=len(sols)):
        v = [sum(a * s[i] for a, s in zip(coeffs, sols)) for i in range(nvar)]
        X = IntMatrix.from_rows([v[i * m:(i + 1) * m] for i in range(h)], m)
        if abs(X.det()) == 1:
            return X
    return None


def derive(p):
    C = koehler_cat(p)
    cert = {"schema_version": 1, "category": C.name, "frobenius": {}, "gproj": {}}
    for c in C.objects:
        lam = frobenius(FGRing.from_category(C, c))
        if lam is None:
            raise SystemExit(f"no Frobenius functional found for End({c})")
        cert["frobenius"][c] = [str(x) for x in lam]
    for c in C.objects:
        for d in C.objects:
            if c == d or not C.rank(c, d):
                continue
            spec = ring_spec(C, c)
            if spec["relations"] == [None]:
                spec["relations"] = ["+".join(["1"] + [f"s^{k}" if k > 1 else "s" for k in range(1, p)]) + "+" +
                                     "+".join(["1"] + [f"t^{k}" if k > 1 else "t" for k in range(1, p)]) + f"-{p}"]
            found = None
            for mf in candidates(p, spec):
                U, vars, images, rels = _ring_from_cert(C, c, spec)
                try:
                    _, M = build_mf_module(mf_from_cert(mf, vars), U, images, rels)
                except Exception:
                    continue
                X = find_iso(C, c, d, M)
                if X is not None:
                    found = {"ring": spec, "mf": mf, "iso": [[str(x) for x in r] for r in X.tolist()]}
                    break
            if found is None:
                raise SystemExit(f"no certificate for {c}->{d}")
            cert["gproj"][f"{c}->{d}"] = found
    return cert


if __name__ == "__main__":
    primes = [int(a) for a in sys.argv[1:]] or [2, 3]
    OUT.mkdir(parents=True, exist_ok=True)
    for p in primes:
        cert = derive(p)
        (OUT / f"koehler{p}.json").write_text(json.dumps(cert, indent=2, sort_keys=True) + "\n")
        print(f"koehler{p}: {len(cert['gproj'])} Hom certificates, {len(cert['frobenius'])} functionals")
