"""Command-line interface.  Every command prints one JSON document.

Exit codes: 0 pass, 1 check failure, 2 input error, 3 internal invariant
violation.  Randomized commands draw instance k from ``random.Random(f"{seed}:{k}")``
(Mersenne Twister, string seeding); UCTKIT_THREADS caps the worker pool.
"""
from __future__ import annotations

import argparse
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor

from . import jsonio
from .errors import InputError, InternalInvariantViolation, UctkitError

PASS, FAIL, BAD_INPUT, INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    _intermixed = False

    def parse_known_args(self, args=None, namespace=None):
        # leaf commands accept files after options (``filtkk filtrate --n 2 m.json``)
        if self._subparsers is None and not self._intermixed:
            self._intermixed = True
            try:
                return self.parse_known_intermixed_args(args, namespace)
            finally:
                self._intermixed = False
        return super().parse_known_args(args, namespace)

    def error(self, message):
        self.print_usage(sys.stderr)
        _emit(jsonio.document("error", {"error": "input", "message": message}), sys.stdout)
        raise SystemExit(BAD_INPUT)


def _emit(doc, out=None):
    (out or sys.stdout).write(jsonio.dumps(doc) + "\n")


def _read_json(path):
    try:
        with open(path) as fh:
            return jsonio.loads(fh.read())
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _workers():
    raw = os.environ.get("UCTKIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"UCTKIT_THREADS must be an integer, got {raw!r}") from None


def _pmap(fn, items):
    items = list(items)
    n = min(_workers(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * n))))


def _instance_rng(seed, k):
    return random.Random(f"{seed}:{k}")


# ------------------------------------------------------------ categories

def _category(args):
    from . import zcat
    kind = args.category
    if kind == "filtkk":
        from .filtkk import fk_category
        return fk_category(_need(args, "n"))
    if kind == "koehler":
        return zcat.koehler_cat(_need(args, "p"))
    if kind == "periodic":
        return zcat.periodic_complex_cat(_need(args, "pi"))
    if kind == "ppc":
        return zcat.pure_periodic_cat(_need(args, "N"))
    if kind == "cyclic":
        return zcat.groupoid_cat(zcat.cyclic_group_table(_need(args, "order")), name=f"C{args.order}")
    if kind == "symmetric":
        return zcat.groupoid_cat(zcat.symmetric_group_table(_need(args, "order")), name=f"S{args.order}")
    raise InputError(f"unknown category {kind!r}")


def _need(args, name):
    v = getattr(args, name, None)
    if v is None:
        raise InputError(f"--{name} is required for category {args.category!r}")
    return v


def _category_args(p):
    p.add_argument("--category", required=True,
                   choices=["filtkk", "koehler", "periodic", "ppc", "cyclic", "symmetric"])
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--pi", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--order", type=int)


def _emit_category(C):
    homs = []
    for (c, d) in sorted(C.hom_basis):
        homs.append({"source": c, "target": d, "basis": list(C.basis(c, d)),
                     "orders": jsonio.vec_out(C.hom_orders(c, d))})
    comp = []
    for (c, d, e), table in sorted(C.comp.items()):
        comp.append({"path": [c, d, e], "table": [[jsonio.vec_out(v) for v in row] for row in table]})
    return {"name": C.name, "objects": list(C.objects), "homs": homs, "composition": comp}


def cmd_category(args):
    from .zcat import validate_category
    C = _category(args)
    if args.action == "emit":
        _emit(jsonio.document("category", _emit_category(C)))
        return PASS
    fails = validate_category(C)
    payload = {"name": C.name, "objects": len(C.objects),
               "total_rank": sum(C.rank(c, d) for (c, d) in C.hom_basis), "ok": not fails,
               "failures": [{"kind": f.kind, "detail": str(f.detail)} for f in fails]}
    _emit(jsonio.document("category_report", payload))
    return PASS if not fails else FAIL


# ------------------------------------------------------------ Gorenstein

def _serre_data(C, args):
    from . import gorenstein as g
    if args.serre != "builtin":
        obj = _read_json(args.serre)
        try:
            mats = {tuple(k.split("->")): jsonio.matrix_in(v) for k, v in obj["mats"].items()}
            lam = {c: jsonio.vec_in(v) for c, v in obj["lam"].items()}
            return g.SerreData(dict(obj["obj"]), mats, lam)
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed Serre data: {e}") from None
    if args.category == "filtkk":
        return g.filtkk_serre_data(C)
    if args.category == "periodic":
        return g.periodic_serre_data(C)
    if args.category in ("cyclic", "symmetric"):
        return g.identity_serre_data(C)
    raise InputError(f"no builtin Serre data for {args.category!r}")


def _report_exit(kind, report):
    _emit(jsonio.document(kind, report.to_json()))
    return PASS if report.ok else FAIL


def cmd_serre(args):
    from .gorenstein import check_serre
    C = _category(args)
    return _report_exit("serre_report", check_serre(C, _serre_data(C, args)))


def cmd_boundary(args):
    from .gorenstein import check_boundary, identity_boundary_data, load_certificates
    C = _category(args)
    if args.certs == "builtin":
        if args.category != "koehler":
            raise InputError("builtin certificates exist only for the koehler category")
        certs = load_certificates(f"koehler{args.p}")
    elif not os.path.exists(args.certs) and os.path.basename(args.certs) in ("koehler2.json", "koehler3.json"):
        # fall back to the bundled copy of a named certificate file
        certs = load_certificates(os.path.basename(args.certs)[:-5])
    else:
        certs = _read_json(args.certs)
    return _report_exit("boundary_report", check_boundary(C, identity_boundary_data(C), certs))


def cmd_mf(args):
    from . import gorenstein as g
    if args.file:
        obj = _read_json(args.file)
        try:
            vars_ = tuple(obj["vars"])
        except (KeyError, TypeError):
            raise InputError("factorization needs a 'vars' list") from None
        mf = g.mf_from_cert(obj, vars_)
        ok = g.verify_matrix_factorization(mf)
        _emit(jsonio.document("mf_report", {"identity": ok, "size": mf.size}))
        return PASS if ok else FAIL
    rows, ok = [], True
    for name, mf, U, images, rels, rank in g.equivariant_factorizations(_need_p(args)):
        row = {"name": name, "identity": g.verify_matrix_factorization(mf)}
        if args.action == "build":
            try:
                res, M = g.build_mf_module(mf, U, images, rels)
                row.update({"exact": res.exact, "dual_exact": res.dual_exact, "rank": M.rank,
                            "expected_rank": rank})
                row_ok = res.exact and res.dual_exact and M.rank == rank
            except UctkitError as e:
                row.update({"error": str(e)})
                row_ok = False
        else:
            row_ok = row["identity"]
        row["ok"] = row_ok
        ok = ok and row_ok
        rows.append(row)
    _emit(jsonio.document("mf_report", {"p": args.p, "factorizations": rows, "ok": ok}))
    return PASS if ok else FAIL


def _need_p(args):
    if args.p is None:
        raise InputError("--p is required")
    return args.p


# ------------------------------------------------------------ filtrated K-theory

def _cert_json(cert):
    return {"layers": [{"position": list(l.position), "multiplicity": l.multiplicity,
                        "embedding": jsonio.matrix_out(l.embedding)} for l in cert.layers],
            "chain": [{c: [jsonio.vec_out(v) for v in vs] for c, vs in L.items() if vs} for L in cert.chain]}


def cmd_filtkk(args):
    from . import filtkk as fk
    n = args.n
    if n < 1:
        raise InputError("--n must be at least 1")
    if args.action in ("triangles", "images"):
        rows, ok = [], True
        for t in fk.triangles(n):
            r = fk.triangle_images(n, t.a, t.b, t.b2)
            rows.append({"triangle": [t.a, t.b, t.b2], "first": str(r.first_spec), "first_ok": r.first_ok,
                         "second": str(r.second_spec), "second_ok": r.second_ok})
            ok = ok and r.first_ok and r.second_ok
        _emit(jsonio.document("triangle_images", {"n": n, "triangles": rows, "ok": ok}))
        return PASS if ok else FAIL
    if args.action == "sufficient":
        r = fk.sufficient_family(n)
        payload = {"n": n, "ok": r.ok, "triangles": len(r.triangles),
                   "sequences": [{"a": s.a, "b": s.b, "exact": s.exact, "split": s.split} for s in r.sequences],
                   "witnesses": {f"{a},{b}": [[str(x) for x in step] for step in w] if w else None
                                 for (a, b), w in sorted(r.witnesses.items())}}
        _emit(jsonio.document("sufficient_family", payload))
        return PASS if r.ok else FAIL
    C = fk.fk_category(n)
    if args.module is None:
        raise InputError("a module file is required")
    M = jsonio.module_in(C, _read_json(args.module))
    from .modules import validate_module
    bad = validate_module(M)
    if bad:
        raise InputError(f"module is not a functor: {bad[0].kind} {bad[0].detail}")
    if args.action == "filtrate":
        cert = fk.filtration(M)
        fails = fk.check_filtration(cert)
        payload = _cert_json(cert)
        payload.update({"n": n, "total_rank": cert.total_rank(), "valid": not fails,
                        "failures": [f.kind for f in fails]})
        _emit(jsonio.document("filtration", payload))
        if fails:
            raise InternalInvariantViolation("filtration certificate failed re-validation")
        return PASS
    if args.action == "fexact":
        if args.triangle is None:
            raise InputError("--triangle a b b' is required")
        t = fk.TriangleInC(n, *args.triangle)
        ok, js = fk.f_exact_check(M, t)
        bad = [j.index for j in js if not j.exact]
        _emit(jsonio.document("f_exact", {"triangle": list(args.triangle), "exact": ok, "inexact_junctions": bad}))
        return PASS if ok else FAIL
    raise InputError(f"unknown action {args.action!r}")


# ------------------------------------------------------------ UCT

def _sweep_one(job):
    from . import uct
    seed, k, pi, xi, max_rank, bound = job
    rng = _instance_rng(seed, k)
    X = uct.random_complex(rng, pi, max_rank, bound)
    Y = uct.random_complex(rng, pi, max_rank, bound)
    r = uct.uct_sequence(X, Y, explicit_xi=xi)
    row = {"index": k, "exact": r.exact, "ext": str(r.ext_term.invariants()),
           "middle": str(r.middle_term.invariants()), "hom": str(r.hom_term.invariants())}
    if not r.exact:
        row["witness"] = {"X": X.to_json(), "Y": Y.to_json(), "report": r.to_json()}
    return row


def _complex(path):
    from .uct import PeriodicComplex
    return PeriodicComplex.from_json(_read_json(path))


def cmd_uct(args):
    from . import uct
    if args.action == "verify":
        if len(args.files) != 2:
            raise InputError("verify needs two complex files")
        X, Y = (_complex(p) for p in args.files)
        r = uct.uct_sequence(X, Y, explicit_xi=args.xi)
        _emit(jsonio.document("uct_report", r.to_json()))
        return PASS if r.exact else FAIL
    if args.action == "sweep":
        jobs = [(args.seed, k, args.pi, k < args.xi_count, args.max_rank, args.bound) for k in range(args.count)]
        rows = _pmap(_sweep_one, jobs)
        n_ok = sum(r["exact"] for r in rows)
        header = {"seed": str(args.seed), "count": args.count, "pi": args.pi, "max_rank": args.max_rank,
                  "bound": args.bound, "xi_count": min(args.xi_count, args.count)}
        payload = {"config": header, "exact": n_ok, "failures": [r for r in rows if not r["exact"]],
                   "ok": n_ok == len(rows)}
        if args.verbose:
            payload["instances"] = rows
        _emit(jsonio.document("uct_sweep", payload))
        return PASS if n_ok == len(rows) else FAIL
    if args.action == "yoneda":
        from .modules import validate_module
        from .zcat import pure_periodic_cat
        if args.files:
            X = _complex(args.files[0])
            C = pure_periodic_cat(args.N) if args.N else None
            M = uct.restricted_yoneda(X, C)
            _emit(jsonio.document("module", jsonio.module_out(M)))
            return PASS if not validate_module(M) else FAIL
        C = pure_periodic_cat(args.N or 12)
        bad = []
        for d in C.objects:
            M, F = uct.yoneda_comparison(C, d)
            for c in C.objects:
                if M.values[c].invariants() != C.hom_group(c, d).invariants():
                    bad.append({"source": c, "target": d})
            if not F.is_isomorphism():
                bad.append({"target": d, "kind": "Yoneda map not an isomorphism"})
        _emit(jsonio.document("hom_table", {"N": C.info.get("N", args.N or 12), "objects": len(C.objects),
                                            "mismatches": bad, "ok": not bad}))
        return PASS if not bad else FAIL
    if args.action == "dichotomy":
        if args.files:
            X = _complex(args.files[0])
            r = uct.dichotomy_probe(X, args.k)
            _emit(jsonio.document("dichotomy", r))
            return PASS if r["pdim_le"] else FAIL
        rows = []
        for k in range(args.count):
            X = uct.random_complex(_instance_rng(args.seed, k), 2, args.max_rank, args.bound, max_torsion=4)
            r = uct.dichotomy_probe(X, args.k)
            r["index"] = k
            rows.append(r)
        ok = all(r["pdim_le"] for r in rows)
        _emit(jsonio.document("dichotomy", {"seed": str(args.seed), "instances": rows, "ok": ok}))
        return PASS if ok else FAIL
    raise InputError(f"unknown action {args.action!r}")


# ------------------------------------------------------------ modules

def cmd_module(args):
    from . import modules as m
    C = _category(args)
    M = jsonio.module_in(C, _read_json(args.module))
    bad = m.validate_module(M)
    if bad:
        raise InputError(f"module is not a functor: {bad[0].kind} {bad[0].detail}")
    if args.action == "resolve":
        R = m.resolution(M, args.length)
        payload = {"ranks": R.ranks(), "frees": [list(f) for f in R.frees], "syzygy_ranks": R.syzygy_ranks()}
        _emit(jsonio.document("resolution", payload))
        return PASS
    if args.action == "pdim":
        verdict = m.pdim_le(M, args.k)
        _emit(jsonio.document("pdim", {"k": args.k, "pdim_le": verdict}))
        return PASS if verdict else FAIL
    if args.other is None:
        raise InputError("--other module file is required")
    N = jsonio.module_in(C, _read_json(args.other))
    if args.action == "hom":
        G = m.hom_module(M, N)
    else:
        G = m.ext_module(M, N, args.i)
    _emit(jsonio.document(args.action, {"group": jsonio.group_out(G)}))
    return PASS


# ------------------------------------------------------------ parser

def build_parser():
    p = _Parser(prog="uctkit", description="Exact homological algebra checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("category")
    c.add_argument("action", choices=["build", "validate", "emit"])
    _category_args(c)
    c.set_defaults(func=cmd_category)

    s = sub.add_parser("serre")
    s.add_argument("action", choices=["check"])
    _category_args(s)
    s.add_argument("--serre", default="builtin")
    s.set_defaults(func=cmd_serre)

    b = sub.add_parser("boundary")
    b.add_argument("action", choices=["check"])
    _category_args(b)
    b.add_argument("--certs", default="builtin")
    b.set_defaults(func=cmd_boundary)

    f = sub.add_parser("mf")
    f.add_argument("action", choices=["verify", "build"])
    f.add_argument("--p", type=int)
    f.add_argument("file", nargs="?")
    f.set_defaults(func=cmd_mf)

    k = sub.add_parser("filtkk")
    k.add_argument("action", choices=["triangles", "images", "filtrate", "sufficient", "fexact"])
    k.add_argument("--n", type=int, required=True)
    k.add_argument("--triangle", type=int, nargs=3)
    k.add_argument("module", nargs="?")
    k.set_defaults(func=cmd_filtkk)

    u = sub.add_parser("uct")
    u.add_argument("action", choices=["verify", "sweep", "yoneda", "dichotomy"])
    u.add_argument("files", nargs="*")
    u.add_argument("--pi", type=int, default=2)
    u.add_argument("--count", type=int, default=20)
    u.add_argument("--seed", type=int, default=0)
    u.add_argument("--xi", action="store_true")
    u.add_argument("--xi-count", type=int, default=0)
    u.add_argument("--max-rank", type=int, default=4)
    u.add_argument("--bound", type=int, default=6)
    u.add_argument("--N", type=int)
    u.add_argument("--k", type=int, default=1)
    u.add_argument("--verbose", action="store_true")
    u.set_defaults(func=cmd_uct)

    m = sub.add_parser("module")
    m.add_argument("action", choices=["resolve", "ext", "pdim", "hom"])
    _category_args(m)
    m.add_argument("module")
    m.add_argument("--other")
    m.add_argument("--i", type=int, default=1)
    m.add_argument("--k", type=int, default=1)
    m.add_argument("--length", type=int, default=3)
    m.set_defaults(func=cmd_module)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", None) is not None and args.seed < 0:
        args.seed = args.seed % 2 ** 64
    try:
        return args.func(args)
    except InternalInvariantViolation as e:
        _emit(jsonio.document("error", {"error": "internal", "message": str(e)}))
        return INTERNAL
    except InputError as e:
        _emit(jsonio.document("error", {"error": "input", "message": str(e)}))
        return BAD_INPUT
    except UctkitError as e:
        # precondition failures on user input (torsion where freeness is needed, etc.)
        _emit(jsonio.document("error", {"error": "input", "error_class": type(e).__name__, "message": str(e)}))
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
