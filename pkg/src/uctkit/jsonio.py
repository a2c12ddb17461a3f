"""JSON conventions: integers travel as decimal strings, every document has a schema_version."""
from __future__ import annotations

import json

from .errors import InputError
from .lattice import FpAbGroup, IntMatrix

SCHEMA_VERSION = 1


def int_out(x):
    return str(int(x))


def int_in(x):
    if isinstance(x, bool):
        raise InputError("booleans are not integers")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x.strip())
        except ValueError:
            raise InputError(f"not an integer: {x!r}") from None
    raise InputError(f"not an integer: {x!r}")


def vec_out(v):
    return [int_out(x) for x in v]


def vec_in(v):
    if not isinstance(v, list):
        raise InputError("expected a list of integers")
    return [int_in(x) for x in v]


def matrix_out(M: IntMatrix):
    return {"rows": M.rows, "cols": M.cols, "entries": [vec_out(r) for r in M.tolist()]}


def matrix_in(obj):
    if isinstance(obj, list):
        rows = [vec_in(r) for r in obj]
        return IntMatrix.from_rows(rows)
    try:
        rows = [vec_in(r) for r in obj["entries"]]
        return IntMatrix.from_rows(rows, int(obj["cols"])) if rows else IntMatrix.zero(int(obj["rows"]),
                                                                                       int(obj["cols"]))
    except (KeyError, TypeError) as e:
        raise InputError(f"malformed matrix: {e}") from None


def group_out(G: FpAbGroup):
    f, t = G.invariants()
    return {"ngens": G.ngens, "relations": matrix_out(G.rels),
            "invariants": {"free_rank": f, "torsion": vec_out(t)}}


def group_in(obj):
    if "ngens" in obj:
        n = int(obj["ngens"])
        rels = matrix_in(obj.get("relations", {"rows": n, "cols": 0, "entries": []}))
        if rels.rows != n:
            if rels.rows == 0 and rels.cols == 0:
                rels = IntMatrix.zero(n, 0)
            else:
                raise InputError("relation matrix does not match ngens")
        return FpAbGroup(n, rels)
    inv = obj["invariants"]
    return FpAbGroup.from_invariants(int(inv["free_rank"]), vec_in(inv.get("torsion", [])))


def document(kind, payload):
    out = {"schema_version": SCHEMA_VERSION, "kind": kind}
    out.update(payload)
    return out


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True)


def loads(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON: {e}") from None
    if isinstance(obj, dict) and "schema_version" in obj and obj["schema_version"] != SCHEMA_VERSION:
        raise InputError(f"unsupported schema_version {obj['schema_version']}")
    return obj


def module_out(M):
    return {"category": M.C.name,
            "values": {c: group_out(G) for c, G in M.values.items() if G.ngens},
            "action": [{"source": c, "target": d, "index": k, "matrix": matrix_out(A)}
                       for (c, d, k), A in sorted(M.action.items())]}


def module_in(C, obj):
    """CModule over C from ``{"values": {label: group}, "action": [...]}``."""
    from .modules import CModule
    try:
        values = {}
        for c, g in obj.get("values", {}).items():
            C.check_object(c)
            values[c] = group_in(g)
        action = {}
        for item in obj.get("action", []):
            c, d, k = item["source"], item["target"], int(item["index"])
            C.check_object(c)
            C.check_object(d)
            if not 0 <= k < C.rank(c, d):
                raise InputError(f"no basis element {k} in Hom({c}, {d})")
            action[(c, d, k)] = matrix_in(item["matrix"])
    except (KeyError, TypeError, AttributeError) as e:
        raise InputError(f"malformed module: {e}") from None
    return CModule(C, values, action)
