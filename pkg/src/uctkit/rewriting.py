"""Bounded path rewriting for Z-linear categories given by quivers with relations.

A path is a tuple of arrow names in travel order (first arrow first), so the
path ``(f, g)`` is the composite ``g ∘ f``.  Paths are ordered by total arrow
weight, then lexicographically by arrow names; every relation is turned into a
rule ``leading path -> rest`` and overlaps are resolved up to a weight cap.
Leading coefficients must be ±1: a non-monic leading term would make some Hom
group non-free, which this engine refuses.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InconsistentRelations, InputError, RankNotStabilized


@dataclass
class Presentation:
    vertices: list
    arrows: dict            # name -> (source, target)
    relations: list         # dict path -> coeff, or (dict, source vertex)
    weights: dict = field(default_factory=dict)

    def weight(self, word):
        w = self.weights
        return sum(w.get(a, 1) for a in word)

    def source_of(self, word, vertex=None):
        return self.arrows[word[0]][0] if word else vertex

    def target_of(self, word, vertex=None):
        return self.arrows[word[-1]][1] if word else vertex

    def check(self):
        for a, (s, t) in self.arrows.items():
            if s not in self.vertices or t not in self.vertices:
                raise InputError(f"arrow {a} has an unknown endpoint")
        out = []
        for r in self.relations:
            poly, v = (r if isinstance(r, tuple) else (r, None))
            ends = set()
            for w in poly:
                for x, y in zip(w, w[1:]):
                    if self.arrows[x][1] != self.arrows[y][0]:
                        raise InputError(f"path {w} is not composable")
                if not w and v is None:
                    raise InputError("a relation with an empty path needs its vertex")
                ends.add((self.source_of(w, v), self.target_of(w, v)))
            if len(ends) > 1:
                raise InputError(f"paths of a relation do not share endpoints: {sorted(ends)}")
            if ends:
                s, t = ends.pop()
                out.append((dict(poly), s, t))
        return out


class _Rules:
    def __init__(self, P: Presentation):
        self.P = P
        self.rules = []          # (lead word, vertex, tail dict)
        self.by_first = {}

    def key(self, w):
        return (self.P.weight(w), w)

    def add(self, lead, tail):
        self.rules.append((lead, tail))
        self.by_first.setdefault(lead[0], []).append(len(self.rules) - 1)

    def find(self, w, alive):
        for pos, a in enumerate(w):
            for idx in self.by_first.get(a, ()):
                if not alive[idx]:
                    continue
                lead = self.rules[idx][0]
                if w[pos:pos + len(lead)] == lead:
                    return idx, pos
        return None

    def reduce(self, poly, alive):
        work = {w: c for w, c in poly.items() if c}
        out = {}
        while work:
            w = max(work, key=self.key)
            c = work.pop(w)
            hit = self.find(w, alive) if w else None
            if hit is None:
                out[w] = c
                continue
            idx, pos = hit
            lead, tail = self.rules[idx]
            pre, post = w[:pos], w[pos + len(lead):]
            for t, tc in tail.items():
                nw = pre + t + post
                v = work.get(nw, 0) + c * tc
                if v:
                    work[nw] = v
                else:
                    work.pop(nw, None)
        return out


def _normalize(rules, poly, vertex_pair, strict):
    if not poly:
        return None
    lead = max(poly, key=rules.key)
    lc = poly[lead]
    if lead == () and lc in (1, -1):
        raise InconsistentRelations(f"relations kill the identity of {vertex_pair[0]}")
    if lc not in (1, -1) or lead == ():
        if strict:
            raise InconsistentRelations(
                f"leading coefficient {lc} on {lead}: the Hom group {vertex_pair} would have torsion")
        return "defer"
    tail = {w: -c * lc for w, c in poly.items() if w != lead}
    return lead, tail


def compile_presentation(P: Presentation, rank_bounds, degree_cap=None, name="compiled"):
    """Compile a quiver with relations into a ZCategory.

    ``rank_bounds[(c, d)]`` is the expected rank of Hom(c, d) (missing = 0).
    The basis of each Hom group is the set of irreducible paths, listed by
    length then lexicographically.
    """
    from .zcat import build_category
    rels = P.check()
    if degree_cap is None:
        degree_cap = 2 * max(P.weights.values(), default=1) * len(P.vertices)
    R = _Rules(P)
    alive = []
    ends = {}
    pending = []
    for poly, s, t in rels:
        pending.append((poly, (s, t)))
    done_overlaps = set()

    def endpoints(word):
        return (P.arrows[word[0]][0], P.arrows[word[-1]][1])

    deferred = []

    def insert(poly, pair, strict=False):
        red = R.reduce(poly, alive)
        nr = _normalize(R, red, pair, strict)
        if nr is None:
            return
        if nr == "defer":
            # a non-monic relation may become a consequence of monic ones later
            deferred.append((red, pair))
            return
        lead, tail = nr
        # retire rules whose lead contains the new lead, re-queue them
        for idx, (l2, t2) in enumerate(R.rules):
            if alive[idx] and any(l2[k:k + len(lead)] == lead for k in range(len(l2) - len(lead) + 1)):
                alive[idx] = False
                back = dict(t2)
                back[l2] = back.get(l2, 0) - 1
                pending.append(({w: -c for w, c in back.items()}, endpoints(l2)))
        R.add(lead, tail)
        alive.append(True)

    def overlaps():
        out = []
        live = [i for i, a in enumerate(alive) if a]
        for i in live:
            u = R.rules[i][0]
            for j in live:
                v = R.rules[j][0]
                for k in range(1, min(len(u), len(v))):
                    if u[len(u) - k:] == v[:k] and (i, j, k) not in done_overlaps:
                        word = u + v[k:]
                        out.append((P.weight(word), word, i, j, k))
        out.sort()
        return out

    truncated = False
    while True:
        while pending:
            poly, pair = pending.pop(0)
            insert(poly, pair)
        ov = overlaps()
        if not ov:
            retry, deferred[:] = list(deferred), []
            for poly, pair in retry:
                red = R.reduce(poly, alive)
                if red:
                    pending.append((red, pair))
            if pending and len(retry) == len(pending) and all(
                    _normalize(R, R.reduce(q, alive), pr, False) == "defer" for q, pr in pending):
                poly, pair = pending[0]
                insert(poly, pair, strict=True)
            if pending:
                continue
            break
        wt, word, i, j, k = ov[0]
        if wt > degree_cap:
            truncated = True
            for poly, pair in deferred:
                insert(poly, pair, strict=True)
            break
        done_overlaps.add((i, j, k))
        if not (alive[i] and alive[j]):
            continue
        u, tu = R.rules[i]
        v, tv = R.rules[j]
        x, y = u[:len(u) - k], v[k:]
        s = {}
        for t, c in tu.items():
            s[t + y] = s.get(t + y, 0) + c
        for t, c in tv.items():
            s[x + t] = s.get(x + t, 0) - c
        pending.append(({w: c for w, c in s.items() if c}, endpoints(word)))

    # enumerate irreducible paths
    out_arrows = {v: sorted(a for a, (s, _) in P.arrows.items() if s == v) for v in P.vertices}
    leads = [R.rules[i][0] for i, a in enumerate(alive) if a]

    def irreducible_ext(w):
        return not any(w[len(w) - len(l):] == l for l in leads if len(l) <= len(w))

    words = {}
    max_weight = 0
    for v in P.vertices:
        frontier = [()]
        words.setdefault((v, v), []).append(())
        while frontier:
            nxt = []
            for w in frontier:
                end = P.target_of(w, v)
                for a in out_arrows[end]:
                    nw = w + (a,)
                    if not irreducible_ext(nw):
                        continue
                    wt = P.weight(nw)
                    if wt > degree_cap:
                        raise RankNotStabilized(
                            f"irreducible path {nw} exceeds the degree cap {degree_cap}")
                    max_weight = max(max_weight, wt)
                    words.setdefault((v, P.target_of(nw)), []).append(nw)
                    nxt.append(nw)
            frontier = nxt
    if truncated and 2 * max_weight > degree_cap:
        raise RankNotStabilized(f"overlaps above weight {degree_cap} unresolved while products reach "
                                f"weight {2 * max_weight}")
    for key in set(words) | set(rank_bounds):
        got = len(words.get(key, []))
        want = rank_bounds.get(key, 0)
        if got != want:
            raise RankNotStabilized(f"Hom{key}: rewriting gives rank {got}, expected {want}")

    for key in words:
        words[key] = sorted(words[key], key=lambda w: (len(w), w))
    index = {key: {w: i for i, w in enumerate(ws)} for key, ws in words.items()}

    def label(w, v):
        return "id_" + v if not w else "*".join(reversed(w))

    homs = {key: [label(w, key[0]) for w in ws] for key, ws in words.items()}

    def comp(c, d, e, i, j):
        f = words[(c, d)][j]
        g = words[(d, e)][i]
        nf = R.reduce({f + g: 1}, alive)
        vec = [0] * len(words[(c, e)])
        for w, coeff in nf.items():
            vec[index[(c, e)][w]] += coeff
        return vec

    def normal_form(word, vertex):
        key = (P.source_of(word, vertex), P.target_of(word, vertex))
        vec = [0] * len(words.get(key, []))
        for w, coeff in R.reduce({tuple(word): 1}, alive).items():
            vec[index[key][w]] += coeff
        return key, vec

    ident = {v: 0 for v in P.vertices}
    return build_category(name, list(P.vertices), homs, comp, ident,
                          info={"words": {k: list(v) for k, v in words.items()},
                                "rules": [(R.rules[i][0], R.rules[i][1]) for i, a in enumerate(alive) if a],
                                "degree_cap": degree_cap, "normal_form": normal_form})
