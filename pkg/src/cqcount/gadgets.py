"""Executable reductions: query minors and their instance gadgets, the
colored/uncolored bridges, the dominating-set pipeline, named query families,
the matching-to-grate gadget and the Gaifman clique expansion.
"""

from fractions import Fraction
from itertools import combinations, product
from math import comb

from .model import (GRAPH_SIGNATURE, Coloring, Query, Signature, Structure,
                    clone_vertices, gaifman_graph, graph, graph_edges)
from . import homs


class GadgetOutput:
    """A transformed instance together with the exact count relation it
    preserves (verified by brute force in the tests)."""

    def __init__(self, structure, coloring, relation, zero=False):
        self.structure = structure
        self.coloring = coloring
        self.relation = relation
        self.zero = zero

    def __repr__(self):
        return "GadgetOutput(%r, zero=%r)" % (self.relation, self.zero)


# ---------------------------------------------------------------------------
# named query families

def family_query(kind, k):
    if k < 1:
        raise ValueError("k must be positive")
    if kind == "psi":
        # k free leaves attached to one quantified center
        return Query(graph(k + 1, [(i, k) for i in range(k)]), tuple(range(k)))
    if kind == "gamma":
        # free x_i matched to y_i, the y's forming a clique
        edges = [(i, k + i) for i in range(k)]
        edges += [(k + i, k + j) for i in range(k) for j in range(i + 1, k)]
        return Query(graph(2 * k, edges), tuple(range(k)))
    if kind == "omega":
        pos = omega_positions(k)
        edges = []
        for (i, j), v in pos["grid"].items():
            if i + j == k - 1:
                edges.append((pos["free"][(i, j)], v))
            if (i, j + 1) in pos["grid"]:
                edges.append((v, pos["grid"][(i, j + 1)]))
            if (i + 1, j) in pos["grid"]:
                edges.append((v, pos["grid"][(i + 1, j)]))
        n = k + len(pos["grid"])
        return Query(graph(n, edges), tuple(range(k)))
    if kind == "poly":
        # chain x_1 y_1 x_2 y_2 ... x_k
        edges = []
        for i in range(k - 1):
            edges.append((i, k + i))
            edges.append((k + i, i + 1))
        return Query(graph(2 * k - 1, edges), tuple(range(k)))
    if kind == "w1":
        # Boolean clique query, everything quantified
        edges = [(i, j) for i in range(k) for j in range(i + 1, k)]
        return Query(graph(k, edges), ())
    if kind == "subdivided":
        # free clique vertices, every pair joined through its own midpoint
        pairs = list(combinations(range(k), 2))
        edges = []
        for m, (i, j) in enumerate(pairs):
            edges.append((i, k + m))
            edges.append((j, k + m))
        return Query(graph(k + len(pairs), edges), tuple(range(k)))
    raise ValueError("unknown family kind %r" % kind)


def omega_positions(k):
    """Vertex layout of the grate: free vertices 0..k-1 sit on the diagonal
    positions (i, k-1-i); quantified grid positions (i, j) with i+j <= k-1
    take the subsequent indices in sorted order."""
    free = {(i, k - 1 - i): i for i in range(k)}
    grid = {}
    nxt = k
    for i in range(k):
        for j in range(k - i):
            grid[(i, j)] = nxt
            nxt += 1
    return {"free": free, "grid": grid}


# ---------------------------------------------------------------------------
# query minors

def _graphlike(s):
    if s.signature.symbols != GRAPH_SIGNATURE:
        return False
    rel = s.relations["E"]
    return all(u != v and (v, u) in rel for (u, v) in rel)


def apply_query_minor(q, op):
    """Apply one minor operation (delete-vertex v, delete-edge (u,v),
    contract-edge (u,v)) to a graph-mode query."""
    minor, _ = query_minor_with_map(q, op)
    return minor


def query_minor_with_map(q, op):
    """As apply_query_minor, also returning the old-to-new vertex map
    (contracted pairs map to the merged vertex)."""
    if not _graphlike(q.structure):
        raise ValueError("minor operations need a graph-mode query")
    kind, arg = op
    s = q.structure
    edges = set(graph_edges(s))
    fset = set(q.free)
    if kind == "delete-vertex":
        v = arg
        if any(v in e for e in edges):
            raise ValueError("vertex %d is not isolated" % v)
        order = [u for u in s.vertices() if u != v]
        new = {u: i for i, u in enumerate(order)}
        g2 = graph(len(order), [(new[a], new[b]) for a, b in edges])
        free = tuple(new[x] for x in q.free if x != v)
        return Query(g2, free), new
    if kind == "delete-edge":
        e = tuple(sorted(arg))
        if e not in edges:
            raise ValueError("edge %r not present" % (e,))
        g2 = graph(s.n, sorted(edges - {e}))
        ident = {u: u for u in s.vertices()}
        return Query(g2, q.free), ident
    if kind == "contract-edge":
        u, v = sorted(arg)
        if (u, v) not in edges:
            raise ValueError("edge %r not present" % (arg,))
        order = [w for w in s.vertices() if w != v]
        new = {w: i for i, w in enumerate(order)}
        new[v] = new[u]
        merged = set()
        for a, b in edges:
            a2, b2 = new[a], new[b]
            if a2 != b2:
                merged.add(tuple(sorted((a2, b2))))
        g2 = graph(s.n - 1, sorted(merged))
        if u in fset or v in fset:
            # keep the original free order with the merged vertex in place
            free = []
            placed = False
            for x in q.free:
                if x in (u, v):
                    if not placed:
                        free.append(new[u])
                        placed = True
                else:
                    free.append(new[x])
            free = tuple(free)
        else:
            free = tuple(new[x] for x in q.free)
        return Query(g2, free), new
    raise ValueError("unknown minor operation %r" % (kind,))


def minor_instance_gadget(q, op, t, c):
    """Given an instance colored by the minor of q, produce an instance colored
    by q itself with the same color-prescribed answer count."""
    minor, vmap = query_minor_with_map(q, op)
    Coloring(c.colors, t, minor.structure)  # validate against the minor
    inverse = {}
    for old, new in vmap.items():
        inverse.setdefault(new, []).append(old)
    kind, arg = op
    edges = set(graph_edges(t))
    if kind == "delete-edge":
        u, v = sorted(arg)
        class_u = [x for x in t.vertices() if inverse[c[x]] == [u]]
        class_v = [x for x in t.vertices() if inverse[c[x]] == [v]]
        extra = set(tuple(sorted((a, b))) for a in class_u for b in class_v)
        g2 = graph(t.n, sorted(edges | extra))
        colors = [inverse[c[x]][0] for x in t.vertices()]
        out = GadgetOutput(g2, Coloring(colors, g2, q.structure),
                           "count_cp_answers equal")
        return out
    if kind == "delete-vertex":
        v = arg
        g2 = graph(t.n + 1, sorted(edges))
        colors = [inverse[c[x]][0] for x in t.vertices()] + [v]
        return GadgetOutput(g2, Coloring(colors, g2, q.structure),
                            "count_cp_answers equal")
    if kind == "contract-edge":
        u, v = sorted(arg)
        w = vmap[u]
        qedges = set(graph_edges(q.structure))

        def q_adjacent(a, b):
            return tuple(sorted((a, b))) in qedges

        colors = []
        split_mate = {}
        for x in t.vertices():
            pre = inverse[c[x]]
            if len(pre) == 2:
                colors.append(u)
                split_mate[x] = None  # second copy appended later
            else:
                colors.append(pre[0])
        new_edges = []
        for x in list(split_mate):
            mate = len(colors)
            split_mate[x] = mate
            colors.append(v)
            new_edges.append((x, mate))
        for a, b in edges:
            # rebuild each original edge, routing ends through the copies
            ends_a = [a] + ([split_mate[a]] if a in split_mate else [])
            ends_b = [b] + ([split_mate[b]] if b in split_mate else [])
            for ea in ends_a:
                for eb in ends_b:
                    if q_adjacent(colors[ea], colors[eb]):
                        new_edges.append(tuple(sorted((ea, eb))))
        g2 = graph(len(colors), sorted(set(new_edges)))
        return GadgetOutput(g2, Coloring(colors, g2, q.structure),
                            "count_cp_answers equal")
    raise ValueError("unknown minor operation %r" % (kind,))


# ---------------------------------------------------------------------------
# colored / uncolored bridges

def uncolored_to_cp_gadget(q, t):
    """Layered instance on which the color-prescribed count of q equals the
    uncolored answer count of q on t."""
    if not _graphlike(q.structure):
        raise ValueError("graph-mode queries only")
    if not _graphlike(t):
        raise ValueError("graph-mode targets only")
    m = q.structure.n
    n = t.n

    def vid(u, a):
        return u * n + a

    edges = set()
    for (u, v) in graph_edges(q.structure):
        for (a, b) in graph_edges(t):
            edges.add(tuple(sorted((vid(u, a), vid(v, b)))))
            edges.add(tuple(sorted((vid(u, b), vid(v, a)))))
    g2 = graph(m * n, sorted(edges))
    colors = [u for u in range(m) for _ in range(n)]
    return GadgetOutput(g2, Coloring(colors, g2, q.structure),
                        "count_answers(q,t) = count_cp_answers(q,gadget)")


def _vandermonde_inverse(nodes):
    """Inverse of the Vandermonde matrix V[i][j] = nodes[i]**j, in rationals."""
    d = len(nodes)
    mat = [[Fraction(nodes[i]) ** j for j in range(d)] for i in range(d)]
    inv = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    for col in range(d):
        pivot = next(r for r in range(col, d) if mat[r][col] != 0)
        mat[col], mat[pivot] = mat[pivot], mat[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        f = mat[col][col]
        mat[col] = [x / f for x in mat[col]]
        inv[col] = [x / f for x in inv[col]]
        for r in range(d):
            if r != col and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[col])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return inv


def cf_count_via_uncolored(q, t, c, counter=None):
    """Colorful answer count through cloning and exact interpolation, using an
    uncolored counter only.  q must be minimal."""
    if counter is None:
        counter = homs.count_answers
    core = homs.augmented_core(q)
    if core.structure.n != q.structure.n:
        raise ValueError("query is not minimal")
    Coloring(c.colors, t, q.structure)
    k = q.structure.n
    ell = len(q.free)
    if ell == 0:
        return 1 if counter(q, t) else 0
    nodes = list(range(1, ell + 2))
    inv = _vandermonde_inverse(nodes)
    want = [1 if v in set(q.free) else 0 for v in range(k)]
    total = Fraction(0)
    for grid in product(range(len(nodes)), repeat=k):
        z = {v: nodes[grid[v]] for v in range(k)}
        cloned, _ = clone_vertices(t, c, z)
        value = counter(q, cloned)
        weight = Fraction(1)
        for v in range(k):
            weight *= inv[want[v]][grid[v]]
        total += weight * value
    if total.denominator != 1:
        raise AssertionError("interpolation did not land on an integer")
    return int(total)


def cp_count_via_uncolored(q, t, c, counter=None):
    cf = cf_count_via_uncolored(q, t, c, counter=counter)
    aut = homs.count_partial_automorphisms(q)
    if cf % aut:
        raise AssertionError("colorful count not divisible by #Aut")
    return cf // aut


# ---------------------------------------------------------------------------
# dominating sets via the star query

def count_surjections(i, j):
    if i < 0 or j < 0:
        raise ValueError("arguments must be nonnegative")
    return sum((-1) ** s * comb(j, s) * (j - s) ** i for s in range(j + 1))


def _is_complete(g):
    n = g.n
    return len(set(graph_edges(g))) == n * (n - 1) // 2


def _dominates(g, image):
    adj = {v: set() for v in g.vertices()}
    for (a, b) in graph_edges(g):
        adj[a].add(b)
        adj[b].add(a)
    s = set(image)
    return all(v in s or adj[v] & s for v in g.vertices())


def _brute_dominating_sets(g, ell):
    return sum(1 for s in combinations(range(g.n), ell) if _dominates(g, s))


def star_instance(g, k):
    """The layered instance whose psi_k color-prescribed count complements the
    dominating-tuple count: layer 0 carries the center color, layers 1..k the
    leaves, with an edge exactly between copies of distinct non-adjacent
    primal vertices."""
    n = g.n
    adjacent = set(graph_edges(g))

    def vid(layer, v):
        return layer * n + v

    edges = []
    for i in range(1, k + 1):
        for u in range(n):
            for v in range(n):
                if u != v and tuple(sorted((u, v))) not in adjacent:
                    edges.append(tuple(sorted((vid(0, u), vid(i, v)))))
    g2 = graph((k + 1) * n, sorted(set(edges)))
    psi = family_query("psi", k)
    colors = [k] * n + [i for i in range(k) for _ in range(n)]
    return g2, Coloring(colors, g2, psi.structure)


def domset_via_star_oracle(g, k, oracle=None):
    """Counts of dominating sets D_1..D_k of g, using only an oracle for the
    color-prescribed star count."""
    if not _graphlike(g):
        raise ValueError("graph-mode input only")
    if oracle is None:
        psi = family_query("psi", k)
        oracle = lambda s, c: homs.count_cp_answers(psi, s, c)
    if _is_complete(g):
        # the layered construction needs a non-edge; fall back to enumeration
        return [_brute_dominating_sets(g, ell) for ell in range(1, k + 1)]

    def padded(j):
        return graph(g.n + j, graph_edges(g))

    def dom_tuples_k(target):
        inst, coloring = star_instance(target, k)
        return target.n ** k - oracle(inst, coloring)

    dom = {0: 1 if g.n == 0 else 0, k: dom_tuples_k(g)}
    for j in range(k - 1, 0, -1):
        value = dom_tuples_k(padded(j))
        acc = value
        for i in range(j + 1, k + 1):
            acc -= comb(k, i) * count_surjections(i, j) * dom[k - i]
        coeff = comb(k, j) * count_surjections(j, j)
        if acc % coeff:
            raise AssertionError("padding system is not integral")
        dom[k - j] = acc // coeff
    counts = []
    d = {}
    for ell in range(1, k + 1):
        acc = dom[ell]
        for i in range(1, ell):
            acc -= d[i] * count_surjections(ell, i)
        s = count_surjections(ell, ell)
        if acc % s:
            raise AssertionError("dominating-set recursion is not integral")
        d[ell] = acc // s
        counts.append(d[ell])
    return counts


# ---------------------------------------------------------------------------
# matching-to-grate gadget

def gamma_to_grate_gadget(k, t, c):
    """Rebuild a gamma_k-colored instance as an omega_k-colored one with the
    same color-prescribed answer count."""
    gamma = family_query("gamma", k)
    Coloring(c.colors, t, gamma.structure)
    omega = family_query("omega", k)
    pos = omega_positions(k)
    edges_t = set(graph_edges(t))

    vertices = []      # (omega_color, payload) payload=(orig,) or (u, u2)
    index = {}

    def add(color, payload):
        key = (color, payload)
        if key not in index:
            index[key] = len(vertices)
            vertices.append(key)
        return index[key]

    # free classes carry over; free x_m sits at diagonal position (m, k-1-m)
    for x in t.vertices():
        if c[x] < k:
            add(c[x], (x,))
    # diagonal vertices (u,u) for u in the matching class of the position
    for (i, j), _ in pos["grid"].items():
        if i + j == k - 1:
            color = pos["grid"][(i, j)]
            for u in t.vertices():
                if c[u] == k + i:
                    add(color, (u, u))
        else:
            color = pos["grid"][(i, j)]
            for (a, b) in edges_t:
                if c[a] >= k and c[b] >= k:
                    add(color, (a, b))
                    add(color, (b, a))

    edges = set()
    # pendant edges: an original x-y edge joins x to the diagonal copy (u,u)
    for (a, b) in edges_t:
        for x, u in ((a, b), (b, a)):
            if c[x] < k and c[u] >= k:
                i = c[u] - k
                xcol = c[x]
                if (xcol, (x,)) in index and \
                        (pos["grid"][(i, k - 1 - i)], (u, u)) in index:
                    edges.add(tuple(sorted((
                        index[(xcol, (x,))],
                        index[(pos["grid"][(i, k - 1 - i)], (u, u))]))))
    # grid edges: first coordinates agree vertically, second horizontally
    for (i, j), col in pos["grid"].items():
        for (i2, j2), col2 in (((i, j + 1), None), ((i + 1, j), None)):
            if (i2, j2) not in pos["grid"]:
                continue
            col2 = pos["grid"][(i2, j2)]
            for (color_a, pa) in list(index):
                if color_a != col or len(pa) != 2:
                    continue
                for (color_b, pb) in list(index):
                    if color_b != col2 or len(pb) != 2:
                        continue
                    if i2 == i and pa[0] == pb[0]:
                        edges.add(tuple(sorted((index[(color_a, pa)],
                                                index[(color_b, pb)]))))
                    if i2 == i + 1 and pa[1] == pb[1]:
                        edges.add(tuple(sorted((index[(color_a, pa)],
                                                index[(color_b, pb)]))))
    g2 = graph(len(vertices), sorted(edges))
    colors = [color for color, _ in vertices]
    return GadgetOutput(g2, Coloring(colors, g2, omega.structure),
                        "count_cp_answers(gamma_k,t) = count_cp_answers(omega_k,gadget)")


# ---------------------------------------------------------------------------
# Gaifman clique expansion

def gaifman_expand_gadget(q, t, c):
    """Instantiate each hyperedge pattern of q by the color-consistent cliques
    of the Gaifman-colored graph t."""
    gaif = gaifman_graph(q.structure)
    Coloring(c.colors, t, gaif)
    edges_t = set(graph_edges(t))
    classes = {}
    for v in t.vertices():
        classes.setdefault(c[v], []).append(v)

    rels = {}
    for name, arity in q.structure.signature.symbols:
        rels[name] = set()
        for tup in q.structure.relations[name]:
            distinct = list(dict.fromkeys(tup))
            found = False
            for combo in product(*(classes.get(d, []) for d in distinct)):
                ok = True
                for a, b in combinations(combo, 2):
                    if tuple(sorted((a, b))) not in edges_t:
                        ok = False
                        break
                if ok:
                    found = True
                    assign = dict(zip(distinct, combo))
                    rels[name].add(tuple(assign[v] for v in tup))
            if not found:
                return GadgetOutput(None, None,
                                    "no clique realizes %s%r" % (name, tup),
                                    zero=True)
    g2 = Structure(q.structure.signature, t.n, rels)
    return GadgetOutput(g2, Coloring(c.colors, g2, q.structure),
                        "count_cp_answers(gaifman(q),t) = count_cp_answers(q,gadget)")
