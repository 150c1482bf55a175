"""Structural parameters of queries (contract, dominating star size, linked
matching number) and the advisory five-regime classifier.
"""

from itertools import combinations

from .model import gaifman_adjacency, graph
from . import decomposition as dec
from . import homs

LMN_CAP = 16

REGIME_P = "P"
REGIME_W1 = "W[1]-eq."
REGIME_SHARP_W1 = "#W[1]-eq."
REGIME_SHARP_W2 = "#W[2]-hard"
REGIME_SHARP_A2 = "#A[2]-eq."


class ParameterReport:
    def __init__(self, tw, tw_contract, dss, lmn, components, exact, notes):
        self.tw = tw
        self.tw_contract = tw_contract
        self.dss = dss
        self.lmn = lmn
        self.components = components
        self.exact = exact
        self.notes = notes

    def __repr__(self):
        return ("ParameterReport(tw=%r, tw_contract=%r, dss=%r, lmn=%r)"
                % (self.tw, self.tw_contract, self.dss, self.lmn))


def contract_graph(q):
    """Graph on the free vertices: u,v adjacent when they share a Gaifman edge
    or some quantified component is adjacent to both.  Vertices are renumbered
    by position in q.free."""
    adj = gaifman_adjacency(q.structure)
    index = {v: i for i, v in enumerate(q.free)}
    edges = set()
    for u in q.free:
        for v in adj[u]:
            if v in index and index[u] < index[v]:
                edges.add((index[u], index[v]))
    for component in dec.quantified_components(q):
        boundary = dec.component_boundary(q, component)
        for a, b in combinations(boundary, 2):
            edges.add(tuple(sorted((index[a], index[b]))))
    return graph(len(q.free), sorted(edges))


def dominating_star_size(q):
    """Largest number of free neighbors of a single quantified component."""
    best = 0
    for component in dec.quantified_components(q):
        best = max(best, len(dec.component_boundary(q, component)))
    return best


def _max_vertex_disjoint_paths(adj, vertices, sources, sinks):
    """Menger via unit-capacity max flow on the node-split digraph."""
    # node v splits into ("in", v) -> ("out", v); edges go out -> in
    cap = {}

    def add(a, b):
        cap[(a, b)] = cap.get((a, b), 0) + 1
        cap.setdefault((b, a), 0)

    for v in vertices:
        add(("in", v), ("out", v))
    for v in vertices:
        for w in adj.get(v, ()):
            if w in vertices:
                add(("out", v), ("in", w))
    source, sink = ("s", None), ("t", None)
    for v in sources:
        add(source, ("in", v))
    for v in sinks:
        add(("out", v), sink)

    succ = {}
    for (a, b) in cap:
        succ.setdefault(a, []).append(b)
    flow = 0
    while True:
        # BFS for an augmenting path
        prev = {source: None}
        queue = [source]
        while queue and sink not in prev:
            a = queue.pop(0)
            for b in succ.get(a, ()):
                if b not in prev and cap.get((a, b), 0) > 0:
                    prev[b] = a
                    queue.append(b)
        if sink not in prev:
            return flow
        b = sink
        while prev[b] is not None:
            a = prev[b]
            cap[(a, b)] -= 1
            cap[(b, a)] += 1
            b = a
        flow += 1


def is_node_well_linked(g, s):
    """True when every two disjoint equal-size subsets of s are joined by that
    many fully vertex-disjoint paths."""
    s = sorted(set(s))
    if len(s) <= 1:
        return True
    adj = gaifman_adjacency(g)
    vertices = set(g.vertices())
    for size in range(1, len(s) // 2 + 1):
        for a in combinations(s, size):
            rest = [v for v in s if v not in a]
            for b in combinations(rest, size):
                if b < a:
                    continue  # flow is symmetric in A and B
                if _max_vertex_disjoint_paths(adj, vertices, a, b) < size:
                    return False
    return True


def _bipartite_matching_saturates(left, right, adj):
    """True when a matching between left and right saturates all of right."""
    match = {}

    def augment(r, seen):
        for l in adj.get(r, ()):
            if l in seen:
                continue
            seen.add(l)
            if l not in match or augment(match[l], seen):
                match[l] = r
                return True
        return False

    for r in right:
        if not augment(r, set()):
            return False
    return True


def linked_matching_number(q, cap=LMN_CAP):
    """Largest X-to-Y matching whose quantified endpoints are node-well-linked
    within the quantified part of the Gaifman graph."""
    y = sorted(q.quantified())
    x = set(q.free)
    if not y or not x:
        return 0
    if len(y) > cap:
        raise ValueError("quantified part has %d vertices, cap is %d"
                         % (len(y), cap))
    adj = gaifman_adjacency(q.structure)
    from .model import induced_substructure
    hy, old_to_new = induced_substructure(q.structure, y)
    x_nbrs = {v: sorted(adj[v] & x) for v in y}
    for size in range(min(len(x), len(y)), 0, -1):
        for s in combinations(y, size):
            if not _bipartite_matching_saturates(x, s, x_nbrs):
                continue
            if is_node_well_linked(hy, [old_to_new[v] for v in s]):
                return size
    return 0


def analyze(q, tw_limit=dec.EXACT_TREEWIDTH_LIMIT, lmn_cap=LMN_CAP,
            check_minimal=True):
    """Compute every structural parameter of one query."""
    exact = {"tw": True, "tw_contract": True, "lmn": True}
    notes = []
    from .model import gaifman_graph
    gg = gaifman_graph(q.structure)
    try:
        tw, _ = dec.exact_treewidth(gg, limit=tw_limit)
    except dec.TreewidthLimitError:
        adj = gaifman_adjacency(gg)
        _, td = dec.decompose_graph((adj, list(gg.vertices())), exact=False)
        tw = td.width
        exact["tw"] = False
        notes.append("treewidth is a heuristic upper bound (instance above the "
                     "exact limit)")
    cg = contract_graph(q)
    try:
        twc, _ = dec.exact_treewidth(cg, limit=tw_limit)
    except dec.TreewidthLimitError:
        adj = gaifman_adjacency(cg)
        _, td = dec.decompose_graph((adj, list(cg.vertices())), exact=False)
        twc = td.width
        exact["tw_contract"] = False
        notes.append("contract treewidth is a heuristic upper bound")
    dss = dominating_star_size(q)
    try:
        lmn = linked_matching_number(q, cap=lmn_cap)
    except ValueError:
        lmn = None
        exact["lmn"] = False
        notes.append("linked matching number not computed (quantified part "
                     "above the enumeration cap)")
    components = []
    for component in dec.quantified_components(q):
        components.append((tuple(component),
                           tuple(dec.component_boundary(q, component))))
    if dss >= 3:
        notes.append("no O(n^{%d-eps}) algorithm under SETH (class-level "
                     "evidence; dss >= 3)" % dss)
    if check_minimal and q.is_plain() and q.structure.n <= 8:
        core = homs.augmented_core(q)
        if core.structure.n < q.structure.n:
            notes.append("query is not minimal; minimize first, parameters "
                         "refer to the query as written")
    return ParameterReport(tw, twc, dss, lmn, components, exact, notes)


def _trend(values):
    values = [v for v in values if v is not None]
    if not values:
        return "unknown"
    return "growing" if max(values) > min(values) else "bounded"


def classify(queries, **kw):
    """Advisory classification.  For a single query: its ParameterReport.  For
    a list, boundedness trends and the matching complexity regime, reported as
    class-level evidence only."""
    if not isinstance(queries, (list, tuple)):
        return analyze(queries, **kw)
    reports = [analyze(q, **kw) for q in queries]
    trends = {
        "tw": _trend([r.tw for r in reports]),
        "tw_contract": _trend([r.tw_contract for r in reports]),
        "dss": _trend([r.dss for r in reports]),
        "lmn": _trend([r.lmn for r in reports]),
    }
    notes = ["regime label is class-level evidence from the sampled queries, "
             "not a proof about the class"]
    if trends["lmn"] == "growing":
        regime = REGIME_SHARP_A2
    elif trends["dss"] == "growing":
        regime = REGIME_SHARP_W2
        notes.append("#W[2]-hard; #A[2] status open (dss unbounded, lmn bounded)")
    elif trends["tw_contract"] == "growing":
        regime = REGIME_SHARP_W1
    elif trends["tw"] == "growing":
        regime = REGIME_W1
    else:
        regime = REGIME_P
    return {"reports": reports, "trends": trends, "regime": regime,
            "notes": notes}
