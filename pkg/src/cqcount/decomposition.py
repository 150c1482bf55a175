"""Exact treewidth, nice tree decompositions, and the tree-decomposition based
counters: the all-free DP and the fast counter that splits off quantified
components and materializes their extendability relations.
"""

from itertools import product

from .model import (Query, Signature, Structure, gaifman_adjacency,
                    induced_substructure)

EXACT_TREEWIDTH_LIMIT = 20
DSS_CAP = 6


class TreewidthLimitError(ValueError):
    pass


class TreeDecomposition:
    """A nice rooted tree decomposition.

    Nodes are dicts with kind in {leaf, introduce, forget, join}, a sorted bag
    tuple, the introduced/forgotten vertex where applicable, and children.
    The root bag is empty.
    """

    def __init__(self, root, width, exact=True):
        self.root = root
        self.width = width
        self.exact = exact

    def bags(self):
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            out.append(node["bag"])
            stack.extend(node["children"])
        return out


def _adjacency(g):
    adj = gaifman_adjacency(g)
    return {v: set(adj[v]) for v in g.vertices()}


def _components(adj, vertices):
    seen = set()
    comps = []
    for v in sorted(vertices):
        if v in seen:
            continue
        comp = []
        stack = [v]
        seen.add(v)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if w in vertices and w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def _elimination_width(adj, vertices):
    """Exact treewidth by DP over subsets of an elimination prefix.

    Q(S, v) counts the vertices outside S + {v} adjacent to the component of v
    in the graph induced on S + {v}; eliminating v right after the prefix S
    creates a clique of that size.
    """
    vertices = sorted(vertices)
    n = len(vertices)
    if n == 0:
        return -1, []
    index = {v: i for i, v in enumerate(vertices)}

    def q_value(prefix, v):
        seen = {v}
        stack = [v]
        boundary = set()
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in index or w in seen:
                    continue
                if w in prefix:
                    seen.add(w)
                    stack.append(w)
                else:
                    boundary.add(w)
        boundary.discard(v)
        return len(boundary)

    from functools import lru_cache

    @lru_cache(maxsize=None)
    def best(prefix_key):
        prefix = set(prefix_key)
        if not prefix:
            return -1
        out = None
        for v in prefix_key:
            rest = prefix - {v}
            rest_key = tuple(sorted(rest))
            width = max(best(rest_key), q_value(rest, v))
            if out is None or width < out:
                out = width
        return out

    full = tuple(vertices)
    width = best(full)
    # reconstruct a witnessing elimination order back to front,
    # lexicographically smallest at every step
    order = []
    remaining = list(vertices)
    while remaining:
        for v in remaining:
            rest = [u for u in remaining if u != v]
            if max(best(tuple(rest)), q_value(set(rest), v)) <= width:
                order.append(v)
                remaining = rest
                break
    order.reverse()
    best.cache_clear()
    return width, order


def _min_fill_order(adj, vertices):
    work = {v: set(adj[v] & set(vertices)) for v in vertices}
    order = []
    remaining = set(vertices)
    while remaining:
        def fill(v):
            nbrs = [u for u in work[v] if u in remaining]
            missing = 0
            for i, a in enumerate(nbrs):
                for b in nbrs[i + 1:]:
                    if b not in work[a]:
                        missing += 1
            return (missing, len(nbrs), v)
        v = min(remaining, key=fill)
        nbrs = [u for u in work[v] if u in remaining]
        for a in nbrs:
            for b in nbrs:
                if a != b:
                    work[a].add(b)
        order.append(v)
        remaining.discard(v)
    return order


def _bags_from_order(adj, vertices, order):
    """Simulate the elimination, producing one bag per vertex plus tree edges."""
    work = {v: set(adj[v] & set(vertices)) for v in vertices}
    position = {v: i for i, v in enumerate(order)}
    bags = []
    parent_vertex = []
    remaining = set(vertices)
    for v in order:
        nbrs = sorted(u for u in work[v] if u in remaining and u != v)
        bags.append(tuple(sorted([v] + nbrs)))
        parent_vertex.append(min(nbrs, key=lambda u: position[u]) if nbrs else None)
        for a in nbrs:
            for b in nbrs:
                if a != b:
                    work[a].add(b)
        remaining.discard(v)
    # tree edges: bag of v attaches to the bag of its first-eliminated neighbor
    edges = []
    for i, v in enumerate(order):
        if parent_vertex[i] is not None:
            edges.append((i, position[parent_vertex[i]]))
        elif i + 1 < len(order):
            edges.append((i, i + 1))  # chain disconnected pieces
    return bags, edges


def _nice_from_bags(bags, edges):
    if not bags:
        return {"kind": "leaf", "bag": (), "children": []}
    adj = {i: [] for i in range(len(bags))}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)

    def leaf_chain(bag):
        node = {"kind": "leaf", "bag": (), "children": []}
        cur = []
        for v in sorted(bag):
            cur = sorted(cur + [v])
            node = {"kind": "introduce", "vertex": v, "bag": tuple(cur),
                    "children": [node]}
        return node

    def adapt(node, from_bag, to_bag):
        cur = list(from_bag)
        for v in sorted(set(from_bag) - set(to_bag)):
            cur.remove(v)
            node = {"kind": "forget", "vertex": v, "bag": tuple(sorted(cur)),
                    "children": [node]}
        for v in sorted(set(to_bag) - set(from_bag)):
            cur = sorted(cur + [v])
            node = {"kind": "introduce", "vertex": v, "bag": tuple(cur),
                    "children": [node]}
        return node

    def rec(i, parent):
        node = leaf_chain(bags[i])
        for j in sorted(adj[i]):
            if j == parent:
                continue
            sub = adapt(rec(j, i), bags[j], bags[i])
            node = {"kind": "join", "bag": tuple(sorted(bags[i])),
                    "children": [node, sub]}
        return node

    root = rec(len(bags) - 1, None)
    return adapt(root, bags[len(bags) - 1], ())


def decompose_graph(g, limit=EXACT_TREEWIDTH_LIMIT, exact=True):
    """Tree-decompose an adjacency map over a vertex set.  Returns
    (width, TreeDecomposition)."""
    adj, vertices = g
    if exact and len(vertices) > limit:
        raise TreewidthLimitError(
            "instance has %d vertices, exact limit is %d" % (len(vertices), limit))
    if exact:
        width, order = _elimination_width(adj, vertices)
    else:
        order = _min_fill_order(adj, vertices)
        width = None
    bags, edges = _bags_from_order(adj, vertices, order)
    if width is None:
        width = max((len(b) - 1 for b in bags), default=-1)
    root = _nice_from_bags(bags, edges)
    return width, TreeDecomposition(root, width, exact=exact)


def exact_treewidth(g, limit=EXACT_TREEWIDTH_LIMIT):
    """Exact treewidth of a graph-mode structure with a valid nice decomposition."""
    adj = _adjacency(g)
    return decompose_graph((adj, list(g.vertices())), limit=limit, exact=True)


def validate_decomposition(td, structure):
    """Check coverage, atom containment and connectedness of occurrences."""
    bags = td.bags()
    covered = set()
    for bag in bags:
        covered.update(bag)
    if covered != set(structure.vertices()) and set(structure.vertices()) - covered:
        return False
    for rel in structure.relations.values():
        for tup in rel:
            need = set(tup)
            if not any(need <= set(bag) for bag in bags):
                return False
    # connectedness: occurrences of each vertex form one subtree, i.e. at most
    # one node contains the vertex while its parent does not
    def occurrence_roots(v):
        roots = 0
        stack = [(td.root, False)]
        while stack:
            node, parent_has = stack.pop()
            here = v in node["bag"]
            if here and not parent_has:
                roots += 1
            for child in node["children"]:
                stack.append((child, here))
        return roots

    return all(occurrence_roots(v) <= 1 for v in covered)


def dp_tables(structure, target, td, keep=(), domains=None):
    """Run the counting DP over a nice decomposition of the non-keep vertices.

    Vertices in keep appear implicitly in every bag; the returned root table
    maps assignments of sorted(keep) to the number of homomorphisms of the
    remaining vertices consistent with that boundary assignment.
    """
    keep = tuple(sorted(keep))
    atoms = []
    for name, rel in structure.relations.items():
        for tup in rel:
            atoms.append((name, tup))

    def dom(v):
        if domains is not None and domains.get(v) is not None:
            return domains[v]
        return range(target.n)

    def atoms_within(vs):
        vset = set(vs) | set(keep)
        return [(name, tup) for name, tup in atoms if set(tup) <= vset]

    def filter_table(table, vs):
        checks = atoms_within(vs)
        if not checks:
            return table
        cols = keep + tuple(vs)
        pos = {v: i for i, v in enumerate(cols)}
        out = {}
        for key, cnt in table.items():
            ok = True
            for name, tup in checks:
                if tuple(key[pos[v]] for v in tup) not in target.relations[name]:
                    ok = False
                    break
            if ok:
                out[key] = cnt
        return out

    def rec(node):
        kind = node["kind"]
        bag = node["bag"]
        if kind == "leaf":
            table = {}
            for combo in product(*(dom(v) for v in keep)):
                table[combo] = 1
            return filter_table(table, ())
        if kind == "introduce":
            child = rec(node["children"][0])
            v = node["vertex"]
            cbag = node["children"][0]["bag"]
            cols = keep + tuple(cbag)
            new_cols = keep + tuple(bag)
            src = {c: i for i, c in enumerate(cols)}
            table = {}
            for key, cnt in child.items():
                for w in dom(v):
                    ext = dict(zip(cols, key))
                    ext[v] = w
                    nk = tuple(ext[c] for c in new_cols)
                    table[nk] = table.get(nk, 0) + cnt
            return filter_table(table, bag)
        if kind == "forget":
            child = rec(node["children"][0])
            cbag = node["children"][0]["bag"]
            cols = keep + tuple(cbag)
            new_cols = keep + tuple(bag)
            idx = [cols.index(c) for c in new_cols]
            table = {}
            for key, cnt in child.items():
                nk = tuple(key[i] for i in idx)
                table[nk] = table.get(nk, 0) + cnt
            return table
        if kind == "join":
            left = rec(node["children"][0])
            right = rec(node["children"][1])
            table = {}
            for key, cnt in left.items():
                other = right.get(key)
                if other:
                    table[key] = cnt * other
            return table
        raise ValueError("unknown node kind %r" % kind)

    return rec(td.root)


def count_homs_dp(structure, target, td, domains=None):
    table = dp_tables(structure, target, td, keep=(), domains=domains)
    return table.get((), 0)


def count_answers_dp(q, t, td):
    """All-free counting over a supplied decomposition of the Gaifman graph."""
    if set(q.free) != set(q.structure.vertices()):
        raise ValueError("count_answers_dp requires all variables free")
    if not q.is_plain():
        raise ValueError("plain CQs only")
    if not validate_decomposition(td, q.structure):
        raise ValueError("invalid tree decomposition")
    return count_homs_dp(q.structure, t, td)


def quantified_components(q):
    """Connected components of the quantified part of the Gaifman graph,
    ordered by smallest vertex."""
    adj = gaifman_adjacency(q.structure)
    return _components(adj, set(q.quantified()))


def component_boundary(q, component):
    """The free neighbors of a quantified component, sorted."""
    adj = gaifman_adjacency(q.structure)
    fset = set(q.free)
    out = set()
    for v in component:
        out.update(adj[v] & fset)
    return sorted(out)


def _component_root_table(q, t, component, limit, stats=None):
    """Map from boundary assignments to extension counts for one component."""
    boundary = component_boundary(q, component)
    sub, old_to_new = induced_substructure(q.structure, component + boundary)
    comp_local = [old_to_new[v] for v in component]
    keep_local = [old_to_new[v] for v in boundary]
    adj = _adjacency(sub)
    _, td = decompose_graph((adj, comp_local), limit=limit, exact=True)
    if stats is not None:
        stats["candidate_checks"] = stats.get("candidate_checks", 0) + \
            t.n ** len(boundary)
    table = dp_tables(sub, t, td, keep=tuple(keep_local))
    # re-express keys in the order of the boundary vertices of q
    cols = tuple(sorted(keep_local))
    idx = [cols.index(old_to_new[v]) for v in boundary]
    return boundary, {tuple(key[i] for i in idx): cnt
                      for key, cnt in table.items() if cnt}


def extendability_relation(q, t, component_index, limit=EXACT_TREEWIDTH_LIMIT,
                           dss_cap=DSS_CAP):
    """The relation R of boundary tuples of one quantified component that admit
    an extension into the component's pattern."""
    comps = quantified_components(q)
    component = comps[component_index]
    boundary = component_boundary(q, component)
    if len(boundary) > dss_cap:
        raise ValueError("component boundary exceeds the dss cap (%d > %d)"
                         % (len(boundary), dss_cap))
    _, table = _component_root_table(q, t, component, limit)
    return set(table.keys())


def derived_free_query(q, t, limit=EXACT_TREEWIDTH_LIMIT, dss_cap=DSS_CAP,
                       stats=None):
    """The X-only query and enriched target realizing the fast counter: keeps
    the free-only atoms and adds one fresh relation per quantified component
    holding its extendability tuples.  Returns (query, target) or None when
    some boundary-free component is unsatisfiable."""
    if not q.is_plain():
        raise ValueError("plain CQs only")
    free = list(q.free)
    index = {v: i for i, v in enumerate(free)}
    fset = set(free)
    symbols = []
    rels_q = {}
    rels_t = {}
    for name, arity in q.structure.signature.symbols:
        tuples = set(tup for tup in q.structure.relations[name]
                     if set(tup) <= fset)
        symbols.append((name, arity))
        rels_q[name] = set(tuple(index[v] for v in tup) for tup in tuples)
        rels_t[name] = set(t.relations[name])
    comps = quantified_components(q)
    for i, component in enumerate(comps):
        boundary = component_boundary(q, component)
        if len(boundary) > dss_cap:
            raise ValueError("component boundary exceeds the dss cap")
        _, table = _component_root_table(q, t, component, limit, stats=stats)
        if not boundary:
            if not table:
                return None
            continue
        name = "R%d" % i
        while name in dict(symbols):
            name = name + "_"
        symbols.append((name, len(boundary)))
        rels_q[name] = {tuple(index[v] for v in boundary)}
        rels_t[name] = set(table.keys())
    sig = Signature(symbols)
    derived_q = Query(Structure(sig, len(free), rels_q), tuple(range(len(free))))
    derived_t = Structure(sig, t.n, rels_t)
    return derived_q, derived_t


def count_answers_dss(q, t, limit=EXACT_TREEWIDTH_LIMIT, dss_cap=DSS_CAP,
                      stats=None):
    """The fast counter: component extendability relations plus a DP over a
    decomposition of the contracted free-only query."""
    derived = derived_free_query(q, t, limit=limit, dss_cap=dss_cap, stats=stats)
    if derived is None:
        return 0
    dq, dt = derived
    adj = _adjacency(dq.structure)
    _, td = decompose_graph((adj, list(dq.structure.vertices())), limit=limit,
                            exact=True)
    return count_homs_dp(dq.structure, dt, td)
