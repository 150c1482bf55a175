"""Shared helpers for the test suite: enumeration of small graphs and
(graph, free-set) pairs up to isomorphism, and random instance builders."""

from itertools import combinations, permutations, product

from cqcount.model import Coloring, Query, graph, graph_edges


def _refine_classes(n, adj):
    """Iterative degree refinement; returns a class label per vertex."""
    labels = [len(adj[v]) for v in range(n)]
    while True:
        signatures = [(labels[v], tuple(sorted(labels[w] for w in adj[v])))
                      for v in range(n)]
        order = {s: i for i, s in enumerate(sorted(set(signatures)))}
        new = [order[signatures[v]] for v in range(n)]
        if new == labels:
            return labels
        labels = new


def _class_permutations(n, labels):
    """All permutations of 0..n-1 preserving the class labels."""
    classes = {}
    for v in range(n):
        classes.setdefault(labels[v], []).append(v)
    keys = sorted(classes)
    pools = [list(permutations(classes[k])) for k in keys]
    slots = [v for k in keys for v in classes[k]]
    for combo in product(*pools):
        images = [v for block in combo for v in block]
        perm = [0] * n
        for slot, image in zip(slots, images):
            perm[slot] = image
        yield perm


def _normalizing_permutations(n, labels):
    """Relabelings sending each refinement class to a contiguous block of
    positions (in class order), in every within-class arrangement."""
    classes = {}
    for v in range(n):
        classes.setdefault(labels[v], []).append(v)
    keys = sorted(classes)
    pools = [list(permutations(classes[k])) for k in keys]
    for combo in product(*pools):
        perm = [0] * n
        pos = 0
        for block in combo:
            for v in block:
                perm[v] = pos
                pos += 1
        yield perm


def canonical_graph(n, edges):
    """Minimal relabeling of the edge set over invariant-preserving
    permutations; a canonical form for isomorphism testing."""
    adj = {v: set() for v in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    labels = _refine_classes(n, adj)
    best = None
    for perm in _normalizing_permutations(n, labels):
        mapped = tuple(sorted(tuple(sorted((perm[u], perm[v])))
                              for u, v in edges))
        if best is None or mapped < best:
            best = mapped
    return (n, best)


def graph_representatives(max_n, min_n=0):
    """One representative per isomorphism class of simple graphs, built by
    vertex augmentation."""
    reps = {0: [(0, ())]}
    for n in range(1, max_n + 1):
        seen = {}
        for _, edges in reps[n - 1]:
            for attach in range(1 << (n - 1)):
                new_edges = tuple(edges) + tuple(
                    (u, n - 1) for u in range(n - 1) if attach >> u & 1)
                key = canonical_graph(n, new_edges)
                if key not in seen:
                    seen[key] = key[1]
        reps[n] = sorted(seen.items())
        reps[n] = [(n, edges) for _, edges in reps[n]]
    out = []
    for n in range(min_n, max_n + 1):
        out.extend(reps[n])
    return out


def automorphisms(n, edges):
    adj = {v: set() for v in range(n)}
    eset = set(tuple(sorted(e)) for e in edges)
    for u, v in eset:
        adj[u].add(v)
        adj[v].add(u)
    labels = _refine_classes(n, adj)
    out = []
    for perm in _class_permutations(n, labels):
        if all(tuple(sorted((perm[u], perm[v]))) in eset for u, v in eset):
            out.append(perm)
    return out


def query_representatives(max_n, min_n=1):
    """(graph, free-set) pairs up to isomorphism, as Query objects."""
    out = []
    for n, edges in graph_representatives(max_n, min_n=min_n):
        auts = automorphisms(n, edges)
        seen = set()
        for size in range(n + 1):
            for free in combinations(range(n), size):
                orbit = min(tuple(sorted(p[v] for v in free)) for p in auts)
                if (size, orbit) in seen:
                    continue
                seen.add((size, orbit))
                out.append(Query(graph(n, edges), free))
    return out


def random_graph(rng, n, p=0.5):
    edges = [e for e in [(i, j) for i in range(n) for j in range(i + 1, n)]
             if rng.random() < p]
    return graph(n, edges)


def random_query(rng, max_n, max_free=None, p=0.6):
    n = rng.randint(1, max_n)
    s = random_graph(rng, n, p)
    top = n if max_free is None else min(max_free, n)
    nf = rng.randint(0, top)
    free = tuple(sorted(rng.sample(range(n), nf)))
    return Query(s, free)


def random_colored_instance(rng, pattern, max_per_class=3, p=0.6):
    """Random structure colored by the graph-mode pattern structure; the
    coloring is a homomorphism by construction."""
    sizes = [rng.randint(1, max_per_class) for _ in range(pattern.n)]
    colors = []
    for v in range(pattern.n):
        colors += [v] * sizes[v]
    n = len(colors)
    pedges = set(graph_edges(pattern))
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if tuple(sorted((colors[a], colors[b]))) in pedges and \
                    rng.random() < p:
                edges.append((a, b))
    g = graph(n, edges)
    return g, Coloring(colors, g, pattern)
