"""Brute-force counting of homomorphism variants, query minimization and
equivalence.  This module is the ground truth the faster counters are checked
against; everything here enumerates with pruning but no clever algorithmics.
"""

from itertools import combinations, permutations

from .model import (Query, Signature, Structure, gaifman_adjacency,
                    induced_substructure)

AUX_SYMBOL = "Xaux"


class PinSet(dict):
    """Partial map from query vertices to target vertices."""


def _search_order(structure, fixed):
    """Unfixed vertices by descending Gaifman degree, index as tie-break."""
    adj = gaifman_adjacency(structure)
    rest = [v for v in structure.vertices() if v not in fixed]
    rest.sort(key=lambda v: (-len(adj[v]), v))
    return rest


def _atom_schedule(structure, order):
    """For each position in the assignment order, the atoms whose variables are
    all assigned once that position is filled."""
    when = {v: i for i, v in enumerate(order)}
    sched = [[] for _ in order]
    upfront = []
    for name, rel in structure.relations.items():
        for tup in rel:
            free_positions = [when[v] for v in tup if v in when]
            if free_positions:
                sched[max(free_positions)].append((name, tup))
            else:
                upfront.append((name, tup))
    return sched, upfront


def _enumerate_homs(structure, target, pins=None, domains=None, need_exists=False,
                    colorful_colors=None):
    """Count (or decide existence of) total homomorphisms extending pins.

    domains optionally restricts each vertex's candidate targets.  When
    colorful_colors is a coloring tuple, only homomorphisms whose image meets
    every color are counted.
    """
    pins = pins or {}
    for v, w in pins.items():
        if not (0 <= v < structure.n and 0 <= w < target.n):
            raise ValueError("pin out of range: %d -> %d" % (v, w))
    order = _search_order(structure, pins)
    sched, upfront = _atom_schedule(structure, order)

    assignment = dict(pins)
    for name, tup in upfront:
        if tuple(assignment[v] for v in tup) not in target.relations[name]:
            return 0

    all_colors = None
    if colorful_colors is not None:
        all_colors = set(range(structure.n))

    def candidates(v):
        if domains is not None and domains.get(v) is not None:
            return domains[v]
        return range(target.n)

    def rec(i):
        if i == len(order):
            if colorful_colors is not None:
                got = set(colorful_colors[w] for w in assignment.values())
                if got != all_colors:
                    return 0
            return 1
        v = order[i]
        total = 0
        for w in candidates(v):
            assignment[v] = w
            ok = True
            for name, tup in sched[i]:
                if tuple(assignment[u] for u in tup) not in target.relations[name]:
                    ok = False
                    break
            if ok:
                total += rec(i + 1)
                if need_exists and total:
                    break
        assignment.pop(v, None)
        return total

    return rec(0)


def count_extensions(q, t, pins=None):
    """Number of total maps h: V(H) -> V(t) extending pins and satisfying every atom."""
    return _enumerate_homs(q.structure, t, pins=pins)


def exists_extension(structure, target, pins=None, domains=None, colorful_colors=None):
    return _enumerate_homs(structure, target, pins=pins, domains=domains,
                           need_exists=True, colorful_colors=colorful_colors) > 0


def _assignment_constraints_ok(q, t, a):
    for pair in q.inequalities:
        x, y = tuple(pair)
        if a[x] == a[y]:
            return False
    for sym, args in q.negated_atoms:
        if tuple(a[v] for v in args) in t.relations[sym]:
            return False
    return True


def _enumerate_answers(q, t, domains=None, colorful_colors=None):
    """Yield every answer of q on t: assignments on the free vertices that
    satisfy the side constraints and extend to a (possibly colorful) hom."""
    structure = q.structure
    free = q.free
    sub_sched, _ = _atom_schedule_free(structure, free)

    a = {}

    def rec(i):
        if i == len(free):
            if not _assignment_constraints_ok(q, t, a):
                return
            if exists_extension(structure, t, pins=a, domains=domains,
                                colorful_colors=colorful_colors):
                yield dict(a)
            return
        v = free[i]
        dom = range(t.n)
        if domains is not None and domains.get(v) is not None:
            dom = domains[v]
        for w in dom:
            a[v] = w
            ok = True
            for name, tup in sub_sched[i]:
                if tuple(a[u] for u in tup) not in t.relations[name]:
                    ok = False
                    break
            if ok:
                yield from rec(i + 1)
        a.pop(v, None)

    yield from rec(0)


def _atom_schedule_free(structure, free):
    """Atoms lying entirely inside the free set, scheduled by last free index."""
    when = {v: i for i, v in enumerate(free)}
    sched = [[] for _ in free]
    for name, rel in structure.relations.items():
        for tup in rel:
            if all(v in when for v in tup):
                i = max(when[v] for v in tup)
                sched[i].append((name, tup))
    return sched, []


def count_answers(q, t):
    """Number of assignments on the free vertices that extend to a homomorphism,
    honoring inequalities and negated atoms.  Boolean queries give 0 or 1."""
    return sum(1 for _ in _enumerate_answers(q, t))


def count_cp_answers(q, t, c):
    """Answers a with c(a(x)) = x that extend to a color-prescribed homomorphism."""
    classes = c.classes(q.structure.n)
    domains = {v: classes[v] for v in q.structure.vertices()}
    return sum(1 for _ in _enumerate_answers(q, t, domains=domains))


def count_cf_answers(q, t, c):
    """Answers a into the free color classes with c(a(X)) = X that extend to a
    homomorphism whose image meets every color class."""
    classes = c.classes(q.structure.n)
    free_pool = sorted(set(v for x in q.free for v in classes[x]))
    domains = {v: free_pool for v in q.free}
    count = 0
    for a in _enumerate_answers(q, t, domains=domains, colorful_colors=c.colors):
        if set(c[a[x]] for x in q.free) == set(q.free):
            count += 1
    return count


def count_surjective_answers(q, t, z):
    """Answers whose image on the free vertices is exactly the set z."""
    z = sorted(set(z))
    if len(z) > len(q.free):
        return 0
    zl = list(z)
    zset = set(z)
    domains = {v: zl for v in q.free}
    count = 0
    for a in _enumerate_answers(q, t, domains=domains):
        if set(a[x] for x in q.free) == zset:
            count += 1
    return count


def _automorphism_restrictions(q):
    """Distinct restrictions to X of automorphisms of H that fix X setwise."""
    structure = q.structure
    seen = set()
    fset = set(q.free)
    for perm in permutations(range(structure.n)):
        if any(perm[x] not in fset for x in q.free):
            continue
        ok = True
        for name, rel in structure.relations.items():
            for tup in rel:
                if tuple(perm[v] for v in tup) not in rel:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            seen.add(tuple(perm[x] for x in q.free))
    return seen


def count_partial_automorphisms(q):
    """Number of bijections X -> X extendable to an automorphism of H."""
    return len(_automorphism_restrictions(q))


def _augment(q):
    """Add the all-ordered-pairs auxiliary relation on the free set."""
    s = q.structure
    if AUX_SYMBOL in s.signature.arity:
        raise ValueError("reserved symbol %s in use" % AUX_SYMBOL)
    sig = Signature(s.signature.symbols + ((AUX_SYMBOL, 2),))
    rels = {name: set(rel) for name, rel in s.relations.items()}
    rels[AUX_SYMBOL] = set((a, b) for a in q.free for b in q.free if a != b)
    return Structure(sig, s.n, rels)


def _strip_aux(structure):
    sig = Signature([sym for sym in structure.signature.symbols
                     if sym[0] != AUX_SYMBOL])
    rels = {name: set(rel) for name, rel in structure.relations.items()
            if name != AUX_SYMBOL}
    return Structure(sig, structure.n, rels)


def augmented_core(q):
    """The vertex-minimal query equivalent to q, via the core of the structure
    augmented with an all-pairs relation on the free set."""
    if not q.is_plain():
        raise ValueError("augmented core is defined for plain CQs")
    aug = _augment(q)
    free = list(q.free)
    while True:
        shrunk = False
        n = aug.n
        for size in range(n - 1, -1, -1):
            for subset in combinations(range(n), size):
                sub, old_to_new = induced_substructure(aug, subset)
                if not all(x in old_to_new for x in free):
                    continue
                # the retraction must map the free set onto the surviving free
                # set; the auxiliary relation makes that map injective
                sub_free = [old_to_new[x] for x in free]
                domains = {x: sub_free for x in free}
                if exists_extension(aug, sub, domains=domains):
                    aug = sub
                    free = [old_to_new[x] for x in free]
                    shrunk = True
                    break
            if shrunk:
                break
        if not shrunk:
            break
    return Query(_strip_aux(aug), free)


def dominates(q1, q2):
    """True when some surjection from q1's free set onto q2's free set extends
    to a homomorphism between the structures."""
    if q1.structure.signature != q2.structure.signature:
        raise ValueError("signature mismatch")
    return count_surjective_extendable_maps(q1, q2) > 0


def count_surjective_extendable_maps(q1, q2):
    """Number of surjections s: X1 ->> X2 extendable to a homomorphism H1 -> H2."""
    if q1.structure.signature != q2.structure.signature:
        raise ValueError("signature mismatch")
    x1, x2 = q1.free, q2.free
    if len(x1) < len(x2):
        return 0
    count = 0
    for values in _surjections(x1, x2):
        pins = dict(zip(x1, values))
        if exists_extension(q1.structure, q2.structure, pins=pins):
            count += 1
    return count


def _surjections(domain, codomain):
    if not codomain:
        if not domain:
            yield ()
        return
    from itertools import product as iproduct
    cset = set(codomain)
    for values in iproduct(codomain, repeat=len(domain)):
        if set(values) == cset:
            yield values


def are_equivalent(q1, q2):
    """Counting equivalence: surjective extendable maps exist in both directions."""
    return dominates(q1, q2) and dominates(q2, q1)


def endomorphism_bijective_on_X_is_automorphism_check(q):
    """True iff every endomorphism of H mapping X bijectively onto X is an
    automorphism.  Holds for every minimal query."""
    structure = q.structure
    fset = set(q.free)
    from itertools import product as iproduct
    for image in iproduct(range(structure.n), repeat=structure.n):
        if set(image[x] for x in q.free) != fset or \
                len(set(image[x] for x in q.free)) != len(fset):
            continue
        ok = True
        for name, rel in structure.relations.items():
            for tup in rel:
                if tuple(image[v] for v in tup) not in rel:
                    ok = False
                    break
            if not ok:
                break
        if ok and len(set(image)) != structure.n:
            return False
    return True
