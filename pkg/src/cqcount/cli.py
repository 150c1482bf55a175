"""Command line interface: counting, parameter reports, minimization,
expansion to linear combinations, gadget construction and the randomized
self-check suite.
"""

import argparse
import random
import sys
from fractions import Fraction

from . import decomposition as dec
from . import expansion, gadgets, homs, params, quantum
from .model import Coloring, Query, graph, graph_edges
from .parser import (ParseError, ZeroWitness, eliminate_equalities,
                     formula_to_query, parse_coloring, parse_formula,
                     parse_quantum, parse_structure, serialize_coloring,
                     serialize_query, serialize_quantum, serialize_structure)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERIFY = 2


class RunConfig:
    def __init__(self, args):
        self.command = args.command
        self.machine = getattr(args, "machine", False)
        self.method = getattr(args, "method", "auto")
        self.seed = getattr(args, "seed", 0)
        self.trials = getattr(args, "trials", 50)
        self.max_n = getattr(args, "max_n", 5)
        self.args = args


class InputError(Exception):
    pass


def _read(path, what):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise InputError("cannot read %s file %s: %s" % (what, path, e))


def _load_query(path):
    """Returns (query-or-zero-witness, name_to_index)."""
    text = _read(path, "query")
    try:
        ast = parse_formula(text)
        ast = eliminate_equalities(ast)
        if isinstance(ast, ZeroWitness):
            return ast, {}
        q, index = formula_to_query(ast)
        return q, index
    except (ParseError, ValueError) as e:
        raise InputError("%s: %s" % (path, e))


def _load_structure(path):
    try:
        return parse_structure(_read(path, "target"))
    except ParseError as e:
        raise InputError("%s: %s" % (path, e))


def _load_coloring(path, name_to_index):
    try:
        return parse_coloring(_read(path, "coloring"), name_to_index)
    except ParseError as e:
        raise InputError("%s: %s" % (path, e))


def _emit(cfg, pairs, text_lines=None):
    if cfg.machine:
        for key, value in pairs:
            print("%s=%s" % (key, value))
    else:
        for line in (text_lines if text_lines is not None
                     else ["%s: %s" % kv for kv in pairs]):
            print(line)


def _pick_method(cfg, q):
    if cfg.method != "auto":
        return cfg.method
    if not q.is_plain():
        return "brute"
    try:
        if params.dominating_star_size(q) > dec.DSS_CAP:
            return "brute"
    except Exception:
        return "brute"
    return "dp"


def cmd_count(cfg):
    q, _ = _load_query(cfg.args.query)
    t = _load_structure(cfg.args.target)
    if isinstance(q, ZeroWitness):
        _emit(cfg, [("count", 0), ("method", "zero-witness")])
        return EXIT_OK
    method = _pick_method(cfg, q)
    if method == "dp":
        if not q.is_plain():
            raise InputError("--method dp supports plain queries only")
        try:
            value = dec.count_answers_dss(q, t)
        except (ValueError, dec.TreewidthLimitError) as e:
            if cfg.method == "dp":
                raise InputError("dp method not applicable: %s" % e)
            method = "brute"
            value = homs.count_answers(q, t)
    else:
        value = homs.count_answers(q, t)
    _emit(cfg, [("count", value), ("method", method)])
    return EXIT_OK


def cmd_count_colored(cfg, colorful):
    q, index = _load_query(cfg.args.query)
    t = _load_structure(cfg.args.target)
    if isinstance(q, ZeroWitness):
        _emit(cfg, [("count", 0), ("method", "zero-witness")])
        return EXIT_OK
    c = _load_coloring(cfg.args.coloring, index)
    try:
        c = Coloring(c.colors, t, q.structure)
    except ValueError as e:
        raise InputError("%s: %s" % (cfg.args.coloring, e))
    if colorful:
        value = homs.count_cf_answers(q, t, c)
    else:
        value = homs.count_cp_answers(q, t, c)
    _emit(cfg, [("count", value)])
    return EXIT_OK


def _format_report(cfg, report):
    pairs = [("tw", report.tw), ("tw_contract", report.tw_contract),
             ("dss", report.dss),
             ("lmn", report.lmn if report.lmn is not None else "unknown")]
    lines = ["treewidth: %s" % report.tw,
             "contract treewidth: %s" % report.tw_contract,
             "dominating star size: %s" % report.dss,
             "linked matching number: %s"
             % (report.lmn if report.lmn is not None else "unknown")]
    for i, (comp, boundary) in enumerate(report.components):
        pairs.append(("component%d" % i, "%s|boundary=%s"
                      % (",".join(map(str, comp)),
                         ",".join(map(str, boundary)))))
        lines.append("component %d: {%s}, boundary {%s}"
                     % (i, ",".join(map(str, comp)),
                        ",".join(map(str, boundary))))
    for i, note in enumerate(report.notes):
        pairs.append(("note%d" % i, note))
        lines.append("note: %s" % note)
    return pairs, lines


def cmd_params(cfg):
    q, _ = _load_query(cfg.args.query[0])
    if isinstance(q, ZeroWitness):
        raise InputError("query is unsatisfiable: %s" % q.reason)
    report = params.analyze(q)
    pairs, lines = _format_report(cfg, report)
    _emit(cfg, pairs, lines)
    return EXIT_OK


def cmd_classify(cfg):
    queries = []
    for path in cfg.args.query:
        q, _ = _load_query(path)
        if isinstance(q, ZeroWitness):
            raise InputError("%s is unsatisfiable: %s" % (path, q.reason))
        queries.append(q)
    if len(queries) == 1:
        return cmd_params(cfg)
    out = params.classify(queries)
    pairs = [("regime", out["regime"])]
    lines = ["regime: %s" % out["regime"]]
    for key in ("tw", "tw_contract", "dss", "lmn"):
        pairs.append(("trend_%s" % key, out["trends"][key]))
        lines.append("%s trend: %s" % (key, out["trends"][key]))
    for i, note in enumerate(out["notes"]):
        pairs.append(("note%d" % i, note))
        lines.append("note: %s" % note)
    _emit(cfg, pairs, lines)
    return EXIT_OK


def cmd_minimize(cfg):
    q, _ = _load_query(cfg.args.query)
    if isinstance(q, ZeroWitness):
        raise InputError("query is unsatisfiable: %s" % q.reason)
    if not q.is_plain():
        raise InputError("minimize supports plain queries only")
    core = homs.augmented_core(q)
    sys.stdout.write(serialize_query(core))
    return EXIT_OK


def cmd_expand(cfg):
    text = _read(cfg.args.formula, "formula")
    try:
        ast = parse_formula(text)
        qq = expansion.compile(ast)
    except (ParseError, ValueError) as e:
        raise InputError("%s: %s" % (cfg.args.formula, e))
    sys.stdout.write(serialize_quantum(qq))
    return EXIT_OK


def cmd_eval(cfg):
    try:
        qq = parse_quantum(_read(cfg.args.quantum, "quantum query"))
    except ParseError as e:
        raise InputError("%s: %s" % (cfg.args.quantum, e))
    t = _load_structure(cfg.args.target)
    value = quantum.evaluate(qq, t)
    if isinstance(value, Fraction):
        shown = "%d/%d" % (value.numerator, value.denominator)
    else:
        shown = str(value)
    _emit(cfg, [("value", shown)])
    return EXIT_OK


def _print_gadget(cfg, out, extra_pairs=()):
    pairs = list(extra_pairs) + [("relation", out.relation),
                                 ("zero", "yes" if out.zero else "no")]
    if cfg.machine:
        for key, value in pairs:
            print("%s=%s" % (key, value))
    else:
        print("relation: %s" % out.relation)
        if out.zero:
            print("count: 0")
    if out.zero:
        return
    print("--- structure")
    sys.stdout.write(serialize_structure(out.structure))
    if out.coloring is not None:
        print("--- coloring")
        sys.stdout.write(serialize_coloring(out.coloring))


_GADGET_NEEDS = {
    "family": (),
    "minor": ("query",),
    "uncolored-to-cp": ("query", "target"),
    "gamma-to-grate": ("target", "coloring"),
    "gaifman-expand": ("query", "target", "coloring"),
    "domset": ("target",),
}


def cmd_gadget(cfg):
    name = cfg.args.name
    for needed in _GADGET_NEEDS.get(name, ()):
        if getattr(cfg.args, needed) is None:
            raise InputError("gadget %s needs --%s" % (name, needed))
    if name == "family":
        q = gadgets.family_query(cfg.args.kind, cfg.args.k)
        sys.stdout.write(serialize_query(q))
        return EXIT_OK
    if name == "minor":
        q, _ = _load_query(cfg.args.query)
        if isinstance(q, ZeroWitness):
            raise InputError("query is unsatisfiable: %s" % q.reason)
        kind = cfg.args.op
        spots = cfg.args.vertices or []
        if kind == "delete-vertex":
            if len(spots) != 1:
                raise InputError("delete-vertex needs one vertex")
            op = (kind, spots[0])
        else:
            if len(spots) != 2:
                raise InputError("%s needs two vertices" % kind)
            op = (kind, (spots[0], spots[1]))
        try:
            minor = gadgets.apply_query_minor(q, op)
        except ValueError as e:
            raise InputError(str(e))
        if cfg.args.target is None:
            sys.stdout.write(serialize_query(minor))
            return EXIT_OK
        if cfg.args.coloring is None:
            raise InputError("the instance gadget needs --coloring")
        t = _load_structure(cfg.args.target)
        c = _load_coloring(cfg.args.coloring, {})
        try:
            out = gadgets.minor_instance_gadget(q, op, t, c)
        except ValueError as e:
            raise InputError(str(e))
        _print_gadget(cfg, out)
        return EXIT_OK
    if name == "uncolored-to-cp":
        q, _ = _load_query(cfg.args.query)
        if isinstance(q, ZeroWitness):
            raise InputError("query is unsatisfiable: %s" % q.reason)
        t = _load_structure(cfg.args.target)
        out = gadgets.uncolored_to_cp_gadget(q, t)
        _print_gadget(cfg, out)
        return EXIT_OK
    if name == "gamma-to-grate":
        t = _load_structure(cfg.args.target)
        c = _load_coloring(cfg.args.coloring, {})
        try:
            out = gadgets.gamma_to_grate_gadget(cfg.args.k, t, c)
        except ValueError as e:
            raise InputError(str(e))
        _print_gadget(cfg, out)
        return EXIT_OK
    if name == "gaifman-expand":
        q, _ = _load_query(cfg.args.query)
        if isinstance(q, ZeroWitness):
            raise InputError("query is unsatisfiable: %s" % q.reason)
        t = _load_structure(cfg.args.target)
        c = _load_coloring(cfg.args.coloring, {})
        try:
            out = gadgets.gaifman_expand_gadget(q, t, c)
        except ValueError as e:
            raise InputError(str(e))
        _print_gadget(cfg, out)
        return EXIT_OK
    if name == "domset":
        t = _load_structure(cfg.args.target)
        counts = gadgets.domset_via_star_oracle(t, cfg.args.k)
        pairs = [("D%d" % (i + 1), v) for i, v in enumerate(counts)]
        _emit(cfg, pairs, ["dominating sets of size %d: %d" % (i + 1, v)
                           for i, v in enumerate(counts)])
        return EXIT_OK
    raise InputError("unknown gadget %r" % name)


# ---------------------------------------------------------------------------
# self-check suite

def _random_graph(rng, n, p=0.5):
    edges = [e for e in [(i, j) for i in range(n) for j in range(i + 1, n)]
             if rng.random() < p]
    return graph(n, edges)


def _random_query(rng, max_n):
    n = rng.randint(1, max_n)
    s = _random_graph(rng, n, 0.6)
    nf = rng.randint(0, n)
    free = tuple(sorted(rng.sample(range(n), nf)))
    return Query(s, free)


def _check_dp(rng, cfg):
    for _ in range(cfg.trials):
        q = _random_query(rng, min(cfg.max_n, 5))
        t = _random_graph(rng, rng.randint(0, cfg.max_n))
        try:
            fast = dec.count_answers_dss(q, t)
        except ValueError:
            continue
        slow = homs.count_answers(q, t)
        if fast != slow:
            return "dp=%d brute=%d query=%r target-edges=%r" % (
                fast, slow, serialize_query(q), graph_edges(t))
    return None


def _check_surjective_sum(rng, cfg):
    from itertools import combinations
    for _ in range(max(1, cfg.trials // 5)):
        q = _random_query(rng, 3)
        t = _random_graph(rng, rng.randint(0, 3))
        total = homs.count_answers(q, t)
        acc = 0
        for size in range(0, len(q.free) + 1):
            for z in combinations(range(t.n), size):
                acc += homs.count_surjective_answers(q, t, z)
        if acc != total:
            return "sum=%d total=%d query=%r" % (acc, total,
                                                 serialize_query(q))
    return None


def _check_cf_identity(rng, cfg):
    for _ in range(max(1, cfg.trials // 5)):
        q = homs.augmented_core(_random_query(rng, 3))
        sizes = [rng.randint(1, 2) for _ in range(q.structure.n)]
        colors = []
        for v in range(q.structure.n):
            colors += [v] * sizes[v]
        qedges = set(graph_edges(q.structure))
        edges = [(a, b) for a in range(len(colors)) for b in range(len(colors))
                 if a < b and tuple(sorted((colors[a], colors[b]))) in qedges
                 and rng.random() < 0.7]
        t = graph(len(colors), edges)
        c = Coloring(colors, t, q.structure)
        cf = homs.count_cf_answers(q, t, c)
        cp = homs.count_cp_answers(q, t, c)
        aut = homs.count_partial_automorphisms(q)
        if cf != aut * cp:
            return "cf=%d aut=%d cp=%d query=%r" % (cf, aut, cp,
                                                    serialize_query(q))
    return None


def _check_tensor(rng, cfg):
    from .model import tensor_product
    for _ in range(max(1, cfg.trials // 5)):
        q = _random_query(rng, 3)
        t1 = _random_graph(rng, rng.randint(1, 3))
        t2 = _random_graph(rng, rng.randint(1, 3))
        lhs = homs.count_answers(q, tensor_product(t1, t2))
        rhs = homs.count_answers(q, t1) * homs.count_answers(q, t2)
        if lhs != rhs:
            return "tensor=%d product=%d query=%r" % (lhs, rhs,
                                                      serialize_query(q))
    return None


def _check_core(rng, cfg):
    for _ in range(max(1, cfg.trials // 5)):
        q = _random_query(rng, 4)
        core = homs.augmented_core(q)
        t = _random_graph(rng, rng.randint(0, 4))
        if homs.count_answers(q, t) != homs.count_answers(core, t):
            return "core disagrees on query=%r" % serialize_query(q)
    return None


def _check_compile(rng, cfg):
    atoms = ["E(x1,y1)", "E(x1,y2)", "E(x2,y1)", "E(x1,x2)", "E(y1,y2)"]
    for _ in range(max(1, cfg.trials // 5)):
        m = rng.randint(1, 2)
        disj = ["(" + " & ".join(rng.sample(atoms, rng.randint(1, 2))) + ")"
                for _ in range(m)]
        quant = rng.choice(["forall", "exists"])
        text = "formula\nfree x1 x2\n%s y1 y2\nbody %s\n" % (
            quant, " | ".join(disj))
        if rng.random() < 0.5:
            text += "ineq x1 x2\n"
        f = parse_formula(text)
        qq = expansion.compile(f)
        t = _random_graph(rng, rng.randint(1, 4))
        a = quantum.evaluate(qq, t)
        b = expansion.count_formula_answers(f, t)
        if a != b:
            return "compiled=%s brute=%s formula=%r" % (a, b, text)
    return None


def _check_extraction(rng, cfg):
    for _ in range(max(1, cfg.trials // 10)):
        support = []
        while len(support) < 2:
            q = homs.augmented_core(_random_query(rng, 3))
            if q.free and all(not homs.are_equivalent(q, q2)
                              for q2 in support):
                support.append(q)
        qq = quantum.QuantumQuery(
            [(rng.choice([-2, -1, 1, 2]), q) for q in support])
        t = _random_graph(rng, rng.randint(1, 4))
        got = quantum.extract_constituent_counts(qq, t)
        want = {q: homs.count_answers(q, t) for q in support}
        if got != want:
            return "extraction mismatch on %d-vertex target" % t.n
    return None


def _check_minor_gadgets(rng, cfg):
    for _ in range(max(1, cfg.trials // 5)):
        q = _random_query(rng, 4)
        edges = graph_edges(q.structure)
        if not edges:
            continue
        e = rng.choice(edges)
        op = (rng.choice(["delete-edge", "contract-edge"]), e)
        minor, _ = gadgets.query_minor_with_map(q, op)
        sizes = [rng.randint(1, 2) for _ in range(minor.structure.n)]
        colors = []
        for v in range(minor.structure.n):
            colors += [v] * sizes[v]
        medges = set(graph_edges(minor.structure))
        tedges = [(a, b) for a in range(len(colors))
                  for b in range(len(colors))
                  if a < b and tuple(sorted((colors[a], colors[b]))) in medges
                  and rng.random() < 0.6]
        t = graph(len(colors), tedges)
        c = Coloring(colors, t, minor.structure)
        out = gadgets.minor_instance_gadget(q, op, t, c)
        lhs = homs.count_cp_answers(minor, t, c)
        rhs = homs.count_cp_answers(q, out.structure, out.coloring)
        if lhs != rhs:
            return "minor %r: source=%d gadget=%d" % (op, lhs, rhs)
    return None


def _check_domset(rng, cfg):
    for _ in range(max(1, cfg.trials // 10)):
        g = _random_graph(rng, rng.randint(1, 5))
        k = rng.randint(1, 2)
        got = gadgets.domset_via_star_oracle(g, k)
        want = [gadgets._brute_dominating_sets(g, ell)
                for ell in range(1, k + 1)]
        if got != want:
            return "domset got=%r want=%r edges=%r" % (got, want,
                                                       graph_edges(g))
    return None


CHECKS = [
    ("dp-counter-vs-brute", _check_dp),
    ("surjective-partition", _check_surjective_sum),
    ("colorful-automorphism-identity", _check_cf_identity),
    ("tensor-multiplicativity", _check_tensor),
    ("core-preserves-counts", _check_core),
    ("compile-vs-formula-semantics", _check_compile),
    ("constituent-extraction", _check_extraction),
    ("minor-gadget-counts", _check_minor_gadgets),
    ("dominating-set-pipeline", _check_domset),
]


def cmd_check(cfg):
    failures = 0
    for name, fn in CHECKS:
        rng = random.Random("%d:%s" % (cfg.seed, name))
        counterexample = fn(rng, cfg)
        status = "pass" if counterexample is None else "fail"
        if cfg.machine:
            print("%s=%s" % (name, status))
        else:
            print("%s: %s" % (name, status))
        if counterexample is not None:
            failures += 1
            print("  counterexample: %s" % counterexample)
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def build_parser():
    p = argparse.ArgumentParser(
        prog="cqcount",
        description="Exact answer counting for conjunctive queries and "
                    "extensions, structural parameters, and reductions.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, query=False, target=False, coloring=False):
        if query:
            sp.add_argument("--query", required=True)
        if target:
            sp.add_argument("--target", required=True)
        if coloring:
            sp.add_argument("--coloring", required=True)
        sp.add_argument("--machine", action="store_true")

    sp = sub.add_parser("count", help="count answers of a query on a target")
    common(sp, query=True, target=True)
    sp.add_argument("--method", choices=["brute", "dp", "auto"],
                    default="auto")

    sp = sub.add_parser("count-cp", help="color-prescribed answer count")
    common(sp, query=True, target=True, coloring=True)

    sp = sub.add_parser("count-cf", help="colorful answer count")
    common(sp, query=True, target=True, coloring=True)

    sp = sub.add_parser("params", help="structural parameters of one query")
    sp.add_argument("--query", action="append", required=True)
    sp.add_argument("--machine", action="store_true")

    sp = sub.add_parser("classify",
                        help="boundedness trends and the complexity regime "
                             "of a family (repeat --query)")
    sp.add_argument("--query", action="append", required=True)
    sp.add_argument("--machine", action="store_true")

    sp = sub.add_parser("minimize", help="vertex-minimal equivalent query")
    sp.add_argument("--query", required=True)
    sp.add_argument("--machine", action="store_true")

    sp = sub.add_parser("expand",
                        help="compile a formula to a linear combination "
                             "of plain queries")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--machine", action="store_true")

    sp = sub.add_parser("eval", help="evaluate a quantum query on a target")
    sp.add_argument("--quantum", required=True)
    sp.add_argument("--target", required=True)
    sp.add_argument("--machine", action="store_true")

    sp = sub.add_parser("gadget", help="run a reduction gadget")
    sp.add_argument("name", choices=["family", "minor", "uncolored-to-cp",
                                     "gamma-to-grate", "gaifman-expand",
                                     "domset"])
    sp.add_argument("--query")
    sp.add_argument("--target")
    sp.add_argument("--coloring")
    sp.add_argument("--kind", default="psi")
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--op", choices=["delete-vertex", "delete-edge",
                                     "contract-edge"])
    sp.add_argument("--vertices", type=int, nargs="*")
    sp.add_argument("--machine", action="store_true")

    sp = sub.add_parser("check", help="randomized cross-validation suite")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--max-n", dest="max_n", type=int, default=5)
    sp.add_argument("--machine", action="store_true")

    return p


COMMANDS = {
    "count": cmd_count,
    "count-cp": lambda cfg: cmd_count_colored(cfg, colorful=False),
    "count-cf": lambda cfg: cmd_count_colored(cfg, colorful=True),
    "params": cmd_params,
    "classify": cmd_classify,
    "minimize": cmd_minimize,
    "expand": cmd_expand,
    "eval": cmd_eval,
    "gadget": cmd_gadget,
    "check": cmd_check,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(args)
    try:
        return COMMANDS[args.command](cfg)
    except InputError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
