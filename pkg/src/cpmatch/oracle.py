"""Independent brute-force oracles, random instances, and trace replay.

Everything here is deliberately dumb: recursive pairing for matchings,
exhaustive support enumeration for the fractional bound, and a straight
re-check of every recorded invariant for traces.  None of it shares code
paths with the solver it certifies.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .errors import GenerationFailed, NoPerfectMatching, SchemaMismatch
from .graph import Graph, decompose_support, is_proper_half_integral, make_graph
from .combinatorial import is_factor_critical
from .laminar import LaminarFamily
from .lp import DualSolution
from .driver import TRACE_SCHEMA, iteration_bound
from .rational import ONE, Rat, ZERO, parse_rat, perturb

DEFAULT_NODE_LIMIT = 16
FRACTIONAL_NODE_LIMIT = 12


def _adjacency(g: Graph) -> dict:
    adj = {u: [] for u in range(1, g.n + 1)}
    for e, (u, v, _c) in enumerate(g.edges):
        adj[u].append((v, e))
        adj[v].append((u, e))
    for u in adj:
        adj[u].sort()
    return adj


def brute_force_mcpm(g: Graph, costs=None, node_limit: int = DEFAULT_NODE_LIMIT):
    """Minimum-cost perfect matching by recursive pairing of the lowest
    unmatched node, memoized on the set of unmatched nodes.

    Ties broken by lexicographic edge-index order.  Costs default to the
    graph's own; pass scaled integers to rank by perturbed cost.
    """
    if g.n > node_limit:
        raise ValueError(f"brute force limited to n <= {node_limit}")
    if g.n % 2 == 1 or g.n == 0:
        raise NoPerfectMatching(f"n = {g.n}")
    if costs is None:
        costs = [c for _u, _v, c in g.edges]
    adj = _adjacency(g)
    full = (1 << g.n) - 1

    memo = {}

    def best(mask):
        if mask == 0:
            return (ZERO, ())
        if mask in memo:
            return memo[mask]
        u = (mask & -mask).bit_length()  # lowest unmatched node (1-based)
        result = None
        for v, e in adj[u]:
            bit = 1 << (v - 1)
            if v == u or not mask & bit:
                continue
            sub = best(mask & ~(1 << (u - 1)) & ~bit)
            if sub is None:
                continue
            cand = (Rat(costs[e]) + sub[0], (e,) + sub[1])
            if result is None or cand[0] < result[0] or (
                cand[0] == result[0] and cand[1] < result[1]
            ):
                result = cand
        memo[mask] = result
        return result

    answer = best(full)
    if answer is None:
        raise NoPerfectMatching("exhausted all pairings")
    cost, edges = answer
    return sorted(edges), cost


def has_perfect_matching(g: Graph, node_limit: int = DEFAULT_NODE_LIMIT) -> bool:
    try:
        brute_force_mcpm(g, node_limit=node_limit)
        return True
    except NoPerfectMatching:
        return False


def enumerate_perfect_matchings(g: Graph) -> list:
    """All perfect matchings as sorted edge-id tuples (small graphs only)."""
    adj = _adjacency(g)
    out = []

    def recurse(mask, chosen):
        if mask == 0:
            out.append(tuple(sorted(chosen)))
            return
        u = (mask & -mask).bit_length()
        for v, e in adj[u]:
            bit = 1 << (v - 1)
            if mask & bit and v != u:
                recurse(mask & ~(1 << (u - 1)) & ~bit, chosen + [e])

    recurse((1 << g.n) - 1, [])
    return sorted(set(out))


def brute_force_fractional_opt(
    g: Graph, costs=None, node_limit: int = FRACTIONAL_NODE_LIMIT
):
    """Minimum cost over all degree-feasible proper-half-integral vectors.

    Enumerates partitions of the nodes into matched pairs and odd cycles; a
    cycle contributes half its edge costs.  Certifies the bipartite
    relaxation optimum.
    """
    if g.n > node_limit:
        raise ValueError(f"fractional enumeration limited to n <= {node_limit}")
    if costs is None:
        costs = [c for _u, _v, c in g.edges]
    adj = _adjacency(g)

    best = [None]

    def lowest(mask):
        return (mask & -mask).bit_length()

    def recurse(mask, acc):
        if mask == 0:
            if best[0] is None or acc < best[0]:
                best[0] = acc
            return
        u = lowest(mask)
        ubit = 1 << (u - 1)
        # pair u with a free neighbor
        for v, e in adj[u]:
            bit = 1 << (v - 1)
            if mask & bit and v != u:
                recurse(mask & ~ubit & ~bit, acc + Rat(costs[e]))
        # grow an odd cycle through u
        def walk(cur, used_mask, length, cost_half, first_edge):
            for v, e in adj[cur]:
                if e == first_edge and length == 1:
                    continue
                if v == u and length >= 2:
                    if (length + 1) % 2 == 1:
                        recurse(
                            mask & ~used_mask & ~ubit,
                            acc + (cost_half + Rat(costs[e])) / 2,
                        )
                    continue
                bit = 1 << (v - 1)
                if v != u and mask & bit and not used_mask & bit:
                    walk(v, used_mask | bit, length + 1, cost_half + Rat(costs[e]), first_edge)

        for v, e in adj[u]:
            bit = 1 << (v - 1)
            if v != u and mask & bit:
                walk(v, bit, 1, Rat(costs[e]), e)

    recurse((1 << g.n) - 1, ZERO)
    if best[0] is None:
        raise NoPerfectMatching("no degree-feasible half-integral vector")
    return best[0]


def random_instance(
    n: int,
    edge_probability: float,
    cost_range,
    seed: int,
    max_attempts: int = 200,
) -> Graph:
    """Seed-reproducible random graph conditioned on having a perfect matching.

    Edges are drawn independently for each unordered pair in lexicographic
    order; costs are uniform integers in the closed range.  Rejection-samples
    until a perfect matching exists.
    """
    if n % 2 == 1 or n < 4:
        raise ValueError("n must be even and at least 4")
    lo, hi = int(cost_range[0]), int(cost_range[1])
    rng = random.Random(seed)
    for _attempt in range(max_attempts):
        edges = []
        for u in range(1, n + 1):
            for v in range(u + 1, n + 1):
                if rng.random() < edge_probability:
                    edges.append((u, v, rng.randint(lo, hi)))
        if not edges:
            continue
        g = make_graph(n, edges)
        if has_perfect_matching(g):
            return g
    raise GenerationFailed(
        f"no feasible instance after {max_attempts} attempts (n={n}, p={edge_probability}, seed={seed})"
    )


# ---------------------------------------------------------------------------
# Trace replay


@dataclass
class VerifyReport:
    """Outcome of each replay check, with a minimal witness on failure."""

    checks: dict = field(default_factory=dict)

    def record(self, name: str, ok: bool, witness=None):
        if name in self.checks and not self.checks[name][0]:
            return  # keep the first witness
        if name in self.checks and ok:
            return
        self.checks[name] = (ok, witness)

    def ok(self, name: str) -> bool:
        return self.checks.get(name, (False, "missing"))[0]

    @property
    def all_ok(self) -> bool:
        return all(ok for ok, _w in self.checks.values())

    def lines(self) -> list:
        out = []
        for name in sorted(self.checks):
            ok, witness = self.checks[name]
            if ok:
                out.append(f"PASS {name}")
            else:
                out.append(f"FAIL {name} witness={witness}")
        return out


CHECK_NAMES = [
    "half_integrality",
    "laminarity",
    "family_size",
    "lp_rows",
    "cycle_monotonicity",
    "cut_persistence",
    "complementary_slackness",
    "positively_critical",
    "final_matching_oracle",
    "iteration_bound",
]


def parse_trace(lines) -> tuple:
    """(header, records) from JSONL; SchemaMismatch on malformed input."""
    lines = [ln for ln in lines if ln.strip()]
    if not lines:
        raise SchemaMismatch("empty trace")
    try:
        header = json.loads(lines[0])
        records = [json.loads(ln) for ln in lines[1:]]
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"bad JSON: {exc}") from exc
    if header.get("schema") != TRACE_SCHEMA:
        raise SchemaMismatch(f"unknown schema {header.get('schema')!r}")
    required = {
        "iteration",
        "cuts_imposed",
        "primal",
        "dual_nodes",
        "dual_sets",
        "odd_cycle_count",
        "cuts_retained",
        "cuts_added",
        "objective_scaled",
    }
    for rec in records:
        missing = required - set(rec)
        if missing:
            raise SchemaMismatch(f"record missing fields {sorted(missing)}")
    return header, records


def verify_trace(g: Graph, trace_lines, node_limit: int = DEFAULT_NODE_LIMIT) -> VerifyReport:
    """Replay a trace against its instance and re-check every invariant."""
    header, records = parse_trace(trace_lines)
    if header.get("n") != g.n or header.get("m") != g.m:
        raise SchemaMismatch("trace header does not match instance size")
    if header.get("edges") != [[u, v] for u, v, _c in g.edges]:
        raise SchemaMismatch("trace header edge list does not match instance")

    pc = perturb([c for _u, _v, c in g.edges])
    costs = pc.scaled
    report = VerifyReport()
    for name in CHECK_NAMES:
        report.record(name, True)

    prev_o = None
    history = []  # (iteration, o, imposed_sets, added_sets)
    for rec in records:
        it = rec["iteration"]
        x = [parse_rat(s) for s in rec["primal"]]
        if len(x) != g.m:
            raise SchemaMismatch(f"iteration {it}: primal length {len(x)}")
        if not is_proper_half_integral(x, g):
            report.record("half_integrality", False, {"iteration": it})
            continue
        dec = decompose_support(x, g)
        if dec.o != rec["odd_cycle_count"]:
            report.record("cycle_monotonicity", False, {"iteration": it, "reason": "o mismatch"})
        if prev_o is not None and dec.o > prev_o:
            report.record("cycle_monotonicity", False, {"iteration": it, "o": dec.o, "prev": prev_o})
        prev_o = dec.o

        imposed = [frozenset(s) for s in rec["cuts_imposed"]]
        try:
            fam = LaminarFamily(g.n, imposed)
        except Exception as exc:
            report.record("laminarity", False, {"iteration": it, "error": str(exc)})
            fam = None
        if len(imposed) > g.n // 2:
            report.record("family_size", False, {"iteration": it, "size": len(imposed)})
        if g.n + len(imposed) > 3 * g.n // 2:
            report.record("lp_rows", False, {"iteration": it, "rows": g.n + len(imposed)})

        dual = DualSolution()
        for u_str, val in rec["dual_nodes"].items():
            dual[int(u_str)] = parse_rat(val)
        for nodes, val in rec["dual_sets"]:
            dual[frozenset(nodes)] = parse_rat(val)

        # complementary slackness and strong duality, exactly
        objective = parse_rat(rec["objective_scaled"])
        x_cost = sum((Rat(c) * v for c, v in zip(costs, x)), ZERO)
        if x_cost != objective:
            report.record("complementary_slackness", False, {"iteration": it, "reason": "objective mismatch"})
        if dual.objective() != objective:
            report.record("complementary_slackness", False, {"iteration": it, "reason": "weak duality gap"})
        for e in range(g.m):
            slack = dual.slack(g, costs, e)
            if slack < ZERO:
                report.record("complementary_slackness", False, {"iteration": it, "edge": e, "reason": "dual infeasible"})
                break
            if x[e] != ZERO and slack != ZERO:
                report.record("complementary_slackness", False, {"iteration": it, "edge": e, "reason": "support edge slack"})
                break
        for s in imposed:
            if dual.of_set(s) < ZERO:
                report.record("complementary_slackness", False, {"iteration": it, "set": sorted(s), "reason": "negative cut dual"})
            elif dual.of_set(s) > ZERO:
                if sum((x[e] for e in g.delta(s)), ZERO) != ONE:
                    report.record("complementary_slackness", False, {"iteration": it, "set": sorted(s), "reason": "positive dual, slack cut"})

        if rec.get("dual_kind", "extremal") == "extremal" and fam is not None:
            for s in imposed:
                if dual.of_set(s) > ZERO and not is_factor_critical(g, costs, s, imposed, dual):
                    report.record("positively_critical", False, {"iteration": it, "set": sorted(s)})

        history.append(
            (it, dec.o, set(imposed), [frozenset(s) for s in rec["cuts_added"]])
        )

        # the family must be exactly the previous record's retained + added
        rec_index = len(history) - 1
        if rec_index > 0:
            prev = records[rec_index - 1]
            want = {frozenset(s) for s in prev["cuts_retained"]}
            want.update(frozenset(s) for s in prev["cuts_added"])
            if set(imposed) != want:
                report.record(
                    "cut_persistence",
                    False,
                    {"iteration": it, "reason": "family is not retained+added of previous record"},
                )

    # Persistence: if o is level from iteration a to b, every cut added in
    # records a..b-1 must appear in the family imposed at record b+1.
    for a in range(len(history)):
        for b in range(a + 1, len(history)):
            if history[b][1] != history[a][1]:
                break
            if b + 1 >= len(history):
                continue
            union_added = set()
            for r in range(a, b):
                union_added.update(history[r][3])
            missing = [s for s in union_added if s not in history[b + 1][2]]
            if missing:
                report.record(
                    "cut_persistence",
                    False,
                    {"window": [history[a][0], history[b][0]], "set": sorted(missing[0])},
                )

    if len(records) > iteration_bound(g.n):
        report.record("iteration_bound", False, {"lp_solves": len(records)})

    if records:
        last = records[-1]
        x = [parse_rat(s) for s in last["primal"]]
        if all(v in (ZERO, ONE) for v in x):
            matched = [e for e, v in enumerate(x) if v == ONE]
            if g.n <= node_limit:
                try:
                    _edges, best_cost = brute_force_mcpm(g, node_limit=node_limit)
                    got = sum(int(g.edges[e][2]) for e in matched)
                    if Rat(got) != best_cost:
                        report.record("final_matching_oracle", False, {"cost": got, "optimum": str(best_cost)})
                except NoPerfectMatching:
                    report.record("final_matching_oracle", False, {"reason": "oracle found no matching"})
        else:
            report.record("final_matching_oracle", False, {"reason": "final solution not integral"})
    else:
        report.record("final_matching_oracle", False, {"reason": "empty trace"})
    return report
