"""Deployment graphs over pure profiles and their maximality analysis.

Arcs are unilateral deviations: strictly profitable ones in the strict
graph, not-harmful ones in the ordinal graph (zero-gain deviations give
paired neutral arcs).  Sink components of the condensation are the
weakly/strongly maximal states.
"""

from dataclasses import dataclass, field

import numpy as np

POSITIVE = 1
NEUTRAL = 0

DEFAULT_ARC_CAP = 2_000_000


@dataclass
class DeploymentGraph:
    profile_count: int
    arcs: list  # arcs[v] = list of (target, polarity)
    kind: str   # strict | ordinal


@dataclass
class Condensation:
    component_of: np.ndarray
    components: list
    dag_arcs: set
    sinks: set


@dataclass
class MaximalAnalysis:
    maximal_states: set
    classes: list
    pure_nash: set
    flags: dict = field(default_factory=dict)


def build_graph(game, kind="strict", tie_tol=0.0, arc_cap=DEFAULT_ARC_CAP):
    """Deployment graph of a strategic game.

    Polarity is a discrete notion; integer payoff tables with the
    default tie_tol=0 are recommended.
    """
    if kind not in ("strict", "ordinal"):
        raise ValueError("kind must be strict or ordinal")
    total_arcs = game.profile_count * (sum(game.strategy_counts) -
                                       game.player_count)
    if total_arcs > arc_cap:
        raise ValueError("profile space needs %d arc slots, over the cap %d"
                         % (total_arcs, arc_cap))
    arcs = [[] for _ in range(game.profile_count)]
    for s in game.profiles():
        v = game.encode(s)
        pay = game.payoffs(s)
        for i, t, s2 in game.deviations(s):
            gain = game.payoff(s2, i) - pay[i]
            if gain > tie_tol:
                arcs[v].append((game.encode(s2), POSITIVE))
            elif kind == "ordinal" and gain >= -tie_tol:
                arcs[v].append((game.encode(s2), NEUTRAL))
    return DeploymentGraph(game.profile_count, arcs, kind)


def condensation(graph):
    """Strongly connected components (iterative Tarjan) and their DAG."""
    n = graph.profile_count
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comp_of = np.full(n, -1, dtype=np.int64)
    components = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            while pi < len(graph.arcs[v]):
                w = graph.arcs[v][pi][0]
                pi += 1
                if index[w] == -1:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp_of[w] = len(components)
                    comp.append(w)
                    if w == v:
                        break
                components.append(comp)
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    dag_arcs = set()
    for v in range(n):
        for w, _ in graph.arcs[v]:
            if comp_of[v] != comp_of[w]:
                dag_arcs.add((int(comp_of[v]), int(comp_of[w])))
    has_out = {a for a, _ in dag_arcs}
    sinks = {c for c in range(len(components)) if c not in has_out}
    return Condensation(comp_of, components, dag_arcs, sinks)


def pure_nash(game, tol=0.0):
    """Pure Nash equilibria, labelled 'strict' or 'weak'."""
    out = {}
    for s in game.profiles():
        pay = game.payoffs(s)
        best_gain = -np.inf
        for i, t, s2 in game.deviations(s):
            best_gain = max(best_gain, game.payoff(s2, i) - pay[i])
        if best_gain <= tol:
            out[s] = "strict" if best_gain < -tol else "weak"
    return out


def maximal_states(game, kind="weak", tie_tol=0.0):
    """Weak (strict graph) or strong (ordinal graph) maximal states."""
    if kind not in ("weak", "strong"):
        raise ValueError("kind must be weak or strong")
    graph = build_graph(game, "strict" if kind == "weak" else "ordinal",
                        tie_tol)
    cond = condensation(graph)
    classes = [set(game.decode(v) for v in cond.components[c])
               for c in sorted(cond.sinks)]
    states = set().union(*classes) if classes else set()
    nash = set(pure_nash(game, tie_tol))
    return MaximalAnalysis(states, classes, nash,
                           flags=classify_acyclicity(game, tie_tol))


def strongly_maximal_equilibrium_classes(game, tie_tol=0.0):
    """Communicating classes of strongly maximal pure Nash equilibria.

    A sink component of the ordinal graph qualifies as an equilibrium
    class only when every one of its states is a pure Nash equilibrium;
    a sink that mixes equilibria with non-equilibrium states (drifting
    escapes into improvement cycles) contributes nothing.  Members of a
    class are mutually reachable by definition of the component.
    """
    graph = build_graph(game, "ordinal", tie_tol)
    cond = condensation(graph)
    nash = set(pure_nash(game, tie_tol))
    classes = []
    for c in sorted(cond.sinks):
        profs = {game.decode(v) for v in cond.components[c]}
        if profs and profs <= nash:
            classes.append(profs)
    return classes


def classify_acyclicity(game, tie_tol=0.0):
    """Acyclicity flags of a strategic game.

    ordinally_acyclic: every intra-component arc of the ordinal graph is
    neutral (equivalent to admitting an ordinal potential).
    weakly_acyclic: every weakly maximal state is a pure Nash
    equilibrium.  weakly_ordinally_acyclic: every strongly maximal state
    is a strongly maximal equilibrium.
    """
    nash = set(pure_nash(game, tie_tol))

    ograph = build_graph(game, "ordinal", tie_tol)
    ocond = condensation(ograph)
    ordinally_acyclic = True
    for v in range(ograph.profile_count):
        for w, pol in ograph.arcs[v]:
            if pol == POSITIVE and ocond.component_of[v] == ocond.component_of[w]:
                ordinally_acyclic = False
                break
        if not ordinally_acyclic:
            break

    sgraph = build_graph(game, "strict", tie_tol)
    scond = condensation(sgraph)
    weakly_acyclic = all(
        game.decode(v) in nash
        for c in scond.sinks for v in scond.components[c])

    weakly_ordinally_acyclic = all(
        game.decode(v) in nash
        for c in ocond.sinks for v in ocond.components[c])

    return {
        "ordinally_acyclic": ordinally_acyclic,
        "weakly_acyclic": weakly_acyclic,
        "weakly_ordinally_acyclic": weakly_ordinally_acyclic,
    }


def build_ordinal_potential(game, tie_tol=0.0):
    """An ordinal potential (profile -> int), or None if none exists.

    Contracts the ordinal graph's components, orders the condensation
    topologically, and assigns increasing integers along the order.
    Neutral arcs pair up, so their endpoints share a component and a
    potential value; positive arcs always cross components forward.
    """
    flags = classify_acyclicity(game, tie_tol)
    if not flags["ordinally_acyclic"]:
        return None
    graph = build_graph(game, "ordinal", tie_tol)
    cond = condensation(graph)
    ncomp = len(cond.components)
    indeg = [0] * ncomp
    succ = [[] for _ in range(ncomp)]
    for a, b in cond.dag_arcs:
        succ[a].append(b)
        indeg[b] += 1
    order = [c for c in range(ncomp) if indeg[c] == 0]
    head = 0
    rank = [0] * ncomp
    while head < len(order):
        c = order[head]
        head += 1
        rank[c] = head
        for b in succ[c]:
            indeg[b] -= 1
            if indeg[b] == 0:
                order.append(b)
    # longest-path ranks so every dag arc strictly increases
    topo_rank = [0] * ncomp
    for c in order:
        for b in succ[c]:
            topo_rank[b] = max(topo_rank[b], topo_rank[c] + 1)
    potential = {}
    for s in game.profiles():
        potential[s] = topo_rank[cond.component_of[game.encode(s)]]
    return potential


def better_response_walk(game, start, kind="strict", seed=0, max_steps=1000,
                         tie_tol=0.0, graph=None):
    """Random walk along deployment arcs, uniform over out-arcs.

    Stops at a profile without out-arcs or after max_steps.  Sink sets
    do not depend on the arc distribution, only on arc presence.
    """
    if graph is None:
        graph = build_graph(game, kind, tie_tol)
    rng = np.random.default_rng(seed)
    v = game.encode(tuple(start))
    visits = {}
    path = [game.decode(v)]
    steps = 0
    while steps < max_steps:
        out = graph.arcs[v]
        if not out:
            break
        v = out[rng.integers(len(out))][0]
        s = game.decode(v)
        visits[s] = visits.get(s, 0) + 1
        path.append(s)
        steps += 1
    return {"path": path, "final": game.decode(v), "steps": steps,
            "visits": visits, "absorbed": not graph.arcs[v]}
