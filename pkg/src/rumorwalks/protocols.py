"""Round-synchronous broadcast protocols on connected graphs.

Four processes share the same round structure (round 0 is initial state,
rounds 1, 2, ... are synchronous updates):

* push: every vertex informed in an earlier round samples one uniform
  neighbor; sampled vertices become informed.
* push-pull: every vertex samples one uniform neighbor each round; when
  exactly one endpoint of a contact was informed before the round, the other
  endpoint becomes informed.
* visit-exchange: agents perform independent random walks; an agent informed
  in an earlier round informs the vertex it lands on, and any agent standing
  on an informed vertex becomes informed the same round.  Completion: all
  vertices informed.
* meet-exchange: agents walk as above but only agents carry information.
  Agents starting on the source are informed at round 0; otherwise the first
  round in which agents visit the source informs exactly those agents, and
  the source is permanently disarmed afterwards.  Co-located agents exchange:
  an agent informed in an earlier round informs every agent sharing its
  vertex.  No information chains within a round.  Completion: all agents
  informed.

Walks are simple by default; lazy walks stay put with probability 1/2 and
are needed on bipartite graphs where meet-exchange would otherwise deadlock
on walk parity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .graphs import Graph
from .rng import SimRng, place_stationary

__all__ = [
    "AgentConfig",
    "ProtocolTrace",
    "BroadcastResult",
    "SharedWalkResult",
    "default_round_cap",
    "place_agents",
    "run_push",
    "run_push_pull",
    "run_visit_exchange",
    "run_meet_exchange",
    "run_t_visit_exchange",
    "run_r_visit_exchange",
    "run_shared_visit_meet",
    "trace_events",
]

PLACEMENTS = ("stationary", "one-per-vertex")


@dataclass(frozen=True)
class AgentConfig:
    """Walker population: how many agents, where they start, lazy or not."""
    count: int
    placement: str = "stationary"
    lazy: bool = False

    def __post_init__(self):
        if self.count < 0:
            raise InvalidParameterError(f"agent count must be >= 0, got {self.count}")
        if self.placement not in PLACEMENTS:
            raise InvalidParameterError(
                f"placement must be one of {PLACEMENTS}, got {self.placement!r}")


@dataclass
class ProtocolTrace:
    """Informing times and optional per-round retention.

    ``vertex_informed_at`` / ``agent_informed_at`` hold the round each vertex
    or agent became informed, -1 meaning never.  meet-exchange does not
    inform vertices; its vertex array marks only the source at round 0.
    ``source_trigger_round`` is the single round (if any) in which the
    meet-exchange source informed its first visitors.
    """
    rounds: int
    vertex_informed_at: np.ndarray | None = None
    agent_informed_at: np.ndarray | None = None
    positions: list | None = None
    visit_counts: list | None = None
    source_trigger_round: int | None = None


@dataclass
class BroadcastResult:
    """Outcome of one protocol run.

    ``broadcast_time`` is None when the run hit its round cap before
    completing.  ``rounds`` counts rounds actually executed.
    """
    broadcast_time: int | None
    completion_kind: str
    rounds: int
    trace: ProtocolTrace | None = None
    removal_log: list = field(default_factory=list)
    addition_log: list = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return self.broadcast_time is not None


@dataclass
class SharedWalkResult:
    """visit-exchange and meet-exchange driven by one shared walk realization."""
    visitx: BroadcastResult
    meetx: BroadcastResult
    visitx_agents_round: int | None


def default_round_cap(n: int) -> int:
    """Default hard stop: 64 * n * log2(n) rounds."""
    return max(64, int(64 * n * math.ceil(math.log2(max(n, 2)))))


def _check_source(graph: Graph, source: int) -> int:
    source = int(source)
    if not (0 <= source < graph.n):
        raise InvalidParameterError(
            f"source {source} out of range for n={graph.n}")
    return source


def place_agents(graph: Graph, config: AgentConfig, rng: SimRng) -> np.ndarray:
    """Initial agent positions.

    stationary: i.i.d. with probability degree(v)/(2m).
    one-per-vertex: agent i starts on vertex i (count must equal n).
    """
    if config.placement == "one-per-vertex":
        if config.count != graph.n:
            raise InvalidParameterError(
                f"one-per-vertex placement needs count == n "
                f"({config.count} != {graph.n})")
        return np.arange(graph.n, dtype=np.int64)
    return place_stationary(graph, rng.stream("placement"), config.count)


def _move(graph: Graph, pos: np.ndarray, walk_gen, lazy: bool, lazy_gen) -> np.ndarray:
    """Advance every walker one synchronous step."""
    if pos.size == 0 or graph.n == 1:
        return pos
    idx = walk_gen.integers(0, graph.degrees[pos])
    new = graph.indices[graph.indptr[pos] + idx]
    if lazy:
        stay = lazy_gen.random(pos.shape[0]) < 0.5
        new = np.where(stay, pos, new)
    return new


# -- vertex-only protocols ----------------------------------------------------

def run_push(graph: Graph, source: int, rng: SimRng,
             round_cap: int | None = None) -> BroadcastResult:
    """Push rumor spreading from ``source``.

    A vertex informed at round t starts sampling at round t + 1.
    """
    source = _check_source(graph, source)
    cap = default_round_cap(graph.n) if round_cap is None else int(round_cap)
    n = graph.n
    gen = rng.stream("push")
    informed_at = np.full(n, -1, dtype=np.int64)
    informed_at[source] = 0
    informed = np.array([source], dtype=np.int64)
    count, t = 1, 0
    while count < n and t < cap:
        t += 1
        idx = gen.integers(0, graph.degrees[informed])
        targets = graph.indices[graph.indptr[informed] + idx]
        fresh = np.unique(targets[informed_at[targets] == -1])
        if fresh.size:
            informed_at[fresh] = t
            informed = np.concatenate([informed, fresh])
            count += fresh.size
    done = count == n
    trace = ProtocolTrace(rounds=t, vertex_informed_at=informed_at)
    return BroadcastResult(int(informed_at.max()) if done else None,
                           "all-vertices", t, trace)


def run_push_pull(graph: Graph, source: int, rng: SimRng,
                  round_cap: int | None = None) -> BroadcastResult:
    """Push-pull rumor spreading: all vertices sample every round; a contact
    transfers the rumor when exactly one endpoint was informed before the
    round (no within-round chaining).
    """
    source = _check_source(graph, source)
    cap = default_round_cap(graph.n) if round_cap is None else int(round_cap)
    n = graph.n
    gen = rng.stream("pushpull")
    starts = graph.indptr[:-1]
    informed_at = np.full(n, -1, dtype=np.int64)
    informed_at[source] = 0
    count, t = 1, 0
    while count < n and t < cap:
        t += 1
        idx = gen.integers(0, graph.degrees)
        targets = graph.indices[starts + idx]
        was = informed_at >= 0
        pushed = targets[was]
        pushed = pushed[informed_at[pushed] == -1]
        pulled = np.nonzero(~was & was[targets])[0]
        fresh = np.unique(np.concatenate([pushed, pulled]))
        if fresh.size:
            informed_at[fresh] = t
            count += fresh.size
    done = count == n
    trace = ProtocolTrace(rounds=t, vertex_informed_at=informed_at)
    return BroadcastResult(int(informed_at.max()) if done else None,
                           "all-vertices", t, trace)


# -- agent protocols ----------------------------------------------------------

def _record(trace: ProtocolTrace, graph: Graph, pos: np.ndarray,
            positions: bool, counts: bool) -> None:
    if positions:
        trace.positions.append(pos.copy())
    if counts:
        trace.visit_counts.append(np.bincount(pos, minlength=graph.n))


def run_visit_exchange(graph: Graph, source: int, config: AgentConfig,
                       rng: SimRng, round_cap: int | None = None,
                       min_rounds: int = 0, record_positions: bool = False,
                       record_visit_counts: bool = False) -> BroadcastResult:
    """Visit-exchange broadcast; completes when every vertex is informed.

    Within a round, agent-to-vertex informing only uses agents informed in a
    previous round, while vertex-to-agent informing applies immediately, so
    an agent landing on an informed vertex is informed that same round.
    """
    source = _check_source(graph, source)
    cap = default_round_cap(graph.n) if round_cap is None else int(round_cap)
    n = graph.n
    pos = place_agents(graph, config, rng)
    walk_gen = rng.stream("walks")
    lazy_gen = rng.stream("lazy")

    v_inf = np.full(n, -1, dtype=np.int64)
    v_inf[source] = 0
    a_inf = np.full(config.count, -1, dtype=np.int64)
    a_inf[pos == source] = 0
    v_count = 1
    trace = ProtocolTrace(rounds=0, vertex_informed_at=v_inf,
                          agent_informed_at=a_inf,
                          positions=[] if record_positions else None,
                          visit_counts=[] if record_visit_counts else None)
    _record(trace, graph, pos, record_positions, record_visit_counts)
    t = 0
    while (v_count < n or t < min_rounds) and t < cap:
        t += 1
        pos = _move(graph, pos, walk_gen, config.lazy, lazy_gen)
        carriers = a_inf != -1  # informed before this round
        landed = pos[carriers]
        fresh_v = np.unique(landed[v_inf[landed] == -1])
        if fresh_v.size:
            v_inf[fresh_v] = t
            v_count += fresh_v.size
        newly_a = (a_inf == -1) & (v_inf[pos] != -1)
        a_inf[newly_a] = t
        _record(trace, graph, pos, record_positions, record_visit_counts)
    trace.rounds = t
    done = v_count == n
    return BroadcastResult(int(v_inf.max()) if done else None,
                           "all-vertices", t, trace)


def run_meet_exchange(graph: Graph, source: int, config: AgentConfig,
                      rng: SimRng, round_cap: int | None = None,
                      record_positions: bool = False) -> BroadcastResult:
    """Meet-exchange broadcast; completes when every agent is informed.

    Two agents meet when they occupy the same vertex at the end of a round.
    The source vertex informs only its first visitors (round 0 occupants, or
    else the first nonempty visiting round) and is disarmed afterwards.
    """
    source = _check_source(graph, source)
    cap = default_round_cap(graph.n) if round_cap is None else int(round_cap)
    n, a_count = graph.n, config.count
    pos = place_agents(graph, config, rng)
    walk_gen = rng.stream("walks")
    lazy_gen = rng.stream("lazy")

    a_inf = np.full(a_count, -1, dtype=np.int64)
    at_source = pos == source
    trigger_round = None
    if at_source.any():
        a_inf[at_source] = 0
        trigger_round = 0
    armed = trigger_round is None
    v_marker = np.full(n, -1, dtype=np.int64)
    v_marker[source] = 0
    informed = int((a_inf != -1).sum())
    trace = ProtocolTrace(rounds=0, vertex_informed_at=v_marker,
                          agent_informed_at=a_inf,
                          positions=[] if record_positions else None,
                          source_trigger_round=trigger_round)
    _record(trace, graph, pos, record_positions, False)
    t = 0
    while informed < a_count and t < cap:
        t += 1
        pos = _move(graph, pos, walk_gen, config.lazy, lazy_gen)
        prev = a_inf != -1
        occupied = np.zeros(n, dtype=bool)
        occupied[pos[prev]] = True
        newly = ~prev & occupied[pos]
        if armed:
            at_source = pos == source
            if at_source.any():
                newly |= ~prev & at_source
                armed = False
                trace.source_trigger_round = t
        if newly.any():
            a_inf[newly] = t
            informed += int(newly.sum())
        _record(trace, graph, pos, record_positions, False)
    trace.rounds = t
    done = informed == a_count
    bt = None
    if done:
        bt = int(a_inf.max()) if a_count else 0
    return BroadcastResult(bt, "all-agents", t, trace)


# -- tweaked visit-exchange variants -------------------------------------------

def _neighborhood_sums(graph: Graph, occ: np.ndarray) -> np.ndarray:
    """For each u: number of agents standing on neighbors of u."""
    return np.add.reduceat(occ[graph.indices], graph.indptr[:-1])


def _regular_degree(graph: Graph, what: str) -> int:
    if graph.n < 2 or not graph.is_regular:
        raise InvalidParameterError(f"{what} requires a regular graph with n >= 2")
    return int(graph.degrees[0])


def run_t_visit_exchange(graph: Graph, source: int, config: AgentConfig,
                         gamma: float, rng: SimRng,
                         round_cap: int | None = None,
                         min_rounds: int = 0) -> BroadcastResult:
    """Visit-exchange with a neighborhood crowding cap (regular graphs only).

    After every round t >= 0, while some vertex u has more than gamma * d
    agents standing in its neighborhood, the vertex with the largest excess
    (ties: lowest id) loses the highest-indexed agent currently on one of its
    neighbors.  Removals are logged as (round, capped_vertex, agent).
    Requires gamma >= 2e * count / n so the cap is not trivially violated in
    expectation.
    """
    source = _check_source(graph, source)
    d = _regular_degree(graph, "t-visit-exchange")
    n = graph.n
    if gamma < 2 * math.e * config.count / n:
        raise InvalidParameterError(
            f"gamma must be >= 2e*|A|/n = {2 * math.e * config.count / n:.4f}, "
            f"got {gamma}")
    cap_rounds = default_round_cap(n) if round_cap is None else int(round_cap)
    pos = place_agents(graph, config, rng)
    walk_gen = rng.stream("walks")
    lazy_gen = rng.stream("lazy")

    v_inf = np.full(n, -1, dtype=np.int64)
    v_inf[source] = 0
    a_inf = np.full(config.count, -1, dtype=np.int64)
    a_inf[pos == source] = 0
    alive = np.ones(config.count, dtype=bool)
    v_count = 1
    removals: list = []
    limit = gamma * d

    def enforce(t: int) -> None:
        occ = np.bincount(pos[alive], minlength=n)
        nsum = _neighborhood_sums(graph, occ)
        while True:
            u = int(np.argmax(nsum))
            if nsum[u] <= limit:
                break
            nbrs = graph.neighbors(u)
            cand = np.nonzero(alive & np.isin(pos, nbrs))[0]
            g = int(cand[-1])  # highest agent index in the neighborhood
            alive[g] = False
            x = int(pos[g])
            occ[x] -= 1
            nsum[graph.neighbors(x)] -= 1
            removals.append((t, u, g))

    enforce(0)
    t = 0
    while (v_count < n or t < min_rounds) and t < cap_rounds:
        t += 1
        # removed agents still consume walk randomness so that a run whose
        # cap never binds is draw-for-draw identical to plain visit-exchange
        pos = _move(graph, pos, walk_gen, config.lazy, lazy_gen)
        carriers = (a_inf != -1) & alive
        landed = pos[carriers]
        fresh_v = np.unique(landed[v_inf[landed] == -1])
        if fresh_v.size:
            v_inf[fresh_v] = t
            v_count += fresh_v.size
        newly_a = (a_inf == -1) & alive & (v_inf[pos] != -1)
        a_inf[newly_a] = t
        enforce(t)
    done = v_count == n
    trace = ProtocolTrace(rounds=t, vertex_informed_at=v_inf,
                          agent_informed_at=a_inf)
    return BroadcastResult(int(v_inf.max()) if done else None,
                           "all-vertices", t, trace, removal_log=removals)


def run_r_visit_exchange(graph: Graph, source: int, config: AgentConfig,
                         rng: SimRng, round_cap: int | None = None,
                         floor: float | None = None,
                         min_rounds: int = 0) -> BroadcastResult:
    """Visit-exchange with a neighborhood occupancy floor (regular graphs only).

    After every odd round t, while some vertex u has fewer than
    ``floor`` agents standing in its neighborhood (default floor:
    count * d / (2n), fixed from the initial population), a new agent is
    spawned on the lowest-indexed neighbor of the most deficient vertex
    (ties: lowest id).  The new agent adopts the informed state of the vertex
    it is placed on, as of the end of round t.  Additions are logged as
    (round, deficient_vertex, agent).
    """
    source = _check_source(graph, source)
    d = _regular_degree(graph, "r-visit-exchange")
    n = graph.n
    cap_rounds = default_round_cap(n) if round_cap is None else int(round_cap)
    if floor is None:
        floor = config.count * d / (2 * n)
    pos = place_agents(graph, config, rng)
    walk_gen = rng.stream("walks")
    lazy_gen = rng.stream("lazy")

    v_inf = np.full(n, -1, dtype=np.int64)
    v_inf[source] = 0
    a_inf = np.full(config.count, -1, dtype=np.int64)
    a_inf[pos == source] = 0
    v_count = 1
    additions: list = []

    def replenish(t: int):
        nonlocal pos, a_inf
        occ = np.bincount(pos, minlength=n)
        nsum = _neighborhood_sums(graph, occ)
        while True:
            deficit = floor - nsum
            u = int(np.argmax(deficit))
            if deficit[u] <= 0:
                break
            w = int(graph.indices[graph.indptr[u]])  # lowest-indexed neighbor
            g = pos.shape[0]
            pos = np.append(pos, w)
            a_inf = np.append(a_inf, t if v_inf[w] != -1 else -1)
            occ[w] += 1
            nsum[graph.neighbors(w)] += 1
            additions.append((t, u, g))

    t = 0
    while (v_count < n or t < min_rounds) and t < cap_rounds:
        t += 1
        pos = _move(graph, pos, walk_gen, config.lazy, lazy_gen)
        carriers = a_inf != -1
        landed = pos[carriers]
        fresh_v = np.unique(landed[v_inf[landed] == -1])
        if fresh_v.size:
            v_inf[fresh_v] = t
            v_count += fresh_v.size
        newly_a = (a_inf == -1) & (v_inf[pos] != -1)
        a_inf[newly_a] = t
        if t % 2 == 1:
            replenish(t)
    done = v_count == n
    trace = ProtocolTrace(rounds=t, vertex_informed_at=v_inf,
                          agent_informed_at=a_inf)
    return BroadcastResult(int(v_inf.max()) if done else None,
                           "all-vertices", t, trace, addition_log=additions)


# -- natural coupling of visit- and meet-exchange -------------------------------

def run_shared_visit_meet(graph: Graph, source: int, config: AgentConfig,
                          rng: SimRng,
                          round_cap: int | None = None) -> SharedWalkResult:
    """Run visit-exchange and meet-exchange over one shared walk realization.

    Both processes see identical placements and identical trajectories, which
    makes per-trial comparisons sharp: every agent is informed in
    visit-exchange no later than in meet-exchange, so the round when
    visit-exchange has informed all agents never exceeds the meet-exchange
    broadcast time.
    """
    source = _check_source(graph, source)
    cap = default_round_cap(graph.n) if round_cap is None else int(round_cap)
    n, a_count = graph.n, config.count
    pos = place_agents(graph, config, rng)
    walk_gen = rng.stream("walks")
    lazy_gen = rng.stream("lazy")

    vx_v = np.full(n, -1, dtype=np.int64)
    vx_v[source] = 0
    vx_a = np.full(a_count, -1, dtype=np.int64)
    vx_a[pos == source] = 0
    vx_vcount = 1

    mx_a = np.full(a_count, -1, dtype=np.int64)
    at_source = pos == source
    mx_trigger = 0 if at_source.any() else None
    if mx_trigger == 0:
        mx_a[at_source] = 0
    armed = mx_trigger is None
    mx_count = int((mx_a != -1).sum())

    t = 0
    while (vx_vcount < n or mx_count < a_count) and t < cap:
        t += 1
        pos = _move(graph, pos, walk_gen, config.lazy, lazy_gen)

        carriers = vx_a != -1
        landed = pos[carriers]
        fresh_v = np.unique(landed[vx_v[landed] == -1])
        if fresh_v.size:
            vx_v[fresh_v] = t
            vx_vcount += fresh_v.size
        vx_a[(vx_a == -1) & (vx_v[pos] != -1)] = t

        prev = mx_a != -1
        occupied = np.zeros(n, dtype=bool)
        occupied[pos[prev]] = True
        newly = ~prev & occupied[pos]
        if armed:
            at_source = pos == source
            if at_source.any():
                newly |= ~prev & at_source
                armed = False
                mx_trigger = t
        if newly.any():
            mx_a[newly] = t
            mx_count += int(newly.sum())

    vx_done = vx_vcount == n
    mx_done = mx_count == a_count
    vx_trace = ProtocolTrace(rounds=t, vertex_informed_at=vx_v,
                             agent_informed_at=vx_a)
    mx_marker = np.full(n, -1, dtype=np.int64)
    mx_marker[source] = 0
    mx_trace = ProtocolTrace(rounds=t, vertex_informed_at=mx_marker,
                             agent_informed_at=mx_a,
                             source_trigger_round=mx_trigger)
    visitx = BroadcastResult(int(vx_v.max()) if vx_done else None,
                             "all-vertices", t, vx_trace)
    mx_bt = (int(mx_a.max()) if a_count else 0) if mx_done else None
    meetx = BroadcastResult(mx_bt, "all-agents", t, mx_trace)
    agents_round = None
    if a_count == 0:
        agents_round = 0
    elif (vx_a != -1).all():
        agents_round = int(vx_a.max())
    return SharedWalkResult(visitx, meetx, agents_round)


def trace_events(trace: ProtocolTrace) -> list:
    """Informing events as (kind, id, round) triples, sorted by round."""
    events = []
    if trace.vertex_informed_at is not None:
        for v, r in enumerate(trace.vertex_informed_at.tolist()):
            if r >= 0:
                events.append(("vertex", v, r))
    if trace.agent_informed_at is not None:
        for g, r in enumerate(trace.agent_informed_at.tolist()):
            if r >= 0:
                events.append(("agent", g, r))
    events.sort(key=lambda e: (e[2], e[0], e[1]))
    return events
