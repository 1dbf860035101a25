"""Breaker and Maker turn policies.

Breaker's potential strategy splits each turn in two parts: Part 1 closes
every new Maker path of length 2 through the fresh Maker edge (claiming a
substitute edge at the same head when a closing edge is already owned, or a
globally best edge on isolation turns), Part 2 repeatedly claims the
unclaimed edge of maximum potential. The classic baseline Breaker closes
paths and pads both endpoints of the Maker edge up to ceil(sqrt(n)) edges.

Maker policies all complete an available triangle first; otherwise they
play their signature move (fixed-hub star, uniform random, potential
attack, or greedy degree pairing).

Everything here is deterministic given the seed. The compiled engine in
:mod:`triangle_game.kernel` mirrors these rules move for move; change the
two modules together (see tests/test_kernel.py).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import GameError, ReplayError
from .game import GameState, Owner, edge_endpoints, edge_index, num_edges
from .potential import NodePotentialTable
from .rng import SplitMix64


class StrategyKind(str, Enum):
    BREAKER_POTENTIAL = "breaker-potential"
    BREAKER_CE = "breaker-ce"
    MAKER_CE_STAR = "maker-ce-star"
    MAKER_RANDOM = "maker-random"
    MAKER_MAX_POTENTIAL = "maker-max-potential"
    MAKER_GREEDY_DEGREE = "maker-greedy-degree"


MAKER_KINDS = (
    StrategyKind.MAKER_CE_STAR,
    StrategyKind.MAKER_RANDOM,
    StrategyKind.MAKER_MAX_POTENTIAL,
    StrategyKind.MAKER_GREEDY_DEGREE,
)
BREAKER_KINDS = (StrategyKind.BREAKER_POTENTIAL, StrategyKind.BREAKER_CE)


@dataclass(frozen=True)
class StrategyConfig:
    """One side's policy: kind, seed and per-kind options."""

    kind: StrategyKind
    seed: int = 0
    hub: int = 0  # initial hub for the star Maker

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "seed": self.seed, "hub": self.hub}

    @staticmethod
    def from_dict(data: dict) -> "StrategyConfig":
        return StrategyConfig(
            kind=StrategyKind(data["kind"]),
            seed=int(data.get("seed", 0)),
            hub=int(data.get("hub", 0)),
        )


@dataclass
class BreakerTurnPlan:
    """Everything Breaker claimed in one turn, in claim order.

    ``closing`` holds (edge_index, head, tail, substitute) tuples; isolation
    substitutes carry head = tail = -1 since they need not touch the Maker
    edge. ``f`` is the number of free edges (Part 2).
    """

    maker_u: int
    maker_v: int
    closing: list[tuple[int, int, int, bool]] = field(default_factory=list)
    free: list[int] = field(default_factory=list)
    isolation_turn: bool = False
    f: int = 0
    shortfall: int = 0
    truncated: bool = False

    def claimed_edges(self) -> list[int]:
        return [entry[0] for entry in self.closing] + list(self.free)


def _substitute_at_head(state: GameState, table: NodePotentialTable, head: int):
    """Unclaimed edge at ``head`` whose tail has maximum pot, ties by tail id."""
    best = None
    best_key = None
    for x in range(state.n):
        if x == head:
            continue
        idx = edge_index(state.n, min(head, x), max(head, x))
        if state.owner[idx] == Owner.UNCLAIMED:
            key = (-table.pot[x], x)
            if best_key is None or key < best_key:
                best_key = key
                best = (idx, head, x)
    return best


def breaker_potential_turn(
    table: NodePotentialTable, maker_u: int, maker_v: int
) -> BreakerTurnPlan:
    """Play one Breaker turn of the potential strategy; returns the plan.

    The Maker edge {maker_u, maker_v} must be the claim made immediately
    before. Claims are applied to the table's state as they are chosen, so
    each free-edge selection sees the updated potentials.
    """
    state = table.state
    q = state.q
    plan = BreakerTurnPlan(maker_u=maker_u, maker_v=maker_v)
    budget = min(q, state.unclaimed_edges)

    req = state.required_closing_edges(maker_u, maker_v)
    if req.maker_owned:
        raise GameError(
            "Breaker turn requested although Maker already owns a triangle "
            f"through ({maker_u},{maker_v})"
        )
    claimable = req.unclaimed
    if len(claimable) > budget:
        # Off-theorem regime: more new paths than Breaker edges. Close the
        # ones whose tails carry maximum potential; the rest stay open.
        ranked = sorted(claimable, key=lambda e: (-table.pot[e[2]], e[0]))
        plan.shortfall = len(claimable) - budget
        claimable = ranked[:budget]
    for idx, head, tail in claimable:
        u, v = edge_endpoints(state.n, idx)
        table.claim(Owner.BREAKER, u, v)
        plan.closing.append((idx, head, tail, False))
    if plan.shortfall == 0:
        for _idx, head, _tail in req.breaker_owned:
            if len(plan.closing) >= budget:
                break  # ragged final turn; the path itself is already closed
            sub = _substitute_at_head(state, table, head)
            if sub is not None:
                idx, h, x = sub
                table.claim(Owner.BREAKER, min(h, x), max(h, x))
                plan.closing.append((idx, h, x, True))
            else:
                plan.isolation_turn = True
                if state.unclaimed_edges == 0:
                    plan.truncated = True
                    break
                idx, a, b = table.select_max_potential_unclaimed_edge()
                table.claim(Owner.BREAKER, a, b)
                plan.closing.append((idx, -1, -1, True))

    while len(plan.closing) + len(plan.free) < budget:
        if state.unclaimed_edges == 0:
            plan.truncated = True
            break
        idx, a, b = table.select_max_potential_unclaimed_edge()
        table.claim(Owner.BREAKER, a, b)
        plan.free.append(idx)
    plan.f = len(plan.free)
    return plan


def _smallest_unclaimed_at(state: GameState, h: int) -> Optional[tuple[int, int, int]]:
    """Smallest-index unclaimed edge incident in h, scanning partners in
    edge-index order (all partners below h first, then above)."""
    for x in range(h):
        idx = edge_index(state.n, x, h)
        if state.owner[idx] == Owner.UNCLAIMED:
            return idx, x, h
    for x in range(h + 1, state.n):
        idx = edge_index(state.n, h, x)
        if state.owner[idx] == Owner.UNCLAIMED:
            return idx, h, x
    return None


def _smallest_unclaimed_global(state: GameState, start: int = 0):
    owner = state.owner
    for idx in range(start, num_edges(state.n)):
        if owner[idx] == Owner.UNCLAIMED:
            return idx
    return None


def breaker_ce_turn(
    table: NodePotentialTable, maker_u: int, maker_v: int
) -> BreakerTurnPlan:
    """Classic baseline Breaker turn.

    Closes all new paths through the Maker edge, then pads with the
    smallest-index unclaimed edges so that ceil(sqrt(n)) of this turn's
    claims are incident in maker_u and the remaining q - ceil(sqrt(n)) in
    maker_v, falling back to v and then to globally smallest-index edges
    when a node runs out. Padding edges are recorded as free edges.
    """
    state = table.state
    q = state.q
    n = state.n
    root = math.isqrt(n)
    if root * root < n:
        root += 1
    plan = BreakerTurnPlan(maker_u=maker_u, maker_v=maker_v)
    budget = min(q, state.unclaimed_edges)

    req = state.required_closing_edges(maker_u, maker_v)
    if req.maker_owned:
        raise GameError(
            "Breaker turn requested although Maker already owns a triangle "
            f"through ({maker_u},{maker_v})"
        )
    count = {maker_u: 0, maker_v: 0}
    for idx, head, tail in req.unclaimed:
        if len(plan.closing) >= budget:
            plan.shortfall += 1
            continue
        u, v = edge_endpoints(n, idx)
        table.claim(Owner.BREAKER, u, v)
        plan.closing.append((idx, head, tail, False))
        count[head] += 1

    def pad(h: int, target: int) -> None:
        while count[h] < target and len(plan.closing) + len(plan.free) < budget:
            found = _smallest_unclaimed_at(state, h)
            if found is None:
                return
            idx, a, b = found
            table.claim(Owner.BREAKER, a, b)
            plan.free.append(idx)
            count[h] += 1

    pad(maker_u, root)
    pad(maker_v, q - root)
    while len(plan.closing) + len(plan.free) < budget:
        idx = _smallest_unclaimed_global(state)
        if idx is None:
            plan.truncated = True
            break
        a, b = edge_endpoints(n, idx)
        table.claim(Owner.BREAKER, a, b)
        plan.free.append(idx)
    plan.f = len(plan.free)
    return plan


def find_open_completion(state: GameState) -> Optional[int]:
    """Smallest-index unclaimed edge that would complete a Maker triangle."""
    best = None
    for w in range(state.n):
        adj = sorted(state.maker_adj[w])
        for i, a in enumerate(adj):
            for b in adj[i + 1 :]:
                idx = edge_index(state.n, a, b)
                if state.owner[idx] == Owner.UNCLAIMED:
                    if best is None or idx < best:
                        best = idx
    return best


class MakerAgent:
    """Stateful Maker policy; all kinds try to finish a triangle first."""

    def __init__(self, config: StrategyConfig, table: NodePotentialTable):
        self.kind = config.kind
        self.table = table
        self.state = table.state
        self.rng = SplitMix64(config.seed)
        self.hub = config.hub % table.state.n
        self._hub_next = 0  # partner scan position, see _hub_edge

    def take_turn(self) -> tuple[int, int]:
        """Claim one Maker edge and return its endpoints."""
        state = self.state
        idx = find_open_completion(state)
        if idx is None:
            idx = self._signature_move()
        u, v = edge_endpoints(state.n, idx)
        self.table.claim(Owner.MAKER, u, v)
        return u, v

    def _signature_move(self) -> int:
        kind = self.kind
        if kind == StrategyKind.MAKER_CE_STAR:
            return self._hub_edge()
        if kind == StrategyKind.MAKER_RANDOM:
            return self._random_edge()
        if kind == StrategyKind.MAKER_MAX_POTENTIAL:
            return self.table.select_max_potential_unclaimed_edge()[0]
        if kind == StrategyKind.MAKER_GREEDY_DEGREE:
            return self._greedy_degree_edge()
        raise GameError(f"{kind} is not a Maker strategy")

    def _hub_edge(self) -> int:
        state = self.state
        if state.is_saturated(self.hub):
            # Re-fix the hub: maximum Maker-degree among nodes that still
            # have unclaimed edges, ties to the smallest id.
            best = None
            best_key = None
            for v in range(state.n):
                if state.unclaimed_degree(v) > 0:
                    key = (-state.deg_m[v], v)
                    if best_key is None or key < best_key:
                        best_key = key
                        best = v
            if best is None:
                raise GameError("no unclaimed edges remain")
            self.hub = best
            self._hub_next = 0
        h = self.hub
        # Partners in edge-index order; the scan position only moves
        # forward while the hub is fixed.
        while self._hub_next < state.n:
            x = self._hub_next
            if x != h:
                idx = edge_index(state.n, min(x, h), max(x, h))
                if state.owner[idx] == Owner.UNCLAIMED:
                    return idx
            self._hub_next += 1
        raise GameError(f"hub {h} saturated but not detected")

    def _random_edge(self) -> int:
        state = self.state
        total = num_edges(state.n)
        while True:
            idx = self.rng.next_below(total)
            if state.owner[idx] == Owner.UNCLAIMED:
                return idx

    def _greedy_degree_edge(self) -> int:
        state = self.state
        deg_m = state.deg_m
        best = None
        best_key = None
        for idx, u, v in state.iter_unclaimed():
            key = (-(deg_m[u] + deg_m[v]), idx)
            if best_key is None or key < best_key:
                best_key = key
                best = idx
        if best is None:
            raise GameError("no unclaimed edges remain")
        return best


class BreakerAgent:
    """Dispatches to the configured Breaker turn function."""

    def __init__(self, config: StrategyConfig, table: NodePotentialTable):
        if config.kind not in BREAKER_KINDS:
            raise GameError(f"{config.kind} is not a Breaker strategy")
        self.kind = config.kind
        self.table = table

    def take_turn(self, maker_u: int, maker_v: int) -> BreakerTurnPlan:
        if self.kind == StrategyKind.BREAKER_POTENTIAL:
            return breaker_potential_turn(self.table, maker_u, maker_v)
        return breaker_ce_turn(self.table, maker_u, maker_v)


@dataclass
class PlayedTurn:
    turn: int
    maker_u: int
    maker_v: int
    plan: Optional[BreakerTurnPlan]


def play_match(
    state: GameState,
    table: NodePotentialTable,
    maker: StrategyConfig,
    breaker: StrategyConfig,
    on_turn=None,
) -> tuple[Owner, list[PlayedTurn]]:
    """Drive one full game with the Python engine; returns (winner, turns).

    Maker wins the moment a triangle exists; Breaker wins once all edges
    are claimed without one. ``on_turn(state_before, played)`` is invoked
    after every completed turn with a pre-turn state copy for ledger work.
    This is the reference driver; the harness runs the compiled kernel.
    """
    maker_agent = MakerAgent(maker, table)
    breaker_agent = BreakerAgent(breaker, table)
    turns: list[PlayedTurn] = []
    while state.unclaimed_edges > 0:
        state.turn += 1
        before = state.copy() if on_turn is not None else None
        u, v = maker_agent.take_turn()
        if state.has_maker_triangle() is not None:
            turns.append(PlayedTurn(state.turn, u, v, None))
            return Owner.MAKER, turns
        if state.unclaimed_edges == 0:
            turns.append(PlayedTurn(state.turn, u, v, None))
            return Owner.BREAKER, turns
        plan = breaker_agent.take_turn(u, v)
        played = PlayedTurn(state.turn, u, v, plan)
        turns.append(played)
        table.maybe_resync(state.turn)
        if on_turn is not None:
            on_turn(before, played)
    return Owner.BREAKER, turns


def replay_plan(state: GameState, maker_u: int, maker_v: int, plan: BreakerTurnPlan):
    """Re-apply a recorded turn to ``state``; raises ReplayError on mismatch."""
    try:
        state.apply_claim(Owner.MAKER, maker_u, maker_v)
        for idx in plan.claimed_edges():
            u, v = edge_endpoints(state.n, idx)
            state.apply_claim(Owner.BREAKER, u, v)
    except GameError as exc:
        raise ReplayError(f"turn replay failed: {exc}") from exc
