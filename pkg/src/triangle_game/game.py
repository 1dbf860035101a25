"""Board state for the biased (n, q) triangle game on K_n.

Maker claims one edge per turn, Breaker claims q. Maker wins by owning all
three edges of a triangle; Breaker wins if the board fills up without one.
Edges are identified by the lexicographic rank of their (min, max) node pair,
so a position is a flat array of owners plus per-node degree bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Iterator, Optional

from .errors import IllegalMoveError, InvalidNodeError


class Owner(IntEnum):
    """Ownership of a single edge. Ownership never reverts."""

    UNCLAIMED = 0
    MAKER = 1
    BREAKER = 2


PLAYER_CHARS = {Owner.MAKER: "M", Owner.BREAKER: "B"}
CHAR_PLAYERS = {"M": Owner.MAKER, "B": Owner.BREAKER}


def num_edges(n: int) -> int:
    return n * (n - 1) // 2


def edge_index(n: int, u: int, v: int) -> int:
    """Lexicographic rank of the unordered pair {u, v} among all pairs of [0, n).

    Raises InvalidNodeError for u == v or out-of-range nodes.
    """
    if u == v:
        raise InvalidNodeError(f"edge endpoints must differ, got ({u}, {v})")
    if not (0 <= u < n and 0 <= v < n):
        raise InvalidNodeError(f"nodes ({u}, {v}) out of range for n={n}")
    if u > v:
        u, v = v, u
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def edge_endpoints(n: int, index: int) -> tuple[int, int]:
    """Inverse of edge_index; round-trips for every valid index."""
    if not (0 <= index < num_edges(n)):
        raise InvalidNodeError(f"edge index {index} out of range for n={n}")
    u = 0
    # Row u covers indices [offset, offset + n - 1 - u).
    offset = 0
    while index >= offset + (n - 1 - u):
        offset += n - 1 - u
        u += 1
    return u, u + 1 + (index - offset)


def all_edges(n: int) -> Iterator[tuple[int, int]]:
    """All node pairs of K_n in edge-index order."""
    for u in range(n):
        for v in range(u + 1, n):
            yield u, v


@dataclass
class ClosingRequirement:
    """Closing edges demanded by a fresh Maker edge, partitioned by status.

    Each entry is (edge_index, head, tail): the head is the endpoint of the
    Maker edge the closing edge is incident in, the tail the third node of
    the blocked path. ``maker_owned`` non-empty means Maker already owns a
    triangle through the new edge.
    """

    unclaimed: list[tuple[int, int, int]] = field(default_factory=list)
    breaker_owned: list[tuple[int, int, int]] = field(default_factory=list)
    maker_owned: list[tuple[int, int, int]] = field(default_factory=list)

    def total(self) -> int:
        return len(self.unclaimed) + len(self.breaker_owned) + len(self.maker_owned)


class GameState:
    """Full ownership state of one (n, q) triangle game.

    Keeps per-node Maker/Breaker degrees and Maker adjacency sets in sync
    with the flat edge-owner array on every claim. Instances are plain
    values: deep-copy with :meth:`copy`, no shared mutable internals.
    """

    __slots__ = (
        "n",
        "q",
        "owner",
        "deg_m",
        "deg_b",
        "maker_adj",
        "turn",
        "unclaimed_edges",
        "moves",
        "_triangle",
    )

    def __init__(self, n: int, q: int):
        if n < 3:
            raise InvalidNodeError(f"need at least 3 nodes, got n={n}")
        if q < 1:
            raise InvalidNodeError(f"Breaker bias must be >= 1, got q={q}")
        self.n = n
        self.q = q
        self.owner = bytearray(num_edges(n))
        self.deg_m = [0] * n
        self.deg_b = [0] * n
        self.maker_adj: list[set[int]] = [set() for _ in range(n)]
        self.turn = 0
        self.unclaimed_edges = num_edges(n)
        self.moves: list[tuple[int, Owner, int, int]] = []
        self._triangle: Optional[tuple[int, int, int]] = None

    def copy(self) -> "GameState":
        dup = GameState.__new__(GameState)
        dup.n = self.n
        dup.q = self.q
        dup.owner = bytearray(self.owner)
        dup.deg_m = list(self.deg_m)
        dup.deg_b = list(self.deg_b)
        dup.maker_adj = [set(s) for s in self.maker_adj]
        dup.turn = self.turn
        dup.unclaimed_edges = self.unclaimed_edges
        dup.moves = list(self.moves)
        dup._triangle = self._triangle
        return dup

    # -- queries -----------------------------------------------------------

    def edge_index(self, u: int, v: int) -> int:
        return edge_index(self.n, u, v)

    def edge_owner(self, u: int, v: int) -> Owner:
        return Owner(self.owner[edge_index(self.n, u, v)])

    def unclaimed_degree(self, v: int) -> int:
        """Number of unclaimed edges incident in v."""
        return (self.n - 1) - self.deg_m[v] - self.deg_b[v]

    def is_saturated(self, v: int) -> bool:
        return self.deg_m[v] + self.deg_b[v] == self.n - 1

    def maker_edge_count(self) -> int:
        return sum(self.deg_m) // 2

    def breaker_edge_count(self) -> int:
        return sum(self.deg_b) // 2

    def has_maker_triangle(self) -> Optional[tuple[int, int, int]]:
        """Some triangle with all three edges Maker-owned, or None.

        Detection is incremental: each Maker claim intersects the Maker
        adjacency of its endpoints, so this is a cached lookup.
        """
        return self._triangle

    def iter_unclaimed(self) -> Iterator[tuple[int, int, int]]:
        """Yield (edge_index, u, v) for every unclaimed edge."""
        owner = self.owner
        idx = 0
        for u in range(self.n):
            for v in range(u + 1, self.n):
                if owner[idx] == 0:
                    yield idx, u, v
                idx += 1

    # -- mutation ----------------------------------------------------------

    def apply_claim(self, player: Owner, u: int, v: int) -> int:
        """Claim the unclaimed edge {u, v} for ``player``; returns its index.

        Degrees, Maker adjacency and the triangle cache are updated; raises
        IllegalMoveError naming the offender if the edge is already claimed.
        """
        idx = edge_index(self.n, u, v)
        current = self.owner[idx]
        if current != Owner.UNCLAIMED:
            raise IllegalMoveError(
                f"{PLAYER_CHARS[player]} claimed edge ({u},{v}) already owned by "
                f"{Owner(current).name}"
            )
        if player == Owner.UNCLAIMED:
            raise IllegalMoveError("cannot claim an edge for UNCLAIMED")
        self.owner[idx] = player
        self.unclaimed_edges -= 1
        if player == Owner.MAKER:
            if self._triangle is None:
                common = self.maker_adj[u] & self.maker_adj[v]
                if common:
                    w = min(common)
                    self._triangle = tuple(sorted((u, v, w)))  # type: ignore[assignment]
            self.deg_m[u] += 1
            self.deg_m[v] += 1
            self.maker_adj[u].add(v)
            self.maker_adj[v].add(u)
        else:
            self.deg_b[u] += 1
            self.deg_b[v] += 1
        self.moves.append((self.turn, player, min(u, v), max(u, v)))
        return idx

    def required_closing_edges(self, u: int, v: int) -> ClosingRequirement:
        """Closing edges for the new Maker paths through Maker edge {u, v}.

        The edge {u, v} must already be claimed by Maker. For every prior
        Maker-neighbor x of v the path (x, v, u) needs {x, u} (head u), and
        for every prior Maker-neighbor y of u the path (y, u, v) needs
        {y, v} (head v). Entries are listed head-u first, tails ascending.
        """
        req = ClosingRequirement()
        for head, other in ((u, v), (v, u)):
            for tail in sorted(self.maker_adj[other]):
                if tail == head:
                    continue
                idx = edge_index(self.n, head, tail)
                entry = (idx, head, tail)
                status = self.owner[idx]
                if status == Owner.UNCLAIMED:
                    req.unclaimed.append(entry)
                elif status == Owner.BREAKER:
                    req.breaker_owned.append(entry)
                else:
                    req.maker_owned.append(entry)
        return req


def format_move_log(moves: Iterable[tuple[int, Owner, int, int]]) -> str:
    """Serialize moves as ``turn,player,u,v`` lines with player in {M, B}."""
    lines = []
    for turn, player, u, v in moves:
        lines.append(f"{turn},{PLAYER_CHARS[Owner(player)]},{u},{v}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_move_log(text: str) -> list[tuple[int, Owner, int, int]]:
    moves = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 4 or parts[1] not in CHAR_PLAYERS:
            raise ValueError(f"bad move log line {lineno}: {line!r}")
        moves.append(
            (int(parts[0]), CHAR_PLAYERS[parts[1]], int(parts[2]), int(parts[3]))
        )
    return moves
