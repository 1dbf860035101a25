"""Node balance, deficit and potential bookkeeping.

The danger of a node v with Maker-degree m and Breaker-degree b is measured
through its balance

    bal(v) = 8(n - b) / (q^2 (1-delta)(3+delta) - 4 m (2q - m)),

whose fresh-node value is p0 = 8n / (q^2 (1-delta)(3+delta)). The
balanced Breaker-degree deg*(v) is the Breaker-degree that would restore
bal(v) = p0, the deficit is d(v) = deg*(v) - deg_B(v), and the potential is
pot(v) = mu^(d(v)/q) for unsaturated nodes and 0 otherwise. Breaker's
strategy always claims an unclaimed edge maximizing pot(u) + pot(w).

:class:`NodePotentialTable` maintains all per-node values incrementally and
supports best-first extraction of the maximum-potential unclaimed edge
without scanning all O(n^2) pairs in the common case.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Optional

from .errors import (
    ExhaustedError,
    InvalidParametersError,
    OutOfRegimeError,
    SingularBalanceError,
)
from .game import GameState, Owner, edge_index

MU_PAPER = "paper"
MU_FIXED = "fixed"

# Turn interval between full recomputes of the potential-sum accumulator.
RESYNC_INTERVAL = 1024


@dataclass(frozen=True)
class PotentialParams:
    """Bias and potential constants for one game; single source of truth.

    ``q`` is an integer (the game needs integral moves); ``beta_eff`` is the
    realized bias ratio q^2/n that all constraint checks run against.
    ``mu_mode`` is ``"paper"`` for mu = 1 + 6 beta_eff ln(n) / (delta q) or
    ``"fixed"`` for an explicit mu > 1.
    """

    n: int
    q: int
    delta: float
    mu_mode: str
    mu: float
    beta_eff: float
    p0: float

    @property
    def ln_mu(self) -> float:
        return math.log(self.mu)


def make_params(
    n: int,
    q: Optional[int] = None,
    beta: Optional[float] = None,
    delta: float = 0.05,
    mu: "float | str" = MU_PAPER,
) -> PotentialParams:
    """Build and validate a :class:`PotentialParams`.

    Exactly one of ``q`` (integer bias) or ``beta`` (q = ceil(sqrt(beta n)))
    must be given. For beta_eff > 8/3 the constant delta must lie in the
    open interval (0, 1 - 8/(3 beta_eff)); below that threshold any
    delta in (0, 1) is accepted so off-regime sweeps remain expressible.
    Raises InvalidParametersError naming the violated constraint.
    """
    if n < 3:
        raise InvalidParametersError(f"n must be >= 3, got {n}")
    if (q is None) == (beta is None):
        raise InvalidParametersError("exactly one of q or beta must be given")
    if q is None:
        if beta <= 0:
            raise InvalidParametersError(f"beta must be positive, got {beta}")
        q = math.ceil(math.sqrt(beta * n))
    if q < 1:
        raise InvalidParametersError(f"q must be >= 1, got {q}")
    beta_eff = q * q / n
    if not 0.0 < delta < 1.0:
        raise InvalidParametersError(f"delta must lie in (0, 1), got {delta}")
    if beta_eff > 8.0 / 3.0:
        limit = 1.0 - 8.0 / (3.0 * beta_eff)
        if delta >= limit:
            raise InvalidParametersError(
                f"delta must lie in (0, {limit:.6g}) for beta_eff={beta_eff:.6g}, "
                f"got {delta}"
            )
    if mu == MU_PAPER:
        mu_mode = MU_PAPER
        mu_value = 1.0 + 6.0 * beta_eff * math.log(n) / (delta * q)
    else:
        mu_mode = MU_FIXED
        mu_value = float(mu)
        if mu_value <= 1.0:
            raise InvalidParametersError(f"fixed mu must be > 1, got {mu_value}")
    p0 = compute_p0(n, q, delta)
    return PotentialParams(
        n=n, q=q, delta=delta, mu_mode=mu_mode, mu=mu_value, beta_eff=beta_eff, p0=p0
    )


def compute_p0(n: int, q: int, delta: float) -> float:
    """Fresh-node balance p0 = 8n / (q^2 (1-delta)(3+delta))."""
    return 8.0 * n / (q * q * (1.0 - delta) * (3.0 + delta))


def check_remark_p0(params: PotentialParams) -> bool:
    """True iff 8/(3 beta) < p0 < 8/(3 beta (1-delta)) < 1 all hold strictly."""
    beta = params.beta_eff
    lo = 8.0 / (3.0 * beta)
    hi = 8.0 / (3.0 * beta * (1.0 - params.delta))
    return lo < params.p0 < hi < 1.0


def balance(state: GameState, params: PotentialParams, v: int) -> float:
    """Balance of node v. Diagnostic only; raises on a singular denominator.

    The denominator vanishes exactly at Maker-degrees q(1-delta)/2 and
    q(3+delta)/2, which normal play never reaches.
    """
    m = state.deg_m[v]
    denom = params.q * params.q * (1.0 - params.delta) * (3.0 + params.delta) - 4.0 * m * (
        2.0 * params.q - m
    )
    if denom == 0.0:
        raise SingularBalanceError(
            f"balance denominator vanished at node {v} with deg_M={m} "
            f"(singular points q(1-delta)/2 and q(3+delta)/2)"
        )
    return 8.0 * (params.n - state.deg_b[v]) / denom


def balanced_breaker_degree(state: GameState, params: PotentialParams, v: int) -> float:
    """Breaker-degree that would restore bal(v) = p0 at v's Maker-degree."""
    m = state.deg_m[v]
    q = params.q
    return params.n - params.p0 * (
        q * q * (1.0 - params.delta) * (3.0 + params.delta) / 8.0 - m * (q - m / 2.0)
    )


def deficit(state: GameState, params: PotentialParams, v: int) -> float:
    """d(v) = deg*(v) - deg_B(v)."""
    return balanced_breaker_degree(state, params, v) - state.deg_b[v]


def node_deficit_value(deg_m: int, deg_b: int, p0: float, q: int) -> float:
    """Deficit as a closed function of the degrees.

    Algebraically identical to ``deficit`` because p0 * q^2(1-d)(3+d)/8 = n;
    this form is exact at fresh nodes and drift-free. The expression must
    stay literally identical to the one in :mod:`triangle_game.kernel` so
    both engines produce bit-equal potentials.
    """
    return p0 * deg_m * (q - 0.5 * deg_m) - deg_b


def node_potential_value(d: float, q: int, ln_mu: float) -> float:
    """mu^(d/q), evaluated as exp((d/q) ln mu); saturates to inf, never raises."""
    x = (d / q) * ln_mu
    if x > 709.0:
        return math.inf
    return math.exp(x)


def pot_node(state: GameState, params: PotentialParams, v: int) -> float:
    """Potential of node v: 0 when saturated, else mu^(d(v)/q)."""
    if state.is_saturated(v):
        return 0.0
    return node_potential_value(deficit(state, params, v), params.q, params.ln_mu)


def pot_edge(state: GameState, params: PotentialParams, u: int, v: int) -> float:
    """Potential of the unclaimed edge {u, v}: pot(u) + pot(v).

    Callers never rank claimed edges; an unclaimed edge cannot have a
    saturated endpoint, so a zero summand indicates a bookkeeping bug.
    """
    return pot_node(state, params, u) + pot_node(state, params, v)


def total_potential(state: GameState, params: PotentialParams) -> float:
    """Sum of all node potentials, recomputed from scratch."""
    return sum(pot_node(state, params, v) for v in range(state.n))


@dataclass(frozen=True)
class BalanceInterpretation:
    """Edge-budget reading of the balance value for one node.

    ``b_v`` is the number of Breaker edges still needed at v to cap its
    Maker-degree below q(1-delta)/2, ``b_total`` the Breaker edges available
    until Maker could reach that cap, ``c_prime`` the closing-edge overhead,
    ``a_prime = b_total - c_prime``, and ``ratio = b_v / a_prime`` is the
    quantity that bal(v) approximates as n grows.
    """

    b_v: float
    b_total: float
    c_prime: float
    a_prime: float
    ratio: float


def balance_interpretation(
    state: GameState, params: PotentialParams, v: int
) -> BalanceInterpretation:
    """Evaluate the budget approximation of bal(v).

    Requires deg_M(v) < q(1-delta)/2 and a nonnegative remaining budget;
    otherwise the reading is meaningless and OutOfRegimeError is raised.
    """
    m = state.deg_m[v]
    q = params.q
    half_star = q * (1.0 - params.delta) / 2.0
    if not m < half_star:
        raise OutOfRegimeError(
            f"node {v} has deg_M={m} >= q(1-delta)/2 = {half_star:.6g}"
        )
    b_v = params.n - half_star - state.deg_b[v]
    if b_v < 0:
        raise OutOfRegimeError(
            f"node {v} already has deg_B={state.deg_b[v]} > n - q(1-delta)/2; "
            f"budget B_v is negative"
        )
    b_total = q * q * (1.0 - params.delta) / 2.0 - q * m
    ceil_half = math.ceil(half_star)
    c_prime = (ceil_half - 1) * ceil_half / 2.0 - (m + 1) * m / 2.0
    a_prime = b_total - c_prime
    return BalanceInterpretation(
        b_v=b_v, b_total=b_total, c_prime=c_prime, a_prime=a_prime, ratio=b_v / a_prime
    )


def diagnostic_dump(state: GameState, params: PotentialParams) -> dict:
    """Per-node state snapshot as a JSON-ready dict."""
    nodes = []
    for v in range(state.n):
        nodes.append(
            {
                "v": v,
                "deg_M": state.deg_m[v],
                "deg_B": state.deg_b[v],
                "deg_star": balanced_breaker_degree(state, params, v),
                "d": deficit(state, params, v),
                "pot": pot_node(state, params, v),
            }
        )
    return {
        "header": {
            "n": params.n,
            "q": params.q,
            "beta_eff": params.beta_eff,
            "delta": params.delta,
            "mu": params.mu,
            "p0": params.p0,
        },
        "nodes": nodes,
    }


class NodePotentialTable:
    """Incrementally maintained deficits, potentials and their running sum.

    Wraps one :class:`GameState`. Every claim must go through
    :meth:`claim` (or :meth:`on_claim` right after a direct state change) so
    the cached values stay exact: deficits are recomputed from the degrees
    on every touch, so only the total-potential accumulator can drift, and
    it is resynced every RESYNC_INTERVAL turns via :meth:`resync`.

    A lazy max-heap over (pot, node) drives best-first selection of the
    maximum-potential unclaimed edge; stale heap entries are skipped via
    per-node version stamps and the heap is compacted when it grows past
    4n entries.
    """

    def __init__(self, state: GameState, params: PotentialParams):
        self.state = state
        self.params = params
        n = state.n
        self._p0 = params.p0
        self._q = params.q
        self._ln_mu = params.ln_mu
        self.d = [0.0] * n
        self.pot = [0.0] * n
        self.pot_total = 0.0
        self._version = [0] * n
        self._heap: list[tuple[float, int, int]] = []
        self._claims = 0
        self._rebuild()

    def _rebuild(self) -> None:
        state = self.state
        total = 0.0
        heap = []
        for v in range(state.n):
            dv = node_deficit_value(state.deg_m[v], state.deg_b[v], self._p0, self._q)
            self.d[v] = dv
            if state.is_saturated(v):
                self.pot[v] = 0.0
            else:
                pv = node_potential_value(dv, self._q, self._ln_mu)
                self.pot[v] = pv
                total += pv
                heap.append((-pv, v, self._version[v]))
        heapq.heapify(heap)
        self._heap = heap
        self.pot_total = total

    def resync(self) -> None:
        """Recompute the potential-sum accumulator from the cached values."""
        self.pot_total = sum(self.pot)

    def maybe_resync(self, turn: int) -> None:
        if turn % RESYNC_INTERVAL == 0:
            self.resync()

    # -- claims ------------------------------------------------------------

    def claim(self, player: Owner, u: int, v: int) -> int:
        """Apply a claim to the underlying state and update the cache."""
        idx = self.state.apply_claim(player, u, v)
        self.on_claim(u, v)
        return idx

    def on_claim(self, u: int, v: int) -> None:
        """Refresh both endpoints after their degrees changed by one claim."""
        for w in (u, v):
            self._touch(w)
        self._claims += 1
        if len(self._heap) > 4 * self.state.n + 64:
            self._compact()

    def _touch(self, w: int) -> None:
        state = self.state
        dw = node_deficit_value(state.deg_m[w], state.deg_b[w], self._p0, self._q)
        self.d[w] = dw
        old = self.pot[w]
        self._version[w] += 1
        if state.is_saturated(w):
            new = 0.0
        else:
            new = node_potential_value(dw, self._q, self._ln_mu)
            heapq.heappush(self._heap, (-new, w, self._version[w]))
        self.pot[w] = new
        self.pot_total += new - old

    def _compact(self) -> None:
        state = self.state
        heap = [
            (-self.pot[v], v, self._version[v])
            for v in range(state.n)
            if not state.is_saturated(v)
        ]
        heapq.heapify(heap)
        self._heap = heap

    # -- selection ---------------------------------------------------------

    def select_max_potential_unclaimed_edge(self) -> tuple[int, int, int]:
        """Unclaimed edge maximizing pot(u) + pot(v); ties by smallest index.

        Best-first enumeration over node pairs in descending potential
        order, pruned by the pair bound, so the full O(n^2) pair scan only
        happens when nearly every high-potential pair is already claimed.
        Returns (edge_index, u, v); raises ExhaustedError when no unclaimed
        edge remains.
        """
        state = self.state
        if state.unclaimed_edges == 0:
            raise ExhaustedError("no unclaimed edges remain")
        n = state.n
        owner = state.owner
        pot = self.pot
        heap = self._heap
        version = self._version
        top: list[int] = []  # node ids in descending (pot, -id) order
        harvested: list[tuple[float, int, int]] = []

        def ensure(k: int) -> bool:
            while len(top) <= k:
                if not heap:
                    return False
                entry = heapq.heappop(heap)
                negpot, node, ver = entry
                if ver != version[node]:
                    continue
                top.append(node)
                harvested.append(entry)
            return True

        result = None
        if ensure(1):
            a, b = top[0], top[1]
            first = (
                -(pot[a] + pot[b]),
                edge_index(n, min(a, b), max(a, b)),
                0,
                1,
            )
            pairs = [first]
            while pairs:
                negsum, eidx, i, j = heapq.heappop(pairs)
                if ensure(j + 1):
                    a, b = top[i], top[j + 1]
                    heapq.heappush(
                        pairs,
                        (
                            -(pot[a] + pot[b]),
                            edge_index(n, min(a, b), max(a, b)),
                            i,
                            j + 1,
                        ),
                    )
                if j == i + 1 and ensure(j + 1):
                    a, b = top[i + 1], top[j + 1]
                    heapq.heappush(
                        pairs,
                        (
                            -(pot[a] + pot[b]),
                            edge_index(n, min(a, b), max(a, b)),
                            i + 1,
                            j + 1,
                        ),
                    )
                if owner[eidx] == Owner.UNCLAIMED:
                    a, b = top[i], top[j]
                    result = (eidx, min(a, b), max(a, b))
                    break
        for entry in harvested:
            heapq.heappush(heap, entry)
        if result is None:
            raise ExhaustedError(
                "pair enumeration exhausted with unclaimed edges remaining; "
                "potential table out of sync"
            )
        return result
