"""Per-turn potential-change accounting and runtime checks of the analysis.

Every completed turn decomposes the potential change into the Maker-move
increase ``inc`` and the Breaker-move decreases, split by cause: free edges
(``dec_free``), closing edges at their head (``dec_heads``, further split
into ``utt`` and ``ott``) and at their tail (``dec_tails``), plus the extra
drop when a claim saturates a node (``dec_zero``). With a damping constant
eta the main and rest parts are

    critdiff = inc - utt - (1 - eta) dec_free
    restdiff = ott + dec_tails + eta dec_free + dec_zero

and POT_t - POT_{t-1} = critdiff - restdiff holds identically; a turn is
critical when critdiff > 0. The episode tracker watches the window opened
when POT first exceeds n and closes it at the earliest of three stopping
rules, asserting that the total potential returned to its pre-window level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import InvalidParametersError, ReplayError
from .game import GameState, Owner, edge_endpoints
from .potential import (
    NodePotentialTable,
    PotentialParams,
    node_deficit_value,
    node_potential_value,
)
from .strategies import BreakerTurnPlan

IDENTITY_RTOL = 1e-6
CHECK_RTOL = 1e-9
EPISODE_TOL = 1e-6


@dataclass
class TurnLedger:
    """Decomposition of one turn's potential change.

    The per-node breakdown is kept for the two Maker-edge endpoints only;
    every other node has zero ``inc`` and zero head decrease.
    """

    turn: int
    maker_u: int
    maker_v: int
    f: int
    isolation_turn: bool
    shortfall: int
    pot_before: float
    pot_after: float
    pot_u_before: float
    pot_v_before: float
    inc: float
    dec_free: float
    dec_heads: float
    utt: float
    ott: float
    dec_tails: float
    dec_zero: float
    inc_u: float
    inc_v: float
    dec_heads_u: float
    dec_heads_v: float
    critdiff: float
    restdiff: float
    critical: bool

    @property
    def pot_em_before(self) -> float:
        return self.pot_u_before + self.pot_v_before

    def identity_residual(self) -> float:
        """|(POT_t - POT_{t-1}) - (critdiff - restdiff)|."""
        return abs((self.pot_after - self.pot_before) - (self.critdiff - self.restdiff))


def crit_rest_diff(
    inc: float, utt: float, ott: float, dec_free: float, dec_tails: float,
    dec_zero: float, eta: float,
) -> tuple[float, float]:
    critdiff = inc - utt - (1.0 - eta) * dec_free
    restdiff = ott + dec_tails + eta * dec_free + dec_zero
    return critdiff, restdiff


def decompose_turn(
    state_before: GameState,
    params: PotentialParams,
    eta: float,
    plan: BreakerTurnPlan,
    maker_u: int,
    maker_v: int,
) -> TurnLedger:
    """Replay one turn edge by edge and attribute every potential change.

    ``state_before`` is the position before the Maker edge; it is copied,
    never mutated. For each claim the balance-driven change of each endpoint
    is computed from the deficit alone; if the claim saturates the endpoint
    the remaining drop to zero goes to ``dec_zero``.
    """
    state = state_before.copy()
    p0, q, ln_mu = params.p0, params.q, params.ln_mu

    def pot_of(w: int) -> float:
        if state.is_saturated(w):
            return 0.0
        return node_potential_value(
            node_deficit_value(state.deg_m[w], state.deg_b[w], p0, q), q, ln_mu
        )

    pot_before_total = sum(pot_of(w) for w in range(state.n))
    pot_u_before = pot_of(maker_u)
    pot_v_before = pot_of(maker_v)

    inc = {maker_u: 0.0, maker_v: 0.0}
    dec_heads = {maker_u: 0.0, maker_v: 0.0}
    dec_free = 0.0
    dec_tails = 0.0
    dec_zero = 0.0

    def apply(player: Owner, idx: int, category: str, head: int) -> None:
        nonlocal dec_free, dec_tails, dec_zero
        u, v = edge_endpoints(state.n, idx)
        old = (pot_of(u), pot_of(v))
        state.apply_claim(player, u, v)
        for w, pot_old in zip((u, v), old):
            d_new = node_deficit_value(state.deg_m[w], state.deg_b[w], p0, q)
            bal_new = node_potential_value(d_new, q, ln_mu)
            if state.is_saturated(w):
                dec_zero += bal_new
            delta = bal_new - pot_old
            if player == Owner.MAKER:
                inc[w] = inc.get(w, 0.0) + delta
            else:
                decrease = -delta
                if category == "free":
                    dec_free += decrease
                elif w == head:
                    dec_heads[w] = dec_heads.get(w, 0.0) + decrease
                else:
                    dec_tails += decrease

    if plan.maker_u != maker_u or plan.maker_v != maker_v:
        raise ReplayError("plan does not belong to this Maker edge")
    apply(Owner.MAKER, state.edge_index(maker_u, maker_v), "maker", -1)
    for idx, head, _tail, _sub in plan.closing:
        apply(Owner.BREAKER, idx, "closing", head)
    for idx in plan.free:
        apply(Owner.BREAKER, idx, "free", -1)

    pot_after_total = sum(pot_of(w) for w in range(state.n))
    inc_u, inc_v = inc[maker_u], inc[maker_v]
    dh_u, dh_v = dec_heads[maker_u], dec_heads[maker_v]
    utt = min(inc_u, dh_u) + min(inc_v, dh_v)
    ott = (dh_u + dh_v) - utt
    total_inc = inc_u + inc_v
    critdiff, restdiff = crit_rest_diff(
        total_inc, utt, ott, dec_free, dec_tails, dec_zero, eta
    )
    return TurnLedger(
        turn=state_before.turn,
        maker_u=maker_u,
        maker_v=maker_v,
        f=plan.f,
        isolation_turn=plan.isolation_turn,
        shortfall=plan.shortfall,
        pot_before=pot_before_total,
        pot_after=pot_after_total,
        pot_u_before=pot_u_before,
        pot_v_before=pot_v_before,
        inc=total_inc,
        dec_free=dec_free,
        dec_heads=dh_u + dh_v,
        utt=utt,
        ott=ott,
        dec_tails=dec_tails,
        dec_zero=dec_zero,
        inc_u=inc_u,
        inc_v=inc_v,
        dec_heads_u=dh_u,
        dec_heads_v=dh_v,
        critdiff=critdiff,
        restdiff=restdiff,
        critical=critdiff > 0.0,
    )


# -- per-turn inequality checks ---------------------------------------------


def first_increase_bound(params: PotentialParams, f: int) -> float:
    """Growth factor mu^(p0 f / q) - 1 bounding inc - utt per unit potential."""
    return math.exp((params.p0 * f / params.q) * params.ln_mu) - 1.0


def check_first_increase(ledger: TurnLedger, params: PotentialParams) -> bool:
    """Both forms of the first-increase inequality for a non-isolation turn:

    per node: inc(w) - utt(w) <= (mu^(p0 f/q) - 1) pot_{t-1}(w), and the
    same bound summed over the Maker edge.
    """
    factor = first_increase_bound(params, ledger.f)

    def ok(lhs: float, ref: float) -> bool:
        bound = factor * ref
        return lhs <= bound + CHECK_RTOL * max(1.0, abs(bound))

    return (
        ok(ledger.inc_u - min(ledger.inc_u, ledger.dec_heads_u), ledger.pot_u_before)
        and ok(ledger.inc_v - min(ledger.inc_v, ledger.dec_heads_v), ledger.pot_v_before)
        and ok(ledger.inc - ledger.utt, ledger.pot_em_before)
    )


def critical_bound_factor(params: PotentialParams, eta: float) -> float:
    return params.mu * params.p0 / (1.0 - eta)


def check_critical_bound(
    table: NodePotentialTable, params: PotentialParams, eta: float, ledger: TurnLedger
) -> bool:
    """After a critical turn with f >= 2, every unclaimed edge must satisfy
    pot_t(e) < (mu p0 / (1-eta)) pot_{t-1}(e_M); checking the maximum-
    potential edge suffices. Vacuously true when the board is full."""
    if table.state.unclaimed_edges == 0:
        return True
    _idx, a, b = table.select_max_potential_unclaimed_edge()
    pot_max = table.pot[a] + table.pot[b]
    bound = critical_bound_factor(params, eta) * ledger.pot_em_before
    return pot_max < bound + CHECK_RTOL * max(1.0, abs(bound))


def tech1_check(mu: float, q: int, x: float, tol: float = 1e-12) -> bool:
    """x (1 - mu^(-1/q)) >= 1 - mu^(-x/q), within ``tol``."""
    lhs = x * (1.0 - mu ** (-1.0 / q))
    rhs = 1.0 - mu ** (-x / q)
    return lhs >= rhs - tol


def compute_c(mu_p0: float, eta: float, epsilon: float, gamma: float) -> int:
    """Critical-turn budget of an episode, with base-2 logarithms.

    Base 2 makes the numerator's leading 1 equal log(2), which is exactly
    the reserve the stacking bound ((1+eps) mu p0 / (1-eta))^c * 2 <= 1-gamma
    needs; a natural-log reading would under-provision by that factor.
    """
    if not 0.0 < gamma < 1.0:
        raise InvalidParametersError(f"gamma must lie in (0, 1), got {gamma}")
    if mu_p0 <= 0.0 or epsilon <= 0.0 or not 0.0 < eta < 1.0:
        raise InvalidParametersError(
            f"need mu*p0 > 0, epsilon > 0, eta in (0,1); got "
            f"mu_p0={mu_p0}, epsilon={epsilon}, eta={eta}"
        )
    denom = math.log2(1.0 - eta) - math.log2(1.0 + epsilon) - math.log2(mu_p0)
    if denom <= 0.0:
        raise InvalidParametersError(
            f"(1-eta)/((1+epsilon) mu p0) must exceed 1; got "
            f"{(1.0 - eta) / ((1.0 + epsilon) * mu_p0):.6g}"
        )
    return math.ceil((1.0 - math.log2(1.0 - gamma)) / denom)


@dataclass(frozen=True)
class EpisodeConstants:
    gamma: float
    epsilon: float
    eta: float
    c: int


def default_episode_constants(params: PotentialParams) -> EpisodeConstants:
    """Defaults when mu p0 < 1: eta = (1 - mu p0)/2, gamma = 1/2, and
    epsilon the largest power of two keeping at most 90% of the headroom
    left by the stopping-rule inequality."""
    mu_p0 = params.mu * params.p0
    if mu_p0 >= 1.0:
        raise InvalidParametersError(
            f"episode tracking needs mu * p0 < 1, got {mu_p0:.6g} "
            f"(use a fixed mu below {1.0 / params.p0:.6g})"
        )
    eta = (1.0 - mu_p0) / 2.0
    gamma = 0.5
    eps_max = (1.0 - eta) / mu_p0 - 1.0
    target = 0.9 * eps_max
    k = max(0, math.ceil(-math.log2(target)))
    while 2.0**-k > target:
        k += 1
    epsilon = 2.0**-k
    return EpisodeConstants(
        gamma=gamma, epsilon=epsilon, eta=eta, c=compute_c(mu_p0, eta, epsilon, gamma)
    )


@dataclass
class EpisodeOutcome:
    """One closed (or game-terminated) episode."""

    t0: int
    anchor: int
    pot_ref: float  # POT_{t0-1}
    anchor_ref: float  # pot_{t0-1}(anchor)
    t_star: Optional[int] = None
    triggers: tuple[str, ...] = ()
    pot_star: Optional[float] = None
    crit_count: int = 0
    inc_sum: float = 0.0
    violation: bool = False  # POT_{t*} > POT_{t0-1} beyond tolerance
    l8_violations: int = 0
    l9_violation: bool = False


class EpisodeTracker:
    """Detects the stopping rules of the potential-excess window.

    The window opens on the first turn with POT_t > n >= POT_{t-1} and
    closes at the earliest of: the anchor endpoint losing a (1-gamma)
    fraction of its potential (t1), any node gaining a (1+epsilon) factor
    over its running minimum since the opening (t2), or the c-th critical
    turn (t3). On closing, POT_{t*} <= POT_{t0-1} is asserted softly: a
    failure is recorded as a violation, never raised, because the guarantee
    is asymptotic and small boards may miss it.
    """

    def __init__(
        self,
        params: PotentialParams,
        constants: Optional[EpisodeConstants] = None,
        check_bounds: bool = True,
    ):
        self.params = params
        self.constants = constants or default_episode_constants(params)
        mu_p0 = params.mu * params.p0
        if mu_p0 >= 1.0:
            raise InvalidParametersError(f"mu * p0 must be < 1, got {mu_p0:.6g}")
        eta, eps = self.constants.eta, self.constants.epsilon
        if not 0.0 < eta < 1.0 - mu_p0:
            raise InvalidParametersError(
                f"eta must lie in (0, {1.0 - mu_p0:.6g}), got {eta}"
            )
        if (1.0 - eta) / ((1.0 + eps) * mu_p0) <= 1.0:
            raise InvalidParametersError(
                "epsilon too large: (1-eta)/((1+epsilon) mu p0) must exceed 1"
            )
        if self.constants.c < 1:
            raise InvalidParametersError("episode constant c must be >= 1")
        self.check_bounds = check_bounds
        self.outcomes: list[EpisodeOutcome] = []
        self._active: Optional[EpisodeOutcome] = None
        self._runmin: list[float] = []

    @property
    def active(self) -> bool:
        return self._active is not None

    @property
    def episode_id(self) -> int:
        """1-based id of the episode in progress or just recorded."""
        return len(self.outcomes) + (1 if self._active is not None else 0)

    def update(
        self, ledger: TurnLedger, table: NodePotentialTable, touched: list[int]
    ) -> str:
        """Advance by one completed turn; returns the CSV event token.

        ``touched`` are the nodes incident to any edge claimed this turn;
        only they can change potential, so the running minima and the t2
        test are restricted to them.
        """
        n = self.params.n
        cst = self.constants
        event = ""
        if self._active is None:
            if ledger.pot_after > n and ledger.pot_before <= n:
                anchor = (
                    ledger.maker_u
                    if ledger.pot_u_before >= ledger.pot_v_before
                    else ledger.maker_v
                )
                self._active = EpisodeOutcome(
                    t0=ledger.turn,
                    anchor=anchor,
                    pot_ref=ledger.pot_before,
                    anchor_ref=max(ledger.pot_u_before, ledger.pot_v_before),
                )
                self._runmin = list(table.pot)
                event = "t0"
                # t1 and t3 range over turns after t0 - 1, so they can fire
                # on the opening turn itself; t2 starts strictly after t0.
                triggers = []
                if ledger.critical:
                    self._active.crit_count = 1
                    self._active.inc_sum = ledger.inc
                    if self._active.crit_count >= cst.c:
                        triggers.append("t3")
                if table.pot[anchor] <= (1.0 - cst.gamma) * self._active.anchor_ref:
                    triggers.insert(0, "t1")
                self._check_l8(table, t2_fired=False)
                if triggers:
                    event = self._close(ledger, tuple(triggers))
            return event

        epi = self._active
        triggers = []
        if table.pot[epi.anchor] <= (1.0 - cst.gamma) * epi.anchor_ref:
            triggers.append("t1")
        t2_fired = False
        seen = set()
        for w in touched:
            if w in seen:
                continue
            seen.add(w)
            if table.pot[w] >= (1.0 + cst.epsilon) * self._runmin[w]:
                t2_fired = True
        if t2_fired:
            triggers.append("t2")
        for w in seen:
            if table.pot[w] < self._runmin[w]:
                self._runmin[w] = table.pot[w]
        if ledger.critical:
            epi.crit_count += 1
            epi.inc_sum += ledger.inc
            if epi.crit_count >= cst.c:
                triggers.append("t3")
        self._check_l8(table, t2_fired)
        if triggers:
            return self._close(ledger, tuple(triggers))
        return ""

    def _check_l8(self, table: NodePotentialTable, t2_fired: bool) -> None:
        """Stacking bound on the best unclaimed edge for every in-window
        turn before t2 fires."""
        if not self.check_bounds or t2_fired:
            return
        if table.state.unclaimed_edges == 0:
            return
        epi = self._active
        cst = self.constants
        _idx, a, b = table.select_max_potential_unclaimed_edge()
        pot_max = table.pot[a] + table.pot[b]
        factor = (1.0 + cst.epsilon) * self.params.mu * self.params.p0 / (1.0 - cst.eta)
        bound = factor ** max(epi.crit_count, 1) * 2.0 * epi.anchor_ref
        if pot_max >= bound + EPISODE_TOL * max(1.0, bound):
            epi.l8_violations += 1

    def _close(self, ledger: TurnLedger, triggers: tuple[str, ...]) -> str:
        epi = self._active
        epi.t_star = ledger.turn
        epi.triggers = triggers
        epi.pot_star = ledger.pot_after
        epi.violation = epi.pot_star > epi.pot_ref + EPISODE_TOL * max(1.0, epi.pot_ref)
        if self.check_bounds:
            l9_bound = 2.0 * self.constants.c * (self.params.mu - 1.0) * epi.anchor_ref
            epi.l9_violation = epi.inc_sum > l9_bound + EPISODE_TOL * max(1.0, l9_bound)
        self.outcomes.append(epi)
        self._active = None
        self._runmin = []
        return "violation" if epi.violation else "tstar"

    def finalize(self) -> None:
        """Record a still-open episode when the game ends before t*."""
        if self._active is not None:
            self.outcomes.append(self._active)
            self._active = None
            self._runmin = []


LEDGER_CSV_HEADER = (
    "turn,mu,mv,f,pot_before,pot_after,inc,dec_free,utt,ott,"
    "dec_tails,dec_zero,critdiff,restdiff,critical,episode_id,event"
)


def ledger_csv_row(ledger: TurnLedger, episode_id: str = "", event: str = "") -> str:
    cols = [
        str(ledger.turn),
        str(ledger.maker_u),
        str(ledger.maker_v),
        str(ledger.f),
        repr(ledger.pot_before),
        repr(ledger.pot_after),
        repr(ledger.inc),
        repr(ledger.dec_free),
        repr(ledger.utt),
        repr(ledger.ott),
        repr(ledger.dec_tails),
        repr(ledger.dec_zero),
        repr(ledger.critdiff),
        repr(ledger.restdiff),
        "1" if ledger.critical else "0",
        episode_id,
        event,
    ]
    return ",".join(cols)
