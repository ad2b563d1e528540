"""Online planner: UCT search per casualty thread, root-parallel aggregation.

One search tree is grown per sampled future request thread. Trees are
open-loop: each iteration replays the action path from the root through the
generative process with the tree's rng stream, so stochastic outcomes are
resampled rather than tracked as chance nodes. Root-action value sums are
added across trees and the action with the greatest summed score wins.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

from .actions import ExchangeAction, action_catalog
from .casualty import CasualtyGenConfig, EvacRequest, sample_thread, spawn_seeds
from .kinematics import (
    DispatchSchedule,
    build_timeline,
    dispatch_schedule,
    response_time,
)
from .reward import MINUTES_PER_HOUR
from .scenario import Scenario
from .smdp import (
    ActionSpace,
    DEFAULT_CONFIG,
    InfeasibleActionError,
    Platoon,
    SmdpConfig,
    SmdpState,
    discounted_return,
    flush_pois,
    legal_actions,
    step,
)


@dataclass(frozen=True)
class SearchConfig:
    # many shallow trees beat few deep ones here: a tree is nearly
    # deterministic given its sampled future thread, so decision noise is
    # thread-sampling variance, controlled by the tree count
    thread_count: int = 80
    thread_duration: float = 10.0  # hours
    discount: float = 0.90
    exploration_c: float = 1.0
    iterations_per_tree: int = 300
    seed: int = 0
    action_space: ActionSpace = ActionSpace.A1
    smdp: SmdpConfig = field(default_factory=SmdpConfig)

    def __post_init__(self):
        if self.thread_count < 1 or self.iterations_per_tree < 1:
            raise ValueError("thread_count and iterations_per_tree must be >= 1")
        if not 0.0 < self.discount <= 1.0:
            raise ValueError("discount must lie in (0, 1]")


@dataclass
class TreeNode:
    action_in: ExchangeAction | None = None
    visits: int = 0
    value_sum: float = 0.0
    children: dict[ExchangeAction, "TreeNode"] = field(default_factory=dict)
    untried: list[ExchangeAction] | None = None  # filled on first arrival
    terminal: bool = False

    @property
    def mean(self) -> float:
        return self.value_sum / self.visits if self.visits else 0.0


def uct_score(
    node: TreeNode, parent_visits: int, c: float, lo: float = 0.0, hi: float = 1.0
) -> float:
    """Mean value plus the exploration bonus; unvisited nodes force a visit.

    lo/hi rescale the mean to the tree's observed return range so that the
    exploration constant keeps its bandit-scale meaning whatever the reward
    magnitude. The rescaling is monotone, so c = 0 still degenerates to an
    argmax over means.
    """
    if parent_visits < 1:
        raise ValueError("parent_visits must be >= 1")
    if node.visits == 0:
        return math.inf
    mean = node.mean
    if hi > lo:
        mean = (mean - lo) / (hi - lo)
    return mean + c * math.sqrt(math.log(parent_visits) / node.visits)


def greedy_policy(
    scenario: Scenario,
    state: SmdpState,
    request: EvacRequest | None = None,
    space: ActionSpace = ActionSpace.A1,
) -> ExchangeAction:
    """Proximity-only default policy: the feasible action minimizing the
    estimated transfer time T from current geometry, ignoring aircraft
    availability. Ties go to the first action in catalog order."""
    req = request if request is not None else state.pending_request
    if req is None:
        raise ValueError("no pending request at this state")
    best = None
    best_t = math.inf
    for action in action_catalog(scenario, include_watercraft=space is ActionSpace.A1):
        tl = build_timeline(scenario, req, action, state.clock)
        if tl is None:
            continue
        t = response_time(tl)
        if t < best_t - 1e-12:
            best, best_t = action, t
    if best is None:
        raise InfeasibleActionError("no feasible action for the pending request")
    return best


def search_tree(
    scenario: Scenario,
    root_state: SmdpState,
    thread: list[EvacRequest],
    cfg: SearchConfig,
    rng: random.Random,
    tree: TreeNode | None = None,
    iterations: int | None = None,
) -> TreeNode:
    """Grow (or continue growing) one UCT tree against a fixed thread.

    Returns the root node; root-child statistics carry the per-action
    scores. Deterministic given (inputs, rng state).
    """
    root = tree if tree is not None else TreeNode()
    budget = cfg.iterations_per_tree if iterations is None else iterations
    c = cfg.exploration_c
    gamma = cfg.discount
    space = cfg.action_space
    smdp_cfg = cfg.smdp
    root_clock = root_state.clock

    if root.untried is None:
        root.untried = list(reversed(legal_actions(scenario, root_state, space)))
        if budget < len(root.untried):
            raise ValueError("iteration budget must cover every root action")

    ret_lo = math.inf
    ret_hi = -math.inf
    for _ in range(budget):
        node = root
        state = root_state
        remaining = thread
        path = [root]
        events: list[tuple[float, float]] = []
        terminal = False
        dead = False

        # select / expand
        while not terminal:
            if node.untried is None:
                node.untried = list(reversed(legal_actions(scenario, state, space)))
            if node.untried:
                action = node.untried.pop()
                child = TreeNode(action_in=action)
                node.children[action] = child
            elif node.children:
                pv = max(node.visits, 1)
                action = None
                best_score = -math.inf
                for a, ch in node.children.items():
                    s = uct_score(ch, pv, c, ret_lo, ret_hi)
                    if s > best_score:
                        best_score, action = s, a
                child = node.children[action]
            else:
                break  # terminal leaf
            try:
                outcome = step(scenario, state, action, remaining, rng, smdp_cfg)
            except InfeasibleActionError:
                # open-loop resampling occasionally invalidates an action;
                # score this playout with what has accrued so far
                child.terminal = True
                path.append(child)
                dead = True
                break
            events.extend(outcome.reward_events)
            state = outcome.next_state
            remaining = outcome.remaining_thread
            terminal = outcome.terminal
            path.append(child)
            if child.visits == 0 or terminal:
                child.terminal = terminal
                node = child
                break  # expansion point reached: roll out from here
            node = child

        # rollout with the greedy default policy
        while not terminal and not dead:
            try:
                action = greedy_policy(scenario, state, space=space)
                outcome = step(scenario, state, action, remaining, rng, smdp_cfg)
            except InfeasibleActionError:
                break
            events.extend(outcome.reward_events)
            state = outcome.next_state
            remaining = outcome.remaining_thread
            terminal = outcome.terminal

        if not dead:
            _, flush_events = flush_pois(scenario, state, remaining, rng, smdp_cfg)
            events.extend(flush_events)

        ret = discounted_return([(v, t - root_clock) for t, v in events], gamma)
        ret_lo = min(ret_lo, ret)
        ret_hi = max(ret_hi, ret)
        for n in path:
            n.visits += 1
            n.value_sum += ret
    return root


@dataclass(frozen=True)
class PlanResult:
    chosen: ExchangeAction
    per_action_scores: dict[str, float]
    per_action_visits: dict[str, int]
    schedule: DispatchSchedule
    predicted_response_time: float  # hours
    tree_diagnostics: list[dict]

    def to_json(self) -> dict:
        return {
            "chosen": self.chosen.label,
            "per_action_scores": self.per_action_scores,
            "per_action_visits": self.per_action_visits,
            "forward_dispatch": self.schedule.forward_dispatch,
            "rear_dispatch": self.schedule.rear_dispatch,
            "predicted_handoff_gap": self.schedule.predicted_handoff_gap,
            "predicted_response_minutes": self.predicted_response_time * MINUTES_PER_HOUR,
            "trees": self.tree_diagnostics,
        }


def plan(
    scenario: Scenario,
    root_state: SmdpState,
    gen_cfg: CasualtyGenConfig,
    cfg: SearchConfig = SearchConfig(),
) -> PlanResult:
    """Root-parallel planning for the pending transfer.

    Samples cfg.thread_count independent future threads, searches one tree
    per thread, sums per-action root scores across trees, and picks the
    argmax (ties: lowest predicted response time, then catalog order).
    Deterministic given (root_state, gen_cfg, cfg).
    """
    req = root_state.pending_request
    if req is None:
        raise ValueError("plan() requires a pending transfer")
    seeds = spawn_seeds(cfg.seed, cfg.thread_count)
    scores: dict[ExchangeAction, float] = {}
    visits: dict[ExchangeAction, int] = {}
    diagnostics = []
    for i, seed in enumerate(seeds):
        thread_cfg = replace(gen_cfg, horizon=cfg.thread_duration, seed=seed)
        thread = sample_thread(scenario, thread_cfg, start=root_state.clock)
        rng = random.Random(seed)
        root = search_tree(scenario, root_state, thread, cfg, rng)
        table = {}
        for action, child in root.children.items():
            # each tree votes with its value estimate for the action, not the
            # raw value_sum, so exploration-driven visit imbalance between
            # trees does not skew the aggregate
            scores[action] = scores.get(action, 0.0) + child.mean
            visits[action] = visits.get(action, 0) + child.visits
            table[action.label] = {
                "visits": child.visits,
                "value_sum": child.value_sum,
                "mean": child.mean,
            }
        diagnostics.append({"tree": i, "seed": seed, "root": table})

    if not scores:
        raise InfeasibleActionError("no feasible action for the pending transfer")

    fwd_free = root_state.aircraft[Platoon.FSMP].busy_until
    rear_free = root_state.aircraft[Platoon.ASMP].busy_until

    def sort_key(action: ExchangeAction):
        tl = build_timeline(
            scenario, req, action, root_state.clock, fwd_free, rear_free
        )
        t = math.inf if tl is None else response_time(tl)
        catalog = action_catalog(scenario)
        return (-scores[action], t, catalog.index(action))

    chosen = min(scores, key=sort_key)
    tl = build_timeline(scenario, req, chosen, root_state.clock, fwd_free, rear_free)
    if tl is None:  # fall back to any feasible scored action
        raise InfeasibleActionError("chosen action infeasible against live availability")
    return PlanResult(
        chosen=chosen,
        per_action_scores={a.label: s for a, s in scores.items()},
        per_action_visits={a.label: v for a, v in visits.items()},
        schedule=dispatch_schedule(tl),
        predicted_response_time=response_time(tl),
        tree_diagnostics=diagnostics,
    )
