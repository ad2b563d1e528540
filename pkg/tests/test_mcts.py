import math
import random

import pytest

from medevacsim.actions import ActionKind, action_catalog
from medevacsim.casualty import CasualtyGenConfig, sample_thread
from medevacsim.kinematics import build_timeline, response_time
from medevacsim.mcts import (
    PlanResult,
    SearchConfig,
    TreeNode,
    greedy_policy,
    plan,
    search_tree,
    uct_score,
)
from medevacsim.smdp import ActionSpace, initial_state


def uct_bandit(c, iterations=1000, rewards=(1.0, 0.0)):
    """Two-arm deterministic bandit driven by the same selection rule the
    tree search uses."""
    arms = [TreeNode(action_in=i) for i in range(len(rewards))]
    lo, hi = math.inf, -math.inf
    parent_visits = 0
    for _ in range(iterations):
        parent_visits = max(1, parent_visits)
        scores = [uct_score(a, parent_visits, c, lo, hi) for a in arms]
        pick = scores.index(max(scores))
        r = rewards[pick]
        arms[pick].visits += 1
        arms[pick].value_sum += r
        lo, hi = min(lo, r), max(hi, r)
        parent_visits = sum(a.visits for a in arms)
    return arms


def test_uct_bandit_concentrates_on_better_arm():
    arms = uct_bandit(c=1.0)
    assert arms[0].visits >= 950


def test_uct_zero_exploration_is_argmax():
    # after both arms are touched once, c = 0 must always take the better arm
    arms = uct_bandit(c=0.0)
    assert arms[0].visits == 999
    assert arms[1].visits == 1


def test_uct_unvisited_node_forced():
    node = TreeNode()
    assert uct_score(node, 10, 1.0) == math.inf
    with pytest.raises(ValueError):
        uct_score(node, 0, 1.0)


def test_uct_normalization_is_monotone():
    a = TreeNode(visits=10, value_sum=50.0)
    b = TreeNode(visits=10, value_sum=40.0)
    raw = uct_score(a, 20, 0.0, 0.0, 1.0) > uct_score(b, 20, 0.0, 0.0, 1.0)
    scaled = uct_score(a, 20, 0.0, 0.0, 100.0) > uct_score(b, 20, 0.0, 0.0, 100.0)
    assert raw and scaled


def _root(scenario, seed=3, ratio=1.4):
    gen = CasualtyGenConfig(platoon_ratio=ratio, seed=seed)
    thread = sample_thread(scenario, gen)
    state, remaining = initial_state(thread)
    assert state.pending_request is not None
    return gen, state, remaining


def test_greedy_policy_minimizes_estimated_response(default_scenario):
    _, state, _ = _root(default_scenario)
    action = greedy_policy(default_scenario, state)
    chosen_tl = build_timeline(default_scenario, state.pending_request, action, state.clock)
    best = min(
        response_time(build_timeline(default_scenario, state.pending_request, a, state.clock))
        for a in action_catalog(default_scenario)
        if build_timeline(default_scenario, state.pending_request, a, state.clock) is not None
    )
    assert response_time(chosen_tl) == pytest.approx(best)


def test_greedy_policy_a2_never_picks_watercraft(default_scenario):
    _, state, _ = _root(default_scenario)
    action = greedy_policy(default_scenario, state, space=ActionSpace.A2)
    assert action.kind is not ActionKind.WATERCRAFT


def test_search_tree_visits_match_budget(default_scenario):
    gen, state, _ = _root(default_scenario)
    thread = sample_thread(default_scenario, gen.with_seed(99), start=state.clock)
    cfg = SearchConfig(thread_count=1, iterations_per_tree=64, seed=1)
    root = search_tree(default_scenario, state, thread, cfg, random.Random(1))
    assert root.visits == 64
    assert sum(c.visits for c in root.children.values()) == 64
    assert root.children, "root must expand every legal action"


def test_search_tree_budget_must_cover_root_actions(default_scenario):
    gen, state, _ = _root(default_scenario)
    thread = sample_thread(default_scenario, gen.with_seed(99), start=state.clock)
    cfg = SearchConfig(thread_count=1, iterations_per_tree=1, seed=1)
    with pytest.raises(ValueError):
        search_tree(default_scenario, state, thread, cfg, random.Random(1))


def fast_cfg(seed=0, space=ActionSpace.A1):
    return SearchConfig(
        thread_count=4, iterations_per_tree=120, seed=seed, action_space=space
    )


def test_plan_deterministic_given_seed(default_scenario):
    gen, state, _ = _root(default_scenario)
    r1 = plan(default_scenario, state, gen, fast_cfg(7))
    r2 = plan(default_scenario, state, gen, fast_cfg(7))
    assert r1.chosen == r2.chosen
    assert r1.per_action_scores == r2.per_action_scores
    assert r1.per_action_visits == r2.per_action_visits


def test_plan_result_contract(default_scenario):
    gen, state, _ = _root(default_scenario)
    result = plan(default_scenario, state, gen, fast_cfg(5))
    assert isinstance(result, PlanResult)
    assert result.chosen.label in result.per_action_scores
    assert result.schedule.forward_dispatch >= state.clock
    assert result.predicted_response_time > 0.0
    doc = result.to_json()
    assert doc["chosen"] == result.chosen.label
    assert len(doc["trees"]) == 4


def test_plan_chosen_is_score_argmax(default_scenario):
    gen, state, _ = _root(default_scenario)
    result = plan(default_scenario, state, gen, fast_cfg(11))
    best = max(result.per_action_scores.values())
    assert result.per_action_scores[result.chosen.label] == pytest.approx(best)


def test_plan_a2_space_excludes_watercraft(default_scenario):
    gen, state, _ = _root(default_scenario)
    result = plan(default_scenario, state, gen, fast_cfg(5, ActionSpace.A2))
    assert result.chosen.kind is not ActionKind.WATERCRAFT
    assert all(not k.startswith("watercraft") for k in result.per_action_scores)


def test_plan_requires_pending_request(default_scenario):
    gen, state, _ = _root(default_scenario)
    from dataclasses import replace

    with pytest.raises(ValueError):
        plan(default_scenario, replace(state, pending_request=None), gen, fast_cfg())


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(thread_count=0)
    with pytest.raises(ValueError):
        SearchConfig(discount=0.0)
    with pytest.raises(ValueError):
        SearchConfig(discount=1.5)
    with pytest.raises(ValueError):
        SearchConfig(iterations_per_tree=0)
