#!/usr/bin/env python3
"""Offline calibration probe for the default scenario.

For each platoon ratio, walk greedy episodes, and at every decision epoch
estimate the value of each exchange action by rolling the process forward
with the greedy continuation over common sampled threads. Prints the mean
advantage of each action over Direct plus utilization context. Slow; dev
tool only.
"""

import argparse
import random
from dataclasses import replace

import numpy as np

from medevacsim.actions import action_catalog
from medevacsim.casualty import CasualtyGenConfig, sample_thread, spawn_seeds
from medevacsim.harness import DEFAULTS, _gen_config, _scenario_at
from medevacsim.mcts import greedy_policy
from medevacsim.scenario import load_bundled
from medevacsim.smdp import (
    InfeasibleActionError,
    Platoon,
    discounted_return,
    flush_pois,
    initial_state,
    step,
)


def rollout_value(scenario, state, action, thread, seed, gamma=0.90):
    rng = random.Random(seed)
    events = []
    s, rem = state, thread
    try:
        out = step(scenario, s, action, rem, rng)
    except InfeasibleActionError:
        return None
    events.extend(out.reward_events)
    s, rem = out.next_state, out.remaining_thread
    while s.pending_request is not None:
        a = greedy_policy(scenario, s)
        out = step(scenario, s, a, rem, rng)
        events.extend(out.reward_events)
        s, rem = out.next_state, out.remaining_thread
    _, ev = flush_pois(scenario, s, rem, rng)
    events.extend(ev)
    t0 = state.clock
    return discounted_return([(v, t - t0) for t, v in events], gamma)


def probe(scenario, point, episodes=6, threads=24, horizon=10.0):
    adv = {}
    utils = []
    for ep in range(episodes):
        gen = _gen_config(point, 24.0, 1000 + ep)
        world = _scenario_at(scenario, point)
        full = sample_thread(world, gen)
        state, remaining = initial_state(full)
        rng = random.Random(ep)
        while state.pending_request is not None:
            utils.append(
                (
                    state.aircraft[Platoon.FSMP].trailing_utilization(state.clock),
                    state.aircraft[Platoon.ASMP].trailing_utilization(state.clock),
                )
            )
            catalog = action_catalog(world)
            vals = {a.label: [] for a in catalog}
            for seed in spawn_seeds(7000 + 31 * ep, threads):
                th = sample_thread(
                    world, replace(gen, horizon=horizon, seed=seed), start=state.clock
                )
                for a in catalog:
                    v = rollout_value(world, state, a, th, seed)
                    if v is not None:
                        vals[a.label].append(v)
            base = np.mean(vals["direct"])
            for label, v in vals.items():
                if label != "direct" and v:
                    adv.setdefault(label, []).append(float(np.mean(v) - base))
            out = step(world, state, greedy_policy(world, state), remaining, rng)
            state, remaining = out.next_state, out.remaining_thread
    return adv, utils


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ratios", default="0.6,1.0,1.4")
    ap.add_argument("--episodes", type=int, default=6)
    ap.add_argument("--threads", type=int, default=24)
    args = ap.parse_args()
    scenario = load_bundled()
    for r in [float(x) for x in args.ratios.split(",")]:
        point = dict(DEFAULTS)
        point["platoon_ratio"] = r
        adv, utils = probe(scenario, point, args.episodes, args.threads)
        u1 = np.mean([u[0] for u in utils])
        u2 = np.mean([u[1] for u in utils])
        print(f"r={r}  epochs={len(utils)}  U_fsmp={u1:.2f} U_asmp={u2:.2f}")
        for label, vals in sorted(adv.items()):
            arr = np.array(vals)
            frac = float(np.mean(arr > 0))
            print(
                f"  {label:22s} mean_adv={arr.mean():+7.3f} "
                f"sd={arr.std():6.3f} frac_pos={frac:.2f}"
            )


if __name__ == "__main__":
    main()
