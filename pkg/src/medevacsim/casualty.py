"""Stochastic evacuation-request generation.

Requests arrive by a homogeneous Poisson process. Each request is assigned
an island (forward with probability r/(1+r) for platoon ratio r); requests
on the forward island become interisland transfers with the configured
proportion, originating at a forward role-2. Point-of-injury requests
originate at any role-1/role-2 on their island and are delivered to that
island's base.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .scenario import Island, Scenario

# Expected requests per 24 h at casualty magnitude 1.0.
CALIBRATED_REQUESTS_PER_DAY = 32.0


class RequestKind(Enum):
    POINT_OF_INJURY = "point_of_injury"
    INTERISLAND_TRANSFER = "interisland_transfer"


@dataclass(frozen=True)
class EvacRequest:
    id: str
    injury_time: float  # hours
    origin: str  # facility id
    patients: int
    kind: RequestKind
    destination: str  # facility id

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "injury_time": self.injury_time,
            "origin": self.origin,
            "patients": self.patients,
            "kind": self.kind.value,
            "destination": self.destination,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EvacRequest":
        return cls(
            id=str(obj["id"]),
            injury_time=float(obj["injury_time"]),
            origin=str(obj["origin"]),
            patients=int(obj["patients"]),
            kind=RequestKind(obj["kind"]),
            destination=str(obj["destination"]),
        )


@dataclass(frozen=True)
class CasualtyGenConfig:
    magnitude_multiplier: float = 1.0
    platoon_ratio: float = 1.4  # forward arrival rate relative to rear
    transfer_proportion: float = 0.25
    patients_per_request: int = 3  # truncated-Poisson mean
    base_request_rate: float = CALIBRATED_REQUESTS_PER_DAY / 24.0  # requests/hour
    horizon: float = 24.0  # hours
    seed: int = 0

    def __post_init__(self):
        if self.magnitude_multiplier < 0:
            raise ValueError("magnitude_multiplier must be non-negative")
        if self.platoon_ratio <= 0:
            raise ValueError("platoon_ratio must be positive")
        if not 0.0 <= self.transfer_proportion <= 1.0:
            raise ValueError("transfer_proportion must lie in [0, 1]")
        if self.patients_per_request < 1:
            raise ValueError("patients_per_request must be >= 1")
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")

    def with_seed(self, seed: int) -> "CasualtyGenConfig":
        return replace(self, seed=seed)


def sample_thread(
    scenario: Scenario, cfg: CasualtyGenConfig, start: float = 0.0
) -> list[EvacRequest]:
    """Sample one casualty thread over [start, start + horizon].

    Deterministic given (scenario, cfg): the seed fully fixes the draw.
    """
    rate = cfg.base_request_rate * cfg.magnitude_multiplier
    if rate <= 0.0:
        return []
    rng = np.random.default_rng(cfg.seed)
    p_forward = cfg.platoon_ratio / (1.0 + cfg.platoon_ratio)
    forward_origins = scenario.origin_facilities(Island.FORWARD)
    rear_origins = scenario.origin_facilities(Island.REAR)
    transfer_origins = scenario.transfer_origins()
    capacity = scenario.aircraft_spec.cabin_capacity
    forward_dest = scenario.forward_base.id
    rear_dest = scenario.rear_base.id

    out: list[EvacRequest] = []
    t = start
    while True:
        t += rng.exponential(1.0 / rate)
        if t > start + cfg.horizon:
            break
        forward = rng.random() < p_forward
        is_transfer = forward and rng.random() < cfg.transfer_proportion
        patients = int(min(max(rng.poisson(cfg.patients_per_request), 1), capacity))
        if is_transfer:
            origin = transfer_origins[rng.integers(len(transfer_origins))]
            kind = RequestKind.INTERISLAND_TRANSFER
            destination = scenario.role3.id
        else:
            pool = forward_origins if forward else rear_origins
            origin = pool[rng.integers(len(pool))]
            kind = RequestKind.POINT_OF_INJURY
            destination = forward_dest if forward else rear_dest
        out.append(
            EvacRequest(
                id=f"r{len(out):04d}",
                injury_time=float(t),
                origin=origin.id,
                patients=patients,
                kind=kind,
                destination=destination,
            )
        )
    return out


def spawn_seeds(master_seed: int, count: int) -> list[int]:
    """Independent child seeds for per-tree thread sampling."""
    ss = np.random.SeedSequence(master_seed)
    return [int(child.generate_state(1)[0]) for child in ss.spawn(count)]


def thread_to_jsonl(thread: list[EvacRequest]) -> str:
    return "\n".join(json.dumps(r.to_json()) for r in thread) + ("\n" if thread else "")


def thread_from_jsonl(text: str) -> list[EvacRequest]:
    return [
        EvacRequest.from_json(json.loads(line))
        for line in text.splitlines()
        if line.strip()
    ]
