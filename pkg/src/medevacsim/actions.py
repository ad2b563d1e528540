"""Exchange-point actions and the per-scenario action catalog."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .scenario import Scenario


class ActionKind(Enum):
    WATERCRAFT = "watercraft"
    LAND_AXP = "land_axp"
    DIRECT = "direct"


@dataclass(frozen=True, order=True)
class ExchangeAction:
    kind: ActionKind
    target_id: str | None = None  # route id or land AXP facility id

    def __post_init__(self):
        needs_target = self.kind is not ActionKind.DIRECT
        if needs_target != (self.target_id is not None):
            raise ValueError("watercraft/land actions need a target id, direct takes none")

    @property
    def label(self) -> str:
        if self.kind is ActionKind.DIRECT:
            return "direct"
        return f"{self.kind.value}:{self.target_id}"

    @classmethod
    def from_label(cls, label: str) -> "ExchangeAction":
        if label == "direct":
            return cls(ActionKind.DIRECT)
        kind, _, target = label.partition(":")
        return cls(ActionKind(kind), target)


DIRECT = ExchangeAction(ActionKind.DIRECT)


def action_catalog(scenario: Scenario, include_watercraft: bool = True) -> list[ExchangeAction]:
    """Stable action ordering: watercraft in file order, land AXPs, direct."""
    out: list[ExchangeAction] = []
    if include_watercraft:
        out.extend(ExchangeAction(ActionKind.WATERCRAFT, r.id) for r in scenario.watercraft)
    out.extend(ExchangeAction(ActionKind.LAND_AXP, f.id) for f in scenario.land_axps)
    out.append(DIRECT)
    return out
