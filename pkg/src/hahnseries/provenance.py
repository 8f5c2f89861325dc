"""Audit records attached to transformed equations and solver branches.

Every transformation (conjugation, change of derivation, normalization,
solver step) leaves a TransformRecord.  Records serve two purposes: a
human-auditable trail, and the raw material for assembling the support
bound of a solver branch - ``r_points`` and ``r_grids`` carry the exponent
data (in the coordinates local to the step) whose generated semigroup
contains every prefix exponent the branch can produce.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .exponents import Exponent
from .supports import GridSet


@dataclass(frozen=True)
class TransformRecord:
    kind: str
    data: tuple[tuple[str, str], ...] = ()
    support_bound: GridSet | None = None
    r_points: tuple[Exponent, ...] = ()
    r_grids: tuple[GridSet, ...] = field(default=(), compare=False)

    def get(self, key: str) -> str | None:
        for k, v in self.data:
            if k == key:
                return v
        return None

    def to_json(self) -> dict:
        from .textio import exponent_to_json, gridset_to_json
        out: dict = {"kind": self.kind, "data": dict(self.data)}
        if self.support_bound is not None:
            out["support_bound"] = gridset_to_json(self.support_bound)
        if self.r_points:
            out["r_points"] = [exponent_to_json(e) for e in self.r_points]
        if self.r_grids:
            out["r_grids"] = [gridset_to_json(g) for g in self.r_grids]
        return out

    @classmethod
    def from_json(cls, payload: dict, rank: int) -> TransformRecord:
        from .textio import exponent_from_json, gridset_from_json
        bound = payload.get("support_bound")
        return cls(
            kind=payload["kind"],
            data=tuple(sorted(payload.get("data", {}).items())),
            support_bound=(gridset_from_json(bound, rank)
                           if bound is not None else None),
            r_points=tuple(exponent_from_json(e, rank)
                           for e in payload.get("r_points", ())),
            r_grids=tuple(gridset_from_json(g, rank)
                          for g in payload.get("r_grids", ())),
        )


def record(kind: str, support_bound: GridSet | None = None,
           r_points: tuple[Exponent, ...] = (),
           r_grids: tuple[GridSet, ...] = (), **data) -> TransformRecord:
    return TransformRecord(
        kind,
        tuple(sorted((k, str(v)) for k, v in data.items())),
        support_bound, tuple(r_points), tuple(r_grids))
