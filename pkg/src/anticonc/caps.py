"""Resource caps for the exact solvers.

Every cap can be overridden through the ANTICONC_CAPS environment variable,
a JSON object such as ``{"clique": 800, "odd_hole": 32}``. Unknown keys are
rejected so typos do not silently leave a cap at its default.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields

ENV_VAR = "ANTICONC_CAPS"


@dataclass(frozen=True)
class Caps:
    clique: int = 500
    coloring: int = 200
    odd_hole: int = 64
    product_support: int = 200_000
    chain_tuples: int = 1_000_000
    replicas: int = 10_000
    exact_factors: int = 64

    @classmethod
    def from_env(cls) -> "Caps":
        raw = os.environ.get(ENV_VAR)
        if not raw:
            return cls()
        data = json.loads(raw)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown cap names in {ENV_VAR}: {sorted(unknown)}")
        return cls(**{k: int(v) for k, v in data.items()})


def resolve(caps: Caps | None) -> Caps:
    return caps if caps is not None else Caps.from_env()
