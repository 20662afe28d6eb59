"""Resource accounting for the emulated quantum protocols.

The ledger counts primitive invocations symbolically: queries to state-prep
unitaries, block-encoding applications, SWAPs, LCU branches, amplification
rounds, polynomial degree, and symbolic two-qubit gates. Dense emulation and
ledger-only runs must report identical numbers, so pipelines compute every
delta arithmetically in one place and feed the same deltas to the ledger in
both modes. Counters only ever grow within a run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

COUNTER_KEYS = (
    "prep_unitary_queries",
    "be_queries",
    "swap_ops",
    "lcu_terms",
    "amplification_rounds",
    "poly_degree",
    "two_qubit_gates",
    "ancilla_dims",
)

# Counters that record a high-water mark instead of a running sum.
_MAX_KEYS = frozenset({"poly_degree", "ancilla_dims"})


def amplification_rounds(gamma: float, delta: float, eps: float) -> int:
    """Query count of one amplification: ceil((gamma/delta) * ln(gamma/eps))."""
    if gamma <= 1.0:
        return 0
    return int(math.ceil((gamma / delta) * math.log(gamma / eps)))


@dataclass
class ResourceLedger:
    counters: dict[str, int] = field(
        default_factory=lambda: {k: 0 for k in COUNTER_KEYS}
    )
    stages: list[tuple[str, dict[str, int]]] = field(default_factory=list)
    notes: dict[str, float | str] = field(default_factory=dict)

    def record(self, stage: str, **deltas: int) -> None:
        clean = {}
        for key, value in deltas.items():
            if key not in self.counters:
                raise KeyError(f"unknown ledger counter {key!r}")
            value = int(value)
            if value < 0:
                raise ValueError(f"negative delta for {key!r}")
            if key in _MAX_KEYS:
                self.counters[key] = max(self.counters[key], value)
            else:
                self.counters[key] += value
            clean[key] = value
        self.stages.append((stage, clean))

    def note(self, key: str, value: float | str) -> None:
        """Stash non-counter metadata (scales, effective times, symbolic bounds)."""
        self.notes[key] = value if isinstance(value, str) else float(value)

    def dominant_cost(self) -> int:
        """Total prep-oracle calls through the amplification and transform layers.

        Each polynomial query consumes one amplified encoding; each amplified
        encoding consumes m copies of the summed encoding; each copy consumes
        every recorded prep query once.
        """
        m = max(1, self.counters["amplification_rounds"])
        return self.counters["prep_unitary_queries"] * m * (self.counters["poly_degree"] + 1)

    def as_row(self) -> dict[str, int]:
        row = dict(self.counters)
        row["dominant_cost"] = self.dominant_cost()
        return row
