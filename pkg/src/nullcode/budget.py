"""Resource budgets for enumeration-heavy operations.

The amplitude budget caps the number of nonzero amplitudes a simulated
state may carry; the enumeration budget caps exhaustive codeword or key
sweeps.  ``NULLCODE_BUDGET`` in the environment overrides the amplitude
budget.
"""

import os

DEFAULT_AMPLITUDE_BUDGET = 1 << 26
DEFAULT_ENUM_BUDGET = 1 << 16
DEFAULT_TABLE_BUDGET = 1 << 26  # bits per instance


def amplitude_budget() -> int:
    raw = os.environ.get("NULLCODE_BUDGET")
    if raw is None:
        return DEFAULT_AMPLITUDE_BUDGET
    return int(raw)
