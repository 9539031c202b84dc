from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class TransferResult:
    """Population of the target state together with how it was obtained.

    ``diagnostics`` carries method-specific numbers (phase integrals,
    exponent parts, endpoint derivatives); ``warnings`` lists validity
    notes such as a decay rate outside the regime of a formula.
    """

    n3: float
    method: str
    epsilon: float | None = None
    diagnostics: dict = field(default_factory=dict)
    warnings: tuple[str, ...] = ()
