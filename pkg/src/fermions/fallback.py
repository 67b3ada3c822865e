"""
Precision Fallback Chain
========================
Solves a chain at its own precision first and, if the vacuum is
ambiguous there (a Bogoliubov energy below the zero-mode threshold),
retries at each wider precision of the ladder: double → 256 → 1024 bits.
Only DegenerateGroundState triggers a retry; every other error propagates.
"""

from dataclasses import dataclass

from src.chain.precision import Precision
from src.chain.quadratic import assemble_quadratic_form
from src.chain.spec import ChainSpec
from src.config import get_logger
from src.errors import DegenerateGroundState
from src.fermions.solver import CorrelationMatrix, ModeSet, correlation_matrix, solve_modes

log = get_logger("Solver")

DEFAULT_LADDER = (256, 1024)


@dataclass(frozen=True)
class Solution:
    chain: ChainSpec
    modes: ModeSet
    correlation: CorrelationMatrix

    @property
    def precision(self) -> Precision:
        return self.modes.precision


class SolverFallbackChain:
    """Runs solve_modes across a precision ladder."""

    def __init__(self, ladder: tuple[int, ...] = DEFAULT_LADDER):
        self._ladder = tuple(sorted(set(int(b) for b in ladder)))
        self._last_used: int | None = None
        self._error_log: list[dict] = []

    @property
    def last_used(self) -> int | None:
        """Mantissa bits of the last successful solve."""
        return self._last_used

    @property
    def error_log(self) -> list[dict]:
        return list(self._error_log)

    def _attempts(self, chain: ChainSpec) -> list[Precision]:
        start = chain.precision.bits
        return [chain.precision] + [Precision(bits) for bits in self._ladder if bits > start]

    def solve(self, chain: ChainSpec) -> Solution:
        errors = []
        for precision in self._attempts(chain):
            candidate = chain.with_precision(precision)
            try:
                modes = solve_modes(assemble_quadratic_form(candidate))
            except DegenerateGroundState as e:
                info = {"precision_bits": precision.bits, "error": str(e), "type": type(e).__name__}
                errors.append(info)
                self._error_log.append(info)
                log.info(f"{precision.bits}-bit solve failed: {e}")
                continue

            if errors:
                log.info(f"Solved at {precision.bits} bits after {len(errors)} failed attempt(s)")
            self._last_used = precision.bits
            source = {"provenance": chain.provenance, "precision_bits": precision.bits}
            return Solution(candidate, modes, correlation_matrix(modes, source=source))

        summary = "; ".join(f"{e['precision_bits']} bits: {e['error']}" for e in errors)
        raise DegenerateGroundState(f"no precision in the ladder resolves the vacuum: {summary}")
