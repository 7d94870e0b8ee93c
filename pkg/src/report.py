import hashlib
import json
import logging
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

# bumped whenever a field of Envelope or Report changes meaning
SCHEMA_VERSION = "1"


def digest(data: Any) -> str:
    """sha256 of the canonical JSON text of an input."""
    text = json.dumps(data, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode()).hexdigest()


class Envelope(BaseModel):
    """Fields every CLI and HTTP report carries next to its payload."""

    schema_version: str = SCHEMA_VERSION
    input_digests: Dict[str, str] = Field(default_factory=dict)
    timing: Dict[str, float] = Field(default_factory=dict)


class Residual(BaseModel):
    quantity: str
    order: Optional[int] = None
    entry: Optional[List[int]] = None
    term: Optional[str] = None


# Outcome of a verification: identities checked coefficient by coefficient
class Report(BaseModel):
    check: str
    holds: bool
    checked: int = 0
    residual: str = "zero"
    first_nonzero: Optional[Residual] = None
    certificates: Dict[str, Any] = Field(default_factory=dict)
    details: Dict[str, Any] = Field(default_factory=dict)
    timing: Optional[float] = None

    def record(self, quantity: str, value, order: Optional[int] = None, entry: Optional[List[int]] = None):
        """Count one residual; the first non-zero one becomes the witness."""
        self.checked += 1
        if value.is_zero():
            return
        if self.first_nonzero is None:
            lowest = value.lowest_term()
            term = None
            if lowest is not None:
                mono, coeff = lowest
                name = "*".join(f"{v[0]}{v[1]}{v[2]}" + (f"^{e}" if e > 1 else "") for v, e in mono) or "1"
                term = f"{coeff}*{name}"
            self.first_nonzero = Residual(quantity=quantity, order=order, entry=entry, term=term)
            logger.info(f"{self.check}: first non-zero residual in {quantity} at order {order}")
        self.holds = False
        self.residual = "first_nonzero_term"

    def flag(self, quantity: str, entry: Optional[List[int]] = None, term: Optional[str] = None):
        """Record a failure that has no polynomial residual (a membership test, say)."""
        if self.first_nonzero is None:
            self.first_nonzero = Residual(quantity=quantity, entry=entry, term=term)
            logger.info(f"{self.check}: {quantity} fails at {entry}")
        self.holds = False
        self.residual = "first_nonzero_term"

    def merge(self, part: "Report"):
        """Fold a sub-check into this report, keeping the first witness."""
        self.checked += part.checked
        if not part.holds:
            self.holds = False
            self.residual = part.residual
            if self.first_nonzero is None:
                self.first_nonzero = part.first_nonzero
