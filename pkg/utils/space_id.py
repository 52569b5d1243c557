# utils/space_id.py
import re
from dataclasses import dataclass

from utils.exceptions import UsageError

EXCEPTIONAL = {"g2": 1, "f4": 2, "e6": 3, "e7": 4, "e8": 5}
LARGE = {"e7", "e8"}
_PATTERN = re.compile(r"^(sp|so|su):(\d+)$")


@dataclass(frozen=True)
class SpaceId:
    """Parsed space identifier: ``sp:<n>``, ``so:<k>``, ``su:<m>``, ``g2``, ``f4``, ``e6``, ``e7``, ``e8``."""
    family: str
    size: int

    @property
    def text(self) -> str:
        if self.family in ("Sp", "SO", "SU"):
            return f"{self.family.lower()}:{self.size}"
        return self.family.lower()

    @property
    def exceptional(self) -> bool:
        return self.family.lower() in EXCEPTIONAL

    @property
    def large(self) -> bool:
        return self.family.lower() in LARGE

    def __str__(self) -> str:
        return self.text


def parse_space_id(text: str, allow_n0: bool = False) -> SpaceId:
    """Parse and range-check a space identifier.

    Raises:
        UsageError: unknown grammar or size out of scope
    """
    raw = (text or "").strip().lower()
    if raw in EXCEPTIONAL:
        return SpaceId(raw.upper(), EXCEPTIONAL[raw])
    match = _PATTERN.match(raw)
    if not match:
        raise UsageError(f"Unknown space id {text!r}; expected sp:<n>, so:<k>, su:<m>, g2, f4, e6, e7 or e8")
    prefix, size = match.group(1), int(match.group(2))
    if prefix == "sp":
        if size == 0 and not allow_n0:
            raise UsageError("sp:0 (the 3-sphere) is outside the n >= 1 scope; pass --allow-n0 to build it anyway")
        return SpaceId("Sp", size)
    if prefix == "so":
        if size < 7:
            raise UsageError(f"so:{size} is out of scope, SO(k) needs k >= 7")
        return SpaceId("SO", size)
    if size < 3:
        raise UsageError(f"su:{size} is out of scope, SU(m) needs m >= 3")
    return SpaceId("SU", size)


def quaternionic_dimension(space: SpaceId) -> int:
    """n with dim M = 4n + 3."""
    if space.family == "Sp":
        return space.size
    if space.family == "SO":
        return space.size - 4
    if space.family == "SU":
        return space.size - 2
    return {1: 2, 2: 7, 3: 10, 4: 16, 5: 28}[space.size]
