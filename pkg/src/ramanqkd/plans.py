"""Channel-plan presets and the plain-text plan file format.

Plan file example::

    # four channels around the quantum channel
    name = custom
    quantum_channel = 39
    direction = co
    power_dbm = 0          # default for rows without a power column

    [channels]
    # itu_channel  power_dbm
    40
    38   -3.0
    37

Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

from pathlib import Path

from . import grid
from .errors import ConfigError, InvalidInputError
from .raman import ChannelPlan

QUANTUM_CHANNEL = 39

# Populated channels of configurations A-G around quantum channel 39.
PRESETS: dict[str, tuple[int, ...]] = {
    "A": (40, 38, 37),
    "B": (40, 38, 37, 36),
    "C": (44, 40, 38, 37, 36, 35),
    "D": (44, 40, 38, 37, 36, 35, 30, 29),
    "E": (45, 44, 40, 38, 37, 36, 35, 30, 29, 28),
    "F": (45, 44, 40, 38, 37, 36, 35, 30, 29, 28, 27),
    "G": (50, 49, 45, 44, 40, 38, 37, 36, 35, 30, 29, 28, 27, 25),
}
PRESET_NAMES = tuple(PRESETS)


def preset(name: str, power_dbm: float = 0.0, direction: str = "co") -> ChannelPlan:
    """Configuration ``name`` (``"A"``..``"G"``, or ``"none"`` for an empty plan)."""
    key = name.strip()
    if key.lower() in ("none", "empty", "dark"):
        return ChannelPlan(QUANTUM_CHANNEL, (), direction, name="none")
    if key.upper() not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; expected one of {', '.join(PRESET_NAMES)}")
    key = key.upper()
    p = grid.dbm_to_watts(power_dbm)
    return ChannelPlan(QUANTUM_CHANNEL, tuple((ch, p) for ch in PRESETS[key]), direction, name=key)


def _err(path, lineno, msg):
    return ConfigError(f"{path}:{lineno}: {msg}")


def parse_plan_text(text: str, source: str = "<plan>") -> ChannelPlan:
    header: dict[str, str] = {}
    rows: list[tuple[int, int, float | None]] = []
    in_table = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower() == "[channels]":
            in_table = True
            continue
        if not in_table:
            if "=" not in line:
                raise _err(source, lineno, f"expected 'key = value', got {line!r}")
            key, value = (x.strip() for x in line.split("=", 1))
            if key not in ("name", "quantum_channel", "direction", "power_dbm"):
                raise _err(source, lineno, f"unknown key {key!r}")
            header[key] = value
            continue
        parts = line.split()
        if len(parts) > 2:
            raise _err(source, lineno, f"expected 'channel [power_dbm]', got {line!r}")
        try:
            ch = int(parts[0])
            pw = float(parts[1]) if len(parts) == 2 else None
        except ValueError:
            raise _err(source, lineno, f"malformed channel row {line!r}") from None
        rows.append((lineno, ch, pw))

    try:
        q = int(header.get("quantum_channel", QUANTUM_CHANNEL))
        default_dbm = float(header.get("power_dbm", 0.0))
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    direction = header.get("direction", "co")
    seen: dict[int, int] = {}
    chans = []
    for lineno, ch, pw in rows:
        if ch == q:
            raise _err(source, lineno, f"channel {ch} is the quantum channel")
        if ch in seen:
            raise _err(source, lineno, f"duplicate channel {ch} (first on line {seen[ch]})")
        seen[ch] = lineno
        chans.append((ch, grid.dbm_to_watts(default_dbm if pw is None else pw)))
    try:
        return ChannelPlan(q, tuple(chans), direction, name=header.get("name", Path(source).stem))
    except InvalidInputError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def parse_plan(spec: str | Path, power_dbm: float | None = None,
               direction: str | None = None) -> ChannelPlan:
    """Resolve a preset name or read a plan file.

    ``power_dbm`` and ``direction``, when given, override the plan's values
    (the power is applied uniformly to every channel).
    """
    text = str(spec)
    if text.upper() in PRESETS or text.lower() in ("none", "empty", "dark"):
        plan = preset(text, 0.0 if power_dbm is None else power_dbm, direction or "co")
        return plan
    path = Path(text)
    if not path.is_file():
        raise ConfigError(f"{text!r} is neither a preset ({', '.join(PRESET_NAMES)}) nor a file")
    plan = parse_plan_text(path.read_text(encoding="utf-8"), str(path))
    if power_dbm is not None:
        plan = plan.with_uniform_power(grid.dbm_to_watts(power_dbm))
    if direction is not None:
        plan = plan.with_direction(direction)
    return plan
