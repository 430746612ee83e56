"""Synthetic time series and the delimited series-file format.

Files are plain delimited text with a header ``t,<name>`` and one row per
step, ``t`` counting up from 0.  Synthetic generators are deterministic
in (kind, steps, seed) and stand in for measured demand and
capacity-factor data at desk scale: solar follows a day/night arc, wind
an autocorrelated band, electricity demand a double daily peak with a
winter swell, gas demand a strong winter-heating season.
"""

from __future__ import annotations

import io

import numpy as np

KINDS = ("solar_cf", "wind_cf", "elec_demand", "gas_demand")

#: value checks per declared role
ROLES = {
    "capacity_factor": (0.0, 1.0),
    "demand": (0.0, None),
    "free": (None, None),
}


class SeriesError(ValueError):
    pass


def synth_series(kind: str, steps: int, seed: int) -> np.ndarray:
    """Deterministic synthetic series of the given kind and length."""
    if kind not in KINDS:
        raise SeriesError(f"unknown series kind {kind!r}; choose from {', '.join(KINDS)}")
    rng = np.random.default_rng([KINDS.index(kind), seed & 0x7FFFFFFF])
    t = np.arange(steps)
    hour = t % 24
    day = t // 24
    doy = day % 365

    if kind == "solar_cf":
        arc = np.clip(np.sin(np.pi * (hour - 6) / 12.0), 0.0, None)
        arc[(hour < 6) | (hour > 18)] = 0.0
        season = 0.75 + 0.25 * np.cos(2 * np.pi * (doy - 172) / 365.0)
        clouds = np.clip(rng.beta(5, 2, steps // 24 + 1), 0.25, 1.0)
        return np.clip(arc * season * clouds[day], 0.0, 1.0)

    if kind == "wind_cf":
        x = np.empty(steps)
        x[0] = rng.uniform(0.2, 0.6)
        shocks = rng.normal(0.0, 0.09, steps)
        for i in range(1, steps):
            x[i] = 0.38 + 0.86 * (x[i - 1] - 0.38) + shocks[i]
        return np.clip(x, 0.0, 1.0)

    if kind == "elec_demand":
        base = 10.0
        daily = 1.0 + 0.22 * np.exp(-((hour - 8.5) ** 2) / 8.0) \
            + 0.30 * np.exp(-((hour - 18.5) ** 2) / 6.0) - 0.18 * np.exp(-((hour - 3) ** 2) / 9.0)
        winter = 1.0 + 0.16 * np.cos(2 * np.pi * (doy - 15) / 365.0)
        noise = 1.0 + rng.normal(0.0, 0.02, steps)
        return np.clip(base * daily * winter * noise, 0.0, None)

    base = 16.0
    daily = 1.0 + 0.10 * np.exp(-((hour - 7) ** 2) / 10.0) \
        + 0.08 * np.exp(-((hour - 19) ** 2) / 12.0)
    winter = 1.0 + 0.55 * np.cos(2 * np.pi * (doy - 15) / 365.0)
    noise = 1.0 + rng.normal(0.0, 0.03, steps)
    return np.clip(base * daily * winter * noise, 0.0, None)


def series_to_text(name: str, values: np.ndarray) -> str:
    out = io.StringIO()
    out.write(f"t,{name}\n")
    for t, v in enumerate(values):
        out.write(f"{t},{np.format_float_positional(v, precision=10, trim='-')}\n")
    return out.getvalue()


def write_series(path, name: str, values: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(series_to_text(name, values))


def parse_series(text: str, *, steps: int | None = None, role: str = "free",
                 source: str = "<series>") -> np.ndarray:
    """Parse and validate one series from delimited text.

    Checks the header shape, a 0-based contiguous ``t`` column, the
    expected row count, and the declared role's value range.
    """
    lo, hi = ROLES.get(role, (None, None))
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].split(",")[0].strip() == "t":
        raise SeriesError(f"{source}: first header field must be 't'")
    values: list[float] = []
    for k, line in enumerate(lines[1:]):
        fields = line.split(",")
        try:
            tval = int(fields[0])
            v = float(fields[1])
        except (ValueError, IndexError):
            raise SeriesError(f"{source}: bad row {k + 1}: {line!r}") from None
        if tval != k:
            raise SeriesError(f"{source}: t must count from 0, got {tval} at row {k + 1}")
        values.append(v)
    arr = np.array(values)
    if steps is not None and arr.shape[0] != steps:
        raise SeriesError(f"{source}: {arr.shape[0]} rows, expected {steps}")
    if not np.all(np.isfinite(arr)):
        raise SeriesError(f"{source}: non-finite values")
    if lo is not None and arr.size and arr.min() < lo:
        raise SeriesError(f"{source}: values below {lo} for role {role!r}")
    if hi is not None and arr.size and arr.max() > hi:
        raise SeriesError(f"{source}: values above {hi} for role {role!r}")
    return arr


def read_series(path, *, steps: int | None = None, role: str = "free") -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return parse_series(fh.read(), steps=steps, role=role, source=str(path))
