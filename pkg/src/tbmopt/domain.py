"""Core domain types and closed-form muck/cutter metrics.

Unit conventions, fixed repository-wide:

======================  ==========
thrust (Th)             kN
torque (Tor)            kN*m
penetration rate (PR)   mm/min
cutter life (Ef)        m^3/mm
UCS                     MPa
grain / sieve sizes     mm
tunnel lengths          m
======================  ==========

Cutter life is the excavated rock volume per millimetre of total
cutter-ring wear::

    Ef = pi * D^2 * l / (4 * W)

with ``D`` the cutterhead diameter (m), ``l`` the excavated distance (m)
and ``W`` the summed wear of all disc cutters (mm).

The coarseness index of a muck sieve test is the sum of cumulative
retained-mass percentages over the sieve stack (coarsest first); the mean
grain size averages the 16th, 50th and 84th mass-percentile particle
sizes read off the cumulative-passing curve, interpolated linearly in
log10(size).

All operations here are pure functions on immutable inputs and are safe
to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import InvalidInputError, UnsupportedMuckComboError

#: Sieve openings (mm) of the six-grade stack used for muck tests.
STANDARD_SIEVES_MM = (63.0, 37.5, 19.0, 9.5, 4.75, 2.36)

#: Valid surrounding-rock classes (II..V encoded ordinally).
SRC_CLASSES = (2, 3, 4, 5)

#: Valid muck geometry categories.
MGT_CATEGORIES = (1, 2, 3, 4)


def _require(cond: bool, field: str, message: str) -> None:
    if not cond:
        raise InvalidInputError(field, message)


@dataclass(frozen=True)
class RockMassState:
    """The eight rock-side inputs describing one tunnel location."""

    src: int      # surrounding-rock class, 2..5 (II..V)
    ucs: float    # uniaxial compressive strength, MPa
    rqd: float    # rock quality designation, %
    cai: float    # Cerchar abrasivity index
    q: float      # quartz content, %
    ci: float     # coarseness index (six-sieve convention, 0..600)
    m: float      # mean grain size, mm
    mgt: int      # muck geometry type, 1..4

    def __post_init__(self) -> None:
        _require(self.src in SRC_CLASSES, "src", f"must be one of {SRC_CLASSES}, got {self.src}")
        _require(self.ucs > 0, "ucs", f"must be > 0, got {self.ucs}")
        _require(0 <= self.rqd <= 100, "rqd", f"must be in [0, 100], got {self.rqd}")
        _require(self.cai > 0, "cai", f"must be > 0, got {self.cai}")
        _require(0 <= self.q <= 100, "q", f"must be in [0, 100], got {self.q}")
        max_ci = 100.0 * len(STANDARD_SIEVES_MM)
        _require(0 <= self.ci <= max_ci, "ci", f"must be in [0, {max_ci}], got {self.ci}")
        _require(self.m > 0, "m", f"must be > 0, got {self.m}")
        _require(self.mgt in MGT_CATEGORIES, "mgt", f"must be one of {MGT_CATEGORIES}, got {self.mgt}")


@dataclass(frozen=True)
class MachineSetting:
    """The two main control parameters set by the operator."""

    th: float   # total thrust, kN
    tor: float  # cutterhead torque, kN*m

    def __post_init__(self) -> None:
        _require(self.th > 0, "th", f"must be > 0, got {self.th}")
        _require(self.tor > 0, "tor", f"must be > 0, got {self.tor}")


@dataclass(frozen=True)
class TunnelingRecord:
    """One training/evaluation row: rock state, machine setting, targets."""

    rock: RockMassState
    machine: MachineSetting
    pr: Optional[float] = None        # penetration rate, mm/min
    ef: Optional[float] = None        # cutter life, m^3/mm
    chainage: Optional[float] = None  # tunnel mileage, m (ordering only)

    def __post_init__(self) -> None:
        _require(self.pr is not None or self.ef is not None,
                 "pr/ef", "at least one target (pr, ef) must be present")
        if self.pr is not None:
            _require(self.pr > 0, "pr", f"must be > 0 when present, got {self.pr}")
        if self.ef is not None:
            _require(self.ef > 0, "ef", f"must be > 0 when present, got {self.ef}")


@dataclass(frozen=True)
class SieveAnalysis:
    """One muck sieving test: retained mass per sieve, coarsest first."""

    sample_id: str
    bins: tuple[tuple[float, float], ...]  # (opening mm, retained mass g)
    pan_mass: float = 0.0

    def __post_init__(self) -> None:
        _require(len(self.bins) >= 1, "bins", "at least one sieve required")
        openings = [o for o, _ in self.bins]
        _require(all(o > 0 for o in openings), "bins", "sieve openings must be > 0")
        _require(all(a > b for a, b in zip(openings, openings[1:])),
                 "bins", f"openings must be strictly decreasing, got {openings}")
        _require(all(mass >= 0 for _, mass in self.bins), "bins", "retained masses must be >= 0")
        _require(self.pan_mass >= 0, "pan_mass", f"must be >= 0, got {self.pan_mass}")
        _require(self.total_mass > 0, "bins", "total mass must be > 0")

    @property
    def total_mass(self) -> float:
        return sum(mass for _, mass in self.bins) + self.pan_mass


@dataclass(frozen=True)
class WearInterval:
    """A stretch of tunnel with its summed cutterhead wear."""

    start: float                # m
    end: float                  # m
    total_wear: float           # mm, summed over all cutters
    cutterhead_diameter: float  # m

    def __post_init__(self) -> None:
        _require(self.end > self.start, "end",
                 f"must exceed start ({self.start}), got {self.end}")
        _require(self.total_wear > 0, "total_wear", f"must be > 0, got {self.total_wear}")
        _require(self.cutterhead_diameter > 0, "cutterhead_diameter",
                 f"must be > 0, got {self.cutterhead_diameter}")


def cutter_life_from_wear(interval: WearInterval) -> float:
    """Cutter life Ef = pi * D^2 * l / (4 * W) in m^3/mm.

    Ef is linear in the excavated distance and inversely linear in the
    total wear; both scalings are exact in floating point.
    """
    length = interval.end - interval.start
    _require(length > 0, "end", "interval length must be > 0")
    d = interval.cutterhead_diameter
    return math.pi * d * d * length / (4.0 * interval.total_wear)


def coarseness_index(s: SieveAnalysis) -> float:
    """Sum of cumulative retained-mass percentages, coarsest sieve first.

    Pan mass counts toward the total but contributes no retained term, so
    adding pan mass strictly lowers the index. Range: [0, 100 * n_sieves].
    """
    total = s.total_mass
    _require(total > 0, "bins", "total mass must be > 0")
    ci = 0.0
    running = 0.0
    for _, mass in s.bins:
        running += mass
        ci += 100.0 * running / total
    return ci


class MeanGrainSize(NamedTuple):
    """Mean grain size result; ``clamped`` flags an extrapolated percentile."""

    value: float
    clamped: bool


def mean_grain_size(s: SieveAnalysis) -> MeanGrainSize:
    """Mean grain size M = (phi16 + phi50 + phi84) / 3 in mm.

    ``phi_p`` is the size at which p percent of the mass is finer, found
    by linear interpolation of cumulative-passing percent versus
    log10(size) between adjacent sieve openings. A percentile falling
    inside the pan (or above the coarsest sieve) is clamped to the
    nearest opening and flagged. If all mass sits in a single sieve bin
    the result is that opening.
    """
    total = s.total_mass
    openings = [o for o, _ in s.bins]
    masses = [mass for _, mass in s.bins]

    nonzero = [i for i, mass in enumerate(masses) if mass > 0]
    if len(nonzero) == 1 and s.pan_mass == 0:
        return MeanGrainSize(openings[nonzero[0]], False)

    # passing[i]: percent of mass finer than openings[i]; non-increasing.
    passing = []
    running = 0.0
    for mass in masses:
        running += mass
        passing.append(100.0 * (total - running) / total)

    clamped = False

    def percentile(p: float) -> float:
        nonlocal clamped
        if p > passing[0]:
            clamped = True
            return openings[0]
        if p < passing[-1]:
            clamped = True
            return openings[-1]
        # scan segments fine -> coarse; first one containing p wins
        for i in range(len(openings) - 1, 0, -1):
            lo, hi = passing[i], passing[i - 1]
            if lo <= p <= hi:
                t = 0.0 if hi == lo else (p - lo) / (hi - lo)
                log_phi = (1.0 - t) * math.log10(openings[i]) + t * math.log10(openings[i - 1])
                return 10.0 ** log_phi
        return openings[-1]  # p == passing at the finest knot

    m = (percentile(16.0) + percentile(50.0) + percentile(84.0)) / 3.0
    return MeanGrainSize(m, clamped)


def classify_muck_geometry(debris: bool, slices: bool, blocks: bool) -> int:
    """Map conveyor observations to a muck geometry category 1..4.

    1 = debris only, 2 = debris+slices, 3 = debris+blocks,
    4 = debris+slices+blocks. Only debris-anchored combinations exist.
    """
    if not debris:
        raise UnsupportedMuckComboError(
            f"unsupported muck combination (debris={debris}, slices={slices}, "
            f"blocks={blocks}): categories are anchored on rock debris")
    if slices and blocks:
        return 4
    if blocks:
        return 3
    if slices:
        return 2
    return 1


def muck_geometry_flags(mgt: int) -> tuple[bool, bool, bool]:
    """Inverse of :func:`classify_muck_geometry`: (debris, slices, blocks)."""
    _require(mgt in MGT_CATEGORIES, "mgt", f"must be one of {MGT_CATEGORIES}, got {mgt}")
    return {
        1: (True, False, False),
        2: (True, True, False),
        3: (True, False, True),
        4: (True, True, True),
    }[mgt]
