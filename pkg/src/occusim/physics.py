"""Well-mixed zone CO2 balance and buoyancy-driven exchange through a door.

Units: concentrations in ppm (volume fraction x 1e6), temperatures in K,
flows in m3/s, lengths in m. Conversions live here and nowhere else.

Flow sign convention: a positive segment flow enters the zone. The
buoyancy sign is ``sign(T_zone - T_adjacent)``: with a warmer zone the
colder adjacent air enters below the neutral plane and zone air leaves
above it; the directions swap when the zone is colder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

P_ATM = 101325.0  # Pa
R_AIR = 287.055  # J/(kg K)
GRAVITY = 9.81  # m/s2
PPM = 1e6
KELVIN_OFFSET = 273.15

DELTA_T_DEADBAND = 0.01  # K
NEUTRAL_PLANE_TOL = 1e-6  # m
DEFAULT_CO2_PER_PERSON = 5.2e-6  # m3/s, sedentary adult


class PhysicsError(ValueError):
    pass


class NonPhysicalTemperature(PhysicsError):
    pass


class InvalidGeometry(PhysicsError):
    pass


class SegmentStraddlesNeutralPlane(PhysicsError):
    pass


class OutOfOpening(PhysicsError):
    pass


class NoBuoyancy(PhysicsError):
    pass


class NonPositiveTimestep(PhysicsError):
    pass


def celsius_to_kelvin(t_c: float) -> float:
    return t_c + KELVIN_OFFSET


@dataclass(frozen=True)
class OpeningGeometry:
    width: float
    height: float
    discharge_coefficient: float = 0.6
    opening_ratio: float = 1.0

    def __post_init__(self):
        if not self.width > 0 or not self.height > 0:
            raise InvalidGeometry(f"width and height must be positive, got {self.width}, {self.height}")
        if not 0 < self.discharge_coefficient <= 1:
            raise InvalidGeometry(f"discharge coefficient must be in (0, 1], got {self.discharge_coefficient}")
        if not 0 <= self.opening_ratio <= 1:
            raise InvalidGeometry(f"opening ratio must be in [0, 1], got {self.opening_ratio}")

    def with_ratio(self, ratio: float) -> "OpeningGeometry":
        return replace(self, opening_ratio=ratio)


@dataclass(frozen=True)
class AirSides:
    t_zone: float
    t_adjacent: float
    rho_zone: float
    rho_adjacent: float

    def __post_init__(self):
        if self.t_zone <= 0 or self.t_adjacent <= 0:
            raise NonPhysicalTemperature(f"temperatures must be > 0 K, got {self.t_zone}, {self.t_adjacent}")
        if self.rho_zone <= 0 or self.rho_adjacent <= 0:
            raise PhysicsError("densities must be positive")

    @classmethod
    def from_temperatures(cls, t_zone: float, t_adjacent: float) -> "AirSides":
        return cls(t_zone, t_adjacent, air_density(t_zone), air_density(t_adjacent))

    @property
    def delta_t(self) -> float:
        return self.t_zone - self.t_adjacent

    @property
    def buoyant(self) -> bool:
        return abs(self.delta_t) >= DELTA_T_DEADBAND


@dataclass(frozen=True)
class ZoneState:
    concentration: float  # ppm
    volume: float  # m3
    initial_concentration: float = 400.0

    def __post_init__(self):
        if self.concentration < 0:
            raise PhysicsError(f"concentration must be >= 0, got {self.concentration}")
        if not self.volume > 0:
            raise PhysicsError(f"volume must be positive, got {self.volume}")


@dataclass(frozen=True)
class FlowPair:
    q_in: float
    q_out: float
    neutral_height: float


@dataclass(frozen=True)
class Co2Source:
    occupant_count: int
    per_person_rate: float = DEFAULT_CO2_PER_PERSON

    @property
    def generation(self) -> float:
        return co2_generation(self.occupant_count, self.per_person_rate)


def air_density(t: float) -> float:
    """Dry-air density from the ideal-gas law at standard pressure."""
    if t <= 0:
        raise NonPhysicalTemperature(f"temperature must be > 0 K, got {t}")
    return P_ATM / (R_AIR * t)


def _sign(x: float) -> float:
    return 1.0 if x > 0 else -1.0


def segment_flow(geom: OpeningGeometry, sides: AirSides, z1: float, z2: float, neutral_height: float) -> float:
    """Signed volume flow through the door slice between heights z1 and z2.

    Q = 2/(3 rho) * eps * C * L * sqrt(2 rho |drho| g) * (|HN - z1|^1.5 - |HN - z2|^1.5)

    with rho the mean of the two densities and eps the sign of the zone minus
    adjacent temperature. The opening ratio is not applied here.
    """
    h = geom.height
    for z in (z1, z2):
        if not 0.0 <= z <= h:
            raise OutOfOpening(f"height {z} outside opening [0, {h}]")
    hn = neutral_height
    if (z1 - hn) * (z2 - hn) < 0:
        raise SegmentStraddlesNeutralPlane(f"segment [{z1}, {z2}] crosses neutral plane at {hn}")
    if not sides.buoyant or z1 == z2:
        return 0.0
    rho = 0.5 * (sides.rho_zone + sides.rho_adjacent)
    drho = sides.rho_adjacent - sides.rho_zone
    eps = _sign(sides.delta_t)
    prefactor = 2.0 / (3.0 * rho) * eps * geom.discharge_coefficient * geom.width
    prefactor *= math.sqrt(2.0 * rho * abs(drho) * GRAVITY)
    return prefactor * (abs(hn - z1) ** 1.5 - abs(hn - z2) ** 1.5)


def _net_mass_inflow(geom: OpeningGeometry, sides: AirSides, hn: float) -> float:
    total = 0.0
    for q in (segment_flow(geom, sides, 0.0, hn, hn), segment_flow(geom, sides, hn, geom.height, hn)):
        total += q * (sides.rho_adjacent if q > 0 else sides.rho_zone)
    return total


def neutral_plane(geom: OpeningGeometry, sides: AirSides, tol: float = NEUTRAL_PLANE_TOL) -> float:
    """Height in [0, H] where the mass flows entering and leaving the zone balance.

    Bisection on the net mass inflow; the first midpoint is H/2, the
    Boussinesq answer.
    """
    if not sides.buoyant:
        raise NoBuoyancy(f"|dT| = {abs(sides.delta_t)} K below {DELTA_T_DEADBAND} K")
    lo, hi = 0.0, geom.height
    f_lo = _net_mass_inflow(geom, sides, lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = _net_mass_inflow(geom, sides, mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def door_flows(geom: OpeningGeometry, sides: AirSides, leakage: float = 0.0) -> FlowPair:
    """Volume flows into and out of the zone through a (partly) open door.

    Full-door buoyancy flows are scaled by the opening ratio; ``leakage`` is a
    constant crack exchange added in both directions.
    """
    if leakage < 0:
        raise PhysicsError(f"leakage must be >= 0, got {leakage}")
    h = geom.height
    if geom.opening_ratio == 0.0 or not sides.buoyant:
        return FlowPair(leakage, leakage, 0.5 * h)
    hn = neutral_plane(geom, sides)
    q_in = q_out = 0.0
    for q in (segment_flow(geom, sides, 0.0, hn, hn), segment_flow(geom, sides, hn, h, hn)):
        if q > 0:
            q_in += q
        else:
            q_out -= q
    r = geom.opening_ratio
    return FlowPair(r * q_in + leakage, r * q_out + leakage, hn)


def co2_generation(occupants: int, per_person_rate: float = DEFAULT_CO2_PER_PERSON) -> float:
    if occupants < 0 or per_person_rate < 0:
        raise PhysicsError("occupant count and per-person rate must be >= 0")
    return occupants * per_person_rate


def co2_rate(c: float, zone: ZoneState, flows: FlowPair, source: Co2Source, c_adjacent: float) -> float:
    """dC/dt in ppm/s for the well-mixed balance."""
    return (PPM * source.generation + flows.q_in * c_adjacent - flows.q_out * c) / zone.volume


def co2_step(zone: ZoneState, flows: FlowPair, source: Co2Source, c_adjacent: float, dt: float) -> float:
    """Concentration after ``dt`` seconds with flows and source frozen over the step.

    Solves V dC/dt = 1e6 S + Q_in C_adj - Q_out C exactly.
    """
    if not dt > 0:
        raise NonPositiveTimestep(f"dt must be positive, got {dt}")
    gain = PPM * source.generation + flows.q_in * c_adjacent
    x = flows.q_out * dt / zone.volume
    # (1 - e^-x) / x, written so tiny or zero outflow stays finite
    phi = -math.expm1(-x) / x if x > 0 else 1.0
    c = zone.concentration * math.exp(-x) + gain * dt / zone.volume * phi
    return max(c, 0.0)
