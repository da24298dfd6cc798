"""Scenario builders shared by the cosim, CLI and acceptance tests."""

from dataclasses import replace

from occusim.bn import Cpt, NetworkSpec, TwoSliceSpec
from occusim.cosim import BoundarySeries, PhysicsParams, ScenarioConfig
from occusim.occupant import Activity, BehaviourConfig, Calendar, DoorState, build_default_door_dbn


def forced_door_dbn(state: DoorState, behaviour: BehaviourConfig = BehaviourConfig()) -> TwoSliceSpec:
    """Default door model with every door row replaced by a point mass on ``state``."""
    base = build_default_door_dbn(behaviour)
    labels = base.domain("door_state")
    row = tuple(1.0 if lab == state.value else 0.0 for lab in labels)

    def force(c: Cpt) -> Cpt:
        return replace(c, table={k: row for k in c.table}) if c.child == "door_state" else c

    prior = NetworkSpec(base.prior.variables, tuple(force(c) for c in base.prior.cpts))
    return TwoSliceSpec(prior, tuple(force(c) for c in base.transition))


def flat_calendar(activity: str) -> Calendar:
    return Calendar(activity, (Activity(activity),) * 24)


def simple_config(activity="busy", horizon=24, seed=0, dbn=None, behaviour=None, **physics) -> ScenarioConfig:
    behaviour = behaviour or BehaviourConfig()
    return ScenarioConfig(
        calendar=flat_calendar(activity),
        dbn=dbn or build_default_door_dbn(behaviour),
        boundary=BoundarySeries((19.0,), (22.0,), (420.0,)),
        physics=PhysicsParams(**physics),
        behaviour=behaviour,
        horizon=horizon,
        seed=seed,
    )
