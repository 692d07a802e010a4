"""The composite applications: visualise a model, compare two theories, and
run the interactive simulation loop (transport-free).

The simulation follows the model-view-controller cycle: the output theory
renders the current snapshot, the input theory turns clicks into actions,
and progression computes the next state.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .core import Structure, Vocabulary, conform, merge, project
from .drawing import DrawingSpec, encode
from .errors import (
    AmbiguousAction,
    InputError,
    NoInitialState,
    NoVisualisationModel,
    StaleClick,
)
from .evaluate import satisfies
from .ltc import LtcTheory, Snapshot, action_vocabulary, initialise, progress, split_ltc
from .predefined import V_OUT
from .solve import DEFAULT_NODE_BUDGET, modelexpand, onemodel
from .syntax import Theory

AWAITING_INPUT = "awaiting-input"
FINISHED = "finished"


def visualise_model(t_vis: Theory, m: Structure, s_out: Structure,
                    node_budget: int = DEFAULT_NODE_BUDGET) -> DrawingSpec:
    """Merge the model with the drawing structure, expand the visualisation
    theory over it, and encode the result."""
    merged = merge(m, s_out)
    fitted = conform(merged, t_vis.vocabulary)
    solution = onemodel(t_vis, fitted, node_budget=node_budget)
    if solution is None:
        raise NoVisualisationModel(
            f"{t_vis.name} has no model over {merged.name}")
    return encode(project(solution, V_OUT))


def visualise_structure(s: Structure) -> DrawingSpec:
    """Encode a structure that is already two-valued over the output
    vocabulary."""
    return encode(project(s, V_OUT))


@dataclass(frozen=True)
class CompareResult:
    verdict: str  # 'counterexample' | 'matching' | 'equivalent-up-to-bound'
    witness: Optional[Structure]
    checked: int


def compare_theories(t_user: Theory, t_corr: Theory, t_vis: Theory,
                     s: Structure, s_out: Structure, bound: int,
                     node_budget: int = DEFAULT_NODE_BUDGET
                     ) -> tuple[CompareResult, DrawingSpec]:
    """Look for a model of `t_user` that `t_corr` does not satisfy, checking
    up to `bound` models.  A found mismatch is drawn via `t_vis` (the
    highlighting, if any, is the visualisation theory's business); otherwise
    the first matching model is drawn."""
    found = modelexpand(t_user, s, nbmodels=bound, node_budget=node_budget)
    checked = 0
    for model in found.models:
        checked += 1
        if not satisfies(t_corr, model):
            spec = visualise_model(t_vis, model, s_out, node_budget)
            return CompareResult("counterexample", model, checked), spec
    if checked:
        spec = visualise_model(t_vis, found.models[0], s_out, node_budget)
        return CompareResult("matching", None, checked), spec
    return CompareResult("equivalent-up-to-bound", None, 0), DrawingSpec([])


@dataclass(frozen=True)
class SimConfig:
    """The nine simulation arguments.  The vocabularies default to the ones
    derivable from the theories and the time machinery."""

    t_prog: Theory
    s_init: Structure
    t_out: Theory
    s_out: Structure
    t_in: Theory
    s_in: Structure
    v_state: Optional[Vocabulary] = None
    v_out: Optional[Vocabulary] = None
    v_in: Optional[Vocabulary] = None


@dataclass(frozen=True)
class SimState:
    """One step of the simulation loop; immutable, so replaying a click log
    reproduces the exact same states."""

    config: SimConfig
    ltc: LtcTheory
    snapshot: Snapshot
    last_spec: DrawingSpec
    status: str = AWAITING_INPUT
    successor_count: int = 1
    successors: tuple[Snapshot, ...] = ()

    @property
    def finished(self) -> bool:
        return self.status == FINISHED


def sim_init(cfg: SimConfig, node_budget: int = DEFAULT_NODE_BUDGET) -> SimState:
    """Compute the first snapshot and its drawing."""
    ltc = split_ltc(cfg.t_prog)
    snapshots = initialise(ltc, cfg.s_init, nbmodels=1, node_budget=node_budget)
    if not snapshots:
        raise NoInitialState(f"{cfg.t_prog.name} admits no initial state")
    snapshot = snapshots[0]
    spec = visualise_model(cfg.t_out, _state_view(cfg, snapshot), cfg.s_out,
                           node_budget)
    return SimState(cfg, ltc, snapshot, spec)


def _state_view(cfg: SimConfig, snapshot: Snapshot) -> Structure:
    if cfg.v_state is not None:
        return project(snapshot.structure, cfg.v_state)
    return snapshot.structure


def _current_time(spec: DrawingSpec) -> Optional[int]:
    return spec.frames[-1].time if spec.frames else None


def sim_step(state: SimState, clicks: Structure,
             node_budget: int = DEFAULT_NODE_BUDGET) -> SimState:
    """Advance one step: interpret the clicks as actions through the input
    theory, progress, and draw the new state.  When any of the inferences
    has no model the simulation is finished."""
    if state.status != AWAITING_INPUT:
        raise InputError("the simulation is finished")
    cfg = state.config
    click_rel = clicks.interpretation("d3_click")
    click_times = {t for (t, _k) in click_rel.tuples} if click_rel else set()
    current = _current_time(state.last_spec)
    for t in click_times:
        if t != current:
            raise StaleClick(f"click for frame {t}, but the current frame is {current}")

    merged = merge(merge(state.snapshot.structure, cfg.s_in), clicks)
    fitted = conform(merged, cfg.t_in.vocabulary)
    found = modelexpand(cfg.t_in, fitted, nbmodels=2, node_budget=node_budget)
    if not found.models:
        return replace(state, status=FINISHED, successor_count=0, successors=())
    v_action = action_vocabulary(state.ltc)
    if len(found.models) > 1:
        a0 = project(found.models[0], v_action)
        a1 = project(found.models[1], v_action)
        detail = "" if a0.same_interpretations(a1) else (
            "; the input theory leaves an action symbol open")
        raise AmbiguousAction(
            f"{cfg.t_in.name} admits more than one interpretation{detail}")
    actions = project(found.models[0], v_action)

    stepped = Snapshot(merge(state.snapshot.structure, actions),
                       state.snapshot.step_index)
    successors = progress(state.ltc, stepped, node_budget=node_budget)
    if not successors:
        return replace(state, status=FINISHED, successor_count=0, successors=())
    nxt = successors[0]
    try:
        spec = visualise_model(cfg.t_out, _state_view(cfg, nxt), cfg.s_out,
                               node_budget)
    except NoVisualisationModel:
        return replace(state, status=FINISHED, successor_count=0, successors=())
    return SimState(cfg, state.ltc, nxt, spec,
                    successor_count=len(successors),
                    successors=tuple(successors[1:]))
