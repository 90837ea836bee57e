"""Feedback evolution loops: schedule, BFS orientation, and the two ansatz drivers.

Each round p measures the feedback observable on the current state, converts
it into the mixer strength for that round, advances both ratio certificates
with the pre-step measurements, applies the layer unitaries, and records a
trace row with the post-step energy. The first measurement happens on the
initial plus state, so round 1 of the transverse-field ansatz applies an
identity mixer layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .certificates import (
    DenominatorCollapse,
    OneParamTracker,
    TwoParamTracker,
    max_step_size,
    one_param_step,
    two_param_lower_bound,
    two_param_step,
)
from .graphs import CutOracleResult, Graph, GraphError
from .hamiltonian import MaxCutHamiltonian, error_constants
from .statevector import (
    ObservableTerms,
    apply_diagonal_phase,
    apply_rx,
    apply_ryz,
    expectation_diagonal,
    feedback_observable,
    init_plus,
    sum_x,
    sum_yz,
)

ANSATZE = ("qaoa_feedback", "light_cone")


@dataclass(frozen=True)
class BetaParams:
    """Mixer-strength schedule: c * (floor * (1 - e^{-(rate/R)(T - t)}) + (1 - floor))."""

    c: float = 0.04
    floor: float = 0.5
    rate: float = 2.0


def beta_schedule(t: float, rounds: int, dt: float, params: BetaParams = BetaParams()) -> float:
    """Decelerating decreasing schedule; strictly positive on [0, rounds*dt]."""
    horizon = rounds * dt
    decay = 1.0 - math.exp(-(params.rate / rounds) * (horizon - t))
    return params.c * (params.floor * decay + (1.0 - params.floor))


@dataclass(frozen=True)
class RunConfig:
    ansatz: str = "qaoa_feedback"
    dt: float = 0.08
    rounds: int = 10_000
    beta: BetaParams = field(default_factory=BetaParams)
    epsilon: float = 1e-3
    adaptive_dt: bool = False
    lightcone_feedback: bool = True
    seed: int = 0
    state_cap: int = 24

    def __post_init__(self) -> None:
        if self.ansatz not in ANSATZE:
            raise ValueError(f"ansatz must be one of {ANSATZE}, got {self.ansatz!r}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


@dataclass
class StepTrace:
    """One row per round; hf_exp is the post-step energy, O and alpha belong to
    the layer that produced it. violation marks a clamped certificate increment
    or a two-parameter freeze event in this round."""

    step: int
    t: float
    beta: float
    O: float
    alpha: float
    hf_exp: float
    hf_over_m: float
    lambda_lb: float
    two_param_lb: float
    true_ratio: Optional[float]
    violation: bool


@dataclass(frozen=True)
class BfsOrder:
    seq: tuple[int, ...]
    oriented_edges: tuple[tuple[int, int], ...]


def bfs_order(g: Graph, root: int = 0) -> BfsOrder:
    """Breadth-first discovery order from root, neighbors in ascending index.

    Every edge is oriented from its earlier-discovered endpoint and the edge
    list is sorted by (head seq, tail seq), which fixes the gate order.
    """
    if not 0 <= root < g.n:
        raise GraphError(f"root {root} out of range")
    seq = [-1] * g.n
    order = [root]
    seq[root] = 0
    head = 0
    while head < len(order):
        v = order[head]
        head += 1
        for w in g.adjacency[v]:
            if seq[w] == -1:
                seq[w] = len(order)
                order.append(w)
    if len(order) != g.n:
        raise GraphError("graph is disconnected; BFS orientation undefined")
    oriented = []
    for u, v in g.edges:
        j, k = (u, v) if seq[u] < seq[v] else (v, u)
        oriented.append((j, k))
    oriented.sort(key=lambda e: (seq[e[0]], seq[e[1]]))
    return BfsOrder(seq=tuple(seq), oriented_edges=tuple(oriented))


def _run_loop(
    g: Graph,
    h: MaxCutHamiltonian,
    cfg: RunConfig,
    oracle: Optional[CutOracleResult],
    mixer: ObservableTerms,
    apply_layers: Callable,
    eta_coefficients: list[float],
    mixer_unit_count: int,
    observer: Optional[Callable] = None,
    stop_at_true_ratio: Optional[float] = None,
) -> list[StepTrace]:
    n, m = g.n, h.m
    state = init_plus(n, cap=cfg.state_cap)
    one = OneParamTracker()
    two = TwoParamTracker()
    optimum = float(oracle.optimum) if oracle is not None else None

    o_cur = feedback_observable(state, mixer, h.diag)
    if observer is not None:
        observer(0, expectation_diagonal(state, h.diag), one, two)

    traces: list[StepTrace] = []
    t_elapsed = 0.0
    for p in range(1, cfg.rounds + 1):
        t_left = (p - 1) * cfg.dt if not cfg.adaptive_dt else t_elapsed
        beta = beta_schedule(min(t_left, cfg.rounds * cfg.dt), cfg.rounds, cfg.dt, cfg.beta)
        o_used = o_cur
        alpha = beta * o_used if cfg.ansatz == "qaoa_feedback" or cfg.lightcone_feedback else beta
        hf_before = expectation_diagonal(state, h.diag)

        dt_p = cfg.dt
        if cfg.adaptive_dt:
            dt_p = _adaptive_dt(h, cfg, two, alpha, o_used, hf_before, eta_coefficients, mixer_unit_count)

        one_param_step(one, [alpha], [o_used], dt_p, q_exp=float(m))
        froze = False
        two_violated = False
        if not two.frozen:
            q_two = float(m) - hf_before
            try:
                if q_two <= 0:
                    raise DenominatorCollapse(q_exp=q_two, gain=0.0, c=q_two)
                two_param_step(two, [alpha], [o_used], dt_p, q_exp=q_two, a=1.0, b=1.0)
            except DenominatorCollapse:
                two.frozen = True
                froze = True
            two_violated = two.last_violated

        apply_layers(state, alpha, dt_p)

        o_cur = feedback_observable(state, mixer, h.diag)
        hf_after = expectation_diagonal(state, h.diag)
        t_elapsed = t_elapsed + dt_p if cfg.adaptive_dt else p * cfg.dt
        true_ratio = hf_after / optimum if optimum is not None else None
        traces.append(
            StepTrace(
                step=p,
                t=t_elapsed,
                beta=beta,
                O=o_used,
                alpha=alpha,
                hf_exp=hf_after,
                hf_over_m=hf_after / m,
                lambda_lb=one.lower_bound,
                two_param_lb=two_param_lower_bound(two),
                true_ratio=true_ratio,
                violation=one.last_violated or two_violated or froze,
            )
        )
        if observer is not None:
            observer(p, hf_after, one, two)
        if stop_at_true_ratio is not None and true_ratio is not None and true_ratio >= stop_at_true_ratio:
            break
    return traces


def _adaptive_dt(h, cfg, two, alpha, o_cur, hf_before, eta_coefficients, mixer_unit_count):
    """Admissible step under the error budget, conservative in the next x value.

    A first pass bounds dt with the current x; the x value implied by that dt
    can only shrink the second-pass dt, so the final dt is admissible for the
    x it actually produces.
    """
    bounds = error_constants(h, [alpha] * mixer_unit_count, eta_coefficients)
    dt1 = min(cfg.dt, max_step_size(bounds, cfg.epsilon, x_next=two.x))
    gain1 = max(alpha * o_cur * dt1, 0.0)
    q_two = float(h.m) - hf_before
    c1 = q_two - gain1
    x1 = two.x * q_two / c1 if (q_two > 0 and c1 > 0 and not two.frozen) else two.x
    return min(dt1, max_step_size(bounds, cfg.epsilon, x_next=max(x1, two.x)))


def run_qaoa_feedback(
    g: Graph,
    h: MaxCutHamiltonian,
    cfg: RunConfig,
    oracle: Optional[CutOracleResult] = None,
    observer: Optional[Callable] = None,
    stop_at_true_ratio: Optional[float] = None,
) -> list[StepTrace]:
    """Transverse-field feedback ansatz: diagonal phase layer then n RX rotations."""
    mixer = sum_x(g.n)
    inv_m = 1.0 / h.m

    def apply_layers(state, alpha, dt_p):
        apply_diagonal_phase(state, h.diag, dt_p * inv_m)
        for j in range(g.n):
            apply_rx(state, j, alpha * dt_p)

    return _run_loop(
        g, h, cfg, oracle, mixer, apply_layers,
        eta_coefficients=[inv_m] * h.m,
        mixer_unit_count=g.n,
        observer=observer,
        stop_at_true_ratio=stop_at_true_ratio,
    )


def run_light_cone(
    g: Graph,
    h: MaxCutHamiltonian,
    cfg: RunConfig,
    oracle: Optional[CutOracleResult] = None,
    observer: Optional[Callable] = None,
    stop_at_true_ratio: Optional[float] = None,
) -> list[StepTrace]:
    """BFS-oriented YZ-rotation ansatz with no commuting layer.

    The whole oriented YZ sum acts as a single feedback term. With feedback on
    (the default) the layer coefficient is beta * O, which keeps the
    certificate increments nonnegative; with feedback off the literal beta
    coefficient is used and negative increments are clamped by the trackers.
    """
    order = bfs_order(g, root=0)
    mixer = sum_yz(order.oriented_edges)

    def apply_layers(state, alpha, dt_p):
        for j, k in order.oriented_edges:
            apply_ryz(state, j, k, alpha * dt_p)

    return _run_loop(
        g, h, cfg, oracle, mixer, apply_layers,
        eta_coefficients=[],
        mixer_unit_count=len(order.oriented_edges),
        observer=observer,
        stop_at_true_ratio=stop_at_true_ratio,
    )
