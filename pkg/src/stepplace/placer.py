"""Iterative macro placement driven by a growing dual cost field.

Each round picks a random macro, proposes candidate positions around it, and
moves it to the candidate minimizing

    field cost of the snapped footprint
    + length of every net containing the macro
    + overlap penalty against all other macros
    + weighted overlap area with blockages.

Afterwards the field gains mass under every remaining overlap of the moved
macro, the overlap increment and penalty multiplier grow geometrically
(cooling, so overlap punishment eventually dominates), and the field is
inflated toward its mean so early hot spots do not stay forbidden forever.
Smoothed net models are used early, exact bounding-box scoring late.  The
result is near-legal; :func:`naive_legalize` removes the residual overlaps.

The round loop is sequential.  Scoring candidates within a round is read-only
with respect to the placement and the field; the winning move and field
updates are applied afterwards.  Runs are deterministic for a given seed.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import NamedTuple

from stepplace.netmodel import (
    Macro,
    Netlist,
    NetModel,
    Placement,
    PlacementArea,
    Point,
    Rect,
    bb_netlength,
    beta_schedule,
    footprint,
    is_legal,
    model_length,
)
from stepplace.stepfield import MAX_GRID_EXPONENT, CostField, GridRect


class LegalizationError(Exception):
    """No conflict-free position could be found for a macro."""

    def __init__(self, macro_id: str, message: str | None = None) -> None:
        self.macro_id = macro_id
        super().__init__(message or f"no legal position found for macro {macro_id!r}")


@dataclass(frozen=True)
class PlacerConfig:
    """Every tunable of the placement loop.

    ``delta_growth``/``w_growth`` default to the per-round factor that
    multiplies the respective schedule by 1000 over the whole run.  The
    ``model_switch_round`` defaults to 80% of ``max_rounds``; rounds at or
    after it score with the exact bounding-box model instead of the smoothed
    one.
    """

    max_rounds: int
    candidates_per_round: int = 8
    grid_p: int = 6
    grid_q: int = 6
    penalty_c: float = 10.0
    delta0: float = 0.01
    delta_growth: float | None = None
    w0: float = 0.01
    w_growth: float | None = None
    inflation_rho: float = 0.995
    blockage_weight: float = 100.0
    seed: int = 0
    model_switch_round: int | None = None

    def __post_init__(self) -> None:
        if self.max_rounds < 0:
            raise ValueError("max_rounds must be >= 0")
        if self.candidates_per_round < 0:
            raise ValueError("candidates_per_round must be >= 0")
        for name in ("grid_p", "grid_q"):
            v = getattr(self, name)
            if not 0 <= v <= MAX_GRID_EXPONENT:
                raise ValueError(f"{name} must be in [0, {MAX_GRID_EXPONENT}]")
        if self.penalty_c < 0:
            raise ValueError("penalty_c must be >= 0")
        if not self.delta0 > 0:
            raise ValueError("delta0 must be > 0")
        if self.delta_growth is not None and not self.delta_growth >= 1:
            raise ValueError("delta_growth must be >= 1")
        if not self.w0 > 0:
            raise ValueError("w0 must be > 0")
        if self.w_growth is not None and not self.w_growth >= 1:
            raise ValueError("w_growth must be >= 1")
        if not 0 < self.inflation_rho <= 1:
            raise ValueError("inflation_rho must be in (0, 1]")
        if self.blockage_weight < 0:
            raise ValueError("blockage_weight must be >= 0")
        if self.model_switch_round is not None and self.model_switch_round < 1:
            raise ValueError("model_switch_round must be >= 1")

    def _default_growth(self) -> float:
        if self.max_rounds <= 1:
            return 1000.0
        return 1000.0 ** (1.0 / self.max_rounds)

    def delta_at(self, step: int) -> float:
        """Penalty multiplier for a 0-based step."""
        g = self.delta_growth if self.delta_growth is not None else self._default_growth()
        return self.delta0 * g**step

    def w_at(self, rnd: int) -> float:
        """Field increment for a 0-based round."""
        g = self.w_growth if self.w_growth is not None else self._default_growth()
        return self.w0 * g**rnd

    @property
    def switch_round(self) -> int:
        """First 1-based round scored with the exact bounding-box model."""
        if self.model_switch_round is not None:
            return self.model_switch_round
        return max(1, int(round(0.8 * self.max_rounds)))


@dataclass(frozen=True)
class MacroBounds:
    """Feasible center coordinates keeping a macro inside the area."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float


def _safe_upper(span: float, half: float) -> float:
    """Largest center so the footprint edge stays at or below ``span``.

    ``(span - half) + half`` can round one ulp past ``span``; addition is
    monotone, so nudging the endpoint down fixes every smaller center too.
    """
    hi = span - half
    while hi + half > span:
        hi = math.nextafter(hi, -math.inf)
    return hi


def compute_bounds(macro: Macro, area: PlacementArea) -> MacroBounds:
    """Center-coordinate bounds of a macro; error if it cannot fit."""
    hx = macro.size_x / 2.0
    hy = macro.size_y / 2.0
    if macro.size_x > area.width or macro.size_y > area.height:
        raise ValueError(f"macro {macro.id!r} does not fit the placement area")
    # the lower bound is always exact: hx - hx == 0; the center hx itself is
    # feasible because hx + hx == size_x <= width
    b = MacroBounds(
        hx,
        max(_safe_upper(area.width, hx), hx),
        hy,
        max(_safe_upper(area.height, hy), hy),
    )
    return b


class RoundStats(NamedTuple):
    """One row of the per-round statistics stream."""

    round: int
    netlength_bb: float
    overlap_area: float
    delta: float
    beta: float
    w: float


@dataclass
class PlacerState:
    """Mutable loop state; create with :func:`new_state`."""

    netlist: Netlist
    area: PlacementArea
    rng: random.Random
    placement: Placement
    field: CostField
    bounds: dict[str, MacroBounds]
    round: int
    macro_order: list[str]
    footprints: dict[str, Rect]
    net_bb: list[float]
    net_indices_of: dict[str, list[int]]
    # only pairs with positive intersection area are stored
    pair_overlap: dict[tuple[str, str], float]
    trace: list[RoundStats] = field(default_factory=list)
    # diagnostics of the most recent round (for tests and debugging)
    last_macro: str | None = None
    last_candidates: list[Point] | None = None
    last_scores: list[float] | None = None
    last_choice: int | None = None

    def total_netlength_bb(self) -> float:
        return sum(self.net_bb)

    def total_overlap_area(self) -> float:
        return sum(self.pair_overlap.values())


def snap_to_grid(
    rect: Rect, area: PlacementArea, p: int, q: int
) -> GridRect | None:
    """Smallest grid rectangle covering ``rect`` (clipped to the area).

    Cell sizes are ``area.width / 2**p`` by ``area.height / 2**q``.  Returns
    None when the clipped rectangle is degenerate (a no-op for callers).
    Outward rounding may conservatively widen the cover by one cell when a
    boundary is not exactly representable.
    """
    n, m = 1 << p, 1 << q
    cx = area.width / n
    cy = area.height / m
    x1 = max(rect.x1, 0.0)
    y1 = max(rect.y1, 0.0)
    x2 = min(rect.x2, area.width)
    y2 = min(rect.y2, area.height)
    if not (x1 < x2 and y1 < y2):
        return None
    a1 = max(0, min(n - 1, math.floor(x1 / cx)))
    b1 = max(0, min(m - 1, math.floor(y1 / cy)))
    a2 = max(a1 + 1, min(n, math.ceil(x2 / cx)))
    b2 = max(b1 + 1, min(m, math.ceil(y2 / cy)))
    return GridRect(a1, b1, a2, b2)


def gamma(span: float, u: float) -> float:
    """Log-uniform jump length in [1, span] for a uniform sample ``u``.

    Below one unit of slack there is no room to jump, so spans under 1
    return 0.
    """
    if span < 1.0:
        return 0.0
    return math.exp(math.log(span) * u)


def move_macro(pos: Point, bounds: MacroBounds, rng: random.Random) -> Point:
    """Propose a new position around ``pos``.

    Per axis a fair coin picks the direction; the jump length is log-uniform
    over the feasible span on that side (the leftward/downward span is
    measured to the bound, plus one unit so a minimal jump stays possible).
    Consumes exactly four rng draws: direction x, direction y, jump x, jump y.
    The result is clamped into ``bounds``.
    """
    x, y = pos
    a = 1 if rng.random() < 0.5 else -1
    b = 1 if rng.random() < 0.5 else -1
    ux = rng.random()
    uy = rng.random()
    if a == 1:
        x_new = x - gamma(x - bounds.x_min + 1.0, ux)
    else:
        x_new = x + gamma(bounds.x_max - x, ux)
    if b == 1:
        y_new = y - gamma(y - bounds.y_min + 1.0, uy)
    else:
        y_new = y + gamma(bounds.y_max - y, uy)
    return (
        min(max(x_new, bounds.x_min), bounds.x_max),
        min(max(y_new, bounds.y_min), bounds.y_max),
    )


def penalty(
    step: int,
    macro: Macro,
    pos: Point,
    placement: Placement,
    netlist: Netlist,
    config: PlacerConfig,
    footprints: dict[str, Rect] | None = None,
) -> float:
    """Overlap penalty of ``macro`` at ``pos`` against all other macros:
    the penalty constant times the step's multiplier times the total
    circumference of the pairwise footprint intersections."""
    cand = footprint(macro, pos)
    if footprints is None:
        footprints = {
            mid: footprint(netlist.by_id[mid], placement[mid])
            for mid in sorted(placement)
            if mid in netlist.by_id
        }
    total_circ = 0.0
    for mid, fp in footprints.items():
        if mid == macro.id:
            continue
        inter = cand.intersect(fp)
        if inter is not None:
            total_circ += inter.circumference
    return config.penalty_c * config.delta_at(step) * total_circ


def _round_model(rnd: int, config: PlacerConfig) -> NetModel:
    """Scoring model for a 1-based round: smoothed before the switch round,
    exact bounding box at and after it."""
    if rnd >= config.switch_round:
        return NetModel.bb()
    return NetModel.nl(beta_schedule(rnd, config.max_rounds))


def candidate_score(
    macro: Macro, pos: Point, state: PlacerState, config: PlacerConfig
) -> float:
    """Score of moving ``macro`` to ``pos`` in the current round: field cost
    of the snapped footprint, plus the lengths of the macro's nets, plus the
    overlap penalty, plus the weighted blockage overlap area."""
    fp = footprint(macro, pos)
    snapped = snap_to_grid(fp, state.area, config.grid_p, config.grid_q)
    score = state.field.cost(snapped) if snapped is not None else 0.0
    model = _round_model(state.round + 1, config)
    for ni in state.net_indices_of[macro.id]:
        net = state.netlist.nets[ni]
        pts = [
            pos if mid == macro.id else state.placement[mid] for mid in net.members
        ]
        score += model_length(pts, model)
    score += penalty(
        state.round, macro, pos, state.placement, state.netlist, config,
        state.footprints,
    )
    for b in state.area.blockages:
        inter = fp.intersect(b)
        if inter is not None:
            score += config.blockage_weight * inter.area
    return score


def new_state(
    netlist: Netlist,
    area: PlacementArea,
    config: PlacerConfig,
    initial: Placement | None = None,
) -> PlacerState:
    """Initial loop state: bounds, placement (given positions clamped into
    bounds, missing ones drawn uniformly), zero field plus one static
    increase per blockage, and fresh statistics caches."""
    bounds = {m.id: compute_bounds(m, area) for m in netlist.macros}
    if initial is not None:
        for mid in initial:
            if mid not in bounds:
                raise ValueError(f"initial position for unknown macro {mid!r}")
    rng = random.Random(config.seed)
    macro_order = sorted(m.id for m in netlist.macros)
    placement: Placement = {}
    for mid in macro_order:
        b = bounds[mid]
        if initial is not None and mid in initial:
            x, y = initial[mid]
            x = min(max(x, b.x_min), b.x_max)
            y = min(max(y, b.y_min), b.y_max)
        else:
            x = rng.uniform(b.x_min, b.x_max)
            y = rng.uniform(b.y_min, b.y_max)
        placement[mid] = (x, y)

    fld = CostField(config.grid_p, config.grid_q)
    for blk in area.blockages:
        snapped = snap_to_grid(blk, area, config.grid_p, config.grid_q)
        if snapped is not None:
            fld.increase(snapped, config.blockage_weight)

    footprints = {
        mid: footprint(netlist.by_id[mid], placement[mid]) for mid in macro_order
    }
    net_indices_of: dict[str, list[int]] = {mid: [] for mid in macro_order}
    net_bb: list[float] = []
    for ni, net in enumerate(netlist.nets):
        net_bb.append(bb_netlength([placement[mid] for mid in net.members]))
        for mid in net.members:
            net_indices_of[mid].append(ni)
    pair_overlap: dict[tuple[str, str], float] = {}
    for i, mi in enumerate(macro_order):
        for mj in macro_order[i + 1 :]:
            inter = footprints[mi].intersect(footprints[mj])
            if inter is not None:
                pair_overlap[(mi, mj)] = inter.area

    state = PlacerState(
        netlist=netlist,
        area=area,
        rng=rng,
        placement=placement,
        field=fld,
        bounds=bounds,
        round=0,
        macro_order=macro_order,
        footprints=footprints,
        net_bb=net_bb,
        net_indices_of=net_indices_of,
        pair_overlap=pair_overlap,
    )
    state.trace.append(_stats_row(state, config))
    return state


def _stats_row(state: PlacerState, config: PlacerConfig) -> RoundStats:
    rnd = state.round
    beta = beta_schedule(rnd, config.max_rounds) if 1 <= rnd <= config.max_rounds \
        else (beta_schedule(1, config.max_rounds) if config.max_rounds >= 1 else 1.0)
    step = max(0, rnd - 1)
    return RoundStats(
        round=rnd,
        netlength_bb=state.total_netlength_bb(),
        overlap_area=state.total_overlap_area(),
        delta=config.delta_at(step),
        beta=beta,
        w=config.w_at(step),
    )


def round_step(state: PlacerState, config: PlacerConfig) -> None:
    """One round: pick a macro at random, score the current position plus
    ``candidates_per_round`` proposals, move to the argmin (ties to the
    lowest index, the current position first), grow the field under every
    remaining overlap of the moved macro, inflate, advance statistics.

    Diagnostics of the executed round are left on ``state.last_*``.  The
    config must be the one the state was created with.
    """
    if state.round >= config.max_rounds:
        raise ValueError("all configured rounds already executed")
    if (config.grid_p, config.grid_q) != (state.field.p, state.field.q):
        raise ValueError("config grid exponents differ from the state's field")
    rng = state.rng
    mid = state.macro_order[rng.randrange(len(state.macro_order))]
    macro = state.netlist.by_id[mid]
    x0 = state.placement[mid]
    candidates = [x0]
    for _ in range(config.candidates_per_round):
        candidates.append(move_macro(x0, state.bounds[mid], rng))
    scores = [candidate_score(macro, c, state, config) for c in candidates]
    best = 0
    for i in range(1, len(scores)):
        if scores[i] < scores[best]:
            best = i
    chosen = candidates[best]

    state.placement[mid] = chosen
    new_fp = footprint(macro, chosen)
    state.footprints[mid] = new_fp
    for ni in state.net_indices_of[mid]:
        net = state.netlist.nets[ni]
        state.net_bb[ni] = bb_netlength(
            [state.placement[m2] for m2 in net.members]
        )
    w = config.w_at(state.round)
    for other in state.macro_order:
        if other == mid:
            continue
        inter = new_fp.intersect(state.footprints[other])
        key = (mid, other) if mid < other else (other, mid)
        if inter is None:
            state.pair_overlap.pop(key, None)
        else:
            state.pair_overlap[key] = inter.area
            snapped = snap_to_grid(inter, state.area, config.grid_p, config.grid_q)
            if snapped is not None:
                state.field.increase(snapped, w)
    state.field.inflate(config.inflation_rho)

    state.round += 1
    state.trace.append(_stats_row(state, config))
    state.last_macro = mid
    state.last_candidates = candidates
    state.last_scores = scores
    state.last_choice = best


def run_placer(
    netlist: Netlist,
    area: PlacementArea,
    config: PlacerConfig,
    initial: Placement | None = None,
) -> tuple[Placement, list[RoundStats]]:
    """Run the full loop and return the final placement plus the statistics
    trace (row 0 describes the initial placement, then one row per round)."""
    state = new_state(netlist, area, config, initial)
    if state.macro_order:
        for _ in range(config.max_rounds):
            round_step(state, config)
    return state.placement, state.trace


def _lattice(lo: float, hi: float, step: float) -> list[float]:
    """Grid positions from lo to hi inclusive (endpoint always present)."""
    vals = []
    i = 0
    while True:
        v = lo + i * step
        if v >= hi:
            break
        vals.append(v)
        i += 1
    vals.append(hi)
    return vals


def naive_legalize(
    placement: Placement,
    netlist: Netlist,
    area: PlacementArea,
    grid_p: int | None = None,
    grid_q: int | None = None,
) -> Placement:
    """Greedy legalizer for nearly-legal placements.

    Macros are processed by area, largest first.  Each keeps its position if
    conflict-free; otherwise it moves to the nearest conflict-free lattice
    position (Manhattan rings over a grid-resolution sweep, deterministic tie
    order).  Raises :class:`LegalizationError` when a macro cannot be placed,
    and never returns an illegal placement.

    Without explicit exponents the sweep resolution is chosen so a cell is at
    most half the smallest macro dimension (capped at 2**10 cells per axis).
    """
    if not netlist.macros:
        return dict(placement)
    min_dim = min(min(m.size_x, m.size_y) for m in netlist.macros)

    def auto_exp(span: float) -> int:
        e = 0
        while span / (1 << e) > min_dim / 2.0 and e < 10:
            e += 1
        return e

    gp = grid_p if grid_p is not None else auto_exp(area.width)
    gq = grid_q if grid_q is not None else auto_exp(area.height)
    gx = area.width / (1 << gp)
    gy = area.height / (1 << gq)

    placed: dict[str, Rect] = {}

    def conflict_free(m: Macro, pos: Point, b: MacroBounds) -> bool:
        if not (b.x_min <= pos[0] <= b.x_max and b.y_min <= pos[1] <= b.y_max):
            return False
        fp = footprint(m, pos)
        for r in placed.values():
            if fp.overlaps(r):
                return False
        for blk in area.blockages:
            if fp.overlaps(blk):
                return False
        return True

    out: Placement = {}
    order = sorted(netlist.macros, key=lambda m: (-m.area, m.id))
    for m in order:
        if m.id not in placement:
            raise ValueError(f"macro {m.id!r} has no position")
        b = compute_bounds(m, area)
        x, y = placement[m.id]
        x = min(max(x, b.x_min), b.x_max)
        y = min(max(y, b.y_min), b.y_max)
        if conflict_free(m, (x, y), b):
            out[m.id] = (x, y)
            placed[m.id] = footprint(m, (x, y))
            continue
        xs = _lattice(b.x_min, b.x_max, gx)
        ys = _lattice(b.y_min, b.y_max, gy)
        ci = min(bisect_left(xs, x), len(xs) - 1)
        if ci > 0 and abs(xs[ci - 1] - x) <= abs(xs[ci] - x):
            ci -= 1
        cj = min(bisect_left(ys, y), len(ys) - 1)
        if cj > 0 and abs(ys[cj - 1] - y) <= abs(ys[cj] - y):
            cj -= 1
        found: Point | None = None
        max_r = len(xs) + len(ys)
        for r in range(max_r + 1):
            for di in range(-r, r + 1):
                i = ci + di
                if not 0 <= i < len(xs):
                    continue
                rem = r - abs(di)
                for dj in ((rem, -rem) if rem else (0,)):
                    j = cj + dj
                    if not 0 <= j < len(ys):
                        continue
                    cand = (xs[i], ys[j])
                    if conflict_free(m, cand, b):
                        found = cand
                        break
                if found:
                    break
            if found:
                break
        if found is None:
            raise LegalizationError(m.id)
        out[m.id] = found
        placed[m.id] = footprint(m, found)

    report = is_legal(out, netlist, area)
    if not report.legal:
        raise LegalizationError(
            next(iter(report.out_of_area), "?"),
            f"legalizer produced an illegal placement: {report}",
        )
    return out
