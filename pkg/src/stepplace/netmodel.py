"""Netlists, placements, geometry, legality, and net-length models.

Coordinates are real placement-area units with the origin at the lower-left
corner of the area.  Every macro's pins sit at its center, so net models
operate on macro centers.  Occupied regions are half-open rectangles
``(x1, x2] x (y1, y2]``: two macros may share a boundary without overlapping.

All functions here are pure; a placement passed in is treated as an
immutable snapshot, so concurrent evaluation is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

Point = tuple[float, float]
Placement = dict[str, Point]


@dataclass(frozen=True)
class Rect:
    """Axis-parallel rectangle with half-open extent ``(x1, x2] x (y1, y2]``."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self) -> None:
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ValueError(
                f"degenerate rectangle ({self.x1},{self.y1})-({self.x2},{self.y2})"
            )

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def circumference(self) -> float:
        return 2.0 * (self.width + self.height)

    def intersect(self, other: "Rect") -> "Rect | None":
        """Intersection, or None when empty.  Half-open semantics make
        boundary contact empty."""
        x1 = max(self.x1, other.x1)
        y1 = max(self.y1, other.y1)
        x2 = min(self.x2, other.x2)
        y2 = min(self.y2, other.y2)
        if x1 < x2 and y1 < y2:
            return Rect(x1, y1, x2, y2)
        return None

    def overlaps(self, other: "Rect") -> bool:
        return (
            max(self.x1, other.x1) < min(self.x2, other.x2)
            and max(self.y1, other.y1) < min(self.y2, other.y2)
        )


@dataclass(frozen=True)
class Macro:
    """Rigid rectangular block; its position is the position of its center."""

    id: str
    size_x: float
    size_y: float

    def __post_init__(self) -> None:
        if not self.id or any(c.isspace() for c in self.id):
            raise ValueError(f"macro id must be non-empty without whitespace: {self.id!r}")
        if not (self.size_x > 0 and self.size_y > 0):
            raise ValueError(f"macro {self.id}: sizes must be positive")

    @property
    def area(self) -> float:
        return self.size_x * self.size_y


@dataclass(frozen=True)
class Net:
    """Hyperedge over at least two distinct macros."""

    members: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.members) < 2:
            raise ValueError(f"net {self.members!r} needs at least 2 members")
        if len(set(self.members)) != len(self.members):
            raise ValueError(f"net {self.members!r} has duplicate members")


@dataclass
class Netlist:
    """Macros plus the hypergraph of nets connecting them."""

    macros: list[Macro]
    nets: list[Net]
    by_id: dict[str, Macro] = field(init=False, repr=False)
    _nets_of: dict[str, list[Net]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.by_id = {}
        for m in self.macros:
            if m.id in self.by_id:
                raise ValueError(f"duplicate macro id {m.id!r}")
            self.by_id[m.id] = m
        self._nets_of = {m.id: [] for m in self.macros}
        for net in self.nets:
            for mid in net.members:
                if mid not in self.by_id:
                    raise ValueError(
                        f"net {net.members!r} references unknown macro {mid!r}"
                    )
                self._nets_of[mid].append(net)

    def nets_of(self, macro_id: str) -> list[Net]:
        """Nets containing the given macro."""
        return self._nets_of[macro_id]

    @property
    def total_macro_area(self) -> float:
        return sum(m.area for m in self.macros)


@dataclass(frozen=True)
class PlacementArea:
    """Placement rectangle ``[0, width] x [0, height]`` with keep-out blockages."""

    width: float
    height: float
    blockages: tuple[Rect, ...] = ()

    def __post_init__(self) -> None:
        if not (self.width > 0 and self.height > 0):
            raise ValueError("placement area must have positive size")
        for b in self.blockages:
            if not (0 <= b.x1 and b.x2 <= self.width and 0 <= b.y1 and b.y2 <= self.height):
                raise ValueError(f"blockage {b} outside the placement area")


def footprint(macro: Macro, pos: Point) -> Rect:
    """Region occupied by a macro centered at ``pos``."""
    x, y = pos
    hx = macro.size_x / 2.0
    hy = macro.size_y / 2.0
    return Rect(x - hx, y - hy, x + hx, y + hy)


@dataclass
class LegalityReport:
    """All legality violations of a total placement."""

    out_of_area: list[str]
    overlaps: list[tuple[str, str]]
    blockage_overlaps: list[tuple[str, int]]

    @property
    def legal(self) -> bool:
        return not (self.out_of_area or self.overlaps or self.blockage_overlaps)


def is_legal(
    placement: Placement, netlist: Netlist, area: PlacementArea
) -> LegalityReport:
    """Check the three legality conditions: inside the area, pairwise
    disjoint, disjoint from every blockage.  Half-open footprints make
    edge-to-edge contact legal."""
    rects: dict[str, Rect] = {}
    for m in netlist.macros:
        if m.id not in placement:
            raise ValueError(f"macro {m.id!r} has no position")
        rects[m.id] = footprint(m, placement[m.id])

    out_of_area = [
        mid
        for mid, r in rects.items()
        if not (r.x1 >= 0 and r.x2 <= area.width and r.y1 >= 0 and r.y2 <= area.height)
    ]
    ids = sorted(rects)
    overlaps = [
        (ids[i], ids[j])
        for i in range(len(ids))
        for j in range(i + 1, len(ids))
        if rects[ids[i]].overlaps(rects[ids[j]])
    ]
    blockage_overlaps = [
        (mid, bi)
        for mid in ids
        for bi, b in enumerate(area.blockages)
        if rects[mid].overlaps(b)
    ]
    return LegalityReport(out_of_area, overlaps, blockage_overlaps)


def bb_netlength(points: list[Point]) -> float:
    """Half-perimeter of the bounding box of the pin positions."""
    if len(points) < 2:
        raise ValueError("a net needs at least 2 pins")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return max(xs) - min(xs) + max(ys) - min(ys)


def _lse_axis(vals: list[float], alpha: float) -> float:
    # alpha*log(sum(exp(v/alpha))) + alpha*log(sum(exp(-v/alpha))), max-shifted
    hi = max(vals)
    lo = min(vals)
    pos = alpha * math.log(sum(math.exp((v - hi) / alpha) for v in vals)) + hi
    neg = alpha * math.log(sum(math.exp((lo - v) / alpha) for v in vals)) - lo
    return pos + neg


def lse_netlength(points: list[Point], alpha: float) -> float:
    """Log-sum-exp smoothing of the bounding-box length.

    Always at least the bounding-box length and converges to it as ``alpha``
    shrinks (gap at most ``2*alpha*log(len(points))`` per axis).
    """
    if len(points) < 2:
        raise ValueError("a net needs at least 2 pins")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return _lse_axis([p[0] for p in points], alpha) + _lse_axis(
        [p[1] for p in points], alpha
    )


def lp_netlength(points: list[Point], alpha: float, pw: float) -> float:
    """Clique smoothing: sum of ``(|d|**pw + alpha)**(1/pw)`` over unordered
    pin pairs, per axis.

    Converges to the pair distance as ``alpha -> 0, pw -> inf`` for 2-pin
    nets; for larger nets the clique sum exceeds the bounding-box length.
    """
    if len(points) < 2:
        raise ValueError("a net needs at least 2 pins")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not pw >= 1:
        raise ValueError("pw must be >= 1")
    tot = 0.0
    for axis in (0, 1):
        vals = [p[axis] for p in points]
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                tot += (abs(vals[i] - vals[j]) ** pw + alpha) ** (1.0 / pw)
    return tot


def nl_netlength(dx: float, dy: float, beta: float) -> float:
    """Smoothed absolute length of a 2-pin edge with coordinate differences
    ``(dx, dy)``: ``(1/beta)*log(exp(beta*d) + exp(-beta*d))`` per axis.

    Overflow-safe; approaches ``|dx| + |dy|`` as ``beta`` grows, with error
    at most ``2*log(2)/beta``.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")

    def axis(d: float) -> float:
        a = abs(beta * d)
        return (a + math.log1p(math.exp(-2.0 * a))) / beta

    return axis(dx) + axis(dy)


def beta_schedule(rnd: int, max_rounds: int) -> float:
    """Smoothing sharpness for a 1-based round: rises from 1 to max_rounds."""
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    if not 1 <= rnd <= max_rounds:
        raise ValueError(f"round {rnd} outside [1, {max_rounds}]")
    return max_rounds / (max_rounds - rnd + 1)


@dataclass(frozen=True)
class NetModel:
    """Net-length model selector.

    ``kind`` is one of ``bb``, ``lse``, ``lp``, ``nl``.  The ``nl`` kind is
    the smoothed regime: 2-pin nets use the exponential edge smoothing with
    sharpness ``beta``; larger nets fall back to log-sum-exp with
    ``alpha = 1/beta`` (the edge formula's convergence to the bounding box
    only holds per coordinate difference, i.e. for 2-pin nets).
    """

    kind: str
    alpha: float | None = None
    pw: float | None = None
    beta: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("bb", "lse", "lp", "nl"):
            raise ValueError(f"unknown net model {self.kind!r}")
        if self.kind == "lse" and not (self.alpha and self.alpha > 0):
            raise ValueError("lse model needs alpha > 0")
        if self.kind == "lp" and not (
            self.alpha and self.alpha > 0 and self.pw and self.pw >= 1
        ):
            raise ValueError("lp model needs alpha > 0 and pw >= 1")
        if self.kind == "nl" and not (self.beta and self.beta > 0):
            raise ValueError("nl model needs beta > 0")

    @staticmethod
    def bb() -> "NetModel":
        return NetModel("bb")

    @staticmethod
    def lse(alpha: float) -> "NetModel":
        return NetModel("lse", alpha=alpha)

    @staticmethod
    def lp(alpha: float, pw: float) -> "NetModel":
        return NetModel("lp", alpha=alpha, pw=pw)

    @staticmethod
    def nl(beta: float) -> "NetModel":
        return NetModel("nl", beta=beta)


def model_length(points: list[Point], model: NetModel) -> float:
    """Length of a pin set under the selected model (see :class:`NetModel`)."""
    if model.kind == "bb":
        return bb_netlength(points)
    if model.kind == "lse":
        return lse_netlength(points, model.alpha)
    if model.kind == "lp":
        return lp_netlength(points, model.alpha, model.pw)
    # smoothed regime
    if len(points) == 2:
        (x1, y1), (x2, y2) = points
        return nl_netlength(x1 - x2, y1 - y2, model.beta)
    return lse_netlength(points, 1.0 / model.beta)


def net_points(net: Net, placement: Placement) -> list[Point]:
    """Pin positions of a net; every member must be placed."""
    pts = []
    for mid in net.members:
        if mid not in placement:
            raise ValueError(f"macro {mid!r} of net {net.members!r} is not placed")
        pts.append(placement[mid])
    return pts


def net_length(net: Net, placement: Placement, model: NetModel) -> float:
    """Length of one net under the selected model."""
    return model_length(net_points(net, placement), model)


def marginal_cost(
    macro: Macro,
    candidate: Point,
    placement: Placement,
    netlist: Netlist,
    field_cost: float,
    model: NetModel,
) -> float:
    """Marginal contribution of placing ``macro`` at ``candidate``: the
    supplied field cost of the spot plus the length of every net containing
    the macro, evaluated with the macro moved there.

    Only nets containing the macro enter the sum, so positions of unrelated
    macros cannot affect the result.
    """
    tot = field_cost
    for net in netlist.nets_of(macro.id):
        pts = []
        for mid in net.members:
            if mid == macro.id:
                pts.append(candidate)
            elif mid in placement:
                pts.append(placement[mid])
            else:
                raise ValueError(
                    f"macro {mid!r} of net {net.members!r} is not placed"
                )
        tot += model_length(pts, model)
    return tot
