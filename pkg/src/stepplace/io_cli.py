"""Instance/result files, instance generation, checking, SVG, and the CLI.

Instance files are a line-based text format (``#`` starts a comment):

    area <width> <height>              exactly once
    blockage <x1> <y1> <x2> <y2>       zero or more keep-out rectangles
    macro <id> <size_x> <size_y>       one per macro, ids unique
    net <id> <id> [<id> ...]           at least two distinct members
    place <id> <x> <y>                 optional initial center positions

Result files echo the full placer configuration, a summary recomputable from
the positions, and one ``place`` line per macro:

    config <field> <value>
    summary netlength_bb <float>
    summary overlap_area <float>
    summary legal <true|false>
    place <id> <x> <y>

All coordinates are area units; occupied regions are half-open rectangles, so
edge-to-edge contact is not an overlap.  Floats are written with ``repr`` and
round-trip exactly.  File writes are atomic (write temp, then rename).

The ``stepplace`` CLI wraps this: ``place`` runs the placer, ``check``
independently verifies a result, ``gen`` emits random instances, ``render``
draws an SVG.  When the environment variable ``STEPPLACE_OUT_DIR`` is set,
relative output paths are resolved under it.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import random
import sys
import tempfile
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from stepplace.netmodel import (
    Macro,
    Net,
    Netlist,
    Placement,
    PlacementArea,
    Rect,
    bb_netlength,
    footprint,
    is_legal,
)
from stepplace.placer import (
    LegalizationError,
    PlacerConfig,
    RoundStats,
    naive_legalize,
    new_state,
    round_step,
)

OUT_DIR_ENV = "STEPPLACE_OUT_DIR"


class InstanceFormatError(ValueError):
    """Malformed or inconsistent instance/result file."""


def _atomic_write(path: str, write_body) -> None:
    """Write via a temp file in the target directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as fp:
            write_body(fp)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _parse_float(tok: str, ln: int, what: str) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise InstanceFormatError(f"line {ln}: {what} is not a number: {tok!r}")
    if not math.isfinite(v):
        raise InstanceFormatError(f"line {ln}: {what} must be finite: {tok!r}")
    return v


def parse_instance(
    fp: Iterable[str],
) -> tuple[Netlist, PlacementArea, Placement | None]:
    """Parse an instance file; see the module docstring for the grammar.

    Raises :class:`InstanceFormatError` with a line number on parse errors
    and with the offending entity on validation errors.
    """
    area_dims: tuple[float, float] | None = None
    blockages: list[Rect] = []
    macros: list[Macro] = []
    nets: list[Net] = []
    places: Placement = {}
    for ln, raw in enumerate(fp, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        kind, args = toks[0], toks[1:]
        if kind == "area":
            if area_dims is not None:
                raise InstanceFormatError(f"line {ln}: duplicate area line")
            if len(args) != 2:
                raise InstanceFormatError(f"line {ln}: area needs width and height")
            area_dims = (
                _parse_float(args[0], ln, "area width"),
                _parse_float(args[1], ln, "area height"),
            )
        elif kind == "blockage":
            if len(args) != 4:
                raise InstanceFormatError(f"line {ln}: blockage needs x1 y1 x2 y2")
            x1, y1, x2, y2 = (_parse_float(a, ln, "blockage corner") for a in args)
            try:
                blockages.append(Rect(x1, y1, x2, y2))
            except ValueError as e:
                raise InstanceFormatError(f"line {ln}: {e}")
        elif kind == "macro":
            if len(args) != 3:
                raise InstanceFormatError(f"line {ln}: macro needs id size_x size_y")
            try:
                macros.append(
                    Macro(
                        args[0],
                        _parse_float(args[1], ln, "macro size_x"),
                        _parse_float(args[2], ln, "macro size_y"),
                    )
                )
            except ValueError as e:
                raise InstanceFormatError(f"line {ln}: {e}")
        elif kind == "net":
            if len(args) < 2:
                raise InstanceFormatError(
                    f"line {ln}: net needs at least 2 members"
                )
            try:
                nets.append(Net(tuple(args)))
            except ValueError as e:
                raise InstanceFormatError(f"line {ln}: {e}")
        elif kind == "place":
            if len(args) != 3:
                raise InstanceFormatError(f"line {ln}: place needs id x y")
            if args[0] in places:
                raise InstanceFormatError(
                    f"line {ln}: duplicate place for macro {args[0]!r}"
                )
            places[args[0]] = (
                _parse_float(args[1], ln, "place x"),
                _parse_float(args[2], ln, "place y"),
            )
        else:
            raise InstanceFormatError(f"line {ln}: unknown directive {kind!r}")

    if area_dims is None:
        raise InstanceFormatError("missing area line")
    try:
        area = PlacementArea(area_dims[0], area_dims[1], tuple(blockages))
        netlist = Netlist(macros, nets)
    except ValueError as e:
        raise InstanceFormatError(str(e))
    for mid in places:
        if mid not in netlist.by_id:
            raise InstanceFormatError(f"place line for unknown macro {mid!r}")
    return netlist, area, (places or None)


def load_instance(path: str) -> tuple[Netlist, PlacementArea, Placement | None]:
    """Load and validate an instance file."""
    with open(path) as fp:
        return parse_instance(fp)


def write_instance(
    fp: IO[str],
    netlist: Netlist,
    area: PlacementArea,
    initial: Placement | None = None,
) -> None:
    fp.write("# stepplace instance\n")
    fp.write(f"area {area.width!r} {area.height!r}\n")
    for b in area.blockages:
        fp.write(f"blockage {b.x1!r} {b.y1!r} {b.x2!r} {b.y2!r}\n")
    for m in netlist.macros:
        fp.write(f"macro {m.id} {m.size_x!r} {m.size_y!r}\n")
    for net in netlist.nets:
        fp.write("net " + " ".join(net.members) + "\n")
    if initial:
        for mid in sorted(initial):
            x, y = initial[mid]
            fp.write(f"place {mid} {x!r} {y!r}\n")


def save_instance(
    path: str,
    netlist: Netlist,
    area: PlacementArea,
    initial: Placement | None = None,
) -> None:
    _atomic_write(path, lambda fp: write_instance(fp, netlist, area, initial))


@dataclass
class ResultData:
    """Parsed result file."""

    positions: Placement
    netlength_bb: float
    overlap_area: float
    legal: bool
    config: dict[str, str]


def _summarize(placement: Placement, netlist: Netlist, area: PlacementArea):
    total_bb = sum(
        bb_netlength([placement[mid] for mid in net.members])
        for net in netlist.nets
    )
    rects = {m.id: footprint(m, placement[m.id]) for m in netlist.macros}
    ids = sorted(rects)
    overlap = 0.0
    for i, mi in enumerate(ids):
        for mj in ids[i + 1 :]:
            inter = rects[mi].intersect(rects[mj])
            if inter is not None:
                overlap += inter.area
    legal = is_legal(placement, netlist, area).legal if placement else True
    return total_bb, overlap, legal


def write_result(
    fp: IO[str],
    placement: Placement,
    netlist: Netlist,
    area: PlacementArea,
    config: PlacerConfig,
) -> None:
    total_bb, overlap, legal = _summarize(placement, netlist, area)
    fp.write("# stepplace result\n")
    for f in dataclasses.fields(config):
        v = getattr(config, f.name)
        fp.write(f"config {f.name} {'none' if v is None else repr(v)}\n")
    fp.write(f"summary netlength_bb {total_bb!r}\n")
    fp.write(f"summary overlap_area {overlap!r}\n")
    fp.write(f"summary legal {'true' if legal else 'false'}\n")
    for mid in sorted(placement):
        x, y = placement[mid]
        fp.write(f"place {mid} {x!r} {y!r}\n")


def save_result(
    path: str,
    placement: Placement,
    netlist: Netlist,
    area: PlacementArea,
    config: PlacerConfig,
) -> None:
    _atomic_write(
        path, lambda fp: write_result(fp, placement, netlist, area, config)
    )


def load_result(path: str) -> ResultData:
    positions: Placement = {}
    config: dict[str, str] = {}
    summary: dict[str, str] = {}
    with open(path) as fp:
        for ln, raw in enumerate(fp, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.split()
            if toks[0] == "config" and len(toks) == 3:
                config[toks[1]] = toks[2]
            elif toks[0] == "summary" and len(toks) == 3:
                summary[toks[1]] = toks[2]
            elif toks[0] == "place" and len(toks) == 4:
                positions[toks[1]] = (
                    _parse_float(toks[2], ln, "place x"),
                    _parse_float(toks[3], ln, "place y"),
                )
            else:
                raise InstanceFormatError(f"line {ln}: bad result line {line!r}")
    try:
        return ResultData(
            positions=positions,
            netlength_bb=float(summary["netlength_bb"]),
            overlap_area=float(summary["overlap_area"]),
            legal=summary["legal"] == "true",
            config=config,
        )
    except KeyError as e:
        raise InstanceFormatError(f"result file missing summary field {e}")


STATS_HEADER = "round,netlength_bb,overlap_area,delta,beta,w"


def _stats_line(row: RoundStats) -> str:
    return (
        f"{row.round},{row.netlength_bb!r},{row.overlap_area!r},"
        f"{row.delta!r},{row.beta!r},{row.w!r}"
    )


def write_stats_csv(fp: IO[str], trace: Sequence[RoundStats]) -> None:
    """Per-round statistics stream with a fixed header."""
    fp.write(STATS_HEADER + "\n")
    for row in trace:
        fp.write(_stats_line(row) + "\n")


# ---------------------------------------------------------------------------
# instance generation


@dataclass(frozen=True)
class GenSpec:
    """Parameters of the random instance generator.

    The degree weights follow the typical profile: mostly 2-pin nets, some
    3-pin, rarely larger.  The placement area is sized so that the total
    macro area divided by the area equals ``utilization``.
    """

    macros: int
    nets: int
    size_min: float = 2.0
    size_max: float = 5.0
    utilization: float = 0.5
    degree_weights: tuple[tuple[int, float], ...] = ((2, 0.75), (3, 0.2), (4, 0.05))
    degree_cap: int = 10
    aspect: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.macros < 0 or self.nets < 0:
            raise ValueError("macro and net counts must be >= 0")
        if not 0 < self.size_min <= self.size_max:
            raise ValueError("need 0 < size_min <= size_max")
        if not 0 < self.utilization <= 1:
            raise ValueError("utilization must be in (0, 1]")
        if not self.aspect > 0:
            raise ValueError("aspect must be positive")
        if self.degree_cap < 1:
            raise ValueError("degree_cap must be >= 1")
        if not self.degree_weights or any(
            d < 2 or w < 0 for d, w in self.degree_weights
        ):
            raise ValueError("degree weights need degrees >= 2 and weights >= 0")
        if sum(w for _, w in self.degree_weights) <= 0:
            raise ValueError("degree weights must not all be zero")


def generate_instance(spec: GenSpec) -> tuple[Netlist, PlacementArea]:
    """Deterministic random instance for a :class:`GenSpec`.

    Sizes are drawn uniformly and discretized to 0.1 units; the area is sized
    for the utilization target (within rounding) with the requested aspect
    ratio.  Net degrees are drawn from the weighted distribution, members
    without replacement among macros still under the per-macro net cap.
    """
    rng = random.Random(spec.seed)
    width = len(str(max(spec.macros - 1, 0)))
    macros = []
    for i in range(spec.macros):
        sx = round(rng.uniform(spec.size_min, spec.size_max), 1)
        sy = round(rng.uniform(spec.size_min, spec.size_max), 1)
        macros.append(Macro(f"m{i:0{width}d}", sx, sy))
    total = sum(m.area for m in macros)
    if total == 0:
        if spec.nets:
            raise ValueError("cannot generate nets without macros")
        area = PlacementArea(1.0, 1.0)
        return Netlist([], []), area
    target = total / spec.utilization
    a_w = round(math.sqrt(target * spec.aspect), 2)
    a_h = round(target / a_w, 2)
    for m in macros:
        if m.size_x > a_w or m.size_y > a_h:
            raise ValueError(
                f"infeasible spec: macro {m.id} ({m.size_x}x{m.size_y}) exceeds "
                f"the {a_w}x{a_h} area implied by the utilization target"
            )
    area = PlacementArea(a_w, a_h)

    degrees = [d for d, _ in spec.degree_weights]
    weights = [w for _, w in spec.degree_weights]
    wsum = sum(weights)
    load = {m.id: 0 for m in macros}
    nets = []
    for _ in range(spec.nets):
        r = rng.random() * wsum
        acc = 0.0
        deg = degrees[-1]
        for d, w in zip(degrees, weights):
            acc += w
            if r < acc:
                deg = d
                break
        candidates = sorted(mid for mid, c in load.items() if c < spec.degree_cap)
        if len(candidates) < 2:
            raise ValueError(
                "infeasible spec: degree cap leaves fewer than 2 macros available"
            )
        members = sorted(rng.sample(candidates, min(deg, len(candidates))))
        for mid in members:
            load[mid] += 1
        nets.append(Net(tuple(members)))
    return Netlist(macros, nets), area


# ---------------------------------------------------------------------------
# SVG rendering


def _svg_fmt(v: float) -> str:
    return f"{v:.6g}"


def render_svg(
    netlist: Netlist,
    area: PlacementArea,
    placement: Placement,
    fp: IO[str],
    pixel_width: float = 800.0,
) -> None:
    """Draw the instance: area outline, hatched blockages, labeled macro
    rectangles, and nets as center-to-center lines (centroid star for nets
    with more than two pins).  Output bytes are deterministic."""
    s = pixel_width / area.width
    w = pixel_width
    h = area.height * s
    f = _svg_fmt

    def X(x: float) -> str:
        return f(x * s)

    def Y(y: float) -> str:  # flip so the origin is the lower-left corner
        return f(h - y * s)

    fp.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{f(w)}" height="{f(h)}" '
        f'viewBox="0 0 {f(w)} {f(h)}">\n'
    )
    fp.write(
        "<defs><pattern id=\"hatch\" width=\"8\" height=\"8\" "
        "patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">"
        "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" stroke=\"#888\" "
        "stroke-width=\"2\"/></pattern></defs>\n"
    )
    fp.write(
        f'<rect x="0" y="0" width="{f(w)}" height="{f(h)}" fill="white" '
        f'stroke="black" stroke-width="2"/>\n'
    )
    for b in area.blockages:
        fp.write(
            f'<rect x="{X(b.x1)}" y="{Y(b.y2)}" width="{f(b.width * s)}" '
            f'height="{f(b.height * s)}" fill="url(#hatch)" stroke="#555"/>\n'
        )
    for m in netlist.macros:
        if m.id not in placement:
            continue
        r = footprint(m, placement[m.id])
        cx, cy = placement[m.id]
        font = max(6.0, min(m.size_x, m.size_y) * s / 3.0)
        fp.write(
            f'<rect x="{X(r.x1)}" y="{Y(r.y2)}" width="{f(r.width * s)}" '
            f'height="{f(r.height * s)}" fill="#9db8d9" fill-opacity="0.7" '
            f'stroke="#345"/>\n'
        )
        fp.write(
            f'<text x="{X(cx)}" y="{Y(cy)}" font-size="{f(font)}" '
            f'text-anchor="middle" dominant-baseline="middle">{m.id}</text>\n'
        )
    for net in netlist.nets:
        pts = [placement[mid] for mid in net.members if mid in placement]
        if len(pts) < 2:
            continue
        if len(pts) == 2:
            (x1, y1), (x2, y2) = pts
            fp.write(
                f'<line x1="{X(x1)}" y1="{Y(y1)}" x2="{X(x2)}" y2="{Y(y2)}" '
                f'stroke="#c33" stroke-width="1" stroke-opacity="0.6"/>\n'
            )
        else:
            cx = sum(p[0] for p in pts) / len(pts)
            cy = sum(p[1] for p in pts) / len(pts)
            for x1, y1 in pts:
                fp.write(
                    f'<line x1="{X(x1)}" y1="{Y(y1)}" x2="{X(cx)}" y2="{Y(cy)}" '
                    f'stroke="#c33" stroke-width="1" stroke-opacity="0.6"/>\n'
                )
    fp.write("</svg>\n")


# ---------------------------------------------------------------------------
# independent result checking


def check_result(
    netlist: Netlist, area: PlacementArea, result: ResultData
) -> tuple[bool, list[str]]:
    """Re-derive legality and total bounding-box netlength from scratch.

    This is deliberately a separate code path from
    :func:`stepplace.netmodel.is_legal` so the checker cannot inherit a
    placer-side mistake.  Returns (legal, report lines).
    """
    lines: list[str] = []
    inst_ids = sorted(netlist.by_id)
    res_ids = sorted(result.positions)
    if inst_ids != res_ids:
        missing = sorted(set(inst_ids) - set(res_ids))
        extra = sorted(set(res_ids) - set(inst_ids))
        if missing:
            lines.append(f"macros missing from result: {', '.join(missing)}")
        if extra:
            lines.append(f"macros not in instance: {', '.join(extra)}")
        return False, lines

    spans = {}
    for mid in inst_ids:
        m = netlist.by_id[mid]
        x, y = result.positions[mid]
        spans[mid] = (
            x - m.size_x / 2.0,
            x + m.size_x / 2.0,
            y - m.size_y / 2.0,
            y + m.size_y / 2.0,
        )
    legal = True
    for mid, (x1, x2, y1, y2) in spans.items():
        if x1 < 0 or x2 > area.width or y1 < 0 or y2 > area.height:
            lines.append(f"macro {mid} leaves the placement area")
            legal = False
    for i, mi in enumerate(inst_ids):
        a = spans[mi]
        for mj in inst_ids[i + 1 :]:
            b = spans[mj]
            if (
                max(a[0], b[0]) < min(a[1], b[1])
                and max(a[2], b[2]) < min(a[3], b[3])
            ):
                lines.append(f"macros {mi} and {mj} overlap")
                legal = False
    for mid, a in spans.items():
        for bi, blk in enumerate(area.blockages):
            if (
                max(a[0], blk.x1) < min(a[1], blk.x2)
                and max(a[2], blk.y1) < min(a[3], blk.y2)
            ):
                lines.append(f"macro {mid} overlaps blockage {bi}")
                legal = False

    total = 0.0
    for net in netlist.nets:
        xs = [result.positions[mid][0] for mid in net.members]
        ys = [result.positions[mid][1] for mid in net.members]
        total += max(xs) - min(xs) + max(ys) - min(ys)
    lines.append(f"total bounding-box netlength: {total!r}")
    lines.append(f"legal: {'true' if legal else 'false'}")
    return legal, lines


# ---------------------------------------------------------------------------
# CLI


def _out_path(path: str) -> str:
    base = os.environ.get(OUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


_CONFIG_FLAGS = {
    "rounds": "max_rounds",
    "candidates": "candidates_per_round",
    "grid_p": "grid_p",
    "grid_q": "grid_q",
    "penalty_c": "penalty_c",
    "delta0": "delta0",
    "delta_growth": "delta_growth",
    "w0": "w0",
    "w_growth": "w_growth",
    "rho": "inflation_rho",
    "blockage_weight": "blockage_weight",
    "seed": "seed",
    "model_switch_round": "model_switch_round",
}


def _build_config(args: argparse.Namespace) -> PlacerConfig:
    """Defaults, overridden by --config JSON, overridden by explicit flags."""
    values: dict = {}
    if args.config:
        with open(args.config) as fp:
            loaded = json.load(fp)
        if not isinstance(loaded, dict):
            raise InstanceFormatError("config file must hold a JSON object")
        valid = {f.name for f in dataclasses.fields(PlacerConfig)}
        for k, v in loaded.items():
            if k not in valid:
                raise InstanceFormatError(f"unknown config key {k!r}")
            values[k] = v
    for flag, fname in _CONFIG_FLAGS.items():
        v = getattr(args, flag)
        if v is not None:
            values[fname] = v
    if "max_rounds" not in values:
        values["max_rounds"] = 10000
    return PlacerConfig(**values)


def _add_config_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--rounds", type=int, help="number of rounds (max_rounds)")
    sub.add_argument("--candidates", type=int, help="candidate positions per round")
    sub.add_argument("--grid-p", dest="grid_p", type=int, help="x grid exponent")
    sub.add_argument("--grid-q", dest="grid_q", type=int, help="y grid exponent")
    sub.add_argument("--penalty-c", dest="penalty_c", type=float)
    sub.add_argument("--delta0", type=float, help="penalty multiplier base")
    sub.add_argument("--delta-growth", dest="delta_growth", type=float)
    sub.add_argument("--w0", type=float, help="field increment base")
    sub.add_argument("--w-growth", dest="w_growth", type=float)
    sub.add_argument("--rho", type=float, help="field inflation factor per round")
    sub.add_argument("--blockage-weight", dest="blockage_weight", type=float)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--model-switch-round", dest="model_switch_round", type=int)
    sub.add_argument(
        "--config", help="JSON file with PlacerConfig fields (flags take precedence)"
    )


def _cmd_place(args: argparse.Namespace) -> int:
    try:
        netlist, area, initial = load_instance(args.infile)
        config = _build_config(args)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    state = new_state(netlist, area, config, initial)

    def run_rounds(stats_fp: IO[str] | None = None) -> None:
        # rows are streamed as rounds execute; with a stats file the whole
        # run happens inside the atomic write, so the final file is complete
        if stats_fp is not None:
            stats_fp.write(STATS_HEADER + "\n")
            stats_fp.write(_stats_line(state.trace[0]) + "\n")
        if not state.macro_order:
            return
        for _ in range(config.max_rounds):
            round_step(state, config)
            if stats_fp is not None:
                stats_fp.write(_stats_line(state.trace[-1]) + "\n")

    if args.stats:
        _atomic_write(_out_path(args.stats), run_rounds)
    else:
        run_rounds()
    placement = state.placement
    code = 0
    if args.skip_legalize:
        final = placement
    else:
        try:
            final = naive_legalize(
                placement, netlist, area, config.grid_p, config.grid_q
            )
        except LegalizationError as e:
            print(f"legalization failed: {e}", file=sys.stderr)
            final = placement
            code = 2
    out = _out_path(args.out)
    save_result(out, final, netlist, area, config)
    total_bb, overlap, legal = _summarize(final, netlist, area)
    print(
        f"placed {len(netlist.macros)} macros in {config.max_rounds} rounds: "
        f"netlength_bb={total_bb:.6g} overlap_area={overlap:.6g} "
        f"legal={'true' if legal else 'false'} -> {out}"
    )
    return code


def _cmd_check(args: argparse.Namespace) -> int:
    try:
        netlist, area, _ = load_instance(args.instance)
        result = load_result(args.result)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    legal, lines = check_result(netlist, area, result)
    for line in lines:
        print(line)
    return 0 if legal else 1


def _cmd_gen(args: argparse.Namespace) -> int:
    try:
        weights = tuple(
            (int(d), float(w))
            for d, w in (pair.split(":") for pair in args.degree_weights.split(","))
        )
        spec = GenSpec(
            macros=args.macros,
            nets=args.nets,
            size_min=args.size_min,
            size_max=args.size_max,
            utilization=args.utilization,
            degree_weights=weights,
            degree_cap=args.degree_cap,
            aspect=args.aspect,
            seed=args.seed,
        )
        netlist, area = generate_instance(spec)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    out = _out_path(args.out)
    save_instance(out, netlist, area)
    print(
        f"wrote {len(netlist.macros)} macros, {len(netlist.nets)} nets, "
        f"area {area.width}x{area.height} -> {out}"
    )
    return 0


def _cmd_render(args: argparse.Namespace) -> int:
    try:
        netlist, area, initial = load_instance(args.instance)
        if args.result:
            placement = load_result(args.result).positions
        else:
            placement = initial or {}
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    out = _out_path(args.out)
    _atomic_write(out, lambda fp: render_svg(netlist, area, placement, fp))
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stepplace",
        description="Macro placement on a fast 2D step-function cost field.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_place = sub.add_parser("place", help="run the placer on an instance")
    p_place.add_argument("--in", dest="infile", required=True, help="instance file")
    p_place.add_argument("--out", required=True, help="result file")
    p_place.add_argument("--stats", help="write per-round statistics CSV here")
    p_place.add_argument(
        "--skip-legalize",
        action="store_true",
        help="keep the raw global placement (may contain overlaps)",
    )
    _add_config_flags(p_place)
    p_place.set_defaults(func=_cmd_place)

    p_check = sub.add_parser("check", help="independently verify a result file")
    p_check.add_argument("--instance", required=True)
    p_check.add_argument("--result", required=True)
    p_check.set_defaults(func=_cmd_check)

    p_gen = sub.add_parser("gen", help="generate a random instance")
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--macros", type=int, required=True)
    p_gen.add_argument("--nets", type=int, required=True)
    p_gen.add_argument("--size-min", dest="size_min", type=float, default=2.0)
    p_gen.add_argument("--size-max", dest="size_max", type=float, default=5.0)
    p_gen.add_argument("--utilization", type=float, default=0.5)
    p_gen.add_argument(
        "--degree-weights",
        dest="degree_weights",
        default="2:0.75,3:0.2,4:0.05",
        help="comma-separated degree:weight pairs",
    )
    p_gen.add_argument("--degree-cap", dest="degree_cap", type=int, default=10)
    p_gen.add_argument("--aspect", type=float, default=1.0)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.set_defaults(func=_cmd_gen)

    p_render = sub.add_parser("render", help="draw an instance/result as SVG")
    p_render.add_argument("--instance", required=True)
    p_render.add_argument("--result", help="take positions from this result file")
    p_render.add_argument("--out", required=True)
    p_render.set_defaults(func=_cmd_render)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
