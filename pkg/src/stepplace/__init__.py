"""Macro placement on a fast 2D step-function cost field.

The package combines three layers:

* :mod:`stepplace.stepfield` - the orthogonal-basis representation of 2D step
  functions with logarithmic-time rectangle sums and rectangle increments;
* :mod:`stepplace.netmodel` - netlists, placements, legality, and the
  bounding-box / smoothed net-length models;
* :mod:`stepplace.placer` - the iterative placement heuristic that grows a
  dual cost field under overlaps, plus a naive final legalizer;
* :mod:`stepplace.io_cli` - instance/result files, an instance generator, an
  independent result checker, SVG rendering, and the ``stepplace`` CLI.
"""

from stepplace.netmodel import (
    LegalityReport,
    Macro,
    Net,
    Netlist,
    NetModel,
    PlacementArea,
    Rect,
    bb_netlength,
    beta_schedule,
    footprint,
    is_legal,
    lp_netlength,
    lse_netlength,
    marginal_cost,
    net_length,
    nl_netlength,
)
from stepplace.placer import (
    LegalizationError,
    MacroBounds,
    PlacerConfig,
    PlacerState,
    RoundStats,
    candidate_score,
    compute_bounds,
    gamma,
    move_macro,
    naive_legalize,
    new_state,
    penalty,
    round_step,
    run_placer,
    snap_to_grid,
)
from stepplace.stepfield import (
    HAVE_C_CORE,
    MAX_GRID_EXPONENT,
    BasisIndex,
    CostField,
    GridRect,
    all_basis_indices,
    basis_vector_1d,
    nonzero_basis_1d,
    star_1d,
    star_2d,
)

__version__ = "0.1.0"
