"""2D step functions on a power-of-two grid with logarithmic rectangle ops.

A :class:`CostField` represents an ``n x m`` matrix (``n = 2**p``,
``m = 2**q``) of per-cell values as coefficients over an orthogonal basis.
Each axis contributes ``n - 1`` zero-sum block vectors (a run of ``+1``
followed by an equally long run of ``-1`` at dyadic scale ``2**a``) plus the
all-ones vector; the 2D basis is the outer product of the two axis bases.
Because any cell-interval indicator has at most ``2p + 1`` nonzero inner
products per axis, both rectangle-sum queries and rectangle constant
increments touch at most ``(2p+1)*(2q+1)`` coefficients.

Rectangles are half-open in cell indices: ``GridRect(a1, b1, a2, b2)`` covers
cells ``a1 <= i < a2``, ``b1 <= j < b2`` (0-based).

Concurrency: single writer.  ``cost`` never mutates and is safe to call from
several threads while no ``increase``/``inflate`` is in flight; mutations
require exclusive access.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterator, NamedTuple

import numpy as np

try:
    from stepplace._fieldcore import FieldCore as _CFieldCore

    HAVE_C_CORE = True
except ImportError:  # pragma: no cover - depends on build environment
    _CFieldCore = None
    HAVE_C_CORE = False

#: Largest accepted grid exponent per axis (resource guard: the coefficient
#: store is dense, so an axis pair (p, q) allocates 2**(p+q) doubles).
MAX_GRID_EXPONENT = 11


@dataclass(frozen=True)
class GridRect:
    """Non-degenerate half-open cell rectangle ``[a1, a2) x [b1, b2)``."""

    a1: int
    b1: int
    a2: int
    b2: int

    def __post_init__(self) -> None:
        for v in (self.a1, self.b1, self.a2, self.b2):
            if not isinstance(v, int):
                raise TypeError(f"grid indices must be ints, got {v!r}")
        if not (0 <= self.a1 < self.a2 and 0 <= self.b1 < self.b2):
            raise ValueError(
                f"degenerate or negative grid rectangle "
                f"({self.a1},{self.b1})-({self.a2},{self.b2})"
            )

    @property
    def width(self) -> int:
        return self.a2 - self.a1

    @property
    def height(self) -> int:
        return self.b2 - self.b1

    @property
    def area(self) -> int:
        return self.width * self.height


class BasisIndex(NamedTuple):
    """Identifies the product basis element with axis levels (a, b) and block
    indices (k, l).  Level ``p`` (resp. ``q``) with block 1 is the all-ones
    axis vector."""

    a: int
    k: int
    b: int
    l: int


def blocks_at_level(p: int, a: int) -> int:
    """Number of valid block indexes k at axis level a (1-based blocks)."""
    if not 0 <= a <= p:
        raise ValueError(f"level {a} out of range for exponent {p}")
    if a == p:
        return 1
    return 1 << (p - a - 1)


def all_basis_indices(p: int, q: int) -> Iterator[BasisIndex]:
    """Every product basis element of the (2**p) x (2**q) grid, nm in total."""
    for a in range(p + 1):
        for k in range(1, blocks_at_level(p, a) + 1):
            for b in range(q + 1):
                for l in range(1, blocks_at_level(q, b) + 1):
                    yield BasisIndex(a, k, b, l)


def flat_axis_id(p: int, a: int, k: int) -> int:
    """Dense position of axis element (a, k) in [0, 2**p); all-ones is last."""
    if not 1 <= k <= blocks_at_level(p, a):
        raise ValueError(f"block {k} out of range at level {a} (exponent {p})")
    n = 1 << p
    if a == p:
        return n - 1
    return n - (n >> a) + (k - 1)


def nonzero_basis_1d(s: int, t: int, p: int) -> list[tuple[int, int, float]]:
    """All 1D basis elements not orthogonal to the indicator of cells [s, t).

    Returns ``(level a, block k, inner product)`` triples, the all-ones
    element last with inner product ``t - s``.  At most ``2p + 1`` entries.
    """
    n = 1 << p
    if not 0 <= s < t <= n:
        raise ValueError(f"invalid cell interval [{s}, {t}) for n={n}")
    out: list[tuple[int, int, float]] = []
    for a in range(p):
        span2 = 2 << a
        ks = (s + span2 - 1) // span2 if s > 0 else 0
        kt = (t + span2 - 1) // span2
        if ks:
            lo = (2 * ks - 2) << a
            hi = (2 * ks) << a
            v = -min(s - lo, hi - s)
            if kt == ks:
                v += min(t - lo, hi - t)
            if v:
                out.append((a, ks, float(v)))
        if kt != ks:
            lo = (2 * kt - 2) << a
            hi = (2 * kt) << a
            v = min(t - lo, hi - t)
            if v:
                out.append((a, kt, float(v)))
    out.append((p, 1, float(t - s)))
    return out


def star_1d(s: int, t: int, p: int, a: int, k: int) -> float:
    """Inner product of the indicator of cells [s, t) with axis element (a, k).

    Case analysis on which of the interval endpoints the element's support
    straddles; zero when it straddles neither.
    """
    n = 1 << p
    if not 0 <= s < t <= n:
        raise ValueError(f"invalid cell interval [{s}, {t}) for n={n}")
    if not 1 <= k <= blocks_at_level(p, a):
        raise ValueError(f"block {k} out of range at level {a} (exponent {p})")
    if a == p:
        return float(t - s)
    lo = (2 * k - 2) << a
    hi = (2 * k) << a
    hit_s = lo < s <= hi
    hit_t = lo < t <= hi
    v = 0
    if hit_s:
        v -= min(s - lo, hi - s)
    if hit_t:
        v += min(t - lo, hi - t)
    return float(v)


def star_2d(rect: GridRect, idx: BasisIndex, p: int, q: int) -> float:
    """Inner product of a rectangle indicator with a product basis element."""
    return star_1d(rect.a1, rect.a2, p, idx.a, idx.k) * star_1d(
        rect.b1, rect.b2, q, idx.b, idx.l
    )


def basis_vector_1d(p: int, a: int, k: int) -> np.ndarray:
    """Dense form of axis element (a, k): +1 block then -1 block, or all ones."""
    n = 1 << p
    if a == p:
        if k != 1:
            raise ValueError("the all-ones element has block index 1")
        return np.ones(n)
    if not 1 <= k <= blocks_at_level(p, a):
        raise ValueError(f"block {k} out of range at level {a} (exponent {p})")
    v = np.zeros(n)
    lo = (2 * k - 2) << a
    mid = (2 * k - 1) << a
    hi = (2 * k) << a
    v[lo:mid] = 1.0
    v[mid:hi] = -1.0
    return v


class _PyFieldCore:
    """numpy fallback with the same interface and semantics as the C core."""

    def __init__(self, p: int, q: int) -> None:
        self.p = p
        self.q = q
        self.n = 1 << p
        self.m = 1 << q
        self._coef = np.zeros(self.n * self.m)
        self._dlog_at: np.ndarray | None = None
        self._dlog_total = 0.0
        self.last_touched = 0

    def _flat_block(self, a1: int, b1: int, a2: int, b2: int):
        """Flat coefficient ids of the touched block plus the raw inner
        products and the products normalized by each element's squared norm
        (the projection weights used by increase)."""
        ax = nonzero_basis_1d(a1, a2, self.p)
        ay = nonzero_basis_1d(b1, b2, self.q)
        ix = np.array([flat_axis_id(self.p, a, k) for a, k, _ in ax], dtype=np.intp)
        iy = np.array([flat_axis_id(self.q, b, l) for b, l, _ in ay], dtype=np.intp)
        sx = np.array([v for _, _, v in ax])
        sy = np.array([v for _, _, v in ay])
        nx = np.array([float(2 << a) if a < self.p else float(self.n) for a, _, _ in ax])
        ny = np.array([float(2 << b) if b < self.q else float(self.m) for b, _, _ in ay])
        flat = (ix[:, None] * self.m + iy[None, :]).ravel()
        stars = (sx[:, None] * sy[None, :]).ravel()
        proj = ((sx / nx)[:, None] * (sy / ny)[None, :]).ravel()
        self.last_touched = flat.size
        return flat, stars, proj

    def _check(self, a1: int, b1: int, a2: int, b2: int) -> None:
        if not (0 <= a1 < a2 <= self.n and 0 <= b1 < b2 <= self.m):
            raise ValueError(
                f"rectangle ({a1},{b1})-({a2},{b2}) invalid for "
                f"{self.n}x{self.m} grid"
            )

    def increase(self, a1: int, b1: int, a2: int, b2: int, value: float) -> None:
        self._check(a1, b1, a2, b2)
        flat, _, proj = self._flat_block(a1, b1, a2, b2)
        cur = self._coef.take(flat)
        if self._dlog_at is not None:
            f = np.exp(self._dlog_total - self._dlog_at.take(flat))
            f[-1] = 1.0  # constant element (always last in the block) is exempt
            cur = cur * f
            self._dlog_at[flat] = self._dlog_total
        self._coef[flat] = cur + proj * value

    def cost(self, a1: int, b1: int, a2: int, b2: int) -> float:
        self._check(a1, b1, a2, b2)
        flat, stars, _ = self._flat_block(a1, b1, a2, b2)
        cur = self._coef.take(flat)
        if self._dlog_at is not None:
            f = np.exp(self._dlog_total - self._dlog_at.take(flat))
            f[-1] = 1.0
            cur = cur * f
        return float(np.dot(cur, stars))

    def inflate(self, rho: float) -> None:
        if not 0.0 < rho <= 1.0:
            raise ValueError("decay factor must be in (0, 1]")
        if rho == 1.0:
            return
        if self._dlog_at is None:
            self._dlog_at = np.zeros(self.n * self.m)
        self._dlog_total += math.log(rho)

    def coefficient(self, fx: int, fy: int) -> float:
        if not (0 <= fx < self.n and 0 <= fy < self.m):
            raise ValueError("axis component id out of range")
        k = fx * self.m + fy
        c = float(self._coef[k])
        if self._dlog_at is not None and k != self.n * self.m - 1:
            diff = self._dlog_total - float(self._dlog_at[k])
            if diff != 0.0:
                c *= math.exp(diff)
        return c


class CostField:
    """Step function over an ``n x m`` grid as orthogonal-basis coefficients.

    A fresh field is identically zero.  ``increase`` adds a constant to every
    cell of a rectangle, ``cost`` returns the sum over a rectangle, and
    ``inflate`` decays every non-constant coefficient, flattening the field
    toward its mean while preserving the total.  Negative increase values are
    accepted (the placer only ever adds non-negative mass).
    """

    def __init__(self, p: int, q: int, backend: str = "auto") -> None:
        if p < 0 or q < 0:
            raise ValueError("grid exponents must be non-negative")
        if p > MAX_GRID_EXPONENT or q > MAX_GRID_EXPONENT:
            raise ValueError(
                f"grid exponent above limit {MAX_GRID_EXPONENT}; "
                f"got p={p}, q={q}"
            )
        if backend == "auto":
            backend = "c" if HAVE_C_CORE else "py"
        if backend == "c":
            if not HAVE_C_CORE:
                raise RuntimeError("C field core is not available")
            self._core = _CFieldCore(p, q)
        elif backend == "py":
            self._core = _PyFieldCore(p, q)
        else:
            raise ValueError(f"unknown backend {backend!r}")
        self.backend = backend
        self.p = p
        self.q = q
        self.n = 1 << p
        self.m = 1 << q

    def _check_rect(self, rect: GridRect) -> None:
        if rect.a2 > self.n or rect.b2 > self.m:
            raise ValueError(
                f"rectangle ({rect.a1},{rect.b1})-({rect.a2},{rect.b2}) "
                f"outside {self.n}x{self.m} grid"
            )

    def increase(self, rect: GridRect, value: float) -> None:
        """Add ``value`` to every cell of ``rect``."""
        self._check_rect(rect)
        if not math.isfinite(value):
            raise ValueError("increase value must be finite")
        self._core.increase(rect.a1, rect.b1, rect.a2, rect.b2, value)

    def cost(self, rect: GridRect) -> float:
        """Sum of all cell values inside ``rect``."""
        self._check_rect(rect)
        return self._core.cost(rect.a1, rect.b1, rect.a2, rect.b2)

    def inflate(self, rho: float) -> None:
        """Decay all non-constant coefficients by ``rho`` in (0, 1].

        Lazy: O(1) now, each coefficient rescaled on next touch.  The total
        of the represented matrix is preserved exactly.
        """
        self._core.inflate(rho)

    def coefficient(self, idx: BasisIndex) -> float:
        """Current coefficient of one basis element (decay applied)."""
        fx = flat_axis_id(self.p, idx.a, idx.k)
        fy = flat_axis_id(self.q, idx.b, idx.l)
        return self._core.coefficient(fx, fy)

    @property
    def last_touched(self) -> int:
        """Coefficients touched by the most recent increase/cost."""
        return self._core.last_touched

    def to_dense(self) -> np.ndarray:
        """Materialize the represented matrix; entry [i, j] is the cell value
        at x-cell i, y-cell j.  Intended for debugging and small grids."""
        out = np.empty((self.n, self.m))
        for i in range(self.n):
            for j in range(self.m):
                out[i, j] = self.cost(GridRect(i, j, i + 1, j + 1))
        return out

    def dump_csv(self, fp: IO[str]) -> None:
        """Debug dump of the dense matrix as CSV.

        One output row per y-index j (ascending); the columns within a row
        run over the x-index i, so the entry in row j, column i is the value
        of the cell with x-cell i and y-cell j.
        """
        dense = self.to_dense()
        fp.write(
            "# dense field dump: row = y-cell index j, column = x-cell index i\n"
        )
        fp.write(f"# {self.n} columns x {self.m} rows\n")
        for j in range(self.m):
            fp.write(",".join(repr(float(dense[i, j])) for i in range(self.n)))
            fp.write("\n")
