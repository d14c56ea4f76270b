"""Cubical grid complexes, chains, boundary operators and mass.

Cells are addressed by a base point and the tuple of axes they span.  A
k-cell at base point ``p`` spanning axes ``(a1, ..., ak)`` (ascending) is the
product of unit intervals ``[p_ai, p_ai + 1]`` in the spanned directions.
Within each degree, cells are indexed in lexicographic order of
``(coordinates, axis label)``.

Boundary sign convention for a cell spanning ``(a1, ..., ak)``::

    d[p; A] = sum_i (-1)**i * ([p + e_ai; A - ai] - [p; A - ai])      (i from 0)

so the unit square boundary is ``E(0,0,X) + E(1,0,Y) - E(0,1,X) - E(0,0,Y)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

AXIS_NAMES = "XYZ"


class ComplexError(ValueError):
    """Invalid complex, chain or cochain construction."""


def axes_label(axes: Sequence[int]) -> str:
    return "".join(AXIS_NAMES[a] for a in axes)


def parse_axes_label(label: str) -> tuple[int, ...]:
    try:
        axes = tuple(AXIS_NAMES.index(ch) for ch in label)
    except ValueError:
        raise ComplexError(f"bad axis label {label!r}") from None
    if list(axes) != sorted(set(axes)):
        raise ComplexError(f"axis label {label!r} must list distinct axes in order")
    return axes


@dataclass(frozen=True)
class Cell:
    coords: tuple[int, ...]
    axes: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.axes)

    def __str__(self) -> str:
        return f"{self.coords}{axes_label(self.axes)}"


class CubicalComplex:
    """A 2D or 3D cubical grid, optionally periodic along some axes.

    Instances are immutable; all index tables and boundary matrices are built
    eagerly so that concurrent readers never trigger mutation.
    """

    def __init__(self, dimension: int, extent: Sequence[int], periodic: Sequence[bool] | None = None):
        if dimension not in (2, 3):
            raise ComplexError(f"dimension must be 2 or 3, got {dimension!r}")
        extent = tuple(int(n) for n in extent)
        if len(extent) != dimension:
            raise ComplexError(f"extent {extent} does not match dimension {dimension}")
        if any(n < 1 for n in extent):
            raise ComplexError(f"every extent must be >= 1, got {extent}")
        if periodic is None:
            periodic = (False,) * dimension
        periodic = tuple(bool(p) for p in periodic)
        if len(periodic) != dimension:
            raise ComplexError(f"periodic flags {periodic} do not match dimension {dimension}")
        for n, p in zip(extent, periodic):
            if p and n < 3:
                raise ComplexError(f"periodic axes need extent >= 3, got {extent}")
        self.dimension = dimension
        self.extent = extent
        self.periodic = periodic

        # per degree: list of axis tuples, lookup arrays, and the sorted cell list
        self._lookup: list[dict[tuple[int, ...], np.ndarray]] = []
        self._cells: list[list[Cell]] = []
        for k in range(dimension + 1):
            self._enumerate(k)
        self._boundary = [None] + [self._build_boundary(k) for k in range(1, dimension + 1)]

    # -- construction ---------------------------------------------------------

    def _shape_for(self, axes: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(
            n if (a in axes or p) else n + 1
            for a, (n, p) in enumerate(zip(self.extent, self.periodic))
        )

    def _enumerate(self, k: int) -> None:
        entries = []
        for axes in itertools.combinations(range(self.dimension), k):
            shape = self._shape_for(axes)
            grids = np.indices(shape).reshape(self.dimension, -1).T
            label = axes_label(axes)
            entries.extend((tuple(int(c) for c in row), label, axes) for row in grids)
        entries.sort(key=lambda e: (e[0], e[1]))
        lookup = {}
        for axes in itertools.combinations(range(self.dimension), k):
            lookup[axes] = np.full(self._shape_for(axes), -1, dtype=np.int64)
        cells = []
        for i, (coords, _, axes) in enumerate(entries):
            lookup[axes][coords] = i
            cells.append(Cell(coords, axes))
        self._lookup.append(lookup)
        self._cells.append(cells)

    def _build_boundary(self, k: int) -> sp.csr_matrix:
        rows, cols, vals = [], [], []
        for axes, table in self._lookup[k].items():
            idx = np.indices(table.shape).reshape(self.dimension, -1)
            col = table.reshape(-1)
            for i, a in enumerate(axes):
                sign = -1 if i % 2 else 1
                sub = axes[:i] + axes[i + 1:]
                sub_table = self._lookup[k - 1][sub]
                shifted = idx.copy()
                shifted[a] += 1
                if self.periodic[a]:
                    shifted[a] %= self.extent[a]
                rows.append(sub_table[tuple(shifted)])
                cols.append(col)
                vals.append(np.full(col.size, sign))
                rows.append(sub_table[tuple(idx)])
                cols.append(col)
                vals.append(np.full(col.size, -sign))
        mat = sp.coo_matrix(
            (np.concatenate(vals).astype(float), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.num_cells(k - 1), self.num_cells(k)),
        ).tocsr()
        mat.sum_duplicates()
        mat.eliminate_zeros()
        return mat

    # -- queries --------------------------------------------------------------

    def num_cells(self, k: int) -> int:
        return len(self._cells[k])

    def cells(self, k: int) -> list[Cell]:
        return list(self._cells[k])

    def cell(self, k: int, index: int) -> Cell:
        return self._cells[k][index]

    def index(self, coords: Sequence[int], axes: Sequence[int]) -> int:
        """Index of the cell at ``coords`` spanning ``axes``; periodic coords wrap."""
        axes = tuple(axes)
        if len(coords) != self.dimension or axes not in self._lookup[len(axes)]:
            raise ComplexError(f"no cell {tuple(coords)} spanning {axes_label(axes)!r}")
        table = self._lookup[len(axes)][axes]
        c = []
        for a, x in enumerate(coords):
            if self.periodic[a]:
                x %= self.extent[a]
            if not 0 <= x < table.shape[a]:
                raise ComplexError(f"no cell {tuple(coords)} spanning {axes_label(axes)!r}")
            c.append(int(x))
        return int(table[tuple(c)])

    def has_cell(self, coords: Sequence[int], axes: Sequence[int]) -> bool:
        try:
            self.index(coords, axes)
        except ComplexError:
            return False
        return True

    def lookup_table(self, axes: Sequence[int]) -> np.ndarray:
        """Array of cell indices over base points for cells spanning ``axes``."""
        return self._lookup[len(tuple(axes))][tuple(axes)].copy()

    def boundary_matrix(self, k: int) -> sp.csr_matrix:
        """Sparse matrix of the boundary map from k-cells to (k-1)-cells."""
        if not 1 <= k <= self.dimension:
            raise ComplexError(f"boundary matrix needs 1 <= k <= {self.dimension}, got {k}")
        return self._boundary[k]

    @property
    def top(self) -> int:
        return self.dimension

    @property
    def key(self) -> tuple:
        return (self.dimension, self.extent, self.periodic)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CubicalComplex) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"CubicalComplex(dimension={self.dimension}, extent={self.extent}, periodic={self.periodic})"


def build_complex(dimension: int, extent: Sequence[int], periodic: Sequence[bool] | None = None) -> CubicalComplex:
    return CubicalComplex(dimension, extent, periodic)


# -- chains -------------------------------------------------------------------


def _clean(coeffs: Mapping[int, float]) -> dict[int, float]:
    return {int(i): c for i, c in sorted(coeffs.items()) if c != 0}


class Chain:
    """A sparse real chain of degree ``degree`` on a complex."""

    __slots__ = ("complex", "degree", "_coeffs")

    def __init__(self, cx: CubicalComplex, degree: int, coeffs: Mapping[int, float] | None = None):
        if not 0 <= degree <= cx.dimension:
            raise ComplexError(f"degree {degree} out of range for a {cx.dimension}D complex")
        clean = _clean(coeffs or {})
        n = cx.num_cells(degree)
        for i in clean:
            if not 0 <= i < n:
                raise ComplexError(f"cell id {i} is not a {degree}-cell of {cx!r}")
        self.complex = cx
        self.degree = degree
        self._coeffs = clean

    @classmethod
    def zero(cls, cx: CubicalComplex, degree: int) -> "Chain":
        return cls(cx, degree)

    @classmethod
    def from_vector(cls, cx: CubicalComplex, degree: int, vec) -> "Chain":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (cx.num_cells(degree),):
            raise ComplexError(f"vector of shape {vec.shape} does not fit degree {degree}")
        nz = np.flatnonzero(vec)
        return cls(cx, degree, {int(i): _tidy(vec[i]) for i in nz})

    @classmethod
    def from_cells(cls, cx: CubicalComplex, items: Iterable[tuple[Sequence[int], Sequence[int], float]]) -> "Chain":
        """Build from ``(coords, axes, coefficient)`` triples; repeated cells add up."""
        acc: dict[int, float] = {}
        degree = None
        for coords, axes, c in items:
            axes = tuple(axes)
            if degree is None:
                degree = len(axes)
            elif degree != len(axes):
                raise ComplexError("mixed degrees in one chain")
            i = cx.index(coords, axes)
            acc[i] = acc.get(i, 0) + c
        if degree is None:
            raise ComplexError("cannot infer the degree of an empty cell list")
        return cls(cx, degree, acc)

    @property
    def coeffs(self) -> dict[int, float]:
        return dict(self._coeffs)

    def items(self):
        return self._coeffs.items()

    def support(self) -> frozenset[int]:
        return frozenset(self._coeffs)

    def to_vector(self) -> np.ndarray:
        vec = np.zeros(self.complex.num_cells(self.degree))
        for i, c in self._coeffs.items():
            vec[i] = c
        return vec

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_integral(self, tol: float = 0.0) -> bool:
        return all(abs(c - round(c)) <= tol for c in self._coeffs.values())

    def _check(self, other: "Chain") -> None:
        if not isinstance(other, Chain):
            raise TypeError(f"expected Chain, got {type(other).__name__}")
        if other.complex != self.complex or other.degree != self.degree:
            raise ComplexError("chains live on different complexes or degrees")

    def __add__(self, other: "Chain") -> "Chain":
        self._check(other)
        acc = dict(self._coeffs)
        for i, c in other._coeffs.items():
            acc[i] = _tidy(acc.get(i, 0) + c)
        return Chain(self.complex, self.degree, acc)

    def __neg__(self) -> "Chain":
        return Chain(self.complex, self.degree, {i: -c for i, c in self._coeffs.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __mul__(self, scalar: float) -> "Chain":
        return Chain(self.complex, self.degree, {i: _tidy(c * scalar) for i, c in self._coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Chain)
            and other.complex == self.complex
            and other.degree == self.degree
            and other._coeffs == self._coeffs
        )

    def __hash__(self) -> int:
        return hash((self.complex, self.degree, tuple(self._coeffs.items())))

    def __len__(self) -> int:
        return len(self._coeffs)

    def __repr__(self) -> str:
        body = ", ".join(f"{self.complex.cell(self.degree, i)}:{c:g}" for i, c in list(self._coeffs.items())[:6])
        more = ", ..." if len(self._coeffs) > 6 else ""
        return f"Chain(degree={self.degree}, {{{body}{more}}})"


def _tidy(c: float):
    """Collapse integral floats to int so integer chains stay integer-typed."""
    c = float(c)
    return int(c) if c.is_integer() else c


@dataclass(frozen=True)
class BinarySet:
    """A set of top-dimensional cells (pixels or voxels)."""

    complex: CubicalComplex
    cells: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        cells = frozenset(int(c) for c in self.cells)
        n = self.complex.num_cells(self.complex.top)
        bad = [c for c in cells if not 0 <= c < n]
        if bad:
            raise ComplexError(f"cells {sorted(bad)[:5]} are not top cells of {self.complex!r}")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_mask(cls, cx: CubicalComplex, mask) -> "BinarySet":
        """Build from a boolean array indexed ``mask[y, x]`` (2D) or ``mask[z, y, x]`` (3D)."""
        mask = np.asarray(mask, dtype=bool)
        expected = tuple(reversed(cx.extent))
        if mask.shape != expected:
            raise ComplexError(f"mask shape {mask.shape} does not match extent {cx.extent}")
        table = cx.lookup_table(tuple(range(cx.dimension)))
        ids = table[tuple(reversed(np.nonzero(mask)))]
        return cls(cx, frozenset(int(i) for i in ids))

    def to_mask(self) -> np.ndarray:
        cx = self.complex
        table = cx.lookup_table(tuple(range(cx.dimension)))
        inside = np.zeros(cx.num_cells(cx.top), dtype=bool)
        inside[list(self.cells)] = True
        # table is indexed [x, y(, z)]; masks are [y, x] / [z, y, x]
        return inside[table].T.copy()

    def indicator(self) -> Chain:
        return Chain(self.complex, self.complex.top, {c: 1 for c in self.cells})

    def symmetric_difference(self, other: "BinarySet") -> "BinarySet":
        if other.complex != self.complex:
            raise ComplexError("sets live on different complexes")
        return BinarySet(self.complex, self.cells ^ other.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def __bool__(self) -> bool:
        return bool(self.cells)


@dataclass(frozen=True)
class MassWeights:
    """Per-degree cell weights; ``None`` for a degree means all ones."""

    weights: tuple = ()

    def __post_init__(self):
        for w in self.weights:
            if w is not None and np.any(np.asarray(w) <= 0):
                raise ComplexError("mass weights must be strictly positive")

    def for_degree(self, cx: CubicalComplex, k: int) -> np.ndarray:
        if k < len(self.weights) and self.weights[k] is not None:
            w = np.asarray(self.weights[k], dtype=float)
            if w.shape != (cx.num_cells(k),):
                raise ComplexError(f"weights for degree {k} have shape {w.shape}")
            return w
        return np.ones(cx.num_cells(k))


UNIT_WEIGHTS = MassWeights()


class FormCochain:
    """A real cochain of degree ``degree``; dense values per k-cell."""

    def __init__(self, cx: CubicalComplex, degree: int, values=None):
        if not 0 <= degree <= cx.dimension:
            raise ComplexError(f"degree {degree} out of range for a {cx.dimension}D complex")
        n = cx.num_cells(degree)
        values = np.zeros(n) if values is None else np.array(values, dtype=float)
        if values.shape != (n,):
            raise ComplexError(f"cochain needs {n} values, got shape {values.shape}")
        values.setflags(write=False)
        self.complex = cx
        self.degree = degree
        self.values = values

    def pair(self, chain: Chain) -> float:
        """Evaluate the cochain on a chain."""
        if chain.complex != self.complex or chain.degree != self.degree:
            raise ComplexError("cochain and chain do not match")
        return float(sum(c * self.values[i] for i, c in chain.items()))

    @property
    def d(self) -> np.ndarray:
        """Coboundary values per (k+1)-cell."""
        return coboundary(self).values

    def is_feasible(self, lam: float, tol: float = 1e-9) -> bool:
        if np.any(np.abs(self.values) > 1 + tol):
            return False
        if self.degree < self.complex.dimension and np.any(np.abs(self.d) > lam + tol):
            return False
        return True

    def as_chain(self) -> Chain:
        return Chain.from_vector(self.complex, self.degree, self.values)


# -- operators ----------------------------------------------------------------


def boundary(chain: Chain) -> Chain:
    if chain.degree < 1:
        raise ComplexError("the boundary of a 0-chain is undefined here")
    cx = chain.complex
    if chain.is_zero():
        return Chain.zero(cx, chain.degree - 1)
    out = cx.boundary_matrix(chain.degree) @ chain.to_vector()
    return Chain.from_vector(cx, chain.degree - 1, out)


def coboundary(cochain: FormCochain) -> FormCochain:
    cx = cochain.complex
    if cochain.degree >= cx.dimension:
        raise ComplexError("top-degree cochains have no coboundary")
    vals = cx.boundary_matrix(cochain.degree + 1).T @ cochain.values
    return FormCochain(cx, cochain.degree + 1, vals)


def mass(chain: Chain, weights: MassWeights = UNIT_WEIGHTS) -> float:
    if chain.is_zero():
        return 0.0
    w = weights.for_degree(chain.complex, chain.degree)
    return float(sum(w[i] * abs(c) for i, c in chain.items()))


def boundary_of_set(omega: BinarySet) -> Chain:
    """Oriented boundary chain of a set of top cells."""
    return boundary(omega.indicator())


def dilate_complex(cx: CubicalComplex, factor: int) -> CubicalComplex:
    return CubicalComplex(cx.dimension, [n * factor for n in cx.extent], cx.periodic)


def dilate_pushforward(chain: Chain, factor: int, target: CubicalComplex | None = None) -> Chain:
    """Push a chain forward under the integer dilation ``x -> factor * x``.

    Each k-cell becomes the ``factor**k`` cells tiling its image, each with the
    original coefficient, so unit-weight mass scales by ``factor**k``.
    """
    if isinstance(factor, bool) or not isinstance(factor, (int, np.integer)):
        if isinstance(factor, float) and factor.is_integer():
            factor = int(factor)
        else:
            raise ComplexError(f"dilation factor must be a positive integer, got {factor!r}")
    if factor < 1:
        raise ComplexError(f"dilation factor must be a positive integer, got {factor!r}")
    cx = chain.complex
    target = target or dilate_complex(cx, factor)
    if target.extent != tuple(n * factor for n in cx.extent) or target.periodic != cx.periodic:
        raise ComplexError(f"target {target!r} is not the {factor}-dilation of {cx!r}")
    acc: dict[int, float] = {}
    for i, c in chain.items():
        cell = cx.cell(chain.degree, i)
        base = [x * factor for x in cell.coords]
        for offs in itertools.product(range(factor), repeat=cell.degree):
            p = list(base)
            for a, o in zip(cell.axes, offs):
                p[a] += o
            j = target.index(p, cell.axes)
            acc[j] = acc.get(j, 0) + c
    return Chain(target, chain.degree, acc)
