"""Finite computational models of measure spaces.

Two kinds: a finite list of atoms with positive masses, and a uniformly
sampled interval [0, L] with N cells standing in for non-atomic Lebesgue
measure. Functions are piecewise constant (one value per atom or cell),
which makes every integral an exact finite sum and keeps indicator-based
oracles exact. All values are immutable; operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CapacityError,
    DomainError,
    IndivisibleAtomsError,
    SpaceMismatchError,
)

__all__ = [
    "MeasureSpace",
    "MeasurableFn",
    "integrate",
    "find_subset_with_mass",
    "simple_approximation",
    "disjoint_positive_family",
]

ATOMIC = "atomic"
INTERVAL = "interval"


@dataclass(frozen=True, eq=False)
class MeasureSpace:
    kind: str
    masses: np.ndarray
    length: float | None = None
    atom_ids: tuple[str, ...] | None = None

    def __post_init__(self):
        masses = np.array(self.masses, dtype=float)
        if masses.ndim != 1 or masses.size == 0:
            raise DomainError("a measure space needs at least one atom or cell")
        if np.any(masses <= 0) or not np.all(np.isfinite(masses)):
            raise DomainError("masses and cell widths must be strictly positive and finite")
        object.__setattr__(self, "masses", masses)
        masses.setflags(write=False)

    @classmethod
    def atomic(cls, masses, atom_ids=None) -> "MeasureSpace":
        masses = np.asarray(masses, dtype=float)
        if atom_ids is None:
            atom_ids = tuple(f"a{i}" for i in range(masses.size))
        else:
            atom_ids = tuple(str(a) for a in atom_ids)
            if len(atom_ids) != masses.size:
                raise DomainError("atom_ids must match the number of masses")
        return cls(kind=ATOMIC, masses=masses, length=None, atom_ids=atom_ids)

    @classmethod
    def interval(cls, length: float, cells: int) -> "MeasureSpace":
        if not length > 0:
            raise DomainError("interval length must be positive")
        if not isinstance(cells, (int, np.integer)) or cells < 1:
            raise DomainError("cell count must be a positive integer")
        masses = np.full(int(cells), float(length) / int(cells))
        return cls(kind=INTERVAL, masses=masses, length=float(length))

    @property
    def size(self) -> int:
        return int(self.masses.size)

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    @property
    def is_atomic(self) -> bool:
        return self.kind == ATOMIC

    def midpoints(self) -> np.ndarray:
        """Cell midpoints; the sampling sites for analytic test functions."""
        if self.kind != INTERVAL:
            raise DomainError("midpoints are defined for sampled intervals only")
        n = self.size
        return (np.arange(n) + 0.5) * (self.length / n)

    def same_as(self, other: "MeasureSpace") -> bool:
        return (
            self.kind == other.kind
            and self.masses.shape == other.masses.shape
            and bool(np.array_equal(self.masses, other.masses))
        )

    def __eq__(self, other):
        return isinstance(other, MeasureSpace) and self.same_as(other)

    def __hash__(self):
        return hash((self.kind, self.masses.shape, float(self.masses[0]), float(self.masses[-1])))


@dataclass(frozen=True, eq=False)
class MeasurableFn:
    """Piecewise-constant function: one value per atom or cell."""

    values: np.ndarray
    space: MeasureSpace

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.space.size,):
            raise SpaceMismatchError(
                f"function has {values.size} values for a space of size {self.space.size}"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("function values must be finite")
        object.__setattr__(self, "values", values)
        values.setflags(write=False)

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, space: MeasureSpace, value: float) -> "MeasurableFn":
        return cls(np.full(space.size, float(value)), space)

    @classmethod
    def identity(cls, space: MeasureSpace) -> "MeasurableFn":
        """f(x) = x sampled at cell midpoints (interval spaces only)."""
        return cls(space.midpoints(), space)

    @classmethod
    def indicator(cls, space: MeasureSpace, lo: int = 0, hi: int | None = None) -> "MeasurableFn":
        hi = space.size if hi is None else int(hi)
        lo = int(lo)
        if not 0 <= lo <= hi <= space.size:
            raise DomainError("indicator range out of bounds")
        vals = np.zeros(space.size)
        vals[lo:hi] = 1.0
        return cls(vals, space)

    @classmethod
    def random(
        cls, space: MeasureSpace, seed: int, low: float = 0.0, high: float = 1.0
    ) -> "MeasurableFn":
        rng = np.random.default_rng(seed)
        return cls(rng.uniform(low, high, space.size), space)

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "MeasurableFn") -> None:
        if not self.space.same_as(other.space):
            raise SpaceMismatchError("operands live on different measure spaces")

    def __add__(self, other: "MeasurableFn") -> "MeasurableFn":
        self._check(other)
        return MeasurableFn(self.values + other.values, self.space)

    def __sub__(self, other: "MeasurableFn") -> "MeasurableFn":
        self._check(other)
        return MeasurableFn(self.values - other.values, self.space)

    def __mul__(self, scalar) -> "MeasurableFn":
        return MeasurableFn(self.values * float(scalar), self.space)

    __rmul__ = __mul__

    def __neg__(self) -> "MeasurableFn":
        return MeasurableFn(-self.values, self.space)

    def restrict(self, cells: np.ndarray) -> "MeasurableFn":
        """Zero the function outside the given cell indices."""
        mask = np.zeros(self.space.size, dtype=bool)
        mask[np.asarray(cells, dtype=int)] = True
        return MeasurableFn(np.where(mask, self.values, 0.0), self.space)


def integrate(space: MeasureSpace, g, f: MeasurableFn) -> float:
    """Integral of g(f) over the space: sum of mass_i * g(values_i).

    Exact for piecewise-constant integrands. g must be vectorized.
    """
    if not f.space.same_as(space):
        raise SpaceMismatchError("function does not live on the given space")
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.asarray(g(f.values), dtype=float)
    return float(np.dot(vals, space.masses))


def find_subset_with_mass(space: MeasureSpace, nu_weights, t: float) -> np.ndarray:
    """Prefix of cells whose nu-mass best approximates t from below.

    Deterministic greedy accumulation: returns the longest prefix whose
    accumulated weight stays <= t, so the residual |nu(A) - t| is bounded
    by one cell's weight. Atomic spaces cannot split and are rejected:
    their atoms are exactly the obstruction this operation rules out.
    """
    if space.is_atomic:
        raise IndivisibleAtomsError("exact-mass subsets require a non-atomic (interval) model")
    nu = np.asarray(nu_weights, dtype=float)
    if nu.shape != (space.size,):
        raise SpaceMismatchError("weight vector does not match the space")
    if np.any(nu < 0) or not np.all(np.isfinite(nu)):
        raise DomainError("weights must be non-negative and finite")
    total = float(nu.sum())
    if not 0.0 <= t <= total * (1 + 1e-12) + 1e-300:
        raise DomainError(f"target mass {t:g} outside [0, {total:g}]")
    cum = np.cumsum(nu)
    k = int(np.searchsorted(cum, t, side="right"))
    return np.arange(k)


def simple_approximation(f: MeasurableFn, n: int) -> MeasurableFn:
    """Dyadic simple-function approximation at resolution 2^-n, truncated at n.

    |f_n| <= |f| pointwise by construction, and f_n -> f pointwise with gap
    at most 2^-n once |f| <= n.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError("approximation level must be a positive integer")
    scale = 2.0**n
    quant = np.floor(np.abs(f.values) * scale) / scale
    quant = np.minimum(quant, float(n))
    return MeasurableFn(np.sign(f.values) * quant, f.space)


def disjoint_positive_family(space: MeasureSpace, count: int) -> list[np.ndarray]:
    """count pairwise-disjoint index subsets, each of positive measure.

    Equal-size contiguous blocks on intervals, singletons on atomic spaces.
    """
    if not isinstance(count, (int, np.integer)) or count < 1:
        raise DomainError("count must be a positive integer")
    if count > space.size:
        raise CapacityError(f"cannot carve {count} disjoint pieces out of {space.size}")
    if space.is_atomic:
        return [np.array([i]) for i in range(count)]
    block = space.size // count
    return [np.arange(i * block, (i + 1) * block) for i in range(count)]
