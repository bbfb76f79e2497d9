"""Min-entropy, gamma-density, and density-restoring partitions.

Sets are numpy arrays of distinct bitmask integers over a fixed number of
coordinates.  Coordinate j of element x is bit (x >> j) & 1.  All checks
are exact: the density threshold comparison

    count > |X| * 2^(-gamma |I|)

is evaluated in integer arithmetic (gamma is treated as a rational), so
exact ties never violate.  Pattern counts for all coordinate subsets of
one size are computed in a single batched bincount, and sizes whose counts
are capped below the threshold (a pattern's count is limited by the
varying coordinates outside it) are skipped outright.

The partition greedy peels the *maximally violating* pattern: the (I, a)
maximizing the violation ratio Pr[x_I = a] * 2^(gamma |I|), ties broken by
larger |I|, then lexicographically smaller (I, a).  Maximality makes each
peeled part gamma-dense on its free coordinates by construction: a
violation inside the part would extend the pattern to a strictly larger
ratio.  `validate_partition` re-checks that exactly anyway.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import EmptySet

_CHUNK_CELLS = 1 << 21  # cap on subsets-per-chunk x 2^s bincount cells


def _as_array(X) -> np.ndarray:
    arr = np.asarray(X, dtype=np.int64)
    if arr.size == 0:
        raise EmptySet("set must be nonempty")
    return arr


def _as_fraction(gamma) -> Fraction:
    if isinstance(gamma, float):
        return Fraction(gamma).limit_denominator(1000)
    return Fraction(gamma)


def density_cut(size: int, gamma, s: int) -> int:
    """floor(size * 2^(-gamma s)) computed exactly; a pattern of width s
    violates gamma-density iff its count exceeds this."""
    g = _as_fraction(gamma)
    num, den = (g * s).numerator, (g * s).denominator
    # largest c with c^den * 2^num <= size^den
    lo, hi = 0, size
    target = size**den
    shift = 1 << num
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**den * shift <= target:
            lo = mid
        else:
            hi = mid - 1
    return lo


def _ratio_gt(c1: int, s1: int, c2: int, s2: int, gamma: Fraction) -> bool:
    """Exact test of c1 * 2^(gamma s1) > c2 * 2^(gamma s2)."""
    num, den = gamma.numerator, gamma.denominator
    return c1**den << (num * s1) > c2**den << (num * s2)


def project(X: np.ndarray, coords) -> np.ndarray:
    """Pattern integers for each element; the first coordinate lands in the
    most-significant bit, so integer order equals assignment-string order."""
    s = len(coords)
    out = np.zeros(len(X), dtype=np.int64)
    for j, c in enumerate(coords):
        out |= ((X >> c) & 1) << (s - 1 - j)
    return out


def max_pattern_count(X: np.ndarray, coords) -> tuple[int, int]:
    """(count, pattern) of the most frequent assignment on coords; ties go
    to the smallest pattern."""
    proj = project(X, coords)
    counts = np.bincount(proj, minlength=1 << len(coords))
    best = int(counts.argmax())  # argmax returns the first (smallest) index
    return int(counts[best]), best


def min_entropy(X, coords) -> float:
    """Exact min-entropy of the uniform marginal on coords."""
    arr = _as_array(X)
    if not coords:
        return 0.0
    count, _ = max_pattern_count(arr, tuple(coords))
    return math.log2(len(arr) / count)


def varying_coords(X: np.ndarray, coords) -> tuple[int, ...]:
    andv = np.bitwise_and.reduce(X)
    orv = np.bitwise_or.reduce(X)
    return tuple(c for c in coords if ((andv >> c) ^ (orv >> c)) & 1)


@lru_cache(maxsize=64)
def _position_combos(f: int, s: int) -> np.ndarray:
    return np.array(list(combinations(range(f), s)), dtype=np.int64)


class _SizeScan:
    """Batched per-size max-pattern-count scans over one fixed set."""

    def __init__(self, arr: np.ndarray, coords: tuple[int, ...]):
        self.arr = arr
        self.coords = coords
        self.size = len(arr)
        self.f = len(coords)
        vary = set(varying_coords(arr, coords))
        self.v = len(vary)
        self.vary_flags = np.array(
            [1 if c in vary else 0 for c in coords], dtype=np.int64
        )
        # bits[j] = coordinate coords[j] of every element
        self.bits = np.stack(
            [(arr >> c) & 1 for c in coords]
        ) if self.f else np.zeros((0, len(arr)), dtype=np.int64)

    def size_cap(self, s: int) -> int:
        return min(self.size, 1 << (self.v - max(0, s - (self.f - self.v))))

    def best_at_size(self, s: int, cut: int, need: int):
        """Best (count, subset_positions, pattern) with count > max(cut,
        need - 1), or None.  Ties prefer the lexicographically first subset
        and the smallest pattern."""
        combos = _position_combos(self.f, s)
        inside = self.vary_flags[combos].sum(axis=1)
        caps = np.minimum(self.size, 1 << (self.v - inside))
        floor = max(cut, need - 1)
        keep = caps > floor
        if not keep.any():
            return None
        combos = combos[keep]
        chunk = max(1, _CHUNK_CELLS >> s)
        best = None  # (count, combo_index_global, pattern)
        for lo in range(0, len(combos), chunk):
            sub = combos[lo : lo + chunk]
            nc = len(sub)
            proj = np.zeros((nc, self.size), dtype=np.int64)
            for j in range(s):
                proj |= self.bits[sub[:, j]] << (s - 1 - j)
            proj += np.arange(nc, dtype=np.int64)[:, None] << s
            counts = np.bincount(proj.reshape(-1), minlength=nc << s).reshape(
                nc, 1 << s
            )
            rowmax = counts.max(axis=1)
            top = int(rowmax.max())
            if best is not None and top <= best[0]:
                continue
            if top <= floor:
                continue
            row = int(np.nonzero(rowmax == top)[0][0])
            pattern = int(np.nonzero(counts[row] == top)[0][0])
            if best is None or top > best[0]:
                best = (top, lo + row, sub[row], pattern)
        if best is None:
            return None
        count, _, positions, pattern = best
        return count, tuple(int(p) for p in positions), pattern


def is_dense(X, gamma, coords) -> bool:
    """Exact check: no pattern (I, a) over nonempty I subseteq coords has
    count exceeding |X| * 2^(-gamma |I|)."""
    arr = _as_array(X)
    coords = tuple(sorted(coords))
    if not coords:
        return True
    scan = _SizeScan(arr, coords)
    for s in range(1, scan.f + 1):
        cut = density_cut(scan.size, gamma, s)
        if scan.size_cap(s) <= cut:
            continue
        if scan.best_at_size(s, cut, 0) is not None:
            return False
    return True


def find_violation(X, gamma, coords) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """The maximally violating pattern (I, a), or None when X is
    gamma-dense on coords.

    Maximal means the largest violation ratio count * 2^(gamma |I|); ties
    prefer larger |I|, then lexicographically smaller (I, a).  I is an
    ascending coordinate tuple, a the matching bits.
    """
    arr = _as_array(X)
    coords = tuple(sorted(coords))
    if not coords:
        return None
    gamma = _as_fraction(gamma)
    scan = _SizeScan(arr, coords)
    best = None  # (count, s, positions, pattern)
    for s in range(scan.f, 0, -1):
        cut = density_cut(scan.size, gamma, s)
        cap = scan.size_cap(s)
        if cap <= cut:
            continue
        if best is not None and not _ratio_gt(cap, s, best[0], best[1], gamma):
            continue
        # smallest count at size s that would strictly beat the incumbent
        need = 0
        if best is not None:
            lo, hi = 1, cap
            while lo < hi:
                mid = (lo + hi) // 2
                if _ratio_gt(mid, s, best[0], best[1], gamma):
                    hi = mid
                else:
                    lo = mid + 1
            need = lo
            if not _ratio_gt(need, s, best[0], best[1], gamma):
                continue
        hit = scan.best_at_size(s, cut, need)
        if hit is None:
            continue
        count, positions, pattern = hit
        if best is None or _ratio_gt(count, s, best[0], best[1], gamma):
            best = (count, s, positions, pattern)
    if best is None:
        return None
    count, s, positions, pattern = best
    I = tuple(coords[p] for p in positions)
    bits = tuple((pattern >> (s - 1 - j)) & 1 for j in range(s))
    return I, bits


@dataclass(frozen=True)
class Part:
    elems: np.ndarray
    fixed_coords: tuple[int, ...]
    fixed_bits: tuple[int, ...]

    @property
    def codim(self) -> int:
        return len(self.fixed_coords)


def density_restoring_partition(X, gamma, coords) -> list[Part]:
    """Partition X so each part is fixed on its coordinates and gamma-dense
    on the rest of `coords`; parts appear in peel order."""
    residual = _as_array(X)
    coords = tuple(sorted(coords))
    parts: list[Part] = []
    while residual.size:
        viol = find_violation(residual, gamma, coords)
        if viol is None:
            parts.append(Part(residual, (), ()))
            break
        I, bits = viol
        s = len(I)
        a = 0
        for j, b in enumerate(bits):
            a |= b << (s - 1 - j)
        proj = project(residual, I)
        inside = residual[proj == a]
        parts.append(Part(inside, I, bits))
        residual = residual[proj != a]
    return parts


def validate_partition(X, parts: list[Part], gamma, coords) -> None:
    """Exact re-check of the partition postconditions; raises on failure."""
    arr = _as_array(X)
    coords = tuple(sorted(coords))
    seen = np.concatenate([p.elems for p in parts]) if parts else np.array([])
    if sorted(seen.tolist()) != sorted(arr.tolist()):
        raise AssertionError("parts do not partition the input set")
    for p in parts:
        for c, b in zip(p.fixed_coords, p.fixed_bits):
            if not np.all(((p.elems >> c) & 1) == b):
                raise AssertionError("part is not fixed on its coordinates")
        free = tuple(c for c in coords if c not in p.fixed_coords)
        if not is_dense(p.elems, gamma, free):
            raise AssertionError("part free coordinates are not dense")


def expected_codimension(parts: list[Part]) -> float:
    total = sum(len(p.elems) for p in parts)
    return sum(len(p.elems) * p.codim for p in parts) / total
