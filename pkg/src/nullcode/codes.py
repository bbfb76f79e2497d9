"""Linear codes over GF(2^s): generalized Reed-Solomon, folded views,
duals, decoding, and list-recovery counting.

A generalized Reed-Solomon code here always evaluates at the points
gamma^0, ..., gamma^(N-1), i.e. all of F_q^*, so N = q - 1.  Folding
groups m consecutive F_q symbols into one symbol of Sigma = F_q^m.

Codewords are tuples of n symbols; each symbol is a tuple of m field
elements.  Unfolded vectors are numpy int64 arrays of length N.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import linalg
from .budget import DEFAULT_ENUM_BUDGET
from .errors import BudgetExceeded, LengthMismatch
from .gf import FieldCtx, ensure_same_field
from .parallel import parallel_map

Symbol = tuple[int, ...]
Codeword = tuple[Symbol, ...]


@dataclass(frozen=True)
class CodeSpec:
    """A linear code over Sigma = F_q^m.

    kind "grs-folded": degree-k GRS with per-coordinate multipliers v,
    m-folded.  kind "generic-linear": explicit unfolded generator matrix
    (rows are basis codewords over F_q), m-folded.
    """

    kind: str
    field: FieldCtx
    m: int
    k: int | None = None
    gamma: int | None = None
    v: tuple[int, ...] | None = None
    genmat: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        q = self.field.q
        if self.kind == "grs-folded":
            if self.gamma is None or self.k is None or self.v is None:
                raise ValueError("grs-folded needs gamma, k and v")
            if len(self.v) != q - 1:
                raise LengthMismatch("multiplier vector must have length q-1")
            if any(not 0 < x < q for x in self.v):
                raise ValueError("multipliers must be nonzero field elements")
            if not 0 <= self.k <= q - 2:
                raise ValueError(f"degree k={self.k} outside [0, q-2]")
            if (q - 1) % self.m:
                raise ValueError("m must divide N = q-1")
        elif self.kind == "generic-linear":
            if not self.genmat:
                raise ValueError("generic-linear needs a generator matrix")
            ncols = len(self.genmat[0])
            if any(len(r) != ncols for r in self.genmat):
                raise LengthMismatch("ragged generator matrix")
            if ncols % self.m:
                raise ValueError("m must divide the matrix width")
            gm = np.array(self.genmat, dtype=np.int64)
            if linalg.rank(self.field, gm) != len(self.genmat):
                raise ValueError("generator matrix rows must be independent")
        else:
            raise ValueError(f"unknown code kind {self.kind!r}")

    # -- geometry ------------------------------------------------------------

    @property
    def N(self) -> int:
        if self.kind == "grs-folded":
            return self.field.q - 1
        return len(self.genmat[0])

    @property
    def n(self) -> int:
        return self.N // self.m

    @property
    def dim(self) -> int:
        if self.kind == "grs-folded":
            return self.k + 1
        return len(self.genmat)

    @property
    def size(self) -> int:
        return self.field.q ** self.dim

    @property
    def sigma_size(self) -> int:
        return self.field.q ** self.m

    # -- evaluation points and basis -----------------------------------------

    def points(self) -> np.ndarray:
        ctx = self.field
        pts = np.empty(self.N, dtype=np.int64)
        x = 1
        for i in range(self.N):
            pts[i] = x
            x = ctx.mul(x, self.gamma)
        return pts

    def generator_matrix(self) -> np.ndarray:
        """Unfolded generator matrix (dim x N)."""
        if self.kind == "generic-linear":
            return np.array(self.genmat, dtype=np.int64)
        ctx = self.field
        pts = self.points()
        rows = np.empty((self.k + 1, self.N), dtype=np.int64)
        row = np.array(self.v, dtype=np.int64)
        rows[0] = row
        for j in range(1, self.k + 1):
            row = linalg.mul_arrays(ctx, row, pts)
            rows[j] = row
        return rows

    def basis_rref(self) -> np.ndarray:
        return _basis_rref_cached(self)

    # -- symbol <-> rank -------------------------------------------------------

    def symbol_rank(self, sym: Symbol) -> int:
        q = self.field.q
        r = 0
        for d in sym:
            r = r * q + int(d)
        return r

    def rank_symbol(self, rank: int) -> Symbol:
        q = self.field.q
        out = []
        for _ in range(self.m):
            out.append(rank % q)
            rank //= q
        return tuple(reversed(out))

    def word_ranks(self, word: Codeword) -> tuple[int, ...]:
        return tuple(self.symbol_rank(s) for s in word)

    def to_json(self) -> dict:
        data = {"kind": self.kind, "field": self.field.to_json(), "m": self.m}
        if self.kind == "grs-folded":
            data.update({"gamma": self.gamma, "k": self.k, "v": list(self.v)})
        else:
            data["genmat"] = [list(r) for r in self.genmat]
        return data

    @classmethod
    def from_json(cls, data: dict) -> "CodeSpec":
        field = FieldCtx.from_json(data["field"])
        if data["kind"] == "grs-folded":
            return cls(
                kind="grs-folded",
                field=field,
                m=int(data["m"]),
                k=int(data["k"]),
                gamma=int(data["gamma"]),
                v=tuple(int(x) for x in data["v"]),
            )
        return cls(
            kind="generic-linear",
            field=field,
            m=int(data["m"]),
            genmat=tuple(tuple(int(x) for x in r) for r in data["genmat"]),
        )


def preset(t: int) -> CodeSpec:
    """Folded-RS code on the standard schedule: n = 2^t - 1 symbols over
    Sigma = F_q^m with q = 2^(2t), N = q - 1, m = 2^t + 1, k = floor(0.1 N)."""
    if t < 1:
        raise ValueError("t must be >= 1")
    s = 2 * t
    ctx = FieldCtx(s)
    N = ctx.q - 1
    m = (1 << t) + 1
    k = N // 10
    if k == 0:
        warnings.warn(f"preset t={t} is degenerate (k=0)", stacklevel=2)
    gamma = ctx.generator()
    return CodeSpec(
        kind="grs-folded",
        field=ctx,
        m=m,
        k=k,
        gamma=gamma,
        v=tuple([1] * N),
    )


# -- fold / unfold -------------------------------------------------------------


def fold(spec: CodeSpec, x) -> Codeword:
    x = list(int(v) for v in x)
    if len(x) != spec.N:
        raise LengthMismatch(f"expected {spec.N} field symbols, got {len(x)}")
    m = spec.m
    return tuple(tuple(x[i * m : (i + 1) * m]) for i in range(spec.n))


def unfold(spec: CodeSpec, z: Codeword) -> np.ndarray:
    if len(z) != spec.n:
        raise LengthMismatch(f"expected {spec.n} symbols, got {len(z)}")
    out = []
    for sym in z:
        if len(sym) != spec.m:
            raise LengthMismatch("symbol width does not match folding")
        out.extend(int(v) for v in sym)
    return np.array(out, dtype=np.int64)


def hw(word: Codeword) -> int:
    """Symbol-level Hamming weight."""
    return sum(1 for sym in word if any(sym))


def hw_unfolded(vec) -> int:
    return int(np.count_nonzero(np.asarray(vec)))


# -- encoding and enumeration ---------------------------------------------------


def encode(spec: CodeSpec, message) -> Codeword:
    """Encode a coefficient sequence (ascending degree for GRS) and fold."""
    return fold(spec, encode_unfolded(spec, message))


def encode_unfolded(spec: CodeSpec, message) -> np.ndarray:
    ctx = spec.field
    msg = [ctx.check_element(int(c)) for c in message]
    if spec.kind == "grs-folded":
        if len(msg) > spec.k + 1:
            raise LengthMismatch(
                f"message length {len(msg)} exceeds degree budget {spec.k + 1}"
            )
        msg = msg + [0] * (spec.k + 1 - len(msg))
        pts = spec.points()
        acc = np.zeros(spec.N, dtype=np.int64)
        for c in reversed(msg):
            acc = linalg.mul_arrays(ctx, acc, pts)
            acc ^= c
        return linalg.mul_arrays(ctx, acc, np.array(spec.v, dtype=np.int64))
    if len(msg) != spec.dim:
        raise LengthMismatch(
            f"message length {len(msg)} != matrix rows {spec.dim}"
        )
    return linalg.matvec(ctx, np.array(spec.genmat, dtype=np.int64).T, msg)


def message_from_rank(spec: CodeSpec, rank: int) -> tuple[int, ...]:
    q = spec.field.q
    out = []
    for _ in range(spec.dim):
        out.append(rank % q)
        rank //= q
    return tuple(out)


@lru_cache(maxsize=64)
def _basis_rref_cached(spec: CodeSpec) -> np.ndarray:
    out = linalg.row_space_canonical(spec.field, spec.generator_matrix())
    out.setflags(write=False)
    return out


def codeword_matrix(spec: CodeSpec, enum_budget: int = DEFAULT_ENUM_BUDGET) -> np.ndarray:
    """All codewords, unfolded, as a (|C| x N) array in message-rank order.

    Cached per spec; treat the result as read-only.
    """
    if spec.size > enum_budget:
        raise BudgetExceeded(f"|C| = {spec.size} exceeds budget {enum_budget}")
    return _codeword_matrix_cached(spec)


@lru_cache(maxsize=16)
def _codeword_matrix_cached(spec: CodeSpec) -> np.ndarray:
    ctx = spec.field
    q = ctx.q
    msgs = np.empty((spec.size, spec.dim), dtype=np.int64)
    ranks = np.arange(spec.size)
    for j in range(spec.dim):
        msgs[:, j] = ranks % q
        ranks = ranks // q
    if spec.kind == "grs-folded":
        pts = spec.points()
        acc = np.zeros((spec.size, spec.N), dtype=np.int64)
        for j in range(spec.dim - 1, -1, -1):
            acc = linalg.mul_arrays(ctx, acc, pts[None, :])
            acc ^= msgs[:, j][:, None]
        acc = linalg.mul_arrays(ctx, acc, np.array(spec.v, dtype=np.int64)[None, :])
        acc.setflags(write=False)
        return acc
    gm = np.array(spec.genmat, dtype=np.int64)
    acc = np.zeros((spec.size, spec.N), dtype=np.int64)
    for j in range(spec.dim):
        acc ^= linalg.mul_arrays(ctx, msgs[:, j][:, None], gm[j][None, :])
    acc.setflags(write=False)
    return acc


def codeword_rank_matrix(spec: CodeSpec, enum_budget: int = DEFAULT_ENUM_BUDGET) -> np.ndarray:
    """All codewords as (|C| x n) symbol-rank arrays in message-rank order."""
    codeword_matrix(spec, enum_budget)  # budget gate
    return _codeword_rank_matrix_cached(spec)


@lru_cache(maxsize=16)
def _codeword_rank_matrix_cached(spec: CodeSpec) -> np.ndarray:
    unfolded = _codeword_matrix_cached(spec)
    q = spec.field.q
    out = np.zeros((unfolded.shape[0], spec.n), dtype=np.int64)
    for i in range(spec.n):
        block = unfolded[:, i * spec.m : (i + 1) * spec.m]
        r = np.zeros(unfolded.shape[0], dtype=np.int64)
        for j in range(spec.m):
            r = r * q + block[:, j]
        out[:, i] = r
    out.setflags(write=False)
    return out


def iter_codewords(spec: CodeSpec, enum_budget: int = DEFAULT_ENUM_BUDGET):
    mat = codeword_matrix(spec, enum_budget)
    for row in mat:
        yield fold(spec, row)


def contains(spec: CodeSpec, word: Codeword) -> bool:
    """Rank-based membership test."""
    vec = unfold(spec, word)
    return linalg.in_row_space(spec.field, spec.basis_rref(), vec)


def min_distance(spec: CodeSpec, enum_budget: int = DEFAULT_ENUM_BUDGET) -> int:
    """Exact unfolded minimum distance; exhaustive for small codes."""
    if spec.kind == "grs-folded":
        return spec.N - spec.k
    mat = codeword_matrix(spec, enum_budget)
    weights = np.count_nonzero(mat, axis=1)
    nz = weights[weights > 0]
    return int(nz.min()) if nz.size else 0


# -- duality ---------------------------------------------------------------------


@lru_cache(maxsize=64)
def dual(spec: CodeSpec, cross_check: bool = True) -> CodeSpec:
    """Dual code under the unfolded coordinate-wise inner product.

    For GRS specs the dual is the GRS code of degree N-k-2 with
    multipliers v'_i = gamma^i / v_i (evaluation at all of F_q^*,
    characteristic 2); the null-space computation certifies it when
    cross_check is enabled.
    """
    ctx = spec.field
    if spec.kind == "grs-folded":
        if spec.k > spec.N - 2:
            raise ValueError("dual of a (near-)full GRS code is not GRS")
        pts = spec.points()
        vdual = tuple(
            ctx.mul(int(pts[i]), ctx.inv(spec.v[i])) for i in range(spec.N)
        )
        out = CodeSpec(
            kind="grs-folded",
            field=ctx,
            m=spec.m,
            k=spec.N - spec.k - 2,
            gamma=spec.gamma,
            v=vdual,
        )
        if cross_check and spec.N <= 1024:
            _certify_dual(spec, out)
        return out
    ns = linalg.null_space(ctx, spec.generator_matrix())
    out = CodeSpec(
        kind="generic-linear",
        field=ctx,
        m=spec.m,
        genmat=tuple(tuple(int(x) for x in row) for row in ns),
    )
    return out


def _certify_dual(spec: CodeSpec, cand: CodeSpec) -> None:
    """Null-space certificate: cand's rows annihilate spec's rows and the
    dimensions add up to N."""
    ctx = spec.field
    g = spec.generator_matrix()
    gd = cand.generator_matrix()
    prod = linalg.matmul(ctx, gd, g.T)
    if prod.any():
        raise AssertionError("claimed dual is not orthogonal to the code")
    if cand.dim + spec.dim != spec.N:
        raise AssertionError("dual dimension mismatch")


def duals_equal(a: CodeSpec, b: CodeSpec) -> bool:
    """Set equality of two codes over the same field, via canonical bases."""
    ensure_same_field(a.field, b.field)
    if a.N != b.N:
        return False
    return bool(np.array_equal(a.basis_rref(), b.basis_rref()))


# -- decoding ---------------------------------------------------------------------


@dataclass(frozen=True)
class DecoderParams:
    """Bias and slack for the dual decoder; the acceptance radius is
    floor((p + epsilon) * N) at the unfolded level."""

    p: Fraction
    epsilon: Fraction
    radius_unfolded: int

    @classmethod
    def for_spec(
        cls,
        spec: CodeSpec,
        p,
        epsilon=Fraction(1, 100),
        enum_budget: int = DEFAULT_ENUM_BUDGET,
    ) -> "DecoderParams":
        p = Fraction(p)
        epsilon = Fraction(epsilon)
        radius = int((p + epsilon) * spec.N)  # floor for positive values
        dual_spec = dual(spec, cross_check=False)
        d_dual = min_distance(dual_spec, enum_budget=enum_budget)
        unique_frac = Fraction((d_dual - 1) // 2, spec.N)
        if p + epsilon >= unique_frac:
            raise ValueError(
                f"p + epsilon = {float(p + epsilon):.4f} is not below the "
                f"dual unique-decoding fraction {float(unique_frac):.4f}"
            )
        return cls(p=p, epsilon=epsilon, radius_unfolded=radius)


@dataclass(frozen=True)
class ListRecoveryParams:
    zeta: float
    ell: int
    L: int

    def __post_init__(self):
        if not 0 < self.zeta <= 1:
            raise ValueError("zeta must lie in (0, 1]")
        if self.ell < 0 or self.L < 0:
            raise ValueError("ell and L must be nonnegative")


def _poly_divmod(ctx: FieldCtx, num: list[int], den: list[int]):
    """Polynomial division over F_q; coefficients ascending."""
    num = list(num)
    while num and num[-1] == 0:
        num.pop()
    dd = len(den) - 1
    lead_inv = ctx.inv(den[-1])
    quot = [0] * max(0, len(num) - dd)
    while len(num) - 1 >= dd and num:
        shift = len(num) - 1 - dd
        factor = ctx.mul(num[-1], lead_inv)
        quot[shift] = factor
        for i, c in enumerate(den):
            num[shift + i] ^= ctx.mul(factor, c)
        while num and num[-1] == 0:
            num.pop()
    return quot, num


def _berlekamp_welch(spec: CodeSpec, z: np.ndarray, radius: int) -> np.ndarray | None:
    """Unique decoding of an unfolded GRS word within the given radius.

    Solves Q(a_i) = r_i * E(a_i) with E monic of degree `radius`; valid for
    radius <= floor((N - k - 1) / 2).  Returns the unfolded codeword or
    None when no codeword lies within the radius.
    """
    ctx = spec.field
    N, k = spec.N, spec.k
    pts = spec.points()
    vinv = np.array([ctx.inv(x) for x in spec.v], dtype=np.int64)
    r = linalg.mul_arrays(ctx, np.asarray(z, dtype=np.int64), vinv)
    e = radius
    nq = k + e + 1  # coefficients of Q
    cols = nq + e
    A = np.zeros((N, cols), dtype=np.int64)
    b = np.zeros(N, dtype=np.int64)
    # powers of each evaluation point
    pw = np.ones((N, max(nq, e + 1)), dtype=np.int64)
    for j in range(1, pw.shape[1]):
        pw[:, j] = linalg.mul_arrays(ctx, pw[:, j - 1], pts)
    A[:, :nq] = pw[:, :nq]
    if e:
        A[:, nq:] = linalg.mul_arrays(ctx, r[:, None], pw[:, :e])
    b = linalg.mul_arrays(ctx, r, pw[:, e])
    sol = linalg.solve(ctx, A, b)
    if sol is None:
        return None
    qcoeffs = [int(c) for c in sol[:nq]]
    ecoeffs = [int(c) for c in sol[nq:]] + [1]  # monic
    f, rem = _poly_divmod(ctx, qcoeffs, ecoeffs)
    if rem:
        return None
    if len(f) > k + 1:
        return None
    cand = encode_unfolded(spec, f + [0] * (k + 1 - len(f)))
    if hw_unfolded(cand ^ np.asarray(z, dtype=np.int64)) > radius:
        return None
    return cand


def list_decode(
    spec: CodeSpec,
    z: Codeword,
    radius: int,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> list[Codeword]:
    """All codewords within symbol Hamming distance `radius` of z.

    Small codes are decoded by exhaustive enumeration; unfolded GRS specs
    fall back to Berlekamp-Welch unique decoding, valid up to
    floor((d - 1) / 2) with d = N - k.
    """
    if spec.size <= enum_budget:
        zr = spec.word_ranks(z)
        ranks = codeword_rank_matrix(spec, enum_budget)
        mat = codeword_matrix(spec, enum_budget)
        dist = (ranks != np.array(zr)[None, :]).sum(axis=1)
        return [fold(spec, mat[idx]) for idx in np.nonzero(dist <= radius)[0]]
    if spec.kind != "grs-folded" or spec.m != 1:
        raise BudgetExceeded(
            "code too large for exhaustive decoding and not an unfolded GRS"
        )
    unique_radius = (spec.N - spec.k - 1) // 2
    if radius > unique_radius:
        raise BudgetExceeded(
            f"radius {radius} exceeds the unique-decoding bound {unique_radius}"
        )
    cand = _berlekamp_welch(spec, unfold(spec, z), radius)
    if cand is None:
        return []
    return [fold(spec, cand)]


def dual_decode(
    spec: CodeSpec,
    params: DecoderParams,
    z: Codeword,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
):
    """Decode z against the dual code at the unfolded level.

    Unfolds z, finds the codewords of the unfolded dual within
    radius_unfolded, and returns the folded candidate when it is unique;
    returns None otherwise.
    """
    ctx = spec.field
    zu = unfold(spec, z)
    dspec = dual(spec, cross_check=False)
    dspec_unf = CodeSpec(
        kind=dspec.kind,
        field=ctx,
        m=1,
        k=dspec.k,
        gamma=dspec.gamma,
        v=dspec.v,
        genmat=dspec.genmat,
    )
    zword = tuple((int(x),) for x in zu)
    if dspec_unf.size <= enum_budget:
        cands = list_decode(dspec_unf, zword, params.radius_unfolded, enum_budget)
    else:
        cands = list_decode(
            dspec_unf,
            zword,
            (dspec_unf.N - dspec_unf.k - 1) // 2,
            enum_budget,
        )
        cands = [
            c
            for c in cands
            if hw_unfolded(unfold(dspec_unf, c) ^ zu) <= params.radius_unfolded
        ]
    if len(cands) != 1:
        return None
    return fold(spec, unfold(dspec_unf, cands[0]))


# -- list recovery -----------------------------------------------------------------


def list_recover_count(
    spec: CodeSpec,
    S,
    zeta: float,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
    jobs: int = 1,
) -> int:
    """Exact number of codewords agreeing with the candidate sets S_i on at
    least zeta * n coordinates.  S entries may hold symbols or symbol ranks."""
    if len(S) != spec.n:
        raise LengthMismatch(f"need {spec.n} candidate sets, got {len(S)}")
    sets = []
    for s in S:
        ranks = set()
        for item in s:
            ranks.add(
                spec.symbol_rank(item) if isinstance(item, tuple) else int(item)
            )
        sets.append(np.array(sorted(ranks), dtype=np.int64))
    ranks = codeword_rank_matrix(spec, enum_budget)
    threshold = math.ceil(zeta * spec.n - 1e-9)

    def chunk_count(bounds):
        lo, hi = bounds
        agree = np.zeros(hi - lo, dtype=np.int64)
        for i in range(spec.n):
            if sets[i].size:
                agree += np.isin(ranks[lo:hi, i], sets[i])
        return int((agree >= threshold).sum())

    nrows = ranks.shape[0]
    step = max(1, nrows // max(jobs, 1))
    chunks = [(lo, min(lo + step, nrows)) for lo in range(0, nrows, step)]
    return sum(parallel_map(chunk_count, chunks, jobs))


def lr_param_check(N, m, k, ell, s, r, zeta, q) -> dict:
    """Numeric check of the two folded-RS list-recoverability inequalities;
    returns their truth values and the guaranteed list bound q^s."""
    if m - s + 1 == 0:
        raise ZeroDivisionError("m - s + 1 must be nonzero")
    if k == 0:
        raise ZeroDivisionError("degree k must be nonzero")
    lhs1 = zeta * N / m
    rhs1 = (1 + s / r) * (N * ell * k**s) ** (1.0 / (s + 1)) / (m - s + 1)
    ineq1 = lhs1 >= rhs1
    lhs2 = (r + s) * (N * ell / k) ** (1.0 / (s + 1))
    ineq2 = lhs2 < q
    return {"ineq1": bool(ineq1), "ineq2": bool(ineq2), "L": q**s}
