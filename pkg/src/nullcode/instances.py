"""Biased-oracle instances, the null-codeword relation, and its verifier.

An instance carries n bit-tables H_1..H_n, one per code coordinate; table
i maps every symbol of Sigma to a bit that is 1 with probability p.  A
solution is a codeword x with H_i(x_i) = 0 for all i; `verify` checks a
candidate with table lookups plus a rank-based membership test, and
`brute_solve` enumerates the exact solution set for small codes.

When p = 2**-b the bias bits can be expanded into AND-blocks of b uniform
bits and collapsed back; tables in that unfolded form drive the total
problem layer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from . import codes
from .budget import DEFAULT_ENUM_BUDGET, DEFAULT_TABLE_BUDGET
from .codes import CodeSpec, Codeword
from .errors import (
    BiasNotPowerOfTwo,
    BudgetExceeded,
    LengthMismatch,
    SplitRequiresEvenN,
)

FORMAT_VERSION = 1


def bias_exponent(p: Fraction) -> int:
    """b such that p = 2**-b, or raise BiasNotPowerOfTwo."""
    p = Fraction(p)
    if p.numerator != 1 or p.denominator & (p.denominator - 1):
        raise BiasNotPowerOfTwo(f"bias {p} is not of the form 2**-b")
    return p.denominator.bit_length() - 1


@dataclass(frozen=True)
class OracleInstance:
    """n oracle tables over Sigma, plus an optional AND-block unfolding.

    tables: uint8 array of shape (n, |Sigma|), entry (i, e) = H_i(e).
    unfolded: uint8 array of shape (n, |Sigma|, b) whose per-entry AND
    reproduces `tables`, or None.
    """

    spec: CodeSpec
    p: Fraction
    seed: int
    tables: np.ndarray
    unfolded: np.ndarray | None = None

    def __post_init__(self):
        n, sigma = self.tables.shape
        if n != self.spec.n or sigma != self.spec.sigma_size:
            raise LengthMismatch("table shape does not match the code")
        self.tables.setflags(write=False)
        if self.unfolded is not None:
            b = bias_exponent(self.p)
            if self.unfolded.shape != (n, sigma, b):
                raise LengthMismatch("unfolded table shape mismatch")
            if not np.array_equal(self.unfolded.min(axis=2), self.tables):
                raise ValueError("AND of unfolded blocks != bias tables")
            self.unfolded.setflags(write=False)

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def sigma_size(self) -> int:
        return self.spec.sigma_size


def _check_table_budget(spec: CodeSpec, table_budget: int, blocks: int = 1):
    bits = spec.n * spec.sigma_size * blocks
    if bits > table_budget:
        raise BudgetExceeded(
            f"instance needs {bits} table bits, budget is {table_budget}"
        )


def sample_instance(
    spec: CodeSpec,
    p,
    seed: int,
    table_budget: int = DEFAULT_TABLE_BUDGET,
) -> OracleInstance:
    """Sample each table bit independently with P[bit = 1] = p.

    The draw uses integer comparison against the exact rational bias, so
    identical (spec, p, seed) give bit-identical instances on any platform.
    """
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("bias must lie in [0, 1]")
    _check_table_budget(spec, table_budget)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x0B1A5]))
    draws = rng.integers(0, p.denominator, size=(spec.n, spec.sigma_size))
    tables = (draws < p.numerator).astype(np.uint8)
    return OracleInstance(spec=spec, p=p, seed=seed, tables=tables)


def sample_unfolded_instance(
    spec: CodeSpec,
    b: int,
    seed: int,
    table_budget: int = DEFAULT_TABLE_BUDGET,
) -> OracleInstance:
    """Sample uniform AND-block tables; the collapsed bias is p = 2**-b."""
    _check_table_budget(spec, table_budget, blocks=b)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x0B1A6]))
    unfolded = rng.integers(0, 2, size=(spec.n, spec.sigma_size, b)).astype(np.uint8)
    tables = unfolded.min(axis=2)
    return OracleInstance(
        spec=spec, p=Fraction(1, 1 << b), seed=seed, tables=tables, unfolded=unfolded
    )


def expand_and_blocks(inst: OracleInstance, b: int) -> OracleInstance:
    """Expand each bias bit into b uniform bits whose AND equals it.

    A 1-bit forces the all-ones block; a 0-bit draws uniformly from the
    non-all-ones patterns, so fresh uniform blocks would reproduce the
    2**-b bias.
    """
    exponent = bias_exponent(inst.p)
    if exponent != b:
        raise BiasNotPowerOfTwo(f"instance bias is 2**-{exponent}, requested b={b}")
    rng = np.random.default_rng(np.random.SeedSequence([inst.seed, 0xE19A7D]))
    n, sigma = inst.tables.shape
    full = (1 << b) - 1
    patterns = rng.integers(0, full, size=(n, sigma))  # excludes all-ones
    patterns = np.where(inst.tables.astype(bool), full, patterns)
    unfolded = np.empty((n, sigma, b), dtype=np.uint8)
    for j in range(b):
        unfolded[:, :, j] = (patterns >> j) & 1
    return replace(inst, unfolded=unfolded)


def collapse_and_blocks(inst: OracleInstance) -> OracleInstance:
    """Recompute bias tables as the AND of each block and drop the blocks."""
    if inst.unfolded is None:
        raise ValueError("instance carries no unfolded tables")
    tables = inst.unfolded.min(axis=2)
    return replace(inst, tables=tables, unfolded=None)


def verify(inst: OracleInstance, x: Codeword) -> bool:
    """Membership in the code plus H_i(x_i) = 0 for every coordinate.

    Runs in poly(n, log |Sigma|) table lookups on top of the rank test;
    malformed words are simply invalid.
    """
    if len(x) != inst.n:
        return False
    q = inst.spec.field.q
    for i, sym in enumerate(x):
        if len(sym) != inst.spec.m or any(not 0 <= d < q for d in sym):
            return False
        if inst.tables[i, inst.spec.symbol_rank(sym)]:
            return False
    return codes.contains(inst.spec, x)


def brute_solve(
    inst: OracleInstance,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
    jobs: int = 1,
) -> list[Codeword]:
    """Exact solution set, in message-rank order.

    The message space is scanned in chunks; the worker count never changes
    the (canonical) output order.
    """
    from .parallel import parallel_map

    ranks = codes.codeword_rank_matrix(inst.spec, enum_budget)
    nrows = ranks.shape[0]

    def chunk_hits(bounds):
        lo, hi = bounds
        ok = np.ones(hi - lo, dtype=bool)
        for i in range(inst.n):
            ok &= inst.tables[i, ranks[lo:hi, i]] == 0
        return (lo + np.nonzero(ok)[0]).tolist()

    step = max(1, nrows // max(jobs, 1))
    chunks = [(lo, min(lo + step, nrows)) for lo in range(0, nrows, step)]
    hits = [idx for part in parallel_map(chunk_hits, chunks, jobs) for idx in part]
    mat = codes.codeword_matrix(inst.spec, enum_budget)
    return [codes.fold(inst.spec, mat[idx]) for idx in hits]


def solution_indicator(inst: OracleInstance, enum_budget: int = DEFAULT_ENUM_BUDGET) -> np.ndarray:
    """Boolean vector over message ranks marking solutions."""
    ranks = codes.codeword_rank_matrix(inst.spec, enum_budget)
    ok = np.ones(ranks.shape[0], dtype=bool)
    for i in range(inst.n):
        ok &= inst.tables[i, ranks[:, i]] == 0
    return ok


def expected_solution_count(spec: CodeSpec, p) -> float:
    """|C| * (1-p)^n; exact by linearity of expectation."""
    p = Fraction(p)
    return float(spec.size * (1 - p) ** spec.n)


# -- bipartite split -----------------------------------------------------------


@dataclass(frozen=True)
class Split:
    """Alice holds tables 1..n/2, Bob the rest; each side flattens to
    n |Sigma| / 2 bits with bit (i, e) at (i - offset) * |Sigma| + e."""

    n: int
    sigma_size: int

    def __post_init__(self):
        if self.n % 2:
            raise SplitRequiresEvenN(f"n = {self.n} is odd")

    @property
    def half(self) -> int:
        return self.n // 2

    @property
    def bits_per_side(self) -> int:
        return self.half * self.sigma_size

    def flat_index(self, i: int, e_rank: int) -> int:
        """Flat bit position of table entry (i, e) within its side; i is
        1-based as a coordinate index."""
        offset = 0 if i <= self.half else self.half
        return (i - 1 - offset) * self.sigma_size + e_rank

    def side(self, i: int) -> str:
        return "A" if i <= self.half else "B"


def split_bits(inst: OracleInstance) -> tuple[np.ndarray, np.ndarray]:
    """Flatten the two halves of the tables into per-side bit vectors."""
    sp = Split(inst.n, inst.sigma_size)
    flat = inst.tables.reshape(-1)
    return flat[: sp.bits_per_side].copy(), flat[sp.bits_per_side :].copy()


# -- file format -----------------------------------------------------------------


def _pack_hex(bits: np.ndarray) -> str:
    return np.packbits(bits.astype(np.uint8), bitorder="little").tobytes().hex()


def _unpack_hex(payload: str, nbits: int) -> np.ndarray:
    raw = np.frombuffer(bytes.fromhex(payload), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:nbits]


def instance_to_json(inst: OracleInstance) -> dict:
    data = {
        "format": FORMAT_VERSION,
        "code": inst.spec.to_json(),
        "p": f"{inst.p.numerator}/{inst.p.denominator}",
        "seed": inst.seed,
        "split": None if inst.n % 2 else {"n": inst.n, "sigma": inst.sigma_size},
        "tables": [_pack_hex(row) for row in inst.tables],
    }
    if inst.unfolded is not None:
        data["unfolded"] = {
            "b": inst.unfolded.shape[2],
            "tables": [_pack_hex(row.reshape(-1)) for row in inst.unfolded],
        }
    return data


def instance_from_json(data: dict) -> OracleInstance:
    spec = CodeSpec.from_json(data["code"])
    num, den = data["p"].split("/")
    p = Fraction(int(num), int(den))
    sigma = spec.sigma_size
    tables = np.stack(
        [_unpack_hex(row, sigma) for row in data["tables"]]
    ).astype(np.uint8)
    unfolded = None
    if data.get("unfolded"):
        b = int(data["unfolded"]["b"])
        unfolded = np.stack(
            [
                _unpack_hex(row, sigma * b).reshape(sigma, b)
                for row in data["unfolded"]["tables"]
            ]
        ).astype(np.uint8)
    return OracleInstance(
        spec=spec, p=p, seed=int(data["seed"]), tables=tables, unfolded=unfolded
    )


def save_instance(inst: OracleInstance, path) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_json(inst), fh, sort_keys=True)
        fh.write("\n")


def load_instance(path) -> OracleInstance:
    with open(path) as fh:
        return instance_from_json(json.load(fh))


def with_tables(inst: OracleInstance, tables: np.ndarray) -> OracleInstance:
    """Same spec and bookkeeping, different bias tables (unfolding dropped)."""
    return OracleInstance(
        spec=inst.spec,
        p=inst.p,
        seed=inst.seed,
        tables=np.ascontiguousarray(tables, dtype=np.uint8),
        unfolded=None,
    )
