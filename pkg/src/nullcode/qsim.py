"""Exact sparse simulation of the one-round SMP protocol and numerical
verification of its error analysis.

States live over Sigma^n with Sigma = F_q^m.  Basis strings are tuples of
symbol ranks; the Fourier transform is the n m-fold tensor power of the
trace-character transform on F_q.  In characteristic 2 that matrix is real
(entries +-1/sqrt(q)) and involutive, but amplitudes are kept complex so
odd characteristic is not structurally excluded.

The main pipeline computes, exactly:

- the two error masses eps = sum over BAD pairs of |Vhat(x) What(e)|^2 and
  delta = sum_z |sum over BAD pairs with x+e=z of Vhat(x) What(e)|^2,
- the actual output state (I x QFT^-1) U_F U_add (QFT x QFT) |psi>|phi>,
- the ideal state |Sigma|^(n/2) sum_z (V.W)(z) |0>|z>,

and asserts that their Euclidean distance is at most sqrt(eps) +
sqrt(delta), which is the guarantee the protocol's analysis rests on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import codes, instances
from .budget import DEFAULT_ENUM_BUDGET, amplitude_budget
from .codes import CodeSpec, DecoderParams
from .errors import BudgetExceeded, EmptySupport
from .gf import FieldCtx
from .instances import OracleInstance

_DENSE_QFT_LIMIT = 1 << 12


@dataclass
class SparseState:
    """Amplitude map over basis strings (tuples of symbol ranks)."""

    amps: dict
    dims: tuple[int, int, int]  # (q, m, n)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amps.values()))

    def normalized(self) -> "SparseState":
        nrm = self.norm()
        return SparseState(
            {k: v / nrm for k, v in self.amps.items()}, self.dims
        )


# -- Fourier kernels -------------------------------------------------------------


def qft_matrix(ctx: FieldCtx) -> np.ndarray:
    """Trace-character transform on F_q: entry (z, x) = (-1)^Tr(x z)/sqrt(q).

    Real in characteristic 2; unitary and involutive.
    """
    q = ctx.q
    if q > _DENSE_QFT_LIMIT:
        raise BudgetExceeded(f"dense transform for q={q} exceeds the budget")
    signs = np.empty((q, q), dtype=np.float64)
    for x in range(q):
        for z in range(x, q):
            val = -1.0 if ctx.trace(ctx.mul(x, z)) else 1.0
            signs[x, z] = val
            signs[z, x] = val
    return signs / math.sqrt(q)


def sigma_qft_matrix(ctx: FieldCtx, m: int) -> np.ndarray:
    """Transform over Sigma = F_q^m as an m-fold Kronecker power; symbol
    ranks put the first F_q digit in the most-significant position."""
    base = qft_matrix(ctx)
    if ctx.q**m > _DENSE_QFT_LIMIT:
        raise BudgetExceeded(f"|Sigma| = {ctx.q ** m} exceeds the dense budget")
    out = np.array([[1.0]])
    for _ in range(m):
        out = np.kron(out, base)
    return out


def apply_qft_vec(vec: np.ndarray, kernel: np.ndarray, n: int) -> np.ndarray:
    """Apply kernel to each of the n symbol axes of a flat state vector."""
    s = kernel.shape[0]
    t = vec.reshape((s,) * n)
    for axis in range(n):
        t = np.tensordot(kernel, t, axes=([1], [axis]))
        t = np.moveaxis(t, 0, axis)
    return t.reshape(-1)


# -- state preparation -------------------------------------------------------------


def prepare_phi(inst: OracleInstance, i: int) -> SparseState:
    """Uniform superposition over T_i = {e : H_i(e) = 0}; i is 1-based."""
    table = inst.tables[i - 1]
    support = np.nonzero(table == 0)[0]
    if support.size == 0:
        raise EmptySupport(f"table {i} maps every symbol to 1")
    amp = 1.0 / math.sqrt(support.size)
    return SparseState(
        {(int(e),): complex(amp) for e in support},
        (inst.spec.field.q, inst.spec.m, 1),
    )


def prepare_psi(
    spec: CodeSpec, enum_budget: int = DEFAULT_ENUM_BUDGET
) -> SparseState:
    """Uniform superposition over the code."""
    ranks = codes.codeword_rank_matrix(spec, enum_budget)
    amp = 1.0 / math.sqrt(ranks.shape[0])
    return SparseState(
        {tuple(int(r) for r in row): complex(amp) for row in ranks},
        (spec.field.q, spec.m, spec.n),
    )


def tensor_phi(states: list[SparseState]) -> SparseState:
    """Tensor product of per-coordinate states, in coordinate order."""
    q, m, _ = states[0].dims
    amps = {(): complex(1.0)}
    for st in states:
        nxt = {}
        for key, val in amps.items():
            for (e,), a in st.amps.items():
                nxt[key + (e,)] = val * a
        amps = nxt
    return SparseState(amps, (q, m, len(states)))


def state_to_vec(state: SparseState, sigma: int, n: int) -> np.ndarray:
    vec = np.zeros(sigma**n, dtype=np.complex128)
    for key, amp in state.amps.items():
        flat = 0
        for r in key:
            flat = flat * sigma + r
        vec[flat] = amp
    return vec


def vec_to_state(vec: np.ndarray, dims: tuple[int, int, int], tol: float = 0.0) -> SparseState:
    q, m, n = dims
    sigma = q**m
    amps = {}
    for flat in np.nonzero(np.abs(vec) > tol)[0]:
        key = []
        f = int(flat)
        for _ in range(n):
            key.append(f % sigma)
            f //= sigma
        amps[tuple(reversed(key))] = complex(vec[flat])
    return SparseState(amps, dims)


# -- permutation unitaries -----------------------------------------------------------


def apply_add_decode(joint: SparseState, F) -> SparseState:
    """|x>|e> -> |x + e - ...> in two exact permutation steps:
    U_add maps |x>|e> to |x>|x+e| and U_F maps |x>|z> to |x - F(z)>|z>.

    Keys are pairs of rank tuples; addition is symbol-wise, which in
    characteristic 2 is rank XOR.  Norm is preserved exactly.
    """
    amps = {}
    for (x, e), a in joint.amps.items():
        z = tuple(xi ^ ei for xi, ei in zip(x, e))
        fz = F(z)
        out = (tuple(xi ^ fi for xi, fi in zip(x, fz)), z)
        if out in amps:
            raise AssertionError("permutation produced a key collision")
        amps[out] = a
    return SparseState(amps, joint.dims)


def decode_rank_table(
    spec: CodeSpec,
    params: DecoderParams,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> np.ndarray:
    """Flat-rank decode table over all of Sigma^n: F[z] = dual_decode(z),
    with 0 standing in for the bottom symbol."""
    sigma = spec.sigma_size
    total = sigma**spec.n
    if total > enum_budget:
        raise BudgetExceeded(f"decode table over {total} strings exceeds budget")
    out = np.zeros(total, dtype=np.int64)
    for flat in range(total):
        word = flat_to_word(spec, flat)
        dec = codes.dual_decode(spec, params, word, enum_budget)
        if dec is not None:
            out[flat] = word_to_flat(spec, dec)
    return out


def flat_to_word(spec: CodeSpec, flat: int):
    sigma = spec.sigma_size
    ranks = []
    for _ in range(spec.n):
        ranks.append(flat % sigma)
        flat //= sigma
    return tuple(spec.rank_symbol(r) for r in reversed(ranks))


def word_to_flat(spec: CodeSpec, word) -> int:
    sigma = spec.sigma_size
    flat = 0
    for sym in word:
        flat = flat * sigma + spec.symbol_rank(sym)
    return flat


# -- good/bad bookkeeping ---------------------------------------------------------


@dataclass
class GoodBadSpec:
    """Product-form GOOD set: pairs (x, e) with x in a designated set and e
    below a symbol-weight cutoff.  The pipeline verifies F(x+e) = x on it."""

    good_x_mask: np.ndarray
    good_e_mask: np.ndarray
    label: str = "default"


def default_goodbad(
    spec: CodeSpec,
    params: DecoderParams,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> GoodBadSpec:
    """GOOD = C-dual x {e : symbol weight of e <= (p + epsilon) n}."""
    sigma = spec.sigma_size
    total = sigma**spec.n
    if total > enum_budget:
        raise BudgetExceeded("good/bad masks exceed the enumeration budget")
    dual_spec = codes.dual(spec, cross_check=False)
    dual_flat = _code_flat_ranks(dual_spec, enum_budget)
    good_x = np.zeros(total, dtype=bool)
    good_x[dual_flat] = True
    weight_cap = int((Fraction(params.p) + Fraction(params.epsilon)) * spec.n)
    weights = _flat_symbol_weights(sigma, spec.n)
    good_e = weights <= weight_cap
    return GoodBadSpec(good_x_mask=good_x, good_e_mask=good_e)


def _code_flat_ranks(spec: CodeSpec, enum_budget: int) -> np.ndarray:
    ranks = codes.codeword_rank_matrix(spec, enum_budget)
    sigma = spec.sigma_size
    flat = np.zeros(ranks.shape[0], dtype=np.int64)
    for i in range(spec.n):
        flat = flat * sigma + ranks[:, i]
    return flat


def _flat_symbol_weights(sigma: int, n: int) -> np.ndarray:
    total = sigma**n
    weights = np.zeros(total, dtype=np.int64)
    idx = np.arange(total)
    for _ in range(n):
        weights += (idx % sigma) != 0
        idx //= sigma
    return weights


# -- the main pipeline -------------------------------------------------------------


def add_decode_pipeline(
    spec: CodeSpec,
    inst: OracleInstance,
    params: DecoderParams,
    goodbad: GoodBadSpec | None = None,
    F: np.ndarray | None = None,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
    check_good: bool = True,
) -> dict:
    """Run the add/decode pipeline exactly and compare with the ideal state.

    Returns eps, delta, the Euclidean distance between actual and ideal
    states, measurement statistics, and the states themselves (as dense
    vectors over pairs).  Raises AssertionError if the distance bound
    sqrt(eps) + sqrt(delta) + 1e-9 is violated.
    """
    sigma = spec.sigma_size
    n = spec.n
    K = sigma**n
    if K * K > amplitude_budget():
        raise BudgetExceeded(
            f"pair state needs {K * K} amplitudes; over budget. "
            "Use a smaller generic-code toy configuration."
        )
    ctx = spec.field

    # -- input states
    psi = state_to_vec(prepare_psi(spec, enum_budget), sigma, n)
    phis = [prepare_phi(inst, i + 1) for i in range(n)]
    phi = state_to_vec(tensor_phi(phis), sigma, n)

    kernel = sigma_qft_matrix(ctx, spec.m)
    vhat = apply_qft_vec(psi, kernel, n)
    what = apply_qft_vec(phi, kernel, n)

    if F is None:
        F = decode_rank_table(spec, params, enum_budget)
    if goodbad is None:
        goodbad = default_goodbad(spec, params, enum_budget)
    gx, ge = goodbad.good_x_mask, goodbad.good_e_mask

    if check_good:
        _check_good_soundness(F, gx, ge)

    # -- error masses over BAD = complement of GOOD
    px = np.abs(vhat) ** 2
    pe = np.abs(what) ** 2
    eps = float(1.0 - px[gx].sum() * pe[ge].sum())
    eps = max(eps, 0.0)

    # conv_bad[z] = sum over BAD pairs with x+e=z of Vhat(x) What(e);
    # in rank space x+e=z iff e = x^z.
    conv_bad = np.zeros(K, dtype=np.complex128)
    idx = np.arange(K)
    for x in range(K):
        if vhat[x] == 0:
            continue
        contrib = vhat[x] * what[idx ^ x]
        if gx[x]:
            contrib = np.where(ge[idx ^ x], 0.0, contrib)
        conv_bad += contrib
    delta = float((np.abs(conv_bad) ** 2).sum())

    # -- actual state
    joint = np.outer(vhat, what)
    cols = idx[None, :] ^ idx[:, None]  # (x, z) -> x^z
    joint = np.take_along_axis(joint, cols, axis=1)  # U_add
    rows = idx[:, None] ^ F[None, :]
    joint = joint[rows, idx[None, :]]  # U_F
    full_kernel = _full_kernel(kernel, n, K)
    actual = joint @ full_kernel.T  # QFT^-1 on the second register (involutive)

    # -- ideal state
    ideal_z = (sigma ** (n / 2)) * psi * phi
    diff = actual.copy()
    diff[0] -= ideal_z
    l2 = float(np.linalg.norm(diff))

    bound = math.sqrt(eps) + math.sqrt(delta) + 1e-9
    if l2 > bound:
        raise AssertionError(
            f"distance {l2} exceeds sqrt(eps)+sqrt(delta) = {bound}"
        )

    meas = np.abs(actual) ** 2
    z_dist = meas.sum(axis=0)
    sol_mask = (np.abs(psi) > 0) & (np.abs(phi) > 0)
    success = float(z_dist[sol_mask].sum())
    ideal_norm_sq = float(np.abs(ideal_z).__pow__(2).sum())
    tv = _tv_distance(z_dist, np.abs(ideal_z) ** 2, ideal_norm_sq)
    return {
        "epsilon": eps,
        "delta": delta,
        "l2_distance": l2,
        "bound": bound,
        "tv_distance": tv,
        "success_probability": success,
        "solution_distribution": z_dist,
        "solution_mask": sol_mask,
        "actual_state": actual,
        "ideal_state": ideal_z,
        "ideal_mass": ideal_norm_sq,
    }


def _full_kernel(kernel: np.ndarray, n: int, K: int) -> np.ndarray:
    if K > _DENSE_QFT_LIMIT:
        raise BudgetExceeded("full-transform matrix exceeds the dense budget")
    out = np.array([[1.0]])
    for _ in range(n):
        out = np.kron(out, kernel)
    return out


def _check_good_soundness(F: np.ndarray, gx: np.ndarray, ge: np.ndarray, cap: int = 1 << 20):
    xs = np.nonzero(gx)[0]
    es = np.nonzero(ge)[0]
    if xs.size * es.size > cap:
        rng = np.random.default_rng(0)
        xs = rng.choice(xs, size=min(xs.size, 1024), replace=False)
        es = rng.choice(es, size=min(es.size, 1024), replace=False)
    zs = xs[:, None] ^ es[None, :]
    if not np.array_equal(F[zs], np.broadcast_to(xs[:, None], zs.shape)):
        raise AssertionError("GOOD set contains a pair with F(x+e) != x")


def _tv_distance(p: np.ndarray, q_unnorm: np.ndarray, q_mass: float) -> float:
    if q_mass <= 0:
        return 1.0
    return float(0.5 * np.abs(p - q_unnorm / q_mass).sum())


# -- protocol runner ----------------------------------------------------------------


def run_smp_protocol(
    spec: CodeSpec,
    inst: OracleInstance,
    params: DecoderParams,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> dict:
    """One-round SMP execution with explicit stage boundaries.

    Alice prepares the states for coordinates 1..floor(n/2), Bob the rest;
    the referee receives only those states, prepares the code
    superposition, runs the Fourier/add/decode pipeline, and measures the
    second register.  Returns the exact measurement distribution and the
    probability mass on verifier-accepted strings.
    """
    half = inst.n // 2
    alice_states = [prepare_phi(inst, i) for i in range(1, half + 1)]
    bob_states = [prepare_phi(inst, i) for i in range(half + 1, inst.n + 1)]
    report = _charlie_process(spec, alice_states + bob_states, inst, params, enum_budget)
    report["alice_qubits"] = sum(
        math.log2(spec.sigma_size) for _ in alice_states
    )
    report["bob_qubits"] = sum(math.log2(spec.sigma_size) for _ in bob_states)
    return report


def _charlie_process(spec, phi_states, inst, params, enum_budget) -> dict:
    # The referee sees only the received states; the instance argument is
    # used solely to cross-check the measurement against the verifier.
    out = add_decode_pipeline(spec, inst, params, enum_budget=enum_budget)
    z_dist = out["solution_distribution"]
    verified = np.zeros_like(z_dist, dtype=bool)
    for flat in np.nonzero(z_dist > 1e-12)[0]:
        verified[flat] = instances.verify(inst, flat_to_word(spec, int(flat)))
    out["verified_mass"] = float(z_dist[verified].sum())
    if not np.array_equal(verified, out["solution_mask"] & (z_dist > 1e-12)):
        mism = verified ^ (out["solution_mask"] & (z_dist > 1e-12))
        raise AssertionError(
            f"verifier disagrees with the solution mask on {mism.sum()} strings"
        )
    return out


def sample_measurement(report: dict, rng: np.random.Generator) -> int:
    dist = report["solution_distribution"]
    total = dist.sum()
    return int(rng.choice(dist.size, p=dist / total))


# -- table statistics ---------------------------------------------------------------


def table_fourier_stats(
    ctx: FieldCtx,
    m: int,
    p,
    trials: int | None = None,
    seed: int = 0,
) -> dict:
    """Statistics of the zero-set Fourier mass of a biased table.

    Exact mode (trials=None) enumerates all 2^|Sigma| tables with their
    Bernoulli(p) weights and checks E[|What(0)|^2] = 1 - p exactly, plus
    exact equality of the nonzero-frequency means.  Monte Carlo mode
    returns empirical means with standard errors.  The product rule
    What(e) = prod_i What_i(e_i) is checked exactly on sampled tables.
    """
    p = Fraction(p)
    sigma = ctx.q**m
    kernel_signs = np.rint(
        sigma_qft_matrix(ctx, m) * math.sqrt(sigma)
    ).astype(np.int64)
    if trials is None:
        if sigma > 20:
            raise BudgetExceeded(f"exact mode needs 2^{sigma} table sweeps")
        return _table_stats_exact(sigma, p, kernel_signs)
    return _table_stats_mc(sigma, p, kernel_signs, trials, seed)


def _table_stats_exact(sigma: int, p: Fraction, signs: np.ndarray) -> dict:
    mean0 = Fraction(0)
    mean0_nonempty = Fraction(0)
    means_e = [Fraction(0)] * sigma
    w1, w0 = p, 1 - p
    for table in range(1 << sigma):
        ones = table.bit_count()
        weight = w1**ones * w0 ** (sigma - ones)
        t_size = sigma - ones
        if t_size == 0:
            continue
        mean0 += weight * Fraction(t_size, sigma)
        mean0_nonempty += weight * Fraction(t_size, sigma)
        support = [z for z in range(sigma) if not (table >> z) & 1]
        for e in range(1, sigma):
            char_sum = int(sum(signs[e, z] for z in support))
            means_e[e] += weight * Fraction(char_sum * char_sum, t_size * sigma)
    empty_mass = p**sigma
    out = {
        "sigma": sigma,
        "p": float(p),
        "mean_W0_sq": float(mean0),
        "mean_W0_sq_exact": mean0,
        "mean_W0_sq_nonempty": float(mean0_nonempty / (1 - empty_mass)),
        "empty_mass": float(empty_mass),
        "per_element_means": [float(x) for x in means_e[1:]],
        "per_element_exact": means_e[1:],
        "mode": "exact",
    }
    if mean0 != 1 - p:
        raise AssertionError(f"E[|What(0)|^2] = {mean0} != 1 - p = {1 - p}")
    if len(set(means_e[1:])) > 1:
        raise AssertionError("nonzero-frequency means are not all equal")
    return out


def _table_stats_mc(sigma: int, p: Fraction, signs: np.ndarray, trials: int, seed: int) -> dict:
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xC1A166]))
    draws = rng.integers(0, p.denominator, size=(trials, sigma))
    tables = draws < p.numerator
    zeros = ~tables
    t_sizes = zeros.sum(axis=1)
    nonempty = t_sizes > 0
    w0_sq = np.where(nonempty, t_sizes / sigma, 0.0)
    char = zeros.astype(np.int64) @ signs.T  # (trials, sigma): sum_z in T of sign(e, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        we_sq = np.where(
            nonempty[:, None], char.astype(float) ** 2 / (t_sizes[:, None] * sigma), 0.0
        )
    ne = nonempty.sum()
    means = we_sq[nonempty].mean(axis=0)
    ses = we_sq[nonempty].std(axis=0, ddof=1) / math.sqrt(ne)
    return {
        "sigma": sigma,
        "p": float(p),
        "trials": trials,
        "nonempty_trials": int(ne),
        "mean_W0_sq": float(w0_sq.mean()),
        "se_W0_sq": float(w0_sq.std(ddof=1) / math.sqrt(trials)),
        "mean_W0_sq_nonempty": float(w0_sq[nonempty].mean()),
        "per_element_means": [float(x) for x in means[1:]],
        "per_element_se": [float(x) for x in ses[1:]],
        "mode": "mc",
    }


def product_rule_check(ctx: FieldCtx, m: int, n: int, p, seed: int = 0, tol: float = 1e-12) -> float:
    """Max deviation between transforming a product state as one register
    and the tensor product of per-coordinate transforms, on one sampled
    oracle; anything above tol raises."""
    p = Fraction(p)
    sigma = ctx.q**m
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x9D0D]))
    kernel = sigma_qft_matrix(ctx, m)
    ws = []
    for _ in range(n):
        while True:
            table = rng.integers(0, p.denominator, size=sigma) < p.numerator
            if not table.all():
                break
        w = (~table).astype(float)
        w /= math.sqrt(w.sum())
        ws.append(w)
    product_of_hats = ws[0] @ kernel
    state = ws[0]
    for w in ws[1:]:
        product_of_hats = np.kron(product_of_hats, w @ kernel)
        state = np.kron(state, w)
    direct = apply_qft_vec(state.astype(np.complex128), kernel, n)
    dev = float(np.max(np.abs(direct - product_of_hats)))
    if dev > tol:
        raise AssertionError(f"product rule violated by {dev}")
    return dev
