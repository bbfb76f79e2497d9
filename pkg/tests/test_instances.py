import json
import math
from fractions import Fraction

import numpy as np
import pytest

from nullcode import codes, configs, instances
from nullcode.errors import BiasNotPowerOfTwo, BudgetExceeded, SplitRequiresEvenN


def toy():
    return configs.toy_repetition_spec(n=2, s=2)


def test_extreme_biases():
    spec = toy()
    assert not instances.sample_instance(spec, 0, 1).tables.any()
    assert instances.sample_instance(spec, 1, 1).tables.all()


def test_bias_concentration():
    spec = codes.preset(2)  # 3 x 2^20 table bits
    inst = instances.sample_instance(spec, Fraction(1, 64), 9)
    nbits = inst.tables.size
    p = 1 / 64
    sigma = math.sqrt(nbits * p * (1 - p))
    assert abs(int(inst.tables.sum()) - nbits * p) <= 3 * sigma


def test_seed_determinism_bytes():
    spec = toy()
    a = instances.instance_to_json(instances.sample_instance(spec, Fraction(1, 4), 3))
    b = instances.instance_to_json(instances.sample_instance(spec, Fraction(1, 4), 3))
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_expand_collapse_roundtrip():
    spec = toy()
    inst = instances.sample_instance(spec, Fraction(1, 4), 5)
    exp = instances.expand_and_blocks(inst, 2)
    assert np.array_equal(exp.unfolded.min(axis=2), inst.tables)
    col = instances.collapse_and_blocks(exp)
    assert np.array_equal(col.tables, inst.tables)


def test_expand_ones_forced():
    spec = toy()
    inst = instances.sample_instance(spec, Fraction(1, 4), 6)
    exp = instances.expand_and_blocks(inst, 2)
    ones = np.nonzero(inst.tables)
    assert exp.unfolded[ones].all()


def test_expand_requires_power_of_two():
    spec = toy()
    inst = instances.sample_instance(spec, Fraction(1, 3), 5)
    with pytest.raises(BiasNotPowerOfTwo):
        instances.expand_and_blocks(inst, 2)


def test_and_block_bias_monte_carlo():
    # AND of b fresh uniform bits is 1 with probability 2^-b
    rng = np.random.default_rng(0)
    b = 6
    blocks = rng.integers(0, 2, size=(200000, b))
    hits = blocks.min(axis=1).mean()
    p = 2.0**-b
    se = math.sqrt(p * (1 - p) / 200000)
    assert abs(hits - p) <= 3 * se


def test_unfolded_sampling_gives_biased_tables():
    spec = codes.preset(2)
    inst = instances.sample_unfolded_instance(spec, 6, 4)
    assert inst.p == Fraction(1, 64)
    nbits = inst.tables.size
    p = 1 / 64
    sigma = math.sqrt(nbits * p * (1 - p))
    assert abs(int(inst.tables.sum()) - nbits * p) <= 3 * sigma


def test_verify_and_brute_solve_examples():
    spec = toy()
    base = instances.sample_instance(spec, Fraction(1, 4), 0)
    tables = np.ones((2, 4), dtype=np.uint8)
    tables[0, 1] = 0
    tables[1, 1] = 0
    inst = instances.with_tables(base, tables)
    assert instances.brute_solve(inst) == [((1,), (1,))]
    assert instances.verify(inst, ((1,), (1,)))
    assert not instances.verify(inst, ((2,), (2,)))
    assert not instances.verify(inst, ((1,), (2,)))  # not a codeword

    zero = instances.with_tables(base, np.zeros((2, 4), np.uint8))
    assert len(instances.brute_solve(zero)) == spec.size
    ones = instances.with_tables(base, np.ones((2, 4), np.uint8))
    assert instances.brute_solve(ones) == []


def test_verify_matches_brute_solve_exhaustively():
    spec = toy()
    base = instances.sample_instance(spec, Fraction(1, 4), 0)
    rng = np.random.default_rng(1)
    for _ in range(20):
        inst = instances.with_tables(
            base, rng.integers(0, 2, size=(2, 4)).astype(np.uint8)
        )
        sols = set(instances.brute_solve(inst))
        for word in codes.iter_codewords(spec):
            assert instances.verify(inst, word) == (word in sols)


def test_expected_solution_count():
    spec = toy()
    p = Fraction(1, 4)
    expect = instances.expected_solution_count(spec, p)
    assert expect == spec.size * (1 - 1 / 4) ** spec.n
    counts = []
    for seed in range(1000):
        inst = instances.sample_instance(spec, p, seed)
        counts.append(len(instances.brute_solve(inst)))
    counts = np.array(counts, dtype=float)
    se = counts.std(ddof=1) / math.sqrt(len(counts))
    assert abs(counts.mean() - expect) <= 3 * se


def test_brute_solve_jobs_invariant():
    spec = toy()
    inst = instances.sample_instance(spec, Fraction(1, 4), 17)
    assert instances.brute_solve(inst) == instances.brute_solve(inst, jobs=3)


def test_split():
    sp = instances.Split(4, 4)
    assert sp.bits_per_side == 8
    assert sp.flat_index(1, 0) == 0
    assert sp.flat_index(2, 3) == 7
    assert sp.flat_index(3, 0) == 0 and sp.side(3) == "B"
    with pytest.raises(SplitRequiresEvenN):
        instances.Split(3, 4)


def test_file_roundtrip_with_unfolded(tmp_path):
    spec = toy()
    inst = instances.expand_and_blocks(
        instances.sample_instance(spec, Fraction(1, 4), 8), 2
    )
    path = tmp_path / "inst.json"
    instances.save_instance(inst, path)
    back = instances.load_instance(path)
    assert np.array_equal(back.tables, inst.tables)
    assert np.array_equal(back.unfolded, inst.unfolded)
    assert back.spec == inst.spec and back.p == inst.p and back.seed == inst.seed


def test_table_budget():
    spec = codes.preset(3)  # |Sigma| = 64^9 is far over any table budget
    with pytest.raises(BudgetExceeded):
        instances.sample_instance(spec, Fraction(1, 64), 0)
