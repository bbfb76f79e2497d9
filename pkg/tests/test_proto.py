import itertools

from fractions import Fraction

import numpy as np
import pytest

from nullcode import codes, configs, instances, proto
from nullcode.proto import BOT


def small_tree(seed=0, n_bits=6, depth=4, labels=(0, 1, 2)):
    rng = np.random.default_rng(seed)
    return proto.random_onebit_tree(rng, n_bits, n_bits, depth, labels=list(labels))


def test_partition_exactness_every_node():
    tree = small_tree()
    for node in tree.nodes():
        if isinstance(node, proto.Leaf):
            continue
        side = node.rect.X if node.owner == "A" else node.rect.Y
        pieces = [subset for _, subset, _ in node.parts]
        merged = sorted(np.concatenate(pieces).tolist())
        assert merged == sorted(side.tolist())


def test_run_and_transcripts():
    tree = small_tree()
    seen = {}
    for x in range(64):
        for y in range(64):
            transcript, label = proto.run(tree, x, y)
            seen.setdefault(transcript, label)
    # transcripts are the leaves reached; all leaf labels consistent
    assert len(seen) <= sum(1 for _ in tree.leaves())


def test_transcript_stats_constant_tree():
    leaf_tree = proto.ProtocolTree(
        proto.Leaf(7, proto.Rect(proto.full_domain(4), proto.full_domain(4), 4, 4)),
        4,
        4,
    )
    st = proto.transcript_stats(leaf_tree)
    assert st["entropy"] == 0.0 and st["expected_length"] == 0.0


def test_transcript_entropy_single_fair_bit():
    # Alice sends x0 on the full cube
    X = proto.full_domain(3)
    Y = proto.full_domain(3)
    p0 = X[(X & 1) == 0]
    p1 = X[(X & 1) == 1]
    rect = proto.Rect(X, Y, 3, 3)
    node = proto.Node(
        "A",
        rect,
        [
            ("0", p0, proto.Leaf(0, proto.Rect(p0, Y, 3, 3))),
            ("1", p1, proto.Leaf(1, proto.Rect(p1, Y, 3, 3))),
        ],
    )
    st = proto.transcript_stats(proto.ProtocolTree(node, 3, 3))
    assert abs(st["entropy"] - 1.0) <= 1e-12
    assert st["expected_length"] == 1.0


def test_transform_depth0_unchanged():
    leaf_tree = proto.ProtocolTree(
        proto.Leaf(3, proto.Rect(proto.full_domain(4), proto.full_domain(4), 4, 4)),
        4,
        4,
    )
    out = proto.subcube_like_transform(leaf_tree, 0.8)
    assert isinstance(out.root, proto.Leaf) and out.root.label == 3


def test_transform_single_coordinate_round():
    # one round: Alice sends x0 over {0,1}^2 inputs
    X = proto.full_domain(2)
    Y = proto.full_domain(2)
    p0 = X[(X & 1) == 0]
    p1 = X[(X & 1) == 1]
    rect = proto.Rect(X, Y, 2, 2)
    node = proto.Node(
        "A",
        rect,
        [
            ("0", p0, proto.Leaf("left", proto.Rect(p0, Y, 2, 2))),
            ("1", p1, proto.Leaf("right", proto.Rect(p1, Y, 2, 2))),
        ],
    )
    tree = proto.ProtocolTree(node, 2, 2)
    out = proto.subcube_like_transform(tree, 0.8)
    proto.validate_subcube_like(out, 0.8)
    for child_msg, subset, child in out.root.parts:
        # each part fixes at least coordinate 0
        assert 0 in child.rect.fixed_a()[0]
    pairs = list(itertools.product(range(4), range(4)))
    assert proto.outputs_agree(tree, out, pairs)


def test_transform_random_trees_exhaustive_small():
    for seed in range(8):
        tree = small_tree(seed=seed, n_bits=5, depth=4)
        stats = []
        out = proto.subcube_like_transform(tree, 0.8, code_stats=stats)
        proto.validate_subcube_like(out, 0.8)
        pairs = list(itertools.product(range(32), range(32)))
        assert proto.outputs_agree(tree, out, pairs)
        for h, elen in stats:
            assert elen <= h + 1 + 1e-9


def test_transform_rejects_wide_nodes():
    X = proto.full_domain(2)
    Y = proto.full_domain(2)
    rect = proto.Rect(X, Y, 2, 2)
    parts = [
        (format(v, "02b"), X[X == v], proto.Leaf(v, proto.Rect(X[X == v], Y, 2, 2)))
        for v in range(4)
    ]
    tree = proto.ProtocolTree(proto.Node("A", rect, parts), 2, 2)
    with pytest.raises(ValueError):
        proto.subcube_like_transform(tree, 0.8)


def test_cleanup_soundness_and_bottom_rate():
    for seed in range(6):
        tree = small_tree(seed=seed, n_bits=5, depth=4)
        valid_a = lambda label, x: ((x >> (label % 5)) & 1) == 0
        valid_b = lambda label, y: ((y >> (label % 5)) & 1) == 0
        err = proto.measure_error(tree, valid_a, valid_b)
        cleaned = proto.cleanup(tree, err, valid_a, valid_b)
        assert proto.never_wrong(cleaned, valid_a, valid_b)
        assert proto.bottom_probability(cleaned) <= 2 * err + 1e-12


def test_cleanup_zero_error_tree_unchanged_behavior():
    # constant valid label -> zero error -> no bottom outputs
    X = proto.full_domain(3)
    Y = proto.full_domain(3)
    tree = proto.ProtocolTree(proto.Leaf(0, proto.Rect(X, Y, 3, 3)), 3, 3)
    valid = lambda label, v: True
    err = proto.measure_error(tree, valid, valid)
    assert err == 0.0
    cleaned = proto.cleanup(tree, err, valid, valid)
    assert proto.bottom_probability(cleaned) == 0.0
    assert proto.never_wrong(cleaned, valid, valid)


def test_cleanup_wrong_everywhere_becomes_bottom():
    X = proto.full_domain(3)
    Y = proto.full_domain(3)
    tree = proto.ProtocolTree(proto.Leaf(9, proto.Rect(X, Y, 3, 3)), 3, 3)
    never = lambda label, v: False
    err = proto.measure_error(tree, never, never)
    assert err == 1.0
    cleaned = proto.cleanup(tree, err, never, never)
    assert proto.bottom_probability(cleaned) == 1.0


def test_reveal_tree_labels():
    def labeler(x, y):
        return (x, y)

    tree = proto.reveal_tree(labeler, 3, 3)
    for x in range(8):
        for y in range(8):
            _, label = proto.run(tree, x, y)
            assert label == (x, y)


def danger_setup():
    spec = configs.toy_repetition_spec(n=2, s=2)
    insts = [
        instances.sample_instance(spec, Fraction(1, 4), seed) for seed in range(30)
    ]

    def labeler(x_bits, y_bits):
        from nullcode.cli import _tables_from_bits

        tables = _tables_from_bits(spec, x_bits, y_bits)
        inst = instances.with_tables(insts[0], tables)
        sols = instances.brute_solve(inst)
        return sols[0] if sols else BOT

    half = spec.n * spec.sigma_size // 2
    tree = proto.reveal_tree(labeler, half, half)
    return spec, insts, tree


def test_danger_monotone_and_recount():
    spec, insts, tree = danger_setup()
    out = proto.danger_track(tree, spec, insts)
    for ledger in out["ledgers"]:
        ledger.assert_monotone()  # also checked inside
        assert len(ledger.rounds[0]) == 0  # nothing fixed at the root
    assert 0 <= out["danger_to_solution_rate"] <= 1


def test_danger_threshold_arithmetic():
    # n = 2: one fixed oracle bit of a codeword crosses 0.4 * 2 = 0.8
    spec, insts, tree = danger_setup()
    split = instances.Split(spec.n, spec.sigma_size)
    X = proto.full_domain(4)
    rect = proto.Rect(X[(X & 1) == 0], proto.full_domain(4), 4, 4)
    # Alice coordinate 0 fixed = table bit (1, e=0): codeword (0,0) dangerous
    q = proto.dangerous_codewords(spec, rect, split)
    ranks = codes.codeword_rank_matrix(spec)
    assert q == frozenset(np.nonzero(ranks[:, 0] == 0)[0].tolist())


def test_danger_decay_with_n():
    # baseline full-reveal protocols over F_2 repetition codes
    rates = []
    for n in (2, 4):
        spec = configs.toy_repetition_spec(n=n, s=1)
        insts = [
            instances.sample_instance(spec, Fraction(1, 2), seed)
            for seed in range(40)
        ]

        def labeler(x_bits, y_bits, spec=spec, base=insts[0]):
            from nullcode.cli import _tables_from_bits

            tables = _tables_from_bits(spec, x_bits, y_bits)
            inst = instances.with_tables(base, tables)
            sols = instances.brute_solve(inst)
            return sols[0] if sols else BOT

        half = spec.n * spec.sigma_size // 2
        tree = proto.reveal_tree(labeler, half, half)
        out = proto.danger_track(tree, spec, insts)
        rates.append(out["danger_to_solution_rate"])
    assert rates[1] <= rates[0]


def test_tree_json_roundtrip():
    tree = small_tree(seed=2, n_bits=4, depth=3, labels=(0, 1))
    back = proto.tree_from_json(proto.tree_to_json(tree))
    for x in range(16):
        for y in range(16):
            assert proto.run(tree, x, y) == proto.run(back, x, y)


def test_tree_json_bot_label():
    rect = proto.Rect(proto.full_domain(2), proto.full_domain(2), 2, 2)
    tree = proto.ProtocolTree(proto.Leaf(BOT, rect), 2, 2)
    back = proto.tree_from_json(proto.tree_to_json(tree))
    assert back.root.label is BOT


def test_codim_and_subcube_flags():
    X = proto.full_domain(4)
    sub = X[(X & 1) == 1]
    rect = proto.Rect(sub, proto.full_domain(4), 4, 4)
    assert rect.codim == 1
    assert rect.is_subcube()
    assert rect.is_subcube_like(0.8)
