import itertools
from fractions import Fraction as F

import pytest

from mdcsr.bounds import mbr_point
from mdcsr.errors import (
    BadParameters,
    EmptySystem,
    IndivisibleFileSize,
    LengthMismatch,
    UnknownLevel,
    WrongHelperCount,
    WrongShareCount,
)
from mdcsr.system import SystemParams, build_system, minimal_file_sizes

from conftest import grid_system


def _messages(system, offset=0):
    return {
        j: tuple((offset + 13 * i + j) % system.modulus.p for i in range(size))
        for j, size in system.params.sizes.items()
    }


def test_build_examples(fig_system, split_system):
    assert fig_system.stripes == {2: 3, 3: 5}
    assert (fig_system.alpha, fig_system.beta) == (24, 8)
    assert split_system.stripes == {3: 1, 4: 1}
    assert (split_system.alpha, split_system.beta) == (8, 2)


def test_build_rejects_indivisible_and_bad_params():
    with pytest.raises(IndivisibleFileSize):
        build_system(SystemParams.create(4, 3, 0, 0, {2: 7}))
    with pytest.raises(BadParameters):
        SystemParams.create(4, 3, 1, 2, {})  # l1 + l2 >= d
    with pytest.raises(BadParameters):
        SystemParams.create(3, 3, 0, 0, {2: 5})  # d >= n
    with pytest.raises(BadParameters):
        SystemParams.create(4, 3, 1, 1, {2: 1})  # level below l+1
    with pytest.raises(BadParameters):
        build_system(SystemParams.create(300, 299, 0, 0, {299: 1}, p=257))  # n > p-1


def test_encode_share_sizes_and_zero_case(fig_system):
    msgs = _messages(fig_system)
    shares = fig_system.encode(msgs, seed=5)
    assert [sh.node_id for sh in shares] == [1, 2, 3, 4]
    assert all(len(sh.symbols) == fig_system.alpha for sh in shares)
    zero = fig_system.encode({2: (0,) * 15, 3: (0,) * 30}, seed=5)
    assert all(set(sh.symbols) == {0} for sh in zero)  # no keys when l = 0


def test_encode_missing_level(fig_system):
    with pytest.raises(LengthMismatch):
        fig_system.encode({2: (0,) * 15}, seed=0)
    with pytest.raises(LengthMismatch):
        fig_system.encode({2: (0,) * 14, 3: (0,) * 30}, seed=0)


def test_recover_all_subsets(fig_system):
    msgs = _messages(fig_system)
    shares = fig_system.encode(msgs, seed=1)
    for j in (2, 3):
        for subset in itertools.combinations(shares, j):
            assert fig_system.recover_file(j, subset) == msgs[j]


def test_recover_level_guards(fig_system, split_system):
    shares = fig_system.encode(_messages(fig_system), seed=1)
    with pytest.raises(UnknownLevel):
        fig_system.recover_file(0, shares[:1])
    with pytest.raises(UnknownLevel):
        fig_system.recover_file(4, shares)
    with pytest.raises(WrongShareCount):
        fig_system.recover_file(2, shares[:3])
    # level l (here 2) is below the served range of the split system
    sh2 = split_system.encode(_messages(split_system), seed=1)
    with pytest.raises(UnknownLevel):
        split_system.recover_file(2, sh2[:2])
    # an in-range level with no file decodes to the empty message
    empty_level = build_system(SystemParams.create(4, 3, 0, 0, {3: 6}))
    sh3 = empty_level.encode({3: tuple(range(6))}, seed=0)
    assert empty_level.recover_file(2, sh3[:2]) == ()


def test_repair_every_target_and_sequential(fig_system):
    msgs = _messages(fig_system)
    shares = list(fig_system.encode(msgs, seed=9))
    for target in range(1, 5):
        helpers = [sh for sh in shares if sh.node_id != target]
        assert fig_system.repair_node(target, helpers) == shares[target - 1]
    # sequential: rebuild node 1, then use it to rebuild node 2
    rebuilt1 = fig_system.repair_node(1, [shares[1], shares[2], shares[3]])
    rebuilt2 = fig_system.repair_node(2, [rebuilt1, shares[2], shares[3]])
    assert rebuilt2 == shares[1]


def test_repair_and_recovery_from_any_subset():
    system = grid_system(3, 0, 1, p=257)  # n = 4 = d + 1, unique group
    bigger = build_system(SystemParams.create(6, 3, 0, 1, {2: 2, 3: 3}))
    for sys_ in (system, bigger):
        msgs = _messages(sys_)
        shares = list(sys_.encode(msgs, seed=2))
        n, d = sys_.params.n, sys_.params.d
        for j in sys_.levels:
            for subset in itertools.combinations(shares, j):
                assert sys_.recover_file(j, subset) == msgs[j]
        for target in range(1, n + 1):
            others = [sh for sh in shares if sh.node_id != target]
            for helpers in itertools.combinations(others, d):
                assert sys_.repair_node(target, list(helpers)) == shares[target - 1]


def test_repair_helper_count_guard(fig_system):
    shares = fig_system.encode(_messages(fig_system), seed=0)
    with pytest.raises(WrongHelperCount):
        fig_system.repair_node(1, shares[1:3])
    with pytest.raises(WrongHelperCount):
        fig_system.repair_node(1, shares[0:3])  # includes the target


def test_repair_packets_bandwidth(fig_system):
    shares = fig_system.encode(_messages(fig_system), seed=0)
    bundle = fig_system.repair_packets(shares[1], 1)
    assert bundle.total_symbols == fig_system.beta


def test_achieved_point_examples(fig_system, split_system):
    point, rates = fig_system.achieved_point()
    assert (point.alpha_bar, point.beta_bar) == (F(8, 15), F(8, 45))
    assert rates.mapping == {2: F(1, 3), 3: F(2, 3)}
    point2, _ = split_system.achieved_point()
    assert (point2.alpha_bar, point2.beta_bar) == (F(8, 5), F(2, 5))


@pytest.mark.parametrize(
    "n,d,l1,l2,sizes",
    [
        (4, 3, 0, 0, {2: 15, 3: 30}),
        (5, 4, 1, 1, {3: 2, 4: 3}),
        (5, 4, 0, 2, {3: 4, 4: 6}),
        (6, 4, 0, 1, {2: 6, 3: 10, 4: 12}),
        (4, 3, 0, 2, {3: 2}),
    ],
)
def test_achieved_point_sits_on_the_corner(n, d, l1, l2, sizes):
    system = build_system(SystemParams.create(n, d, l1, l2, sizes))
    point, rates = system.achieved_point()
    assert point == mbr_point(rates)


def test_empty_system():
    system = build_system(SystemParams.create(4, 3, 0, 0, {}))
    assert (system.alpha, system.beta) == (0, 0)
    with pytest.raises(EmptySystem):
        system.achieved_point()


def test_storage_is_identical_across_nodes(split_system):
    shares = split_system.encode(_messages(split_system), seed=4)
    sizes = {len(sh.symbols) for sh in shares}
    assert sizes == {split_system.alpha}


def test_minimal_file_sizes_examples():
    assert minimal_file_sizes(3, 0, 0, {2: F(1, 3), 3: F(2, 3)}) == {2: 15, 3: 30}
    assert minimal_file_sizes(4, 1, 1, {3: F(2, 5), 4: F(3, 5)}) == {3: 2, 4: 3}
    assert minimal_file_sizes(3, 0, 0, {3: F(1)}) == {3: 6}
    assert minimal_file_sizes(3, 0, 0, {}) == {}
    with pytest.raises(BadParameters):
        minimal_file_sizes(3, 0, 0, {2: F(1, 2)})


def test_minimal_file_sizes_builds_and_matches():
    sizes = minimal_file_sizes(4, 0, 1, {2: F(1, 7), 3: F(2, 7), 4: F(4, 7)})
    system = build_system(SystemParams.create(5, 4, 0, 1, sizes))
    _, rates = system.achieved_point()
    assert rates.mapping == {2: F(1, 7), 3: F(2, 7), 4: F(4, 7)}
