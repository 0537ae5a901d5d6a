import numpy as np
import pytest

from idwlayout import kernels
from idwlayout.core import Params, Precision, idw_predict_seq
from idwlayout.layouts import LayoutKind, build, legal_pairs
from idwlayout.strategies import (Accumulator, ExecConfig, RunStats, STRATEGIES,
                                  merge_accumulators, reduce_tree, run_naive,
                                  run_nested_improved, run_nested_original, run_tiled,
                                  strategy_tolerance)

from conftest import random_queries, random_records
from oracle_idw import brute_idw

ALL_LEGAL = legal_pairs()


def rel_err(got, ref):
    got = np.asarray(got, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    return np.max(np.abs(got - ref) / np.abs(ref))


class TestOracleEquivalence:
    def test_every_layout_strategy_precision(self, rng):
        n, m = 400, 150
        data = random_records(rng, n)
        queries = random_queries(rng, m)
        oracle = brute_idw(data.tolist(), queries.tolist())
        cfg = ExecConfig(group_size=64, parallel_width=2)
        for kind, precision in ALL_LEGAL:
            store = build(data, kind, precision)
            for name, runner in STRATEGIES.items():
                got = runner(store, queries, Params(), cfg)
                tol = strategy_tolerance(precision, n)
                assert rel_err(got, oracle) <= tol, (kind, precision, name)

    def test_naive_and_tiled_bit_equal_seq(self, rng):
        data = random_records(rng, 333)
        queries = random_queries(rng, 97)
        for precision in Precision:
            seq = idw_predict_seq(data, queries, precision=precision)
            store = build(data, LayoutKind.AoS, precision)
            cfg = ExecConfig(group_size=32, tile_size=17, parallel_width=2)
            assert np.array_equal(run_naive(store, queries, cfg=cfg), seq)
            assert np.array_equal(run_tiled(store, queries, cfg=cfg), seq)

    def test_general_p_path(self, rng):
        data = random_records(rng, 200)
        queries = random_queries(rng, 31)
        oracle = brute_idw(data.tolist(), queries.tolist(), p=3.0)
        store = build(data, LayoutKind.SoA, Precision.double)
        for runner in STRATEGIES.values():
            got = runner(store, queries, Params(p=3.0), ExecConfig(group_size=64))
            assert rel_err(got, oracle) <= 1e-9

    def test_nested_random_512_within_double_tolerance(self, rng):
        data = random_records(rng, 512)
        queries = random_queries(rng, 512)
        oracle = idw_predict_seq(data, queries)
        store = build(data, LayoutKind.SoAoS, Precision.double)
        got = run_nested_original(store, queries, cfg=ExecConfig(group_size=128))
        assert rel_err(got, oracle) <= 1e-9


class TestReadCountLaw:
    def test_naive_reads_3mn(self, rng):
        n, m = 100, 37
        store = build(random_records(rng, n), LayoutKind.SoA, Precision.double)
        run_naive(store, random_queries(rng, m), cfg=ExecConfig(parallel_width=2))
        assert store.stats.snapshot() == (m * n, m * n, m * n)

    def test_tiled_reads_once_per_group(self, rng):
        n = 64
        G = 16
        store = build(random_records(rng, n), LayoutKind.AoaS, Precision.double)
        # m = G: one group, per-component reads = n
        run_tiled(store, random_queries(rng, G), cfg=ExecConfig(group_size=G))
        assert store.stats.snapshot() == (n, n, n)
        # m = 2G: two groups
        store.stats.reset()
        run_tiled(store, random_queries(rng, 2 * G), cfg=ExecConfig(group_size=G))
        assert store.stats.snapshot() == (2 * n, 2 * n, 2 * n)

    def test_tiled_remainder_group_still_loads_all_tiles(self, rng):
        n, m, G = 50, 33, 16  # ceil(33/16) = 3 groups
        store = build(random_records(rng, n), LayoutKind.Hybrid, Precision.double)
        run_tiled(store, random_queries(rng, m), cfg=ExecConfig(group_size=G, tile_size=7))
        assert store.stats.snapshot() == (3 * n, 3 * n, 3 * n)

    def test_nested_strategies_read_3mn(self, rng):
        n, m = 120, 45
        for runner in (run_nested_original, run_nested_improved):
            store = build(random_records(rng, n), LayoutKind.AoS, Precision.double)
            runner(store, random_queries(rng, m), cfg=ExecConfig(group_size=32))
            assert store.stats.snapshot() == (m * n, m * n, m * n)

    def test_empty_queries_no_reads(self, rng):
        store = build(random_records(rng, 10), LayoutKind.SoA, Precision.double)
        for runner in STRATEGIES.values():
            got = runner(store, [], cfg=ExecConfig(group_size=4))
            assert got.shape == (0,)
        assert store.stats.snapshot() == (0, 0, 0)


class TestTiling:
    def test_remainder_tile_sizes(self, rng):
        # n=10, T=4 -> tiles 4,4,2
        data = random_records(rng, 10)
        queries = random_queries(rng, 6)
        store = build(data, LayoutKind.SoA, Precision.double)
        got = run_tiled(store, queries, cfg=ExecConfig(group_size=4, tile_size=4))
        assert rel_err(got, idw_predict_seq(data, queries)) <= 1e-9

    def test_tile_larger_than_n(self, rng):
        data = random_records(rng, 5)
        queries = random_queries(rng, 3)
        store = build(data, LayoutKind.AoS, Precision.double)
        got = run_tiled(store, queries, cfg=ExecConfig(group_size=2, tile_size=64))
        assert np.array_equal(got, idw_predict_seq(data, queries))


class TestNestedStructure:
    def test_original_merge_events(self, rng):
        n, m, G = 300, 21, 128  # ceil(300/128) = 3 inner groups
        store = build(random_records(rng, n), LayoutKind.SoA, Precision.double)
        stats = RunStats()
        run_nested_original(store, random_queries(rng, m),
                            cfg=ExecConfig(group_size=G), instrumentation=stats)
        assert stats.merge_events == 3 * m

    def test_improved_zero_merge_events_and_trips(self, rng):
        n, m, G = 300, 21, 128
        store = build(random_records(rng, n), LayoutKind.SoA, Precision.double)
        stats = RunStats()
        run_nested_improved(store, random_queries(rng, m),
                            cfg=ExecConfig(group_size=G), instrumentation=stats)
        assert stats.merge_events == 0
        assert stats.worker_trips is not None and len(stats.worker_trips) == G
        assert np.all(stats.worker_trips == -(-n // G))

    def test_single_group_degenerate_matches_improved(self, rng):
        # n <= G: original runs exactly one group; same tree as improved
        data = random_records(rng, 100)
        queries = random_queries(rng, 13)
        store = build(data, LayoutKind.AoS, Precision.double)
        cfg = ExecConfig(group_size=256)
        a = run_nested_original(store, queries, cfg=cfg)
        b = run_nested_improved(store, queries, cfg=cfg)
        assert np.array_equal(a, b)

    def test_group_size_one(self, rng):
        # degenerate G=1: both nested variants stay correct
        data = random_records(rng, 37)
        queries = random_queries(rng, 9)
        store = build(data, LayoutKind.SoA, Precision.double)
        oracle = idw_predict_seq(data, queries)
        cfg = ExecConfig(group_size=1)
        assert rel_err(run_nested_original(store, queries, cfg=cfg), oracle) <= 1e-9
        assert rel_err(run_nested_improved(store, queries, cfg=cfg), oracle) <= 1e-9


class TestReduceTree:
    def test_singleton(self):
        a = Accumulator(1.5, 2.5, 7)
        got = reduce_tree([a])
        assert (got.sum_w, got.sum_wz, got.hit_index) == (1.5, 2.5, 7)

    def test_four_partials_fixed_shape(self):
        # ((a + b) + (c + d)): check against the explicit parenthesization
        vals = [0.1, 0.2, 0.3, 0.4]
        parts = [Accumulator(v, 2 * v) for v in vals]
        got = reduce_tree(parts)
        assert got.sum_w == (0.1 + 0.2) + (0.3 + 0.4)
        assert got.sum_wz == (0.2 + 0.4) + (0.6 + 0.8)

    def test_exact_integer_sum_pow2(self):
        parts = [Accumulator(1.0, 1.0) for _ in range(2 ** 20)]
        assert reduce_tree(parts).sum_w == 1048576.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="empty reduction"):
            reduce_tree([])

    def test_hit_index_min_and_none(self):
        assert merge_accumulators(Accumulator(0, 0, None), Accumulator(0, 0, 5)).hit_index == 5
        assert merge_accumulators(Accumulator(0, 0, 3), Accumulator(0, 0, 5)).hit_index == 3
        assert merge_accumulators(Accumulator(0, 0, None), Accumulator(0, 0, None)).hit_index is None
        got = reduce_tree([Accumulator(1, 1, None), Accumulator(1, 1, 9),
                           Accumulator(1, 1, 2), Accumulator(1, 1, None)])
        assert got.hit_index == 2

    @pytest.mark.parametrize("length", [1, 2, 3, 5, 7, 8, 13, 64, 100])
    def test_matches_kernel_tree_bitwise(self, rng, length):
        # the public op and the in-kernel pow2-padded tree share one shape
        w = rng.random(length)
        wz = rng.random(length)
        expect = reduce_tree([Accumulator(a, b) for a, b in zip(w, wz)])
        wp, wzp, hitp, hzp = kernels.identity_scratch(length, np.dtype(np.float64))
        wp[:length] = w
        wzp[:length] = wz
        kernels._tree_combine(wp, wzp, hitp, hzp, wp.shape[0])
        assert wp[0] == expect.sum_w and wzp[0] == expect.sum_wz

    def test_odd_tail_passthrough_shape(self):
        # length 3: (a + b) + c
        parts = [Accumulator(v, 0.0) for v in (0.1, 0.7, 1e-17)]
        assert reduce_tree(parts).sum_w == (0.1 + 0.7) + 1e-17


class TestDeterminism:
    @pytest.mark.parametrize("name", list(STRATEGIES))
    def test_bit_identical_across_parallel_width(self, rng, name):
        data = random_records(rng, 700)
        queries = random_queries(rng, 300)
        for precision in Precision:
            store = build(data, LayoutKind.AoS, precision)
            outs = []
            for pw in (1, 2, 8):
                cfg = ExecConfig(group_size=64, parallel_width=pw)
                outs.append(STRATEGIES[name](store, queries, Params(), cfg))
            assert np.array_equal(outs[0], outs[1])
            assert np.array_equal(outs[0], outs[2])

    def test_repeated_runs_identical(self, rng):
        data = random_records(rng, 256)
        queries = random_queries(rng, 64)
        store = build(data, LayoutKind.Hybrid, Precision.double)
        cfg = ExecConfig(group_size=32)
        for runner in STRATEGIES.values():
            assert np.array_equal(runner(store, queries, cfg=cfg),
                                  runner(store, queries, cfg=cfg))

    def test_relaxed_reduction_flag_accepted(self, rng):
        # the flag only asserts the guarantee; this implementation is
        # deterministic either way
        data = random_records(rng, 128)
        queries = random_queries(rng, 32)
        store = build(data, LayoutKind.SoA, Precision.double)
        strict = ExecConfig(group_size=16, deterministic_reduction=True)
        relaxed = ExecConfig(group_size=16, deterministic_reduction=False)
        for runner in STRATEGIES.values():
            assert np.array_equal(runner(store, queries, cfg=strict),
                                  runner(store, queries, cfg=relaxed))


class TestCoincidence:
    def test_rule_propagates_everywhere(self, rng):
        data = random_records(rng, 90)
        dup_z = (41.0, 17.0)
        data[20] = [data[57][0], data[57][1], dup_z[0]]  # two coincident sites
        data[57, 2] = dup_z[1]
        target = (data[20][0], data[20][1])
        queries = np.vstack([random_queries(rng, 5), [target]])
        for kind, precision in ALL_LEGAL:
            store = build(data, kind, precision)
            for name, runner in STRATEGIES.items():
                got = runner(store, queries, cfg=ExecConfig(group_size=16, tile_size=8))
                # lowest coincident index is 20; its z must come back exactly
                expect = float(np.asarray(dup_z[0], dtype=precision.dtype))
                assert float(got[-1]) == expect, (kind, precision, name)

    def test_zero_eps_window(self, rng):
        data = random_records(rng, 40)
        data[7, :2] = (0.5, 0.5)
        queries = [(0.5 + 1e-4, 0.5)]
        params = Params(zero_eps=1e-6)  # d2 = 1e-8 <= 1e-6
        store = build(data, LayoutKind.SoA, Precision.double)
        for runner in STRATEGIES.values():
            got = runner(store, queries, params, ExecConfig(group_size=8))
            assert got[0] == data[7, 2]

    def test_single_data_point_cloud(self, rng):
        store = build([(0.25, 0.75, 5.0)], LayoutKind.SoA, Precision.double)
        queries = [(0.25, 0.75), (0.9, 0.1)]
        for runner in STRATEGIES.values():
            got = runner(store, queries, cfg=ExecConfig(group_size=4))
            assert got[0] == 5.0  # coincident: exact
            assert abs(got[1] - 5.0) < 1e-12


class TestValidation:
    def test_invalid_queries_rejected(self, rng):
        store = build(random_records(rng, 4), LayoutKind.SoA, Precision.double)
        for runner in STRATEGIES.values():
            with pytest.raises(ValueError, match="invalid coordinate"):
                runner(store, [(np.nan, 0.0)])

    def test_exec_config_validation(self):
        with pytest.raises(ValueError):
            ExecConfig(group_size=0)
        with pytest.raises(ValueError):
            ExecConfig(tile_size=0)
        with pytest.raises(ValueError):
            ExecConfig(parallel_width=0)

    def test_exec_config_defaults(self):
        cfg = ExecConfig()
        assert cfg.group_size == 1024
        assert cfg.tile_size == 1024
        assert cfg.parallel_width >= 1
        assert cfg.deterministic_reduction
