import numpy as np
import pytest

from overload_cascade.errors import ConfigError
from overload_cascade.experiment import (
    CSV_COLUMNS,
    SweepConfig,
    SweepRecord,
    cell_seed,
    emit_csv,
    emit_svg_plot,
    estimate_transition,
    read_csv,
    run_sweep,
    threshold_command,
)
from overload_cascade.netgen import Network, save_edge_list


def small(**kw):
    base = dict(net="er", n=200, k_avg=6, alpha_start=0.02, alpha_stop=0.06,
                alpha_step=0.02, realizations=2, seed_count=2, rng_seed=5)
    base.update(kw)
    return SweepConfig(**base)


def rec(alpha, G, r=0):
    return SweepRecord("er", 10, 2.0, 0.01, alpha, r, 1, G, 1 - G, 1)


class TestConfig:
    def test_grid(self):
        assert small().alpha_grid.tolist() == [0.02, 0.04, 0.06]
        assert small(alpha_start=0.1, alpha_stop=0.1).alpha_grid.tolist() == [0.1]

    @pytest.mark.parametrize("kw", [
        dict(net="ws"), dict(realizations=0), dict(alpha_start=0.0),
        dict(alpha_step=0), dict(alpha_stop=0.01), dict(net="file"), dict(delta=0),
    ])
    def test_rejects(self, kw):
        with pytest.raises(ConfigError):
            small(**kw)

    def test_ba_m(self):
        assert small(net="ba", k_avg=8).ba_m == 4
        assert small(net="ba", m=2).ba_m == 2


class TestSweep:
    def test_cardinality_and_order(self):
        recs = run_sweep(small())
        assert len(recs) == 6
        assert [(r.alpha, r.realization) for r in recs] == [
            (a, i) for a in (0.02, 0.04, 0.06) for i in range(2)
        ]
        assert all(0 <= r.G <= 1 and 0 <= r.failed_fraction <= 1 for r in recs)

    def test_seeds_follow_documented_rule(self):
        recs = run_sweep(small())
        assert recs[3].rng_seed == cell_seed(5, 1, 1)
        h = int(np.random.SeedSequence([1, 1]).generate_state(1, np.uint64)[0])
        assert recs[3].rng_seed == 5 ^ h

    def test_deterministic_bytes(self, tmp_path):
        emit_csv(run_sweep(small()), tmp_path / "a.csv")
        emit_csv(run_sweep(small()), tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_workers_do_not_change_output(self):
        assert run_sweep(small(workers=2)) == run_sweep(small(workers=1))

    def test_paired_monotone(self):
        cfg = small(paired=True, alpha_start=0.01, alpha_stop=0.2, alpha_step=0.01, realizations=3)
        recs = run_sweep(cfg)
        for r in range(3):
            mine = [x for x in recs if x.realization == r]
            assert len({x.rng_seed for x in mine}) == 1
            assert all(b.G >= a.G for a, b in zip(mine, mine[1:]))
            assert all(b.failed_fraction <= a.failed_fraction for a, b in zip(mine, mine[1:]))

    def test_file_network(self, tmp_path):
        net = Network.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])
        save_edge_list(net, tmp_path / "ring.txt")
        recs = run_sweep(small(net="file", edge_file=str(tmp_path / "ring.txt")))
        assert {r.n for r in recs} == {6} and {r.mean_degree for r in recs} == {2.0}


class TestTransition:
    def test_none(self):
        est = estimate_transition([rec(a, 0.0) for a in (0.1, 0.2, 0.3)])
        assert not est.found and est.alpha_sim is None

    def test_step(self):
        recs = [rec(a, 0.0 if a < 0.2 else 0.8, r) for a in (0.1, 0.15, 0.2, 0.25) for r in range(3)]
        assert estimate_transition(recs).alpha_sim == 0.2

    def test_spike_is_not_sustained(self):
        G = {0.1: 0.0, 0.15: 0.9, 0.2: 0.0, 0.25: 0.5, 0.3: 0.6}
        assert estimate_transition([rec(a, g) for a, g in G.items()]).alpha_sim == 0.25
        G[0.3] = 0.0
        assert not estimate_transition([rec(a, g) for a, g in G.items()]).found

    def test_quantile(self):
        recs = [rec(0.1, g, i) for i, g in enumerate([0, 0, 0.5])] + [rec(0.2, 0.9)]
        assert estimate_transition(recs, quantile=0.5).alpha_sim == 0.2
        assert estimate_transition(recs, quantile=1.0).alpha_sim == 0.1


class TestCsv:
    def test_header_only(self, tmp_path):
        emit_csv([], tmp_path / "e.csv")
        assert (tmp_path / "e.csv").read_text() == ",".join(CSV_COLUMNS) + "\n"

    def test_lines_and_roundtrip(self, tmp_path):
        recs = run_sweep(small())
        emit_csv(recs, tmp_path / "r.csv")
        raw = (tmp_path / "r.csv").read_bytes()
        assert raw.count(b"\n") == 7 and b"\r" not in raw
        assert read_csv(tmp_path / "r.csv") == recs

    def test_awkward_floats_roundtrip(self, tmp_path):
        recs = [SweepRecord("ba", 5000, 1 / 3, 0.1 + 0.2, 0.07000000000000001, 0, 2**64 - 1, 0.1234, 1e-300, 0)]
        emit_csv(recs, tmp_path / "r.csv")
        assert read_csv(tmp_path / "r.csv") == recs


class TestSvg:
    def test_scatter(self, tmp_path):
        recs = run_sweep(small())
        emit_svg_plot(recs, tmp_path / "p.svg", alpha_c=0.045, title="ER")
        s = (tmp_path / "p.svg").read_text()
        assert s.startswith("<svg") and s.rstrip().endswith("</svg>")
        assert s.count("<circle") == len(recs)
        assert "<polygon" in s and "giant component fraction G" in s and "tolerance parameter" in s

    def test_no_marker(self, tmp_path):
        emit_svg_plot([rec(0.1, 0.5)], tmp_path / "p.svg")
        assert "<polygon" not in (tmp_path / "p.svg").read_text()


class TestThresholdCommand:
    def test_er(self):
        res = threshold_command(small(n=5000, k_avg=10))
        assert res.report.alpha_c <= res.report.cond1_bound <= 0.09 * 1.1
        assert res.stats.node_count == 5000 and res.estimate is None

    def test_er_poisson(self):
        res = threshold_command(small(k_avg=10), source="poisson")
        assert res.report.cond1_bound == pytest.approx(0.09, abs=1e-9)
        assert res.report.alpha_c <= 0.09

    def test_ba(self):
        res = threshold_command(small(net="ba", n=5000, k_avg=8))
        assert res.stats.mean_degree < 8
        assert res.report.alpha_c <= 0.07

    def test_ring_is_marginal(self, tmp_path):
        net = Network.from_edges(50, [(i, (i + 1) % 50) for i in range(50)])
        save_edge_list(net, tmp_path / "ring.txt")
        res = threshold_command(small(net="file", edge_file=str(tmp_path / "ring.txt")))
        assert res.excess_degree_mean == 1.0 and res.marginal
        assert res.report.alpha_c == pytest.approx(0.01)

    def test_with_simulation(self):
        res = threshold_command(small(alpha_start=0.01, alpha_stop=0.2, alpha_step=0.01), simulate=True)
        assert res.estimate is not None and len(res.records) == 40
        if res.estimate.found:
            assert res.gap == pytest.approx(res.estimate.alpha_sim - res.report.alpha_c)
