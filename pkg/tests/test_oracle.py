import json
import pathlib

import pytest

from cpmatch import (
    GenerationFailed,
    NoPerfectMatching,
    SchemaMismatch,
    brute_force_fractional_opt,
    brute_force_mcpm,
    enumerate_perfect_matchings,
    make_graph,
    random_instance,
    run,
    verify_trace,
    write_instance,
)
from cpmatch.oracle import parse_trace
from cpmatch.rational import perturb

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


class TestBruteForce:
    def test_bowtie(self, bowtie):
        edges, cost = brute_force_mcpm(bowtie)
        assert edges == [0, 5, 6]
        assert cost == 10

    def test_single_edge(self):
        g = make_graph(2, [(1, 2, 5)])
        assert brute_force_mcpm(g) == ([0], 5)

    def test_triangle_has_no_matching(self):
        g = make_graph(3, [(1, 2, 0), (2, 3, 0), (1, 3, 0)])
        with pytest.raises(NoPerfectMatching):
            brute_force_mcpm(g)

    def test_node_limit(self):
        g = make_graph(18, [(1, 2, 0)])
        with pytest.raises(ValueError):
            brute_force_mcpm(g)

    def test_perturbed_costs_rank_matchings(self, bowtie, bowtie_perturbed):
        edges, cost = brute_force_mcpm(bowtie, bowtie_perturbed.scaled)
        assert edges == [0, 5, 6] and cost == 1347

    def test_enumerate_bowtie(self, bowtie):
        assert enumerate_perfect_matchings(bowtie) == [(0, 5, 6)]

    def test_enumerate_six_cycle(self, six_cycle):
        assert enumerate_perfect_matchings(six_cycle) == [(0, 2, 4), (1, 3, 5)]


class TestFractionalOracle:
    def test_bowtie_perturbed(self, bowtie, bowtie_perturbed):
        assert brute_force_fractional_opt(bowtie, bowtie_perturbed.scaled) == 63

    def test_single_matching_graph(self):
        g = make_graph(4, [(1, 2, 7), (3, 4, 9)])
        assert brute_force_fractional_opt(g) == 16

    def test_six_cycle_fractional_never_beats_integral(self, six_cycle):
        pc = perturb([1] * 6)
        assert brute_force_fractional_opt(six_cycle, pc.scaled) == 213

    def test_limit(self):
        g = make_graph(14, [(1, 2, 0)])
        with pytest.raises(ValueError):
            brute_force_fractional_opt(g)

    @pytest.mark.parametrize("n,seed", [(4, 1), (4, 2), (6, 3), (6, 4), (8, 5), (8, 6)])
    def test_matches_lp_engine_on_randoms(self, n, seed):
        from cpmatch import LaminarFamily, solve_primal

        g = random_instance(n, 0.7, (0, 30), 60_000 + seed)
        pc = perturb([c for _u, _v, c in g.edges])
        _x, _dual, obj = solve_primal(g, pc.scaled, LaminarFamily(n))
        assert brute_force_fractional_opt(g, pc.scaled) == obj


class TestRandomInstance:
    def test_complete_graph_when_density_one(self):
        g = random_instance(6, 1.0, (0, 0), 123)
        assert g.m == 15 and all(c == 0 for _u, _v, c in g.edges)

    def test_same_seed_same_instance(self):
        a = random_instance(8, 0.5, (0, 100), 4242)
        b = random_instance(8, 0.5, (0, 100), 4242)
        assert a.edges == b.edges

    def test_golden_instance_pinned(self):
        g = random_instance(4, 0.5, (0, 100), 42)
        golden = (FIXTURES / "golden_n4_seed42.txt").read_text()
        assert write_instance(g) == golden

    def test_generation_failure(self):
        with pytest.raises(GenerationFailed):
            random_instance(4, 0.0, (0, 10), 1, max_attempts=5)

    def test_odd_n_rejected(self):
        with pytest.raises(ValueError):
            random_instance(5, 0.5, (0, 10), 1)


class TestVerifyTrace:
    def _trace(self, g, **kwargs):
        res = run(g, **kwargs)
        return res.trace_lines()

    def test_clean_run_passes_all_checks(self, bowtie):
        report = verify_trace(bowtie, self._trace(bowtie))
        assert report.all_ok

    def test_corrupted_dual_fails_slackness_with_witness(self, bowtie):
        lines = self._trace(bowtie)
        rec = json.loads(lines[1])
        rec["dual_nodes"]["1"] = "999"
        lines[1] = json.dumps(rec, sort_keys=True)
        report = verify_trace(bowtie, lines)
        ok, witness = report.checks["complementary_slackness"]
        assert not ok and witness["iteration"] == 0

    def test_reordered_iterations_fail_monotonicity(self, bowtie):
        lines = self._trace(bowtie)
        lines[1], lines[2] = lines[2], lines[1]
        report = verify_trace(bowtie, lines)
        assert not report.ok("cycle_monotonicity")

    def test_corrupted_primal_fails_half_integrality(self, bowtie):
        lines = self._trace(bowtie)
        rec = json.loads(lines[1])
        rec["primal"][0] = "1/3"
        lines[1] = json.dumps(rec, sort_keys=True)
        report = verify_trace(bowtie, lines)
        assert not report.ok("half_integrality")

    def test_wrong_instance_rejected(self, bowtie, six_cycle):
        with pytest.raises(SchemaMismatch):
            verify_trace(six_cycle, self._trace(bowtie))

    def test_bad_schema_rejected(self, bowtie):
        lines = self._trace(bowtie)
        lines[0] = json.dumps({"schema": "other"})
        with pytest.raises(SchemaMismatch):
            verify_trace(bowtie, lines)

    def test_missing_fields_rejected(self, bowtie):
        lines = self._trace(bowtie)
        rec = json.loads(lines[1])
        del rec["primal"]
        lines[1] = json.dumps(rec)
        with pytest.raises(SchemaMismatch):
            parse_trace(lines)

    def test_doctored_family_evolution_caught(self, bowtie):
        lines = self._trace(bowtie)
        rec = json.loads(lines[2])
        rec["cuts_imposed"] = [[1, 2, 3]]  # not retained+added of the previous record
        lines[2] = json.dumps(rec, sort_keys=True)
        report = verify_trace(bowtie, lines)
        assert not report.ok("cut_persistence")

    def test_final_cost_checked_against_oracle(self, bowtie):
        lines = self._trace(bowtie)
        # doctor the final record to claim a different matching
        rec = json.loads(lines[-1])
        rec["primal"] = ["0", "1", "0", "0", "1", "0", "1"]
        lines[-1] = json.dumps(rec, sort_keys=True)
        report = verify_trace(bowtie, lines)
        assert not report.all_ok
