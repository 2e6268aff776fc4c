import pytest

from cpmatch import LaminarFamily, LaminarityViolation, contract_maximal, make_graph
from cpmatch.laminar import contract_with_dual, dual_inside, odd_set
from cpmatch.lp import DualSolution
from cpmatch.rational import ZERO, rat

from conftest import TRIANGLE_LEFT, TRIANGLE_RIGHT


class TestOddSet:
    def test_valid(self):
        assert odd_set([3, 1, 2], 8) == frozenset({1, 2, 3})

    def test_even_rejected(self):
        with pytest.raises(ValueError):
            odd_set([1, 2, 3, 4], 10)

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            odd_set([1], 10)

    def test_too_large_rejected(self):
        with pytest.raises(ValueError):
            odd_set([1, 2, 3], 4)


class TestInsertChecked:
    def test_insert_into_empty(self):
        fam = LaminarFamily(8).insert_checked({1, 2, 3})
        assert len(fam) == 1

    def test_nested_insert(self):
        fam = LaminarFamily(8, [{1, 2, 3}]).insert_checked({1, 2, 3, 4, 5})
        assert len(fam) == 2
        assert fam.parent_of({1, 2, 3}) == frozenset({1, 2, 3, 4, 5})

    def test_crossing_rejected(self):
        fam = LaminarFamily(8, [{1, 2, 3}])
        with pytest.raises(LaminarityViolation):
            fam.insert_checked({3, 4, 5})

    def test_duplicate_rejected(self):
        fam = LaminarFamily(8, [{1, 2, 3}])
        with pytest.raises(LaminarityViolation):
            fam.insert_checked({1, 2, 3})

    def test_size_bound_holds_on_deep_nesting(self):
        # max-size laminar chains never exceed n/2 members
        n = 14
        sets = [set(range(1, k)) for k in (4, 6, 8, 10, 12)] + [{12, 13, 14}]
        fam = LaminarFamily(n)
        for s in sets:
            fam = fam.insert_checked(s)
        assert len(fam) == 6 <= n // 2
        assert fam.maximal_sets() == sorted(
            [frozenset({12, 13, 14}), frozenset(range(1, 12))], key=lambda s: (len(s), sorted(s))
        )

    def test_insert_returns_new_family(self):
        fam = LaminarFamily(8)
        fam2 = fam.insert_checked({1, 2, 3})
        assert len(fam) == 0 and len(fam2) == 1


class TestMaximalSets:
    def test_nested_query(self):
        fam = LaminarFamily(8, [{1, 2, 3}, {1, 2, 3, 4, 5}])
        assert fam.maximal_sets_intersecting({5, 6}) == [frozenset({1, 2, 3, 4, 5})]

    def test_empty_family(self):
        assert LaminarFamily(8).maximal_sets_intersecting({1, 2}) == []

    def test_two_disjoint_hits(self):
        fam = LaminarFamily(12, [{1, 2, 3}, {7, 8, 9}])
        assert fam.maximal_sets_intersecting({3, 7}) == [
            frozenset({1, 2, 3}),
            frozenset({7, 8, 9}),
        ]


class TestContraction:
    def test_bowtie_contract_both_triangles(self, bowtie, bowtie_perturbed):
        dual = DualSolution(
            {1: rat(40), 2: rat(24), 3: rat(-8), 4: rat(5), 5: rat(3), 6: rat(-1)}
        )
        fam = LaminarFamily(6, [TRIANGLE_LEFT, TRIANGLE_RIGHT])
        new_g, cmap = contract_maximal(
            bowtie, bowtie_perturbed.scaled, fam, dual, lambda s: True
        )
        assert new_g.n == 2 and new_g.m == 1
        # boundary cost drops by the inner duals at both endpoints
        assert cmap.cost_image[0] == 1281 - rat(-8) - rat(5)
        assert cmap.edge_preimage == [6]

    def test_contract_nothing_is_identity(self, bowtie, bowtie_perturbed):
        fam = LaminarFamily(6, [TRIANGLE_LEFT])
        new_g, cmap = contract_maximal(
            bowtie, bowtie_perturbed.scaled, fam, DualSolution(), lambda s: False
        )
        assert new_g.n == 6 and new_g.m == 7
        assert cmap.edge_preimage == list(range(7))
        assert all(cmap.node_image[u] == u for u in range(1, 7))

    def test_nested_contract_outer_drops_inner(self):
        g = make_graph(8, [(1, 2, 0), (3, 4, 0), (5, 6, 1), (7, 8, 1), (1, 6, 2)])
        fam = LaminarFamily(8, [{1, 2, 3}, {1, 2, 3, 4, 5}])
        dual = DualSolution({u: ZERO for u in range(1, 9)})
        new_g, cmap = contract_maximal(
            g, g.costs(), fam, dual, lambda s: len(s) == 5
        )
        # inner set's image is a single node: it vanished from the picture
        assert cmap.image_node_of_set(frozenset({1, 2, 3})) is not None
        assert new_g.n == 4

    def test_selected_nested_pair_rejected(self):
        g = make_graph(8, [(1, 2, 0)])
        fam = LaminarFamily(8, [{1, 2, 3}, {1, 2, 3, 4, 5}])
        with pytest.raises(ValueError):
            contract_maximal(g, g.costs(), fam, DualSolution(), lambda s: True)

    def test_preimage_bijection_roundtrip(self, bowtie, bowtie_perturbed):
        dual = DualSolution({u: ZERO for u in range(1, 7)})
        new_g, cmap = contract_with_dual(
            bowtie, bowtie_perturbed.scaled, [TRIANGLE_LEFT], dual
        )
        # every surviving edge has a unique pre-image; nothing else survives
        assert sorted(cmap.edge_preimage) == [3, 4, 5, 6]
        assert len(set(cmap.edge_preimage)) == new_g.m

    def test_parallel_edges_kept_distinct(self):
        g = make_graph(5, [(1, 4, 3), (2, 4, 7), (3, 4, 9), (1, 2, 0), (2, 3, 0), (1, 3, 0)])
        dual = DualSolution({u: ZERO for u in range(1, 6)})
        new_g, cmap = contract_with_dual(g, g.costs(), [frozenset({1, 2, 3})], dual)
        assert new_g.m == 3  # three parallel boundary edges survive distinct
        assert len({tuple(new_g.endpoints(e)) for e in range(3)}) == 1


class TestContractionImageInvariant:
    @pytest.mark.parametrize("seed", range(5))
    def test_image_of_optimum_stays_half_integral_with_same_o(self, seed):
        # contract the maximal positive-dual sets of a real run w.r.t. its
        # extremal dual: the image must stay proper-half-integral with the
        # same number of odd cycles
        from cpmatch import random_instance, run
        from cpmatch.graph import decompose_support, is_proper_half_integral
        from cpmatch.lp import DualSolution
        from cpmatch.rational import parse_rat

        from instances import MULTI_ROUND_RANDOM

        n, dens, hi, pinned = MULTI_ROUND_RANDOM[seed]
        g = random_instance(n, dens, (0, hi), pinned)
        res = run(g)
        rec = next(r for r in res.records if r.cuts_imposed and r.dual_kind == "extremal")
        x = [parse_rat(s) for s in rec.primal]
        dual = DualSolution()
        for u_str, val in rec.dual_nodes.items():
            dual[int(u_str)] = parse_rat(val)
        for nodes, val in rec.dual_sets:
            dual[frozenset(nodes)] = parse_rat(val)
        fam = LaminarFamily(g.n, [frozenset(s) for s in rec.cuts_imposed])
        maximal = set(fam.maximal_sets())
        new_g, cmap = contract_maximal(
            g, res.perturbed.scaled, fam, dual,
            lambda s: s in maximal and dual.of_set(s) > 0,
        )
        x_img = [x[cmap.edge_preimage[e]] for e in range(new_g.m)]
        assert is_proper_half_integral(x_img, new_g)
        assert decompose_support(x_img, new_g).o == rec.odd_cycle_count


class TestDualInside:
    def test_sums_strict_subsets_containing_node(self):
        s = frozenset({1, 2, 3, 4, 5})
        dual = DualSolution(
            {1: rat(7), frozenset({1, 2, 3}): rat(5), s: rat(100), frozenset({4, 5, 6, 7, 8, 9, 10}): rat(11)}
        )
        assert dual_inside(dual, s, 1) == 12  # own value + inner set, not s itself
        assert dual_inside(dual, s, 4) == 0
