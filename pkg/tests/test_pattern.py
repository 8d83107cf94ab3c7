import json
import random
from pathlib import Path

import pytest
from pydantic import ValidationError

from egocount.catalog import get_pattern
from egocount.errors import (
    CompositionRowSumMismatch,
    DimensionMismatch,
    EmptyObservableSet,
    ModeMismatchError,
    PatternTooLargeError,
)
from egocount.graph import NeighborhoodMode
from egocount.pattern import (
    CompositionMatrix,
    CountMode,
    Pattern,
    PatternSpec,
    automorphism_orbits,
    enumerate_compositions,
    observable_orbits,
    read_pattern,
    validate_pattern,
)

fixtures_folder = Path(__file__).parent / "fixtures"

TRIANGLE = Pattern(3, ((0, 1), (1, 2), (0, 2)))
PATH3 = Pattern(3, ((0, 1), (1, 2)))
CYCLE4 = Pattern(4, ((0, 1), (1, 2), (2, 3), (0, 3)))
DIAMOND = Pattern(4, ((0, 1), (0, 2), (1, 2), (0, 3), (1, 3)))
FEEDFORWARD = Pattern(3, ((0, 1), (0, 2), (1, 2)), directed=True)


class TestPattern:

    def test_edges_are_normalized(self):
        pattern = Pattern(3, ((1, 0), (2, 1), (0, 1)))
        assert pattern.edges == ((0, 1), (1, 2))

    def test_directed_edges_keep_direction(self):
        pattern = Pattern(2, ((1, 0),), directed=True)
        assert pattern.edges == ((1, 0),)
        assert pattern.has_edge(1, 0)
        assert not pattern.has_edge(0, 1)

    def test_loop(self):
        with pytest.raises(ValueError):
            Pattern(2, ((0, 0),))

    def test_maximal_clique_must_be_complete(self):
        with pytest.raises(ValueError):
            Pattern(3, ((0, 1), (1, 2)), count_mode=CountMode.MaximalClique)

    def test_twin_classes(self):
        assert TRIANGLE.twin_classes == ((0, 1, 2),)
        assert get_pattern("star-3").twin_classes == ((0,), (1, 2, 3))
        assert PATH3.twin_classes == ((0, 2), (1,))

    def test_label(self):
        assert PATH3.label == "h3:0-1,1-2"
        assert FEEDFORWARD.label == "h3:0->1,0->2,1->2"
        assert get_pattern("triangle").label == "triangle"


class TestAutomorphismOrbits:

    def test_triangle(self):
        orbits = automorphism_orbits(TRIANGLE)
        assert orbits.orbit_of == (0, 0, 0)
        assert orbits.multiplicities == (3,)

    def test_path(self):
        orbits = automorphism_orbits(PATH3)
        assert orbits.orbit_of == (0, 1, 0)
        assert orbits.multiplicities == (2, 1)
        assert orbits.members(0) == (0, 2)

    def test_two_orbits_of_two(self):
        orbits = automorphism_orbits(DIAMOND)
        assert orbits.orbit_of == (0, 0, 1, 1)
        assert orbits.multiplicities == (2, 2)

    def test_paw(self):
        orbits = automorphism_orbits(get_pattern("g4-paw"))
        assert orbits.orbit_of == (0, 1, 1, 2)
        assert orbits.multiplicities == (1, 2, 1)

    def test_feedforward_has_no_symmetry(self):
        orbits = automorphism_orbits(FEEDFORWARD)
        assert orbits.multiplicities == (1, 1, 1)

    def test_directed_cycle_is_transitive(self):
        cycle = Pattern(3, ((0, 1), (1, 2), (2, 0)), directed=True)
        assert automorphism_orbits(cycle).multiplicities == (3,)

    def test_cap(self):
        path9 = Pattern(9, tuple((i, i + 1) for i in range(8)))
        with pytest.raises(PatternTooLargeError):
            automorphism_orbits(path9)
        assert automorphism_orbits(path9, cap=9).multiplicities == (2, 2, 2, 2, 1)

    @pytest.mark.parametrize(
        "name", ["g4-paw", "g4-diamond", "g5-03", "g5-07", "d3-120C", "d3-111U"]
    )
    def test_invariant_under_relabeling(self, name):
        pattern = get_pattern(name)
        expected = automorphism_orbits(pattern)
        rng = random.Random(5)
        for _ in range(5):
            permutation = list(range(pattern.order))
            rng.shuffle(permutation)
            relabeled = automorphism_orbits(pattern.relabeled(permutation))
            assert sorted(relabeled.multiplicities) == sorted(expected.multiplicities)
            # vertex v of the original is vertex permutation[v] of the copy
            for v in range(pattern.order):
                for w in range(pattern.order):
                    same = expected.orbit_of[v] == expected.orbit_of[w]
                    assert same == (
                        relabeled.orbit_of[permutation[v]]
                        == relabeled.orbit_of[permutation[w]]
                    )


class TestObservableOrbits:

    def test_triangle(self):
        orbits = automorphism_orbits(TRIANGLE)
        assert observable_orbits(orbits, TRIANGLE, NeighborhoodMode.UndirectedFull) == (0,)

    def test_path_center(self):
        orbits = automorphism_orbits(PATH3)
        assert observable_orbits(orbits, PATH3, NeighborhoodMode.UndirectedFull) == (1,)

    def test_cycle_has_none(self):
        orbits = automorphism_orbits(CYCLE4)
        assert observable_orbits(orbits, CYCLE4, NeighborhoodMode.UndirectedFull) == ()

    def test_directed_modes(self):
        orbits = automorphism_orbits(FEEDFORWARD)
        observable = {
            mode: observable_orbits(orbits, FEEDFORWARD, mode)
            for mode in (
                NeighborhoodMode.DirectedUnion,
                NeighborhoodMode.DirectedOut,
                NeighborhoodMode.DirectedIn,
            )
        }
        assert observable[NeighborhoodMode.DirectedUnion] == (0, 1, 2)
        assert observable[NeighborhoodMode.DirectedOut] == (orbits.orbit_of[0],)
        assert observable[NeighborhoodMode.DirectedIn] == (orbits.orbit_of[2],)

    def test_directedness_must_match(self):
        orbits = automorphism_orbits(FEEDFORWARD)
        with pytest.raises(ModeMismatchError):
            observable_orbits(orbits, FEEDFORWARD, NeighborhoodMode.UndirectedFull)

    @pytest.mark.parametrize("name", ["g4-star", "g4-paw", "g4-diamond", "g5-01", "g5-11"])
    def test_spanning_vertex_gives_semi_diameter_two(self, name):
        pattern = get_pattern(name)
        spec = PatternSpec.build(pattern)
        for orbit in spec.orbits.observable:
            for v in spec.orbits.members(orbit):
                assert pattern.out_sets[v] == frozenset(range(pattern.order)) - {v}


class TestPatternSpec:

    def test_unannotated(self):
        spec = PatternSpec.build(TRIANGLE)
        assert spec.mode is NeighborhoodMode.UndirectedFull
        assert spec.composition.rows == ((3,),)
        assert not spec.composition.annotated
        assert spec.multiplicity_sum == 3

    def test_directed_default_mode(self):
        assert PatternSpec.build(FEEDFORWARD).mode is NeighborhoodMode.DirectedUnion

    def test_diamond_with_states(self):
        spec = PatternSpec.build(DIAMOND, composition=[[1, 1, 0], [0, 0, 2]])
        assert spec.composition.state_count == 3
        assert spec.multiplicity_sum == 2

    def test_row_sum_mismatch(self):
        with pytest.raises(CompositionRowSumMismatch):
            PatternSpec.build(DIAMOND, composition=[[3, 0, 0], [1, 0, 0]])

    def test_wrong_row_count(self):
        with pytest.raises(DimensionMismatch):
            PatternSpec.build(TRIANGLE, composition=[[2, 1], [0, 0]])

    def test_ragged_matrix(self):
        with pytest.raises(DimensionMismatch):
            CompositionMatrix(((1, 2), (1,)))

    def test_not_measurable(self):
        with pytest.raises(EmptyObservableSet):
            PatternSpec.build(CYCLE4)

    def test_identity_separates_compositions(self):
        a = PatternSpec.build(TRIANGLE, composition=[[2, 1]])
        b = PatternSpec.build(TRIANGLE, composition=[[1, 2]])
        assert a.identity != b.identity


class TestValidatePattern:

    def test_fills_observable_roles(self):
        orbits = automorphism_orbits(PATH3)
        assert orbits.observable is None
        u = CompositionMatrix.unannotated(orbits)
        validated = validate_pattern(PATH3, orbits, u, NeighborhoodMode.UndirectedFull)
        assert validated.observable == (1,)
        assert validated.multiplicities == orbits.multiplicities

    def test_nothing_observable(self):
        orbits = automorphism_orbits(CYCLE4)
        u = CompositionMatrix(((3,),))
        with pytest.raises(EmptyObservableSet):
            validate_pattern(CYCLE4, orbits, u, NeighborhoodMode.UndirectedFull)

    def test_composition_shape(self):
        orbits = automorphism_orbits(TRIANGLE)
        full = NeighborhoodMode.UndirectedFull
        with pytest.raises(DimensionMismatch):
            validate_pattern(TRIANGLE, orbits, CompositionMatrix(((3,), (0,))), full)
        with pytest.raises(CompositionRowSumMismatch):
            validate_pattern(TRIANGLE, orbits, CompositionMatrix(((1, 1),)), full)


class TestEnumerateCompositions:

    def test_single_orbit(self):
        rows = [u.rows for u in enumerate_compositions((3,), 2)]
        assert rows == [((0, 3),), ((1, 2),), ((2, 1),), ((3, 0),)]

    def test_row_sums(self):
        compositions = enumerate_compositions((2, 1), 2)
        assert len(compositions) == 6
        assert all(u.row_sums == (2, 1) for u in compositions)
        assert len({u.rows for u in compositions}) == 6

    def test_three_states(self):
        assert len(enumerate_compositions((2,), 3)) == 6


class TestReadPattern:

    def test_file(self):
        spec = read_pattern(fixtures_folder / "triangle.json")
        assert spec.pattern.label == "triangle"
        assert spec.orbits.multiplicities == (3,)

    def test_catalog(self):
        spec = read_pattern("catalog:path3")
        assert spec.orbits.observable == (1,)

    def test_mode_override(self):
        spec = read_pattern(fixtures_folder / "feedforward.json", mode="out")
        assert spec.mode is NeighborhoodMode.DirectedOut
        assert spec.orbits.observable == (0,)

    def test_not_measurable(self):
        with pytest.raises(EmptyObservableSet):
            read_pattern(fixtures_folder / "cycle4.json")

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"edges": [[0, 1]], "colour": "red"}))
        with pytest.raises(ValidationError):
            read_pattern(path)

    def test_catalog_with_own_edges(self, tmp_path):
        path = tmp_path / "mixed.json"
        for extra in (
            {"edges": [[0, 1], [1, 2]]},
            {"order": 4},
            {"count_mode": "non_induced"},
            {"directed": True},
        ):
            path.write_text(json.dumps({"catalog": "triangle", **extra}))
            with pytest.raises(ValidationError):
                read_pattern(path)

    def test_catalog_in_file(self, tmp_path):
        path = tmp_path / "catalog.json"
        path.write_text(json.dumps({"catalog": "path3", "mode": "undirected_full"}))
        assert read_pattern(path).orbits.observable == (1,)

    def test_composition_in_file(self, tmp_path):
        path = tmp_path / "edge.json"
        path.write_text(json.dumps({"edges": [[0, 1]], "composition": [[1, 1]]}))
        spec = read_pattern(path)
        assert spec.composition.rows == ((1, 1),)
        assert spec.composition.annotated
