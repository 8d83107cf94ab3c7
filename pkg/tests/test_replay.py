import pytest
from pydantic import ValidationError

from egocount.catalog import get_pattern
from egocount.errors import SampleSizeError, UnlabeledSample, UnsupportedDesign
from egocount.estimation import Estimator, estimate_from_egonets, estimate_from_graph
from egocount.graph import Graph, NeighborhoodMode
from egocount.pattern import PatternSpec
from egocount.replay import (
    EgonetRecord,
    ReplayFile,
    ReplayHeader,
    read_replay,
    replay_from_sample,
    write_replay,
)
from egocount.sampling import RandomWalkDesign, UISDesign, WISDesign

TIMING_FIELDS = {"elapsed_seconds", "created_at"}


def triangle_spec() -> PatternSpec:
    return PatternSpec.build(get_pattern("triangle"))


class TestEgonetRecord:

    def test_to_egonet(self):
        record = EgonetRecord(
            ego=7, alters=[3, 9], edges=[(1, 0), (0, 2), (2, 1)], states=[1, 2, 1]
        )
        e = record.to_egonet(NeighborhoodMode.UndirectedFull)
        assert e.ego == 7
        assert e.labels == (7, 3, 9)
        assert e.edges == ((0, 1), (0, 2), (1, 2))
        assert e.labeled

    def test_anonymized(self):
        record = EgonetRecord(ego=7, edges=[(0, 1)], states=[1, 1])
        e = record.to_egonet(NeighborhoodMode.UndirectedFull)
        assert not e.labeled
        assert e.members == (0, 1)

    def test_alters_and_states_disagree(self):
        with pytest.raises(ValidationError):
            EgonetRecord(ego=1, alters=[2, 3], edges=[], states=[1, 1])

    def test_edge_outside_egonet(self):
        with pytest.raises(ValidationError):
            EgonetRecord(ego=1, edges=[(0, 2)], states=[1, 1])

    def test_state_below_one(self):
        with pytest.raises(ValidationError):
            EgonetRecord(ego=1, edges=[], states=[0])


class TestReplayFile:

    def test_duplicate_egos(self):
        header = ReplayHeader(design=UISDesign(), mode=NeighborhoodMode.UndirectedFull, n_prime=2)
        record = EgonetRecord(ego=1, edges=[], states=[1])
        with pytest.raises(ValidationError):
            ReplayFile(header=header, records=[record, record])

    def test_population_size_needed(self):
        header = ReplayHeader(design=UISDesign(), mode=NeighborhoodMode.UndirectedFull, n_prime=1)
        replay = ReplayFile(header=header, records=[EgonetRecord(ego=1, edges=[], states=[1])])
        with pytest.raises(SampleSizeError):
            replay.to_sample()
        sample = replay.to_sample(population_size=10)
        assert sample.inclusion == [pytest.approx(0.1)]

    def test_non_uniform_needs_inclusion_data(self):
        header = ReplayHeader(
            design=RandomWalkDesign(), mode=NeighborhoodMode.UndirectedFull, n_prime=1
        )
        replay = ReplayFile(header=header, records=[EgonetRecord(ego=1, edges=[], states=[1])])
        with pytest.raises(UnsupportedDesign):
            replay.to_sample(population_size=10)

    def test_stored_inclusion_wins(self):
        # a hub's per-draw probability is clamped to 1 under random walk sampling
        header = ReplayHeader(
            design=RandomWalkDesign(), mode=NeighborhoodMode.UndirectedFull, n_prime=4
        )
        record = EgonetRecord(ego=1, edges=[], states=[1], inclusion=0.9, per_draw=1.0)
        sample = ReplayFile(header=header, records=[record]).to_sample(population_size=10)
        assert sample.inclusion == [0.9]

    def test_inclusion_from_per_draw(self):
        header = ReplayHeader(
            design=WISDesign(), mode=NeighborhoodMode.UndirectedFull, n_prime=2
        )
        record = EgonetRecord(ego=1, edges=[], states=[1], per_draw=0.1)
        sample = ReplayFile(header=header, records=[record]).to_sample(population_size=10)
        assert sample.inclusion == [pytest.approx(0.19)]


class TestReplayRoundTrip:

    def test_estimate_without_the_graph(self, tmp_path, small_graph: Graph):
        spec = triangle_spec()
        report, egonets, sample = estimate_from_graph(small_graph, spec, UISDesign(), 6, seed=2)
        path = tmp_path / "replay.json.gz"
        write_replay(replay_from_sample(sample, egonets), path)

        replay = read_replay(path)
        assert replay.labeled
        assert replay.header.population_size == small_graph.vertex_count
        replayed = estimate_from_egonets(replay.egonets(), replay.to_sample(), spec)
        assert replayed.model_dump(exclude=TIMING_FIELDS) == report.model_dump(
            exclude=TIMING_FIELDS
        )

    def test_random_walk_keeps_inclusion(self, tmp_path, small_graph: Graph):
        spec = triangle_spec()
        report, egonets, sample = estimate_from_graph(
            small_graph, spec, RandomWalkDesign(), 10, seed=4
        )
        path = tmp_path / "replay.json"
        write_replay(replay_from_sample(sample, egonets, anonymize=True), path)

        replay = read_replay(path)
        assert not replay.labeled
        replayed = estimate_from_egonets(replay.egonets(), replay.to_sample(), spec)
        assert replayed.estimate == pytest.approx(report.estimate)
        assert replayed.variance_estimate == pytest.approx(report.variance_estimate)

    def test_unique_counting_needs_labels(self, tmp_path, k4: Graph):
        spec = triangle_spec()
        _, egonets, sample = estimate_from_graph(k4, spec, UISDesign(), 2, seed=0)
        replay = replay_from_sample(sample, egonets, anonymize=True)
        with pytest.raises(UnlabeledSample):
            estimate_from_egonets(
                replay.egonets(), replay.to_sample(), spec, Estimator.UniqueCounting
            )
