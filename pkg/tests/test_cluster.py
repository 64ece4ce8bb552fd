import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from heterosum.cluster import ClusterSet, halving_schedule, multistage_cluster, ward_agglomerate


class IdentityEmbedder:
    def embed(self, v):
        return np.asarray(v, dtype=np.float64)


def as_sets(clusters):
    return {frozenset(c) for c in clusters}


class TestWardAgglomerate:
    def test_identical_vectors_single_cluster(self):
        vecs = np.ones((5, 3))
        cs = ward_agglomerate(vecs, threshold=0.01)
        assert as_sets(cs.clusters) == {frozenset(range(5))}

    def test_two_points_merge_iff_within_threshold(self):
        for dist, expected in [(1.99, 1), (2.0, 1), (2.01, 2)]:
            cs = ward_agglomerate(np.array([[0.0], [dist]]), threshold=2.0)
            assert len(cs.clusters) == expected, dist

    def test_collinear_hand_case(self):
        # merge costs: (0,1) -> 0.5, ((0,1),10) -> (2/3) * 9.5^2 = 60.2 > 2
        cs = ward_agglomerate(np.array([[0.0], [1.0], [10.0]]), threshold=2.0)
        assert as_sets(cs.clusters) == {frozenset({0, 1}), frozenset({2})}

    def test_single_vector(self):
        cs = ward_agglomerate(np.array([[3.0]]), threshold=1.0)
        assert cs.clusters == [[0]]

    def test_bad_threshold(self):
        with pytest.raises(ValueError):
            ward_agglomerate(np.zeros((2, 2)), threshold=0.0)

    def test_monotone_in_threshold(self):
        rng = np.random.default_rng(3)
        vecs = rng.random((12, 4)) * 3
        counts = [
            len(ward_agglomerate(vecs, threshold=t).clusters)
            for t in (0.2, 0.5, 1.0, 2.0, 4.0)
        ]
        assert counts == sorted(counts, reverse=True)

    def test_permutation_invariance_up_to_relabel(self):
        rng = np.random.default_rng(9)
        vecs = rng.random((9, 2)) * 4
        base = ward_agglomerate(vecs, threshold=1.2)
        perm = rng.permutation(9)
        permuted = ward_agglomerate(vecs[perm], threshold=1.2)
        remapped = {frozenset(int(perm[i]) for i in c) for c in permuted.clusters}
        assert as_sets(base.clusters) == remapped

    @settings(max_examples=40, deadline=None)
    @given(
        arrays(np.float64, (7, 2), elements=st.floats(-5, 5, allow_nan=False)),
        st.floats(0.1, 5.0),
    )
    def test_always_a_partition(self, vecs, threshold):
        cs = ward_agglomerate(vecs, threshold)
        flat = sorted(i for c in cs.clusters for i in c)
        assert flat == list(range(7))


class TestHalvingSchedule:
    def test_paper_schedule(self):
        assert halving_schedule(2.0, 0.5) == [2.0, 1.0, 0.5]

    def test_floor_equals_initial(self):
        assert halving_schedule(1.0, 1.0) == [1.0]

    def test_bad_bounds(self):
        with pytest.raises(ValueError):
            halving_schedule(0.5, 2.0)


class TestMultistage:
    def test_all_distant_all_singletons(self):
        vecs = np.array([[0.0], [10.0], [20.0], [30.0]])
        cs = multistage_cluster(vecs, IdentityEmbedder(), tau_initial=2.0, floor=0.5)
        assert as_sets(cs.clusters) == {frozenset({i}) for i in range(4)}
        assert cs.threshold_used == [2.0] * 4

    def test_blob_refined_matches_direct_rerun(self):
        # 6-member blob of two tight triples plus two faraway singletons
        blob = [0.0, 0.1, 0.2, 1.0, 1.1, 1.2]
        vecs = np.array([[v] for v in blob + [50.0, 80.0]])
        cs = multistage_cluster(vecs, IdentityEmbedder(), tau_initial=2.0, floor=0.5)
        direct = ward_agglomerate(vecs[:6], threshold=1.0)
        expected_sub = as_sets(direct.clusters)
        got_sub = {frozenset(c) for c in cs.clusters if max(c) < 6}
        # the blob split exactly as a direct ward pass at half the threshold
        for sub in expected_sub:
            assert any(sub == g or sub >= g for g in got_sub)
        assert frozenset({6}) in as_sets(cs.clusters)
        assert frozenset({7}) in as_sets(cs.clusters)

    def test_thresholds_visited_paper_values(self):
        # refinement halves 2.0 down to exactly the 0.5 floor, never below
        assert halving_schedule(2.0, 0.5) == [2.0, 1.0, 0.5]
        blob = [0.0, 0.1, 0.2, 1.0, 1.1, 1.2]
        vecs = np.array([[v] for v in blob + [50.0, 80.0]])
        cs = multistage_cluster(vecs, IdentityEmbedder(), tau_initial=2.0, floor=0.5)
        assert set(cs.threshold_used) <= set(halving_schedule(2.0, 0.5))
        # the oversized triples were pushed all the way to the floor
        assert cs.threshold_used == [0.5, 0.5, 2.0, 2.0]

    def test_partition_preserved(self):
        rng = np.random.default_rng(21)
        vecs = rng.random((15, 3)) * 2
        cs = multistage_cluster(vecs, IdentityEmbedder(), tau_initial=2.0, floor=0.5)
        flat = sorted(i for c in cs.clusters for i in c)
        assert flat == list(range(15))

    def test_matches_independent_simulation(self):
        # same procedure rebuilt from the public single-stage op
        rng = np.random.default_rng(33)
        vecs = rng.random((14, 2)) * 3
        m = len(vecs)
        partition = [(c, 2.0) for c in ward_agglomerate(vecs, 2.0).clusters]
        idx = 0
        while idx < len(partition):
            members, t = partition[idx]
            half = t / 2.0
            if len(members) > m / len(partition) and half >= 0.5:
                sub = ward_agglomerate(vecs[members], half)
                partition[idx : idx + 1] = [
                    ([members[i] for i in c], half) for c in sub.clusters
                ]
            else:
                idx += 1
        expected = [c for c, _ in partition]
        got = multistage_cluster(vecs, IdentityEmbedder(), tau_initial=2.0, floor=0.5)
        assert got.clusters == expected

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            multistage_cluster([], IdentityEmbedder())


def test_clusterset_validation():
    with pytest.raises(ValueError):
        ClusterSet([[0], []], [1.0, 1.0])
    with pytest.raises(ValueError):
        ClusterSet([[0, 1], [1]], [1.0, 1.0])
