import itertools

import pytest
from hypothesis import given, strategies as st

from nfat.clustering import KMeansResult
from nfat.errors import WrongClusterCount
from nfat.labeling import cluster_score, label_centroids, label_clusters
from nfat.severity import SEVERITY_ORDER, Severity

D, R, N = Severity.DANGEROUS, Severity.RATHER_DANGEROUS, Severity.NOT_DANGEROUS


def result_with(centroids, assignments=(0,)):
    centroids = tuple(tuple(float(x) for x in c) for c in centroids)
    return KMeansResult(centroids, tuple(assignments), (0.0,) * len(centroids), 0.0, 1, True)


def mapping(labels):
    return {lab.cluster_index: lab.severity for lab in labels}


def test_cluster_score_trivial():
    assert cluster_score((0, 0, 0, 0)) == 0.0
    assert cluster_score((1, 2, 2, 0)) == 9.0


def test_cluster_score_fig11_row1():
    # 1 + 0.6790^2 + 412^2 + 24^2
    assert cluster_score((1, 0.6790, 412, 24)) == pytest.approx(170321.461041, rel=1e-12)


def test_ordering_by_score():
    # squared norms: cluster 0 -> 10, cluster 1 -> 1, cluster 2 -> 100
    labels = label_clusters(result_with([(3, 1, 0, 0), (1, 0, 0, 0), (10, 0, 0, 0)]))
    assert mapping(labels) == {2: D, 0: R, 1: N}
    assert [lab.score for lab in labels] == [100.0, 10.0, 1.0]


def test_nfat_naming_order():
    # nfat1 > nfat2 > nfat3 -> dangerous, rather dangerous, not dangerous
    labels = label_centroids([(0, 0, 400, 24), (1, 50, 80, 24), (1, 0.7, 60, 18)])
    assert mapping(labels) == {0: D, 1: R, 2: N}


def test_ties_follow_cluster_index():
    labels = label_centroids([(1, 1, 1, 1)] * 3)
    assert mapping(labels) == {0: D, 1: R, 2: N}
    labels = label_centroids([(0, 0, 0, 1), (0, 0, 0, 5), (0, 0, 0, 5)])
    assert mapping(labels) == {1: D, 2: R, 0: N}


@pytest.mark.parametrize("k", [1, 2, 4])
def test_wrong_cluster_count(k):
    with pytest.raises(WrongClusterCount):
        label_clusters(result_with([(1, 0, 0, 0)] * k))


finite = st.floats(-1e4, 1e4)
centroid = st.tuples(finite, finite, finite, finite)


@given(st.tuples(centroid, centroid, centroid))
def test_labels_are_permutation_with_sorted_scores(cents):
    labels = label_centroids(cents)
    assert [lab.severity for lab in labels] == list(SEVERITY_ORDER)
    assert sorted(lab.cluster_index for lab in labels) == [0, 1, 2]
    assert labels[0].score >= labels[1].score >= labels[2].score
    assert all(lab.score >= 0 for lab in labels)


@given(st.permutations([(10, 0, 0, 0), (3, 1, 0, 0), (1, 0, 0, 0)]), st.sampled_from([0.5, 3.0, 7.25]))
def test_scale_invariance(cents, lam):
    base = mapping(label_centroids(cents))
    scaled = mapping(label_centroids([tuple(lam * x for x in c) for c in cents]))
    assert base == scaled


def test_depends_only_on_centroids():
    cents = [(5, 0, 0, 0), (1, 0, 0, 0), (2, 0, 0, 0)]
    outs = {tuple(label_clusters(result_with(cents, a))) for a in itertools.product(range(3), repeat=3)}
    assert len(outs) == 1
