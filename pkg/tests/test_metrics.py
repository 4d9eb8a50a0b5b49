import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minimaxfcm.metrics import ContingencyTable, accuracy, contingency, evaluate, f_measure, nmi


def direct_nmi(counts):
    """Mutual-information ratio over plain nested lists."""
    k, m = len(counts), len(counts[0])
    n = sum(map(sum, counts))
    nc = [sum(counts[c]) for c in range(k)]
    npl = [sum(counts[c][p] for c in range(k)) for p in range(m)]
    num = 0.0
    for c in range(k):
        for p in range(m):
            if counts[c][p]:
                num += counts[c][p] * math.log(n * counts[c][p] / (nc[c] * npl[p]))
    a = sum(x * math.log(x / n) for x in nc if x)
    b = sum(x * math.log(x / n) for x in npl if x)
    if a == 0 or b == 0:
        return 1.0 if a == 0 and b == 0 else 0.0
    return num / math.sqrt(a * b)


def direct_f_measure(counts):
    k, m = len(counts), len(counts[0])
    n = sum(map(sum, counts))
    total = 0.0
    for p in range(m):
        np_ = sum(counts[c][p] for c in range(k))
        best = 0.0
        for c in range(k):
            nc = sum(counts[c])
            if counts[c][p] == 0:
                continue
            prec, rec = counts[c][p] / nc, counts[c][p] / np_
            best = max(best, 2 * prec * rec / (prec + rec))
        total += np_ / n * best
    return total


def brute_force_matched(counts):
    k, m = counts.shape
    size = max(k, m)
    padded = np.zeros((size, size), dtype=int)
    padded[:k, :m] = counts
    return max(sum(padded[i, perm[i]] for i in range(size)) for perm in itertools.permutations(range(size)))


def test_contingency_examples():
    assert contingency([0, 0, 1, 1], [0, 0, 1, 1]).counts.tolist() == [[2, 0], [0, 2]]
    assert contingency([0, 0, 0, 0], [0, 0, 1, 1]).counts.tolist() == [[2, 2]]
    assert contingency([0, 1, 0, 1], [0, 0, 1, 1]).counts.tolist() == [[1, 1], [1, 1]]


def test_contingency_length_mismatch():
    with pytest.raises(ValueError, match="length mismatch"):
        contingency([0, 1], [0])


def test_contingency_marginals(rng):
    t = contingency(rng.integers(0, 4, 50), rng.integers(0, 3, 50))
    assert t.n == 50
    assert t.cluster_sizes.sum() == t.class_sizes.sum() == 50


def test_nmi_examples():
    assert nmi(contingency([0, 0, 1, 1], [1, 1, 0, 0])) == pytest.approx(1.0, abs=1e-12)
    assert nmi(contingency([0, 0, 0, 0], [0, 0, 1, 1])) == 0.0
    assert nmi(ContingencyTable([[3]])) == 1.0
    table = [[2, 0], [1, 1]]
    assert nmi(ContingencyTable(table)) == pytest.approx(direct_nmi(table), abs=1e-12)


def test_f_measure_examples():
    assert f_measure(contingency([0, 0, 1, 1], [1, 1, 0, 0])) == 1.0
    assert f_measure(contingency([0, 0, 0, 0], [0, 0, 1, 1])) == pytest.approx(2 / 3, abs=1e-15)
    assert f_measure(ContingencyTable([[1, 1], [1, 1]])) == pytest.approx(0.5, abs=1e-15)


def test_accuracy_examples():
    acc, match = accuracy(contingency([2, 2, 0, 0, 1], [0, 0, 1, 1, 2]))
    assert acc == 1.0 and match == {2: 0, 0: 1, 1: 2}
    assert accuracy(contingency([0, 0, 0, 1], [0, 0, 1, 1]))[0] == 0.75
    acc, match = accuracy(ContingencyTable([[3, 0], [0, 2], [1, 1]]))
    assert acc == 5 / 7 and match == {0: 0, 1: 1}


def test_against_direct_and_brute_force():
    r = np.random.default_rng(11)
    for _ in range(200):
        k, m = r.integers(1, 7, size=2)
        counts = r.integers(0, 6, size=(k, m))
        if counts.sum() == 0:
            counts[0, 0] = 1
        t = ContingencyTable(counts)
        acc, _ = accuracy(t)
        assert acc == brute_force_matched(counts) / counts.sum()
        assert nmi(t) == pytest.approx(direct_nmi(counts.tolist()), abs=1e-12)
        assert f_measure(t) == pytest.approx(direct_f_measure(counts.tolist()), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=40), st.randoms())
def test_relabeling_invariance(pairs, random):
    labels = np.array([a for a, _ in pairs])
    truth = np.array([b for _, b in pairs])
    base = evaluate(labels, truth)
    pc, pt = list(range(5)), list(range(5))
    random.shuffle(pc)
    random.shuffle(pt)
    other = evaluate(np.array(pc)[labels], np.array(pt)[truth])
    assert other.accuracy == base.accuracy
    assert other.nmi == pytest.approx(base.nmi, abs=1e-12)
    assert other.f_measure == pytest.approx(base.f_measure, abs=1e-12)
    for v in (base.accuracy, base.nmi, base.f_measure):
        assert 0.0 <= v <= 1.0 + 1e-12


def test_nmi_symmetric():
    r = np.random.default_rng(12)
    for _ in range(50):
        counts = r.integers(0, 8, size=tuple(r.integers(1, 6, size=2))) + 1
        assert nmi(ContingencyTable(counts)) == pytest.approx(nmi(ContingencyTable(counts.T)), abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3, 6])
def test_permuted_diagonal_scores_one(k):
    perm = np.random.default_rng(k).permutation(k)
    counts = np.zeros((k, k), dtype=int)
    counts[np.arange(k), perm] = np.arange(1, k + 1)
    t = ContingencyTable(counts)
    assert accuracy(t)[0] == 1.0
    assert nmi(t) == pytest.approx(1.0, abs=1e-12)
    assert f_measure(t) == pytest.approx(1.0, abs=1e-12)
