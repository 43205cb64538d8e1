"""Independent brute-force oracles used to freeze expected values.

Everything here is written directly from the defining formulas with
explicit loops and sets, deliberately avoiding the library's vectorized
code paths.
"""

import math
from itertools import combinations

import numpy as np


def ca_oracle(label_rows):
    """Pair-enumeration co-association: fraction of rows co-clustering
    each pair. ``label_rows``: list of per-partition label sequences."""
    m = len(label_rows)
    n = len(label_rows[0])
    a = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            hits = sum(1 for row in label_rows if row[i] == row[j])
            a[i, j] = hits / m
    return a


def global_cluster_sets(label_rows):
    """Member sets of every cluster, globally enumerated partition by
    partition, plus the owning-partition index of each cluster."""
    sets = []
    owners = []
    for m, row in enumerate(label_rows):
        for c in sorted(set(row)):
            sets.append(frozenset(i for i, v in enumerate(row) if v == c))
            owners.append(m)
    return sets, owners


def entropy_oracle(label_rows, c):
    """Ensemble entropy of global cluster c, straight from the sum."""
    sets, _ = global_cluster_sets(label_rows)
    ci = sets[c]
    h = 0.0
    for cj in sets:
        p = len(ci & cj) / len(ci)
        if p > 0.0:
            h -= p * math.log2(p)
    return h


def nee_oracle(label_rows, c):
    """Entropy normalized by log2 of the own-partition cluster count."""
    sets, owners = global_cluster_sets(label_rows)
    own = owners[c]
    k_own = len(set(label_rows[own]))
    if k_own <= 1:
        return 0.0
    return entropy_oracle(label_rows, c) / math.log2(k_own)


def walk_oracle(label_rows, beta, k_steps, symmetric_powers=False):
    """Evaluate the whole cluster-walk chain with naive matrix powers.

    Returns (P, Pt, O, R): Jaccard proximity, transition matrix, the
    accumulated walk matrix, and the masked cosine cluster similarity.
    """
    sets, owners = global_cluster_sets(label_rows)
    nc = len(sets)
    p = np.zeros((nc, nc))
    for i in range(nc):
        for j in range(nc):
            inter = len(sets[i] & sets[j])
            union = len(sets[i] | sets[j])
            p[i, j] = inter / union
    pt = np.zeros_like(p)
    for i in range(nc):
        pt[i, :] = p[i, :] / p[i, :].sum()
    o = np.zeros_like(p)
    for t in range(1, k_steps + 1):
        power = np.linalg.matrix_power(pt, t)
        if symmetric_powers:
            o += beta**t * (power.T @ power)
        else:
            o += beta**t * (power.T @ pt)
    r = np.zeros_like(p)
    for i in range(nc):
        for j in range(nc):
            if owners[i] != owners[j]:
                continue
            ni = np.linalg.norm(o[:, i])
            nj = np.linalg.norm(o[:, j])
            if ni == 0.0 or nj == 0.0:
                continue
            r[i, j] = float(o[:, i] @ o[:, j] / (ni * nj))
    return p, pt, o, r


def dissimilarity_oracle(label_rows, beta, k_steps, tau=0.0):
    """Per-pair evaluation of the dissimilarity construction."""
    m = len(label_rows)
    n = len(label_rows[0])
    a = ca_oracle(label_rows)
    _, _, _, r = walk_oracle(label_rows, beta, k_steps)
    offsets = []
    base = 0
    for row in label_rows:
        offsets.append(base)
        base += len(set(row))
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j or a[i, j] != 0.0:
                continue
            raw = 0.0
            for mm, row in enumerate(label_rows):
                u = offsets[mm] + row[i]
                v = offsets[mm] + row[j]
                raw += 1.0 - r[u, v]
            if raw >= tau:
                d[i, j] = raw / m
    return d


def pair_counts_oracle(pred, truth):
    """Count agreeing/disagreeing sample pairs by direct enumeration."""
    n = len(pred)
    both = pred_only = truth_only = neither = 0
    for i, j in combinations(range(n), 2):
        same_p = pred[i] == pred[j]
        same_t = truth[i] == truth[j]
        if same_p and same_t:
            both += 1
        elif same_p:
            pred_only += 1
        elif same_t:
            truth_only += 1
        else:
            neither += 1
    return both, pred_only, truth_only, neither


def ari_oracle(pred, truth):
    both, pred_only, truth_only, _ = pair_counts_oracle(pred, truth)
    n = len(pred)
    total = n * (n - 1) // 2
    pred_pairs = both + pred_only
    truth_pairs = both + truth_only
    if total == 0:
        return 1.0
    expected = pred_pairs * truth_pairs / total
    maximum = (pred_pairs + truth_pairs) / 2.0
    if maximum == expected:
        return 1.0
    return (both - expected) / (maximum - expected)


def f_oracle(pred, truth):
    both, pred_only, truth_only, _ = pair_counts_oracle(pred, truth)
    pred_pairs = both + pred_only
    truth_pairs = both + truth_only
    precision = both / pred_pairs if pred_pairs else 0.0
    recall = both / truth_pairs if truth_pairs else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def nmi_oracle(pred, truth):
    """Mutual information over dict-of-counts, arithmetic-mean normalized."""
    n = len(pred)
    joint: dict = {}
    pc: dict = {}
    tc: dict = {}
    for a, b in zip(pred, truth):
        joint[(a, b)] = joint.get((a, b), 0) + 1
        pc[a] = pc.get(a, 0) + 1
        tc[b] = tc.get(b, 0) + 1
    h_p = -sum(c / n * math.log(c / n) for c in pc.values())
    h_t = -sum(c / n * math.log(c / n) for c in tc.values())
    if h_p == 0.0 and h_t == 0.0:
        return 1.0
    mi = 0.0
    for (a, b), c in joint.items():
        mi += c / n * math.log((c / n) / ((pc[a] / n) * (tc[b] / n)))
    denom = (h_p + h_t) / 2.0
    if denom == 0.0:
        return 1.0
    return max(0.0, mi / denom)


def average_linkage_oracle(sim, k):
    """Greedy best-merge agglomeration recomputing every inter-cluster
    average from the raw matrix at each step."""
    n = sim.shape[0]
    clusters = [[i] for i in range(n)]
    while len(clusters) > k:
        best = None
        best_val = -np.inf
        for a in range(len(clusters)):
            for b in range(a + 1, len(clusters)):
                vals = [sim[i, j] for i in clusters[a] for j in clusters[b]]
                avg = sum(vals) / len(vals)
                if avg > best_val:
                    best_val = avg
                    best = (a, b)
        a, b = best
        clusters[a] = clusters[a] + clusters[b]
        del clusters[b]
    labels = np.empty(n, dtype=int)
    for c, members in enumerate(clusters):
        for i in members:
            labels[i] = c
    return labels


def random_label_rows(rng, n, m, max_k):
    """Random pools for oracle-equivalence sweeps; every cluster count is
    at least 1 and labels are densified."""
    rows = []
    for _ in range(m):
        k = int(rng.integers(1, max_k + 1))
        row = rng.integers(0, k, size=n)
        # densify to first-appearance order so it is a valid partition
        mapping = {}
        dense = []
        for v in row.tolist():
            mapping.setdefault(v, len(mapping))
            dense.append(mapping[v])
        rows.append(dense)
    return rows
