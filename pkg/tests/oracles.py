"""Naive reference implementations used to cross-check the real ones.

Everything here recomputes from the raw records or raw token sets with the
simplest possible O(n^2) code and deliberately shares no machinery with the
medtriage package.
"""

import math
from collections import defaultdict


def recount_df_tf(records):
    """Document frequencies and term frequencies straight off the records."""
    df = defaultdict(int)
    tf = {}
    for record in records:
        for cid in record.canonical_symptoms:
            df[cid] += 1
            tf[(record.id, cid)] = 1
    return dict(df), tf


def naive_idf(records, term):
    df = sum(1 for r in records if term in r.canonical_symptoms)
    return math.log(len(records) / df)


def naive_tfidf_vector(records, disease_id):
    record = next(r for r in records if r.id == disease_id)
    vector = {}
    for term in record.canonical_symptoms:
        weight = naive_idf(records, term)
        if weight > 0:
            vector[term] = weight
    return vector


def naive_query_vector(records, query):
    vector = {}
    for term in query:
        df = sum(1 for r in records if term in r.canonical_symptoms)
        if df:
            weight = math.log(len(records) / df)
            if weight > 0:
                vector[term] = weight
    return vector


def naive_cosine(q, d):
    dot = sum(w * d[t] for t, w in q.items() if t in d)
    nq = math.sqrt(sum(w * w for w in q.values()))
    nd = math.sqrt(sum(w * w for w in d.values()))
    if nq == 0.0 or nd == 0.0:
        return 0.0
    return dot / (nq * nd)


def naive_bm25(records, query, disease_id, k1=1.5, b=0.75):
    n = len(records)
    record = next(r for r in records if r.id == disease_id)
    avg = sum(len(r.canonical_symptoms) for r in records) / n
    doc_len = len(record.canonical_symptoms)
    score = 0.0
    for term in set(query):
        if term not in record.canonical_symptoms:
            continue
        df = sum(1 for r in records if term in r.canonical_symptoms)
        idf = math.log(1 + (n - df + 0.5) / (df + 0.5))
        score += idf * (1 * (k1 + 1)) / (1 + k1 * (1 - b + b * doc_len / avg))
    return score


def naive_rank(records, query, model="tfidf", k=10, k1=1.5, b=0.75):
    """Score every disease, sort by (-score, name), take the first min(k, n)."""
    scored = []
    for record in records:
        if model == "tfidf":
            score = naive_cosine(
                naive_query_vector(records, query),
                naive_tfidf_vector(records, record.id),
            )
        else:
            score = naive_bm25(records, query, record.id, k1, b)
        scored.append((score, record.name, record.id))
    scored.sort(key=lambda t: (-t[0], t[1]))
    return scored[: min(k, len(records))]


def naive_cooccurrence(records, confirmed, excluded):
    """Candidate counts: diseases sharing a confirmed symptom, per other symptom."""
    counts = defaultdict(int)
    for record in records:
        if record.canonical_symptoms & set(confirmed):
            for cid in record.canonical_symptoms:
                if cid not in excluded:
                    counts[cid] += 1
    return dict(counts)


def naive_clusters(token_sets, threshold):
    """Connected components of the explicit pairwise-threshold graph (BFS)."""
    n = len(token_sets)
    adjacency = {i: [] for i in range(n)}
    for i in range(n):
        for j in range(i + 1, n):
            a, b = token_sets[i], token_sets[j]
            sim = 1.0 if not a and not b else len(a & b) / len(a | b)
            if sim >= threshold:
                adjacency[i].append(j)
                adjacency[j].append(i)
    seen, components = set(), []
    for start in range(n):
        if start in seen:
            continue
        queue, component = [start], set()
        while queue:
            node = queue.pop()
            if node in seen:
                continue
            seen.add(node)
            component.add(node)
            queue.extend(adjacency[node])
        components.append(frozenset(component))
    return frozenset(components)
