#!/usr/bin/env python3
"""Brute-force reference scorer used to freeze test fixtures.

Straight-line re-implementation of every formula, sharing no code with the
C++ library. Run it to regenerate tests/fixtures/golden_expected.json:

    python3 tests/oracle/reference_scorer.py > tests/fixtures/golden_expected.json

With --check PATH it instead compares its output with the committed file.
"""

import argparse
import itertools
import json
import math
import os
import statistics
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "fixtures")

CONFIG = {
    "alpha": 0.4,
    "beta": 0.3,
    "gamma": 0.3,
    "w": 0.7,
    "order_threshold": 0.6,
    "step_penalty_rate": 0.5,
    "boost_factor": 2.0,
    "special_case_boost": 0.1,
}

LEXICON = {
    "left": "LEFT", "turn left": "LEFT", "take a left": "LEFT",
    "right": "RIGHT", "turn right": "RIGHT", "take a right": "RIGHT",
    "forward": "FORWARD", "straight": "FORWARD", "go straight": "FORWARD",
    "walk forward": "FORWARD", "ahead": "FORWARD", "go ahead": "FORWARD",
    "back": "BACKWARD", "backward": "BACKWARD", "go back": "BACKWARD",
    "behind": "BACKWARD",
    "up": "UP", "upstairs": "UP",
    "down": "DOWN", "downstairs": "DOWN",
    "stop": "STOP", "wait": "STOP",
    "turn around": "TURN_AROUND",
}

OPPOSING = {("LEFT", "RIGHT"), ("RIGHT", "LEFT"), ("FORWARD", "BACKWARD"),
            ("BACKWARD", "FORWARD"), ("UP", "DOWN"), ("DOWN", "UP")}

DIM = 512


def tokens_of(text):
    out, cur = [], ""
    for ch in text:
        if ch.isalnum():
            cur += ch.lower()
        else:
            if cur:
                out.append(cur)
            cur = ""
    if cur:
        out.append(cur)
    return out


def actions_of(tokens):
    """Every (direction, trigger index, phrase tokens) by longest match."""
    phrases = {tuple(p.split()): d for p, d in LEXICON.items()}
    longest = max(len(p) for p in phrases)
    out, i = [], 0
    while i < len(tokens):
        hit = None
        for n in range(longest, 0, -1):
            cand = tuple(tokens[i:i + n])
            if len(cand) == n and cand in phrases:
                hit = (phrases[cand], i + n - 1, cand)
                break
        if hit is None:
            i += 1
        else:
            out.append(hit)
            i = hit[1] + 1
    return out


def fnv1a(data):
    h = 2166136261
    for b in data:
        h ^= b
        h = (h * 16777619) % (1 << 32)
    return h


def token_vector(tok):
    padded = "#" + tok + "#"
    v = [0.0] * DIM
    for i in range(len(padded) - 2):
        v[fnv1a(padded[i:i + 3].encode("utf-8")) % DIM] += 1.0
    norm = math.sqrt(sum(x * x for x in v))
    return [x / norm for x in v]


def cosine(a, b):
    if a == b:
        return 1.0
    dot = 0.0
    for x, y in zip(a, b):
        dot += x * y
    return min(1.0, max(0.0, dot))


def greedy(ref_toks, pred_toks, weights=None):
    if not ref_toks and not pred_toks:
        return 1.0, 1.0, 1.0
    if not ref_toks or not pred_toks:
        return 0.0, 0.0, 0.0
    weights = weights or {}
    rv = [token_vector(t) for t in ref_toks]
    pv = [token_vector(t) for t in pred_toks]

    def side(src_toks, src_vecs, dst_vecs):
        total, mass = 0.0, 0.0
        for tok, vec in zip(src_toks, src_vecs):
            best = max(cosine(vec, other) for other in dst_vecs)
            wt = weights.get(tok, 1.0)
            total += wt * best
            mass += wt
        return min(1.0, max(0.0, total / mass))

    recall = side(ref_toks, rv, pv)
    precision = side(pred_toks, pv, rv)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, min(1.0, max(0.0, f1))


def direction_weights(ref_toks, pred_toks, boost):
    weights = {}
    for toks in (ref_toks, pred_toks):
        for _, _, phrase in actions_of(toks):
            for t in phrase:
                weights[t] = boost
    return weights


def lcs_brute(a, b):
    """Longest common subsequence by enumerating subsequences of a."""
    def is_subseq(small, big):
        it = iter(big)
        return all(any(x == y for y in it) for x in small)
    for n in range(len(a), 0, -1):
        for idx in itertools.combinations(range(len(a)), n):
            if is_subseq([a[i] for i in idx], b):
                return n
    return 0


def order_sim(a, b):
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    return lcs_brute(a, b) / max(len(a), len(b))


def conflict(ref_dirs, pred_dirs):
    found = []
    for i in range(min(len(ref_dirs), len(pred_dirs))):
        if (ref_dirs[i], pred_dirs[i]) in OPPOSING:
            found.append((ref_dirs[i], pred_dirs[i]))
    if found:
        return found
    for r in ref_dirs:
        if r in pred_dirs:
            continue
        for p in pred_dirs:
            if p in ref_dirs:
                continue
            if (r, p) in OPPOSING:
                found.append((r, p))
    return found


def flow(ref_dirs, pred_dirs, cfg):
    order = order_sim(ref_dirs, pred_dirs)
    delta = abs(len(ref_dirs) - len(pred_dirs))
    if not ref_dirs and not pred_dirs:
        return order, delta, False, 1.0
    critical = bool(ref_dirs) and bool(pred_dirs) and order < cfg["order_threshold"]
    if critical:
        return order, delta, True, 0.0
    bonus = order * max(0.0, 1.0 - cfg["step_penalty_rate"] * delta / max(len(ref_dirs), 1))
    return order, delta, False, min(1.0, max(0.0, bonus))


def score(ref, pred, cfg=CONFIG):
    rt, pt = tokens_of(ref), tokens_of(pred)
    rd = [a[0] for a in actions_of(rt)]
    pd = [a[0] for a in actions_of(pt)]
    _, _, bert = greedy(rt, pt)
    _, _, weighted = greedy(rt, pt, direction_weights(rt, pt, cfg["boost_factor"]))
    order, delta, critical, bonus = flow(rd, pd, cfg)
    witnesses = conflict(rd, pd)
    boost = cfg["special_case_boost"] if rd and rd == pd and ref != pred else 0.0
    enhanced = (cfg["alpha"] * weighted + cfg["beta"] * bonus + cfg["gamma"] * bert + boost)
    enhanced = min(1.0, max(0.0, enhanced))
    if critical or witnesses:
        enhanced = 0.0
    final = (1 - cfg["w"]) * bert + cfg["w"] * enhanced
    return {
        "bert_f1": bert,
        "similarity": weighted,
        "semantic_similarity": bert,
        "flow_bonus": bonus,
        "order_similarity": order,
        "ref_steps": len(rd),
        "pred_steps": len(pd),
        "step_delta": delta,
        "critical_mismatch": critical,
        "conflict": bool(witnesses),
        "witnesses": [list(w) for w in witnesses],
        "special_boost": boost,
        "enhanced_score": enhanced,
        "final_score": min(1.0, max(0.0, final)),
        "ref_directions": rd,
        "pred_directions": pd,
    }


def stat(values):
    return {"mean": sum(values) / len(values), "median": statistics.median(values),
            "min": min(values), "max": max(values)}


def build():
    with open(os.path.join(FIXTURES, "golden_corpus.json")) as f:
        corpus = json.load(f)
    with open(os.path.join(FIXTURES, "golden_predictions.json")) as f:
        preds = json.load(f)

    records = {}
    for rid in sorted(corpus):
        records[rid] = score(corpus[rid]["answer"], preds[rid])
    ids = sorted(records)
    aggregates = {k: stat([records[i][k] for i in ids])
                  for k in ("bert_f1", "enhanced_score", "final_score")}
    counts = {
        "records": len(ids),
        "conflicts": sum(records[i]["conflict"] for i in ids),
        "critical_mismatches": sum(records[i]["critical_mismatch"] for i in ids),
        "empty_action_pairs": sum(records[i]["ref_steps"] == 0 and records[i]["pred_steps"] == 0
                                  for i in ids),
    }

    p, r, f = greedy(tokens_of("go left"), tokens_of("turn right"))
    rt, pt = tokens_of("turn left here"), tokens_of("turn left")
    _, _, weighted = greedy(rt, pt, direction_weights(rt, pt, 2.0))
    _, _, unweighted = greedy(rt, pt)
    walk = token_vector("walk")
    examples = {
        "go_left_vs_turn_right": {"precision": p, "recall": r, "f1": f},
        "turn_left_here_vs_turn_left_boost2": {"weighted_f1": weighted, "unweighted_f1": unweighted},
        "straight_left_vs_paraphrase": score("go straight for a few steps and turn left",
                                                "walk forward a few steps then turn left"),
        "cosine_walk_walking": cosine(walk, token_vector("walking")),
        "cosine_walk_table": cosine(walk, token_vector("table")),
        "flow_forward_left_forward_vs_forward_left": flow(
            ["FORWARD", "LEFT", "FORWARD"], ["FORWARD", "LEFT"], CONFIG)[3],
        "order_left_forward_vs_forward_left": order_sim(["LEFT", "FORWARD"], ["FORWARD", "LEFT"]),
    }
    return {"config": CONFIG, "records": records, "aggregates": aggregates, "counts": counts,
            "examples": examples}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", help="compare against a committed expected file")
    args = ap.parse_args()
    result = build()
    if args.check:
        with open(args.check) as f:
            committed = json.load(f)
        fresh = json.loads(json.dumps(result))
        if fresh != committed:
            print("oracle output differs from", args.check, file=sys.stderr)
            return 1
        print("oracle output matches", args.check)
        return 0
    json.dump(result, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
