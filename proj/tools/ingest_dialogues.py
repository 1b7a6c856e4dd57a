#!/usr/bin/env python3
"""Builds a copy-spelling dataset from DailyDialog / Alpaca-style sources.

DailyDialog: dialogues_text.txt (utterances separated by "__eou__"), with an
optional dialogues_topic.txt; topic 7 (health) feeds the healthcare
categories, every other topic the daily ones. Each dialogue yields a
single-turn item (its opening utterance) and, when long enough, a multi-turn
item whose target is a later turn with the preceding turns as context.

Alpaca-style: a JSON list of {"instruction", "input", "output"} records; the
instruction becomes a single-turn target in --alpaca-category.

Targets must survive normalization (no digits or other unmappable
characters) and fall within the word-count window. Selection per category is
a seeded shuffle truncated to --per-category.
"""

import argparse
import json
import random
import sys
from collections import defaultdict

import mindchat

HEALTH_TOPIC = 7
SPEAKERS = ("A", "B")


def clean(text):
    try:
        return mindchat.normalize_utterance(text.strip())
    except mindchat.Error:
        return None


def usable(text, min_words, max_words):
    return text is not None and min_words <= len(text.split()) <= max_words


def read_dailydialog(text_path, topic_path):
    with open(text_path, encoding="utf-8") as f:
        dialogues = [[u.strip() for u in line.split("__eou__") if u.strip()] for line in f]
    topics = [None] * len(dialogues)
    if topic_path:
        with open(topic_path, encoding="utf-8") as f:
            topics = [int(t) for t in f.read().split()]
        if len(topics) != len(dialogues):
            sys.exit(f"{topic_path}: {len(topics)} topics for {len(dialogues)} dialogues")
    return list(zip(dialogues, topics))


def dailydialog_items(dialogues, min_words, max_words, max_context):
    out = defaultdict(list)
    for n, (turns, topic) in enumerate(dialogues):
        domain = "healthcare" if topic == HEALTH_TOPIC else "daily"
        opening = clean(turns[0]) if turns else None
        if usable(opening, min_words, max_words):
            out[f"ST-{domain}"].append({
                "id": f"dd-{n}-st",
                "category": f"ST-{domain}",
                "turns": [{"speaker": "A", "utterance": opening}],
                "target_index": 0,
            })
        for t in range(2, min(len(turns), max_context + 1)):
            target = clean(turns[t])
            if not usable(target, min_words, max_words):
                continue
            context = [" ".join(u.split()) for u in turns[:t]]
            out[f"MT-{domain}"].append({
                "id": f"dd-{n}-mt",
                "category": f"MT-{domain}",
                "turns": [{"speaker": SPEAKERS[i % 2], "utterance": u}
                          for i, u in enumerate(context + [target])],
                "target_index": t,
            })
            break
    return out


def alpaca_items(path, category, min_words, max_words):
    with open(path, encoding="utf-8") as f:
        records = json.load(f)
    out = []
    for n, rec in enumerate(records):
        if rec.get("input"):
            continue  # the instruction alone would not be self-contained
        target = clean(rec.get("instruction", ""))
        if usable(target, min_words, max_words):
            out.append({
                "id": f"alpaca-{n}",
                "category": category,
                "turns": [{"speaker": "A", "utterance": target}],
                "target_index": 0,
            })
    return out


def select(pool, per_category, seed):
    rng = random.Random(seed)
    chosen = []
    for category in mindchat.CATEGORIES:
        items = sorted(pool.get(category, []), key=lambda it: it["id"])
        rng.shuffle(items)
        chosen.extend(items[:per_category])
    return chosen


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dailydialog", help="dialogues_text.txt")
    ap.add_argument("--topics", help="dialogues_topic.txt aligned with --dailydialog")
    ap.add_argument("--alpaca", action="append", default=[], help="Alpaca-style JSON list")
    ap.add_argument("--alpaca-category", action="append", default=[],
                    choices=mindchat.CATEGORIES, help="category for each --alpaca file")
    ap.add_argument("--per-category", type=int, default=50)
    ap.add_argument("--min-words", type=int, default=3)
    ap.add_argument("--max-words", type=int, default=12)
    ap.add_argument("--max-context", type=int, default=6, help="latest turn index used as an MT target")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", required=True, help="output JSONL")
    args = ap.parse_args(argv)

    if len(args.alpaca) != len(args.alpaca_category):
        ap.error("give one --alpaca-category per --alpaca file")
    if not args.dailydialog and not args.alpaca:
        ap.error("no sources given")

    pool = defaultdict(list)
    if args.dailydialog:
        dialogues = read_dailydialog(args.dailydialog, args.topics)
        for cat, items in dailydialog_items(dialogues, args.min_words, args.max_words,
                                            args.max_context).items():
            pool[cat].extend(items)
    for path, cat in zip(args.alpaca, args.alpaca_category):
        pool[cat].extend(alpaca_items(path, cat, args.min_words, args.max_words))

    chosen = select(pool, args.per_category, args.seed)
    # Round-trip through the loader so the file is exactly what the tools accept.
    items, rejected = mindchat.parse_dataset(mindchat.dumps_dataset(chosen), args.out)
    for r in rejected:
        print(f"rejected {r['id']}: {r['message']}", file=sys.stderr)
    mindchat.save_dataset(args.out, items)

    stats = mindchat.dataset_stats(items) if items else {}
    short = False
    for cat in mindchat.CATEGORIES:
        n = stats.get(cat, {}).get("utterances", 0)
        short |= n < args.per_category
        print(f"{cat}: {n}", file=sys.stderr)
    if short:
        print(f"warning: some categories have fewer than {args.per_category} items", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
