"""Python access to the mindchat speller core.

Datasets are plain lists of dicts in the JSONL record shape
({"id", "category", "turns": [{"speaker", "utterance"}], "target_index"}).
"""

import json
import os

from . import _mindchat

Error = _mindchat.Error
Error.code = property(lambda self: self.args[0])
Error.__str__ = lambda self: self.args[-1] if self.args else ""

CATEGORIES = ("ST-daily", "ST-healthcare", "MT-daily", "MT-healthcare")

normalize_utterance = _mindchat.normalize_utterance
cca_corr = _mindchat.cca_corr
type_keys = _mindchat.type_keys


def is_supported_char(ch):
    return _mindchat.is_supported_char(ch)


def layout():
    return json.loads(_mindchat.layout_json())


def parse_dataset(text, source="<string>"):
    """Returns (items, rejected); targets are normalized, bad records rejected."""
    parsed = json.loads(_mindchat.parse_dataset(text, source))
    return parsed["items"], parsed["rejected"]


def load_dataset(path):
    with open(path, encoding="utf-8") as f:
        return parse_dataset(f.read(), os.fspath(path))


def dumps_dataset(items):
    return _mindchat.write_dataset(json.dumps(items))


def save_dataset(path, items):
    text = dumps_dataset(items)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


def dataset_stats(items):
    return json.loads(_mindchat.dataset_stats(json.dumps(items)))


def simulate(items, mode="naive", p=1.0, runs=1, seed=1, words_path="",
             oracle_w=1, oracle_s=3, oracle_s_mt=None, shortcut=False):
    """One result dict per item x run (keystrokes, time_s, completed, ...)."""
    return json.loads(_mindchat.simulate(
        json.dumps(items), mode, p, runs, seed, os.fspath(words_path), oracle_w, oracle_s,
        oracle_s if oracle_s_mt is None else oracle_s_mt, shortcut))
