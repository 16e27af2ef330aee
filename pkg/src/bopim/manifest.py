"""Run manifests shared by the optimize, greedy and random commands."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .baselines import BaselineResult
from .optimizer import RunResult
from .temporal_graph import TemporalGraph

SCHEMA_VERSION = 1
# entries allowed to differ between otherwise identical runs
VOLATILE_KEYS = ("timing",)


def load_schema() -> dict:
    text = resources.files("bopim").joinpath("schemas/run_manifest.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _ids(nodes, labels: np.ndarray) -> list[int]:
    return sorted(int(labels[j]) for j in nodes)


def _graph_info(G: TemporalGraph) -> dict:
    return {"n": G.n, "T": G.T, "m": G.m}


def bopim_manifest(result: RunResult, G: TemporalGraph, labels, dataset: str, config: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "method": "bopim",
        "dataset": dataset,
        "graph": _graph_info(G),
        "config": config,
        "best": {
            "seeds": _ids(result.best_seeds, labels),
            "spread_mean": result.best_spread.mean,
            "spread_se": result.best_spread.std_err,
        },
        "eval_count": result.objective_eval_count,
        "history": [
            {"seeds": _ids(r.seeds, labels), "y": r.spread.mean, "se": r.spread.std_err, "phase": r.phase}
            for r in result.history
        ],
        "timing": dict(result.timing),
    }


def baseline_manifest(method: str, result: BaselineResult, G: TemporalGraph, labels, dataset: str, config: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "method": method,
        "dataset": dataset,
        "graph": _graph_info(G),
        "config": config,
        "best": {
            "seeds": _ids(result.seeds, labels),
            "spread_mean": float(result.spread.mean),
            "spread_se": float(result.spread.std_err),
        },
        "eval_count": result.eval_count,
        "history": [
            {"seeds": _ids(s, labels), "y": float(e.mean), "se": float(e.std_err), "phase": method}
            for s, e in result.history
        ],
        "timing": dict(result.timing),
    }


def strip_volatile(manifest: dict) -> dict:
    return {k: v for k, v in manifest.items() if k not in VOLATILE_KEYS}


def write_manifest(manifest: dict[str, Any], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
