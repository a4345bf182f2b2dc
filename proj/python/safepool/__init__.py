"""Python access to the mempool admission-policy simulator."""

import json

from ._core import (
    Mempool,
    PoolError,
    ReplayAbort,
    Transaction,
    TraceParseError,
    World,
    admit,
    build_block,
    eviction_bound_baseline_under_xt6,
    eviction_bound_cp,
    gen_cp_lock,
    gen_random_adversary,
    gen_xt6,
    prefill_then,
    workload_batch_insert,
    workload_tn1,
)
from . import _core


def replay(trace, **kwargs):
    """Replay JSON-lines trace text and return the report as a dict."""
    return json.loads(_core.replay(trace, **kwargs))


def gamma(snapshots, per_sender=False):
    return json.loads(_core.gamma(snapshots, per_sender))


def bench(trace, **kwargs):
    """Bench rows as a list of dicts keyed by the CSV header."""
    lines = _core.bench(trace, **kwargs).strip().splitlines()
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


def parse_trace(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]
