"""Processing-time simulation: best/worst/expected analytics and Monte Carlo.

Processing time is total work content: parallel branches contribute the sum
of their task times. ``cycle_time=True`` switches parallel blocks to the
maximum of their branches instead. Waiting time never counts, so events and
gateways contribute zero.

The expected value is computed analytically by recursing over the block
tree with exact rational arithmetic and, independently, every execution
path is listed with its probability. The test suite holds the two routes
against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import blocks as bt
from .blocks import decompose_blocks
from .errors import CyclicModelError, InclusiveGatewayError, UnstructuredModelError
from .model import GatewayKind, ProcessModel
from .paths import ExecutionPath, enumerate_paths
from .scenario import BoundScenario, Duration


@dataclass(frozen=True)
class SimulationReport:
    best: Duration
    worst: Duration
    expected: Duration  # rounded half-up to whole seconds
    expected_exact: Fraction
    per_path: tuple[tuple[ExecutionPath, Fraction, Duration], ...]


@dataclass(frozen=True)
class McReport:
    n: int
    seed: int
    mean: float  # seconds
    stddev: float  # population standard deviation, seconds
    min: Duration
    max: Duration


def path_time(path: ExecutionPath, bound: BoundScenario) -> Duration:
    """Sum of task durations along a path; events and gateways add nothing."""
    return Duration(sum(bound.task_duration[nid].seconds for nid in path.nodes))


def _check_supported(model: ProcessModel) -> None:
    if model.has_cycle():
        raise CyclicModelError(f"process {model.id!r} contains a cycle")
    for node in model.nodes:
        if node.gateway is GatewayKind.INCLUSIVE and model.is_split(node):
            raise InclusiveGatewayError(
                f"inclusive split {node.id!r} is not supported by the simulator")


def _distribution(block: bt.Block, bound: BoundScenario,
                  cycle_time: bool) -> dict[int, Fraction]:
    """Exact probability distribution of a block's processing time in seconds."""
    if isinstance(block, bt.Leaf):
        return {bound.task_duration[block.node].seconds: Fraction(1)}
    if isinstance(block, bt.Sequence):
        dist = {0: Fraction(1)}
        for child in block.children:
            dist = _combine(dist, _distribution(child, bound, cycle_time), add=True)
        return dist
    if isinstance(block, bt.Choice):
        dist: dict[int, Fraction] = {}
        for branch in block.branches:
            p = bound.branch_probability[(block.gateway, branch.flow)]
            if p == 0:
                continue
            for t, q in _distribution(branch.body, bound, cycle_time).items():
                dist[t] = dist.get(t, Fraction(0)) + p * q
        return dist or {0: Fraction(1)}
    if isinstance(block, bt.Parallel):
        dist = {0: Fraction(1)}
        for branch in block.branches:
            dist = _combine(dist, _distribution(branch.body, bound, cycle_time),
                            add=not cycle_time)
        return dist
    if isinstance(block, bt.Loop):
        raise CyclicModelError(f"loop at gateway {block.header!r} cannot be simulated")
    raise TypeError(f"not a block: {block!r}")


def _combine(a: dict[int, Fraction], b: dict[int, Fraction],
             add: bool) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for ta, pa in a.items():
        for tb, pb in b.items():
            t = ta + tb if add else max(ta, tb)
            out[t] = out.get(t, Fraction(0)) + pa * pb
    return out


def _realization_time(model: ProcessModel, bound: BoundScenario,
                      choices: dict[str, str], cycle_time: bool) -> int:
    """Processing time of one run fixed by its exclusive-branch choices."""

    def walk(nid: str, stop: str | None) -> int:
        total = 0
        cur: str | None = nid
        while cur is not None and cur != stop:
            node = model.node_by_id[cur]
            total += bound.task_duration[cur].seconds
            outgoing = model.outgoing[cur]
            if node.is_gateway and len(outgoing) > 1:
                if node.gateway is GatewayKind.EXCLUSIVE:
                    chosen = choices[cur]
                    cur = next(f.target for f in outgoing if f.id == chosen)
                    continue
                join = bt.find_matching_join(model, node)
                branch_times = [walk(f.target, join) for f in outgoing]
                total += max(branch_times) if cycle_time else sum(branch_times)
                cur = join
                continue
            cur = outgoing[0].target if outgoing else None
        return total

    starts = model.start_events()
    return sum(walk(s.id, None) for s in starts)


def simulate(model: ProcessModel, bound: BoundScenario,
             cycle_time: bool = False) -> SimulationReport:
    """Best, worst and probability-weighted expected processing time.

    The expectation comes from the block-tree recursion when the model is
    block-structured, otherwise from the per-path sum. Zero-probability paths
    are excluded from best and worst.
    """
    _check_supported(model)
    paths = enumerate_paths(model)
    per_path = []
    for path in paths:
        p = bound.path_probability(path.branch_choices)
        seconds = (_realization_time(model, bound, path.choices, cycle_time)
                   if cycle_time else path_time(path, bound).seconds)
        per_path.append((path, p, Duration(seconds)))

    try:
        dist = _distribution(decompose_blocks(model), bound, cycle_time)
    except UnstructuredModelError:
        dist = {}
        for _, p, duration in per_path:
            dist[duration.seconds] = dist.get(duration.seconds, Fraction(0)) + p

    expected_exact = sum((Fraction(t) * p for t, p in dist.items()), Fraction(0))
    reachable = [t for t, p in dist.items() if p > 0]
    best, worst = min(reachable), max(reachable)
    return SimulationReport(
        best=Duration(best),
        worst=Duration(worst),
        expected=Duration(int((expected_exact + Fraction(1, 2)).__floor__())),
        expected_exact=expected_exact,
        per_path=tuple(per_path),
    )


def monte_carlo(model: ProcessModel, bound: BoundScenario, n: int, seed: int,
                cycle_time: bool = False) -> McReport:
    """Sample ``n`` independent runs with a counter-based PRNG.

    Replication ``i`` consumes the ``i``-th row of a Philox stream keyed by
    ``seed``, one uniform draw per exclusive split, so every replication's
    randomness is a pure function of (seed, replication index) and results
    are bit-reproducible regardless of execution order.
    """
    if n <= 0:
        raise ValueError("sample count must be positive")
    _check_supported(model)

    splits = [node for node in model.nodes
              if node.gateway is GatewayKind.EXCLUSIVE and model.is_split(node)]
    cutoffs = []
    for node in splits:
        flows = model.outgoing[node.id]
        probs = [float(bound.branch_probability[(node.id, f.id)]) for f in flows]
        cutoffs.append(np.cumsum(probs))

    rng = np.random.Generator(np.random.Philox(key=seed))
    draws = rng.random((n, max(len(splits), 1)))
    if splits:
        choice_idx = np.empty((n, len(splits)), dtype=np.int64)
        for j, cum in enumerate(cutoffs):
            choice_idx[:, j] = np.searchsorted(cum, draws[:, j], side="right")
            # guard the u == 1.0 edge and zero-probability tail branches
            choice_idx[:, j] = np.minimum(choice_idx[:, j], len(cum) - 1)
        combos, counts = np.unique(choice_idx, axis=0, return_counts=True)
    else:
        combos, counts = np.zeros((1, 0), dtype=np.int64), np.array([n])

    times = np.empty(len(combos), dtype=np.float64)
    for k, combo in enumerate(combos):
        choices = {node.id: model.outgoing[node.id][idx].id
                   for node, idx in zip(splits, combo)}
        times[k] = _realization_time(model, bound, choices, cycle_time)

    weights = counts / n
    mean = float(np.dot(weights, times))
    stddev = float(np.sqrt(np.dot(weights, (times - mean) ** 2)))
    return McReport(
        n=n,
        seed=seed,
        mean=mean,
        stddev=stddev,
        min=Duration(int(times.min())),
        max=Duration(int(times.max())),
    )
