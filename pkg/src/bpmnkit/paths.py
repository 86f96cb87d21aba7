"""Enumeration of start-to-end execution paths of an acyclic process."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .blocks import find_matching_join
from .errors import CyclicModelError, InclusiveGatewayError, UnstructuredModelError
from .model import GatewayKind, NodeKind, ProcessModel


@dataclass(frozen=True)
class ExecutionPath:
    """One possible run: visited node ids plus the branch taken per exclusive split.

    Parallel branches contribute all their nodes in document order of the
    branches, so consecutive entries of ``nodes`` need not share a sequence
    flow inside parallel sections.
    """

    nodes: tuple[str, ...]
    branch_choices: tuple[tuple[str, str], ...] = ()  # (gateway id, flow id), sorted

    @property
    def choices(self) -> dict[str, str]:
        return dict(self.branch_choices)


def enumerate_paths(model: ProcessModel) -> tuple[ExecutionPath, ...]:
    """All start-to-end paths, in depth-first document order.

    Raises CyclicModelError on cycles and InclusiveGatewayError on inclusive
    splits, which have no single-path semantics here.
    """
    if model.has_cycle():
        raise CyclicModelError(f"process {model.id!r} contains a cycle")
    for node in model.nodes:
        if node.gateway is GatewayKind.INCLUSIVE and model.is_split(node):
            raise InclusiveGatewayError(
                f"inclusive split {node.id!r} cannot be path-enumerated")

    paths: list[ExecutionPath] = []
    for start in model.start_events():
        for nodes, choices in _walk(model, start.id, None):
            paths.append(ExecutionPath(tuple(nodes), tuple(sorted(choices.items()))))
    return tuple(paths)


def _walk(model: ProcessModel, nid: str,
          stop: str | None) -> list[tuple[list[str], dict[str, str]]]:
    if nid == stop:
        return [([], {})]
    node = model.node_by_id.get(nid)
    if node is None:
        raise UnstructuredModelError(f"flow runs into missing node {nid!r}")
    if node.kind is NodeKind.END_EVENT:
        if stop is not None:
            raise UnstructuredModelError(
                f"end event {nid!r} terminates a parallel branch before its join")
        return [([nid], {})]
    outgoing = model.outgoing[nid]
    if not outgoing:
        raise UnstructuredModelError(f"node {nid!r} is a dead end")

    if node.is_gateway and len(outgoing) > 1:
        if node.gateway is GatewayKind.EXCLUSIVE:
            results = []
            for flow in outgoing:
                for nodes, choices in _walk(model, flow.target, stop):
                    results.append(([nid, *nodes], {node.id: flow.id, **choices}))
            return results
        # parallel split: every branch contributes, document order
        join = find_matching_join(model, node)
        segments = [_walk(model, flow.target, join) for flow in outgoing]
        results = []
        for combo in product(*segments):
            nodes: list[str] = [nid]
            choices: dict[str, str] = {}
            for seg_nodes, seg_choices in combo:
                nodes.extend(seg_nodes)
                choices.update(seg_choices)
            for tail_nodes, tail_choices in _walk(model, join, stop):
                results.append((nodes + tail_nodes, {**choices, **tail_choices}))
        return results

    return [([nid, *nodes], choices)
            for nodes, choices in _walk(model, outgoing[0].target, stop)]
