"""Structural and lint verification of process models.

Rules are reported as diagnostics, never raised:

=====  ========  ============================================================
code   severity  rule
=====  ========  ============================================================
E01    error     node unreachable from any start event
E02    error     node cannot reach any end event
E03    error     gateway is both a split and a join
E04    error     sequence flow endpoint references a missing node
W01    warning   more than one start event
W02    warning   more than 50 flow nodes
W03    warning   task label does not start with a known verb
W04    warning   exclusive split with unlabeled outgoing flows
=====  ========  ============================================================
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from importlib import resources

from .model import GatewayKind, NodeKind, ProcessModel

MAX_ELEMENTS = 50


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str
    elements: tuple[str, ...] = ()

    def __str__(self) -> str:
        ids = f" [{', '.join(self.elements)}]" if self.elements else ""
        return f"{self.code} {self.severity}: {self.message}{ids}"


def default_verb_lexicon() -> frozenset[str]:
    """Verbs accepted by the label convention check, shipped as package data."""
    text = resources.files("bpmnkit.data").joinpath("verbs.txt").read_text("utf-8")
    verbs = set()
    for line in text.splitlines():
        word = line.split("#", 1)[0].strip().lower()
        if word:
            verbs.add(word)
    return frozenset(verbs)


def _reachable(model: ProcessModel, seeds: list[str], forward: bool) -> set[str]:
    adjacency = model.outgoing if forward else model.incoming
    seen = set(seeds)
    queue = deque(seeds)
    while queue:
        nid = queue.popleft()
        for flow in adjacency.get(nid, ()):
            nxt = flow.target if forward else flow.source
            if nxt in model.node_by_id and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def validate_structure(model: ProcessModel,
                       verb_lexicon: frozenset[str] | None = None) -> list[Diagnostic]:
    """Check every rule and return all violations; an empty list means a clean model."""
    if verb_lexicon is None:
        verb_lexicon = default_verb_lexicon()
    diags: list[Diagnostic] = []

    starts = [n.id for n in model.start_events()]
    ends = [n.id for n in model.end_events()]

    from_start = _reachable(model, starts, forward=True)
    for node in model.nodes:
        if node.id not in from_start:
            diags.append(Diagnostic("error", "E01",
                                    f"node {node.id!r} is unreachable from any start event",
                                    (node.id,)))

    to_end = _reachable(model, ends, forward=False)
    for node in model.nodes:
        if node.id not in to_end:
            diags.append(Diagnostic("error", "E02",
                                    f"node {node.id!r} cannot reach any end event",
                                    (node.id,)))

    for node in model.nodes:
        if node.is_gateway and model.is_split(node) and model.is_join(node):
            diags.append(Diagnostic("error", "E03",
                                    f"gateway {node.id!r} mixes split and join",
                                    (node.id,)))

    for flow in model.sequence_flows:
        missing = [e for e in (flow.source, flow.target) if e not in model.node_by_id]
        if missing:
            diags.append(Diagnostic("error", "E04",
                                    f"flow {flow.id!r} references missing node(s) "
                                    f"{', '.join(repr(m) for m in missing)}",
                                    (flow.id,)))

    if len(starts) > 1:
        diags.append(Diagnostic("warning", "W01",
                                f"{len(starts)} start events, expected one",
                                tuple(starts)))

    if len(model.nodes) > MAX_ELEMENTS:
        diags.append(Diagnostic("warning", "W02",
                                f"{len(model.nodes)} flow nodes exceed the limit of "
                                f"{MAX_ELEMENTS}"))

    for node in model.nodes:
        if node.kind is NodeKind.TASK:
            first = node.label.split()[0].lower() if node.label.split() else ""
            if first not in verb_lexicon:
                diags.append(Diagnostic("warning", "W03",
                                        f"task label {node.label!r} does not start "
                                        "with a known verb",
                                        (node.id,)))

    for node in model.nodes:
        if (node.is_gateway and node.gateway is GatewayKind.EXCLUSIVE
                and model.is_split(node)):
            unlabeled = [f.id for f in model.outgoing[node.id] if not f.condition_label]
            if unlabeled:
                diags.append(Diagnostic("warning", "W04",
                                        f"exclusive split {node.id!r} has outgoing flows "
                                        "without condition labels",
                                        (node.id, *unlabeled)))

    return diags


def errors(diags: list[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.severity == "error"]


def warnings(diags: list[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.severity == "warning"]
