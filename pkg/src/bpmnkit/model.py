"""Typed in-memory representation of a BPMN collaboration.

All types are immutable after construction; collections are stored as tuples
in declaration (document) order. Construction enforces hard invariants such
as id uniqueness, self-loop and multi-edge rejection; softer rules live in
:mod:`bpmnkit.verify` and are reported as diagnostics instead.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

from .errors import ModelError


class NodeKind(Enum):
    START_EVENT = "start_event"
    CATCH_EVENT = "catch_event"
    END_EVENT = "end_event"
    TASK = "task"
    GATEWAY = "gateway"


class EventTrigger(Enum):
    NONE = "none"
    MESSAGE = "message"


class TaskMarker(Enum):
    GENERIC = "generic"
    USER = "user"
    MANUAL = "manual"


class GatewayKind(Enum):
    EXCLUSIVE = "exclusive"
    PARALLEL = "parallel"
    INCLUSIVE = "inclusive"


class Direction(Enum):
    READ = "read"
    WRITE = "write"


@dataclass(frozen=True)
class FlowNode:
    """An event, task or gateway. Events carry zero duration by definition."""

    id: str
    label: str
    kind: NodeKind
    trigger: EventTrigger = EventTrigger.NONE
    marker: TaskMarker = TaskMarker.GENERIC
    gateway: GatewayKind | None = None

    def __post_init__(self):
        if self.kind is NodeKind.GATEWAY and self.gateway is None:
            raise ModelError(f"node {self.id}: gateway nodes need a gateway kind")
        if self.kind is not NodeKind.GATEWAY and self.gateway is not None:
            raise ModelError(f"node {self.id}: only gateways carry a gateway kind")
        if self.kind is NodeKind.CATCH_EVENT and self.trigger is not EventTrigger.MESSAGE:
            raise ModelError(f"node {self.id}: catch events must have a message trigger")

    @property
    def is_event(self) -> bool:
        return self.kind in (NodeKind.START_EVENT, NodeKind.CATCH_EVENT, NodeKind.END_EVENT)

    @property
    def is_task(self) -> bool:
        return self.kind is NodeKind.TASK

    @property
    def is_gateway(self) -> bool:
        return self.kind is NodeKind.GATEWAY


def start_event(id: str, label: str = "", trigger: EventTrigger = EventTrigger.NONE) -> FlowNode:
    return FlowNode(id, label, NodeKind.START_EVENT, trigger=trigger)


def end_event(id: str, label: str = "") -> FlowNode:
    return FlowNode(id, label, NodeKind.END_EVENT)


def catch_event(id: str, label: str = "") -> FlowNode:
    return FlowNode(id, label, NodeKind.CATCH_EVENT, trigger=EventTrigger.MESSAGE)


def task(id: str, label: str, marker: TaskMarker = TaskMarker.GENERIC) -> FlowNode:
    return FlowNode(id, label, NodeKind.TASK, marker=marker)


def gateway(id: str, kind: GatewayKind, label: str = "") -> FlowNode:
    return FlowNode(id, label, NodeKind.GATEWAY, gateway=kind)


@dataclass(frozen=True)
class SequenceFlow:
    """Directed edge between two flow nodes of the same process."""

    id: str
    source: str
    target: str
    condition_label: str = ""

    def __post_init__(self):
        if self.source == self.target:
            raise ModelError(f"flow {self.id}: self-loops are not supported")


# Display labels follow the convention "Base (Format) [State]"; both suffix
# groups are optional and must sit at the end of the label.
_LABEL_RE = re.compile(r"^(?P<base>.*?)(?: \((?P<format>[^()]+)\))?(?: \[(?P<state>[^\[\]]+)\])?$")


@dataclass(frozen=True)
class DataObject:
    """Flowing information artifact, e.g. "Field Geo-Data (Format 1) [Updated]"."""

    id: str
    base_name: str
    format: str | None = None
    state: str | None = None

    def __post_init__(self):
        if not self.base_name:
            raise ModelError(f"data object {self.id}: base name must not be empty")

    @classmethod
    def from_display_label(cls, id: str, label: str) -> "DataObject":
        m = _LABEL_RE.fullmatch(label)
        if m is None or not m.group("base"):
            raise ModelError(f"data object {id}: cannot parse display label {label!r}")
        return cls(id, m.group("base"), m.group("format"), m.group("state"))

    @property
    def display_label(self) -> str:
        label = self.base_name
        if self.format is not None:
            label += f" ({self.format})"
        if self.state is not None:
            label += f" [{self.state}]"
        return label


@dataclass(frozen=True)
class DataStore:
    """Persistent container for data objects, e.g. a database."""

    id: str
    name: str


@dataclass(frozen=True)
class DataAssociation:
    """Read/write link between a task or event and a data object or store."""

    node: str
    artifact: str
    direction: Direction


@dataclass(frozen=True)
class Lane:
    """Named sub-partition of a process listing its member nodes."""

    id: str
    name: str
    node_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class ProcessModel:
    """A single process: flow nodes, sequence flows, data elements and lanes."""

    id: str
    name: str = ""
    nodes: tuple[FlowNode, ...] = ()
    sequence_flows: tuple[SequenceFlow, ...] = ()
    data_objects: tuple[DataObject, ...] = ()
    data_stores: tuple[DataStore, ...] = ()
    data_associations: tuple[DataAssociation, ...] = ()
    lanes: tuple[Lane, ...] = ()

    def __post_init__(self):
        ids: set[str] = set()
        for element in (*self.nodes, *self.sequence_flows, *self.data_objects,
                        *self.data_stores, *self.lanes):
            if element.id in ids or element.id == self.id:
                raise ModelError(f"process {self.id}: duplicate id {element.id!r}")
            ids.add(element.id)
        edges: set[tuple[str, str]] = set()
        for flow in self.sequence_flows:
            pair = (flow.source, flow.target)
            if pair in edges:
                raise ModelError(f"process {self.id}: multi-edge {pair[0]} -> {pair[1]}")
            edges.add(pair)
        nodes_by_id = {n.id: n for n in self.nodes}
        artifacts = {a.id for a in (*self.data_objects, *self.data_stores)}
        for assoc in self.data_associations:
            node = nodes_by_id.get(assoc.node)
            if node is None or node.is_gateway:
                raise ModelError(
                    f"process {self.id}: association node {assoc.node!r} "
                    "must be an existing task or event")
            if assoc.artifact not in artifacts:
                raise ModelError(
                    f"process {self.id}: association artifact {assoc.artifact!r} not found")

    @cached_property
    def node_by_id(self) -> dict[str, FlowNode]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def outgoing(self) -> dict[str, tuple[SequenceFlow, ...]]:
        """Outgoing flows per node id, in document order. Every node has an entry."""
        out: dict[str, list[SequenceFlow]] = {n.id: [] for n in self.nodes}
        for flow in self.sequence_flows:
            if flow.source in out:
                out[flow.source].append(flow)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def incoming(self) -> dict[str, tuple[SequenceFlow, ...]]:
        inc: dict[str, list[SequenceFlow]] = {n.id: [] for n in self.nodes}
        for flow in self.sequence_flows:
            if flow.target in inc:
                inc[flow.target].append(flow)
        return {k: tuple(v) for k, v in inc.items()}

    @property
    def tasks(self) -> tuple[FlowNode, ...]:
        return tuple(n for n in self.nodes if n.is_task)

    def start_events(self) -> tuple[FlowNode, ...]:
        return tuple(n for n in self.nodes if n.kind is NodeKind.START_EVENT)

    def end_events(self) -> tuple[FlowNode, ...]:
        return tuple(n for n in self.nodes if n.kind is NodeKind.END_EVENT)

    def is_split(self, node: FlowNode) -> bool:
        return node.is_gateway and len(self.outgoing[node.id]) > 1

    def is_join(self, node: FlowNode) -> bool:
        return node.is_gateway and len(self.incoming[node.id]) > 1

    def has_cycle(self) -> bool:
        state: dict[str, int] = {}  # 1 on stack, 2 done

        def visit(nid: str) -> bool:
            state[nid] = 1
            for flow in self.outgoing.get(nid, ()):
                if flow.target not in self.node_by_id:
                    continue
                mark = state.get(flow.target)
                if mark == 1:
                    return True
                if mark is None and visit(flow.target):
                    return True
            state[nid] = 2
            return False

        return any(state.get(n.id) is None and visit(n.id) for n in self.nodes)


@dataclass(frozen=True)
class Pool:
    """Participant, either carrying a process or a black box."""

    id: str
    name: str
    process: ProcessModel | None = None

    @property
    def black_box(self) -> bool:
        return self.process is None


@dataclass(frozen=True)
class MessageFlow:
    """Message exchange between elements of different pools."""

    id: str
    source: str
    target: str
    label: str = ""


@dataclass(frozen=True)
class Collaboration:
    """Pools plus the message flows connecting them."""

    id: str
    pools: tuple[Pool, ...] = ()
    message_flows: tuple[MessageFlow, ...] = ()

    def __post_init__(self):
        pool_of: dict[str, str] = {}
        for pool in self.pools:
            if pool.id in pool_of:
                raise ModelError(f"collaboration {self.id}: duplicate pool id {pool.id!r}")
            pool_of[pool.id] = pool.id
            if pool.process is not None:
                for node in pool.process.nodes:
                    if node.id in pool_of:
                        raise ModelError(
                            f"collaboration {self.id}: node id {node.id!r} is not unique")
                    pool_of[node.id] = pool.id
        store_names: set[str] = set()
        for store in self.data_stores:
            if store.name in store_names:
                raise ModelError(
                    f"collaboration {self.id}: duplicate data store name {store.name!r}")
            store_names.add(store.name)
        for mf in self.message_flows:
            src, tgt = pool_of.get(mf.source), pool_of.get(mf.target)
            if src is None or tgt is None:
                raise ModelError(f"message flow {mf.id}: endpoint not found")
            if src == tgt:
                raise ModelError(f"message flow {mf.id}: endpoints must lie in different pools")

    @property
    def processes(self) -> tuple[ProcessModel, ...]:
        return tuple(p.process for p in self.pools if p.process is not None)

    @property
    def data_stores(self) -> tuple[DataStore, ...]:
        return tuple(s for p in self.processes for s in p.data_stores)

    def single_process(self) -> ProcessModel:
        procs = self.processes
        if len(procs) != 1:
            raise ModelError(
                f"collaboration {self.id}: expected exactly one executable process, "
                f"found {len(procs)}")
        return procs[0]
