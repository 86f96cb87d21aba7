"""BPMN 2.0 XML reading and writing for the supported subset.

Supported under the namespace ``http://www.omg.org/spec/BPMN/20100524/MODEL``:
collaboration, participant, process, laneSet/lane, startEvent, endEvent,
intermediateCatchEvent (message), task, userTask, manualTask,
exclusiveGateway, parallelGateway, inclusiveGateway, sequenceFlow,
messageFlow, dataObject(Reference), dataStoreReference and data
input/output associations. Anything else (bpmndi diagrams, subProcess,
ioSpecification, extensions) is skipped whole and reported in
``ParseReport.ignored_elements`` so nothing vanishes silently.

Serialization is semantic-only and deterministic: elements are sorted by id,
no diagram interchange is emitted, and ``parse(serialize(m))`` is
structurally equal to ``m``.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .errors import BpmnSchemaError, BpmnXmlError, DanglingRefError, ModelError
from .model import (
    Collaboration,
    DataAssociation,
    DataObject,
    DataStore,
    Direction,
    EventTrigger,
    FlowNode,
    GatewayKind,
    Lane,
    MessageFlow,
    NodeKind,
    Pool,
    ProcessModel,
    SequenceFlow,
    TaskMarker,
)

NS = "http://www.omg.org/spec/BPMN/20100524/MODEL"

_NODE_TAGS = {
    "startEvent": (NodeKind.START_EVENT, None, None),
    "endEvent": (NodeKind.END_EVENT, None, None),
    "intermediateCatchEvent": (NodeKind.CATCH_EVENT, None, None),
    "task": (NodeKind.TASK, TaskMarker.GENERIC, None),
    "userTask": (NodeKind.TASK, TaskMarker.USER, None),
    "manualTask": (NodeKind.TASK, TaskMarker.MANUAL, None),
    "exclusiveGateway": (NodeKind.GATEWAY, None, GatewayKind.EXCLUSIVE),
    "parallelGateway": (NodeKind.GATEWAY, None, GatewayKind.PARALLEL),
    "inclusiveGateway": (NodeKind.GATEWAY, None, GatewayKind.INCLUSIVE),
}

# children of supported elements that carry no extra information for us
_REDUNDANT_CHILDREN = {"incoming", "outgoing", "messageEventDefinition",
                       "sourceRef", "targetRef", "flowNodeRef"}


@dataclass(frozen=True)
class ParseReport:
    model: Collaboration
    ignored_elements: tuple[tuple[str, str], ...] = ()


def _local(tag) -> str:
    if not isinstance(tag, str):  # comments / processing instructions
        return ""
    return tag.rsplit("}", 1)[-1]


def _require(element: ET.Element, attr: str) -> str:
    value = element.get(attr)
    if value is None:
        raise BpmnSchemaError(
            f"element <{_local(element.tag)}> is missing required attribute "
            f"{attr!r}")
    return value


class _Parser:
    def __init__(self):
        self.ignored: list[tuple[str, str]] = []

    def ignore(self, element: ET.Element) -> None:
        name = _local(element.tag)
        if name:
            self.ignored.append((name, element.get("id", "")))

    def parse(self, data: bytes | str) -> ParseReport:
        try:
            root = ET.fromstring(data)
        except (ET.ParseError, ValueError, UnicodeError) as exc:
            raise BpmnXmlError(f"not well-formed XML: {exc}") from None
        if root.tag != f"{{{NS}}}definitions":
            raise BpmnSchemaError(
                f"expected <definitions> in the BPMN namespace, got "
                f"<{_local(root.tag)}>")

        processes: dict[str, ProcessModel] = {}
        process_order: list[str] = []
        collaboration_el = None
        for child in root:
            tag = _local(child.tag)
            if child.tag == f"{{{NS}}}process":
                process = self.parse_process(child)
                processes[process.id] = process
                process_order.append(process.id)
            elif child.tag == f"{{{NS}}}collaboration" and collaboration_el is None:
                collaboration_el = child
            else:
                self.ignore(child)

        try:
            model = self.build_collaboration(collaboration_el, processes, process_order)
        except ModelError as exc:
            raise BpmnSchemaError(str(exc)) from None
        return ParseReport(model, tuple(self.ignored))

    def build_collaboration(self, element, processes, process_order) -> Collaboration:
        pools: list[Pool] = []
        message_flows: list[MessageFlow] = []
        used: set[str] = set()
        if element is None:
            collab_id = "collaboration_auto"
        else:
            collab_id = _require(element, "id")
            for child in element:
                tag = _local(child.tag)
                if child.tag == f"{{{NS}}}participant":
                    pid = _require(child, "id")
                    process = None
                    ref = child.get("processRef")
                    if ref is not None:
                        if ref not in processes:
                            raise DanglingRefError(
                                f"participant {pid!r} references unknown process "
                                f"{ref!r}")
                        process = processes[ref]
                        used.add(ref)
                    pools.append(Pool(pid, child.get("name", ""), process))
                elif child.tag == f"{{{NS}}}messageFlow":
                    message_flows.append(MessageFlow(
                        _require(child, "id"),
                        _require(child, "sourceRef"),
                        _require(child, "targetRef"),
                        child.get("name", "")))
                else:
                    self.ignore(child)
        for pid in process_order:
            if pid not in used:
                pools.append(Pool(f"pool_{pid}", processes[pid].name or pid,
                                  processes[pid]))
        return Collaboration(collab_id, tuple(pools), tuple(message_flows))

    def parse_process(self, element: ET.Element) -> ProcessModel:
        pid = _require(element, "id")
        nodes: list[FlowNode] = []
        flows: list[SequenceFlow] = []
        objects: list[DataObject] = []
        stores: list[DataStore] = []
        associations: list[DataAssociation] = []
        lanes: list[Lane] = []

        for child in element:
            tag = _local(child.tag)
            if tag in _NODE_TAGS:
                nodes.append(self.parse_node(child, tag))
                associations.extend(self.parse_associations(child))
            elif tag == "sequenceFlow":
                flows.append(SequenceFlow(
                    _require(child, "id"),
                    _require(child, "sourceRef"),
                    _require(child, "targetRef"),
                    child.get("name", "")))
            elif tag == "dataObjectReference":
                oid = _require(child, "id")
                objects.append(DataObject.from_display_label(oid, _require(child, "name")))
            elif tag == "dataObject":
                continue  # backing element; display labels live on the references
            elif tag == "dataStoreReference":
                stores.append(DataStore(_require(child, "id"), _require(child, "name")))
            elif tag == "laneSet":
                lanes.extend(self.parse_lane_set(child))
            elif tag in _REDUNDANT_CHILDREN:
                continue
            else:
                self.ignore(child)

        node_ids = {n.id for n in nodes}
        for flow in flows:
            for ref in (flow.source, flow.target):
                if ref not in node_ids:
                    raise DanglingRefError(
                        f"sequence flow {flow.id!r} references unknown node {ref!r}")
        artifact_ids = {a.id for a in objects} | {s.id for s in stores}
        for assoc in associations:
            if assoc.artifact not in artifact_ids:
                raise DanglingRefError(
                    f"data association on {assoc.node!r} references unknown "
                    f"artifact {assoc.artifact!r}")
        for lane in lanes:
            for ref in lane.node_ids:
                if ref not in node_ids:
                    raise DanglingRefError(
                        f"lane {lane.id!r} references unknown node {ref!r}")

        try:
            return ProcessModel(pid, element.get("name", ""), tuple(nodes),
                                tuple(flows), tuple(objects), tuple(stores),
                                tuple(associations), tuple(lanes))
        except ModelError as exc:
            raise BpmnSchemaError(str(exc)) from None

    def parse_node(self, element: ET.Element, tag: str) -> FlowNode:
        kind, marker, gw = _NODE_TAGS[tag]
        nid = _require(element, "id")
        label = element.get("name", "")
        has_message = any(child.tag == f"{{{NS}}}messageEventDefinition"
                          for child in element)
        if kind is NodeKind.CATCH_EVENT and not has_message:
            raise BpmnSchemaError(
                f"intermediateCatchEvent {nid!r} needs a messageEventDefinition")
        trigger = EventTrigger.MESSAGE if has_message else EventTrigger.NONE
        try:
            return FlowNode(nid, label, kind,
                            trigger=trigger,
                            marker=marker or TaskMarker.GENERIC,
                            gateway=gw)
        except ModelError as exc:
            raise BpmnSchemaError(str(exc)) from None

    def parse_associations(self, element: ET.Element) -> list[DataAssociation]:
        node_id = element.get("id", "")
        associations = []
        for child in element:
            tag = _local(child.tag)
            if tag == "dataInputAssociation":
                ref = child.find(f"{{{NS}}}sourceRef")
                if ref is None or not (ref.text or "").strip():
                    raise BpmnSchemaError(
                        f"dataInputAssociation on {node_id!r} is missing sourceRef")
                associations.append(
                    DataAssociation(node_id, ref.text.strip(), Direction.READ))
            elif tag == "dataOutputAssociation":
                ref = child.find(f"{{{NS}}}targetRef")
                if ref is None or not (ref.text or "").strip():
                    raise BpmnSchemaError(
                        f"dataOutputAssociation on {node_id!r} is missing targetRef")
                associations.append(
                    DataAssociation(node_id, ref.text.strip(), Direction.WRITE))
            elif tag in _REDUNDANT_CHILDREN:
                continue
            else:
                self.ignore(child)
        return associations

    def parse_lane_set(self, element: ET.Element) -> list[Lane]:
        lanes = []
        for child in element:
            if _local(child.tag) != "lane":
                self.ignore(child)
                continue
            refs = []
            for sub in child:
                if _local(sub.tag) == "flowNodeRef":
                    if (sub.text or "").strip():
                        refs.append(sub.text.strip())
                else:
                    self.ignore(sub)
            lanes.append(Lane(_require(child, "id"), child.get("name", ""),
                              tuple(refs)))
        return lanes


def parse(data: bytes | str) -> ParseReport:
    """Parse a BPMN document; raises BpmnXmlError, BpmnSchemaError or
    DanglingRefError, never anything else."""
    return _Parser().parse(data)


_KIND_TAGS = {
    (NodeKind.START_EVENT, None): "startEvent",
    (NodeKind.END_EVENT, None): "endEvent",
    (NodeKind.CATCH_EVENT, None): "intermediateCatchEvent",
    (NodeKind.TASK, TaskMarker.GENERIC): "task",
    (NodeKind.TASK, TaskMarker.USER): "userTask",
    (NodeKind.TASK, TaskMarker.MANUAL): "manualTask",
    (NodeKind.GATEWAY, GatewayKind.EXCLUSIVE): "exclusiveGateway",
    (NodeKind.GATEWAY, GatewayKind.PARALLEL): "parallelGateway",
    (NodeKind.GATEWAY, GatewayKind.INCLUSIVE): "inclusiveGateway",
}


def serialize(model: Collaboration) -> bytes:
    """Emit deterministic UTF-8 BPMN XML (elements sorted by id, no diagrams)."""
    root = ET.Element("definitions", {
        "xmlns": NS,
        "id": f"{model.id}_definitions",
        "targetNamespace": NS,
    })
    collab = ET.SubElement(root, "collaboration", {"id": model.id})
    for pool in sorted(model.pools, key=lambda p: p.id):
        attrs = {"id": pool.id}
        if pool.name:
            attrs["name"] = pool.name
        if pool.process is not None:
            attrs["processRef"] = pool.process.id
        ET.SubElement(collab, "participant", attrs)
    for mf in sorted(model.message_flows, key=lambda m: m.id):
        attrs = {"id": mf.id}
        if mf.label:
            attrs["name"] = mf.label
        attrs["sourceRef"] = mf.source
        attrs["targetRef"] = mf.target
        ET.SubElement(collab, "messageFlow", attrs)

    for pool in sorted(model.pools, key=lambda p: p.id):
        if pool.process is not None:
            _write_process(root, pool.process)

    ET.indent(root, space="  ")
    return ET.tostring(root, encoding="UTF-8", xml_declaration=True) + b"\n"


def _write_process(root: ET.Element, process: ProcessModel) -> None:
    attrs = {"id": process.id}
    if process.name:
        attrs["name"] = process.name
    element = ET.SubElement(root, "process", attrs)

    if process.lanes:
        lane_set = ET.SubElement(element, "laneSet",
                                 {"id": f"{process.id}_lanes"})
        for lane in sorted(process.lanes, key=lambda l: l.id):
            lane_el = ET.SubElement(lane_set, "lane", {"id": lane.id})
            if lane.name:
                lane_el.set("name", lane.name)
            for ref in sorted(lane.node_ids):
                ET.SubElement(lane_el, "flowNodeRef").text = ref

    reads: dict[str, list[str]] = {}
    writes: dict[str, list[str]] = {}
    for assoc in process.data_associations:
        target = reads if assoc.direction is Direction.READ else writes
        target.setdefault(assoc.node, []).append(assoc.artifact)

    for node in sorted(process.nodes, key=lambda n: n.id):
        tag = _KIND_TAGS[(node.kind, node.marker if node.is_task else node.gateway)]
        attrs = {"id": node.id}
        if node.label:
            attrs["name"] = node.label
        node_el = ET.SubElement(element, tag, attrs)
        if node.trigger is EventTrigger.MESSAGE:
            ET.SubElement(node_el, "messageEventDefinition",
                          {"id": f"{node.id}_message"})
        for artifact in sorted(reads.get(node.id, [])):
            assoc_el = ET.SubElement(node_el, "dataInputAssociation",
                                     {"id": f"{node.id}_read_{artifact}"})
            ET.SubElement(assoc_el, "sourceRef").text = artifact
        for artifact in sorted(writes.get(node.id, [])):
            assoc_el = ET.SubElement(node_el, "dataOutputAssociation",
                                     {"id": f"{node.id}_write_{artifact}"})
            ET.SubElement(assoc_el, "targetRef").text = artifact

    for flow in sorted(process.sequence_flows, key=lambda f: f.id):
        attrs = {"id": flow.id}
        if flow.condition_label:
            attrs["name"] = flow.condition_label
        attrs["sourceRef"] = flow.source
        attrs["targetRef"] = flow.target
        ET.SubElement(element, "sequenceFlow", attrs)

    for obj in sorted(process.data_objects, key=lambda o: o.id):
        ET.SubElement(element, "dataObject", {"id": f"{obj.id}_data"})
        ET.SubElement(element, "dataObjectReference", {
            "id": obj.id,
            "name": obj.display_label,
            "dataObjectRef": f"{obj.id}_data",
        })

    for store in sorted(process.data_stores, key=lambda s: s.id):
        ET.SubElement(element, "dataStoreReference",
                      {"id": store.id, "name": store.name})


def structural_equal(a: Collaboration, b: Collaboration) -> bool:
    """Order-insensitive equality on ids, labels, kinds, edges and data links."""
    def process_key(p: ProcessModel):
        return (p.id, p.name, frozenset(p.nodes), frozenset(p.sequence_flows),
                frozenset(p.data_objects), frozenset(p.data_stores),
                frozenset(p.data_associations),
                frozenset((l.id, l.name, frozenset(l.node_ids)) for l in p.lanes))

    def pool_key(pool: Pool):
        return (pool.id, pool.name,
                process_key(pool.process) if pool.process else None)

    return (a.id == b.id
            and frozenset(map(pool_key, a.pools)) == frozenset(map(pool_key, b.pools))
            and frozenset(a.message_flows) == frozenset(b.message_flows))
