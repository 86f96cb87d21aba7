"""Decomposition of a process into nested sequence/choice/parallel/loop blocks.

Only block-structured processes decompose: every split gateway must have a
matching join of the same kind (a branch may run straight to the join, which
yields an empty branch). One structured loop shape is supported: a join
gateway as loop header whose body ends in an exclusive split carrying the
back edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import UnstructuredModelError
from .model import FlowNode, GatewayKind, ProcessModel, SequenceFlow


@dataclass(frozen=True)
class Leaf:
    node: str


@dataclass(frozen=True)
class Sequence:
    children: tuple["Block", ...] = ()


@dataclass(frozen=True)
class Branch:
    """One alternative of a choice or parallel block."""

    flow: str
    condition: str
    body: Sequence

    @property
    def is_empty(self) -> bool:
        return not self.body.children


@dataclass(frozen=True)
class Choice:
    gateway: str
    join: str
    kind: GatewayKind  # exclusive or inclusive
    branches: tuple[Branch, ...] = ()


@dataclass(frozen=True)
class Parallel:
    gateway: str
    join: str
    branches: tuple[Branch, ...] = ()


@dataclass(frozen=True)
class Loop:
    header: str
    exit_gateway: str
    back_flow: str
    body: Sequence = Sequence()


Block = Union[Leaf, Sequence, Choice, Parallel, Loop]


def flatten(block: Block) -> list[str]:
    """Leaf node ids in order; gateways never appear."""
    if isinstance(block, Leaf):
        return [block.node]
    if isinstance(block, Sequence):
        return [n for child in block.children for n in flatten(child)]
    if isinstance(block, (Choice, Parallel)):
        return [n for b in block.branches for n in flatten(b.body)]
    if isinstance(block, Loop):
        return flatten(block.body)
    raise TypeError(f"not a block: {block!r}")


def back_edges(model: ProcessModel) -> frozenset[str]:
    """Flow ids closing a cycle, found by DFS from the start events."""
    back: set[str] = set()
    state: dict[str, int] = {}  # 1 on stack, 2 done

    def visit(nid: str) -> None:
        state[nid] = 1
        for flow in model.outgoing.get(nid, ()):
            if flow.target not in model.node_by_id:
                continue
            mark = state.get(flow.target)
            if mark == 1:
                back.add(flow.id)
            elif mark is None:
                visit(flow.target)
        state[nid] = 2

    for node in model.start_events():
        if state.get(node.id) is None:
            visit(node.id)
    return frozenset(back)


def find_matching_join(model: ProcessModel, split: FlowNode,
                       skip: frozenset[str] = frozenset()) -> str:
    """Walk every branch of ``split`` to the first join at nesting depth zero.

    ``skip`` holds flow ids excluded from the walk (back edges). All branches
    must agree on the join or the model is unstructured.
    """
    results = []
    budget = len(model.nodes) + len(model.sequence_flows) + 2
    for flow in _forward(model, split.id, skip):
        cur = flow.target
        depth = 0
        for _ in range(budget):
            node = model.node_by_id.get(cur)
            if node is None:
                raise UnstructuredModelError(
                    f"split {split.id!r}: branch runs into missing node {cur!r}")
            incoming = [f for f in model.incoming[cur] if f.id not in skip]
            outgoing = _forward(model, cur, skip)
            if node.is_gateway and len(incoming) > 1:
                if depth == 0:
                    results.append(cur)
                    break
                depth -= 1
            if node.is_gateway and len(outgoing) > 1:
                depth += 1
            if not outgoing:
                raise UnstructuredModelError(
                    f"split {split.id!r}: branch ends at {cur!r} without a matching join")
            cur = outgoing[0].target
        else:
            raise UnstructuredModelError(f"split {split.id!r}: no matching join found")
    if len(set(results)) != 1:
        raise UnstructuredModelError(
            f"split {split.id!r}: branches reach different joins {sorted(set(results))}")
    return results[0]


def _forward(model: ProcessModel, nid: str, skip: frozenset[str]) -> list[SequenceFlow]:
    return [f for f in model.outgoing.get(nid, ()) if f.id not in skip]


class _Decomposer:
    def __init__(self, model: ProcessModel):
        self.model = model
        self.back = back_edges(model)
        # loop header -> its single back edge
        self.loops: dict[str, SequenceFlow] = {}
        flows_by_id = {f.id: f for f in model.sequence_flows}
        for fid in self.back:
            flow = flows_by_id[fid]
            if flow.target in self.loops:
                raise UnstructuredModelError(
                    f"node {flow.target!r}: more than one back edge targets it")
            self.loops[flow.target] = flow

    def run(self) -> Sequence:
        starts = self.model.start_events()
        if len(starts) != 1:
            raise UnstructuredModelError(
                f"decomposition needs exactly one start event, found {len(starts)}")
        blocks, _ = self.parse(starts[0].id, stop=None)
        return Sequence(tuple(blocks))

    def parse(self, start: str, stop: str | None) -> tuple[list[Block], str | None]:
        blocks: list[Block] = []
        cur: str | None = start
        for _ in range(len(self.model.nodes) + len(self.model.sequence_flows) + 2):
            if cur is None or cur == stop:
                return blocks, cur
            node = self.model.node_by_id.get(cur)
            if node is None:
                raise UnstructuredModelError(f"flow runs into missing node {cur!r}")
            if cur in self.loops:
                blocks.append(self.parse_loop(node))
                exit_gw = self.loops[cur].source
                cur = self.single_successor(exit_gw)
            elif node.is_gateway:
                cur = self.parse_gateway(node, blocks)
            else:
                blocks.append(Leaf(cur))
                outgoing = _forward(self.model, cur, self.back)
                if len(outgoing) > 1:
                    raise UnstructuredModelError(
                        f"non-gateway node {cur!r} has multiple outgoing flows")
                cur = outgoing[0].target if outgoing else None
        raise UnstructuredModelError("decomposition did not terminate")

    def parse_gateway(self, node: FlowNode, blocks: list[Block]) -> str | None:
        outgoing = _forward(self.model, node.id, self.back)
        incoming = [f for f in self.model.incoming[node.id] if f.id not in self.back]
        if len(outgoing) > 1:
            join = find_matching_join(self.model, node, self.back)
            join_node = self.model.node_by_id[join]
            if join_node.gateway is not node.gateway:
                raise UnstructuredModelError(
                    f"split {node.id!r} ({node.gateway.value}) is matched by join "
                    f"{join!r} of a different kind")
            branches = []
            for flow in outgoing:
                if flow.target == join:
                    body = Sequence()
                else:
                    children, reached = self.parse(flow.target, stop=join)
                    if reached != join:
                        raise UnstructuredModelError(
                            f"branch {flow.id!r} of split {node.id!r} does not reach "
                            f"its join {join!r}")
                    body = Sequence(tuple(children))
                branches.append(Branch(flow.id, flow.condition_label, body))
            if node.gateway is GatewayKind.PARALLEL:
                blocks.append(Parallel(node.id, join, tuple(branches)))
            else:
                blocks.append(Choice(node.id, join, node.gateway, tuple(branches)))
            return self.single_successor(join)
        if len(incoming) > 1:
            # joins are consumed by parse() via the stop marker
            raise UnstructuredModelError(f"join gateway {node.id!r} has no matching split")
        # degenerate 1-in/1-out gateway: pass through
        return outgoing[0].target if outgoing else None

    def parse_loop(self, header: FlowNode) -> Loop:
        back_flow = self.loops[header.id]
        exit_gw = self.model.node_by_id.get(back_flow.source)
        if not header.is_gateway:
            raise UnstructuredModelError(
                f"loop header {header.id!r} must be a join gateway")
        if (exit_gw is None or not exit_gw.is_gateway
                or exit_gw.gateway is not GatewayKind.EXCLUSIVE):
            raise UnstructuredModelError(
                f"loop back edge {back_flow.id!r} must leave an exclusive split")
        body_start = self.single_successor(header.id)
        if body_start is None:
            raise UnstructuredModelError(f"loop header {header.id!r} has no body")
        children, reached = self.parse(body_start, stop=exit_gw.id)
        if reached != exit_gw.id:
            raise UnstructuredModelError(
                f"loop body starting at {body_start!r} does not reach its exit "
                f"{exit_gw.id!r}")
        return Loop(header.id, exit_gw.id, back_flow.id, Sequence(tuple(children)))

    def single_successor(self, nid: str) -> str | None:
        outgoing = _forward(self.model, nid, self.back)
        if len(outgoing) > 1:
            raise UnstructuredModelError(
                f"expected a single outgoing flow at {nid!r}, found {len(outgoing)}")
        return outgoing[0].target if outgoing else None


def decompose_blocks(model: ProcessModel) -> Sequence:
    """Build the block tree of a validated process.

    Raises UnstructuredModelError when no matched decomposition exists.
    """
    return _Decomposer(model).run()
