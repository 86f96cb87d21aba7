"""Template-based natural-language description of a block-decomposed process.

Every task and event leaf contributes exactly one sentence, in block-tree
order. Labels are inserted verbatim; the templates never repeat a label, so
the concatenated text mentions each task exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import blocks as bt
from .model import NodeKind, ProcessModel

SEQUENCE_CONNECTORS = ("Then", "After that", "Subsequently")
PARALLEL_BRANCH_INTROS = ("In the meantime", "At the same time")

_NUMBER_WORDS = ("zero", "one", "two", "three", "four", "five", "six", "seven",
                 "eight", "nine", "ten", "eleven", "twelve")

_ORDINALS = ("zeroth", "first", "second", "third", "fourth", "fifth", "sixth",
             "seventh", "eighth", "ninth", "tenth", "eleventh", "twelfth")


def number_word(n: int) -> str:
    return _NUMBER_WORDS[n] if 0 <= n < len(_NUMBER_WORDS) else str(n)


def ordinal_word(n: int) -> str:
    return _ORDINALS[n] if 0 < n < len(_ORDINALS) else f"{n}."


@dataclass(frozen=True)
class Sentence:
    text: str
    elements: tuple[str, ...] = ()


@dataclass(frozen=True)
class Description:
    sentences: tuple[Sentence, ...] = ()

    def render(self, annotate: bool = False) -> str:
        lines = []
        for sentence in self.sentences:
            if annotate:
                lines.append(f"{sentence.text}  [ids: {', '.join(sentence.elements)}]")
            else:
                lines.append(sentence.text)
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.render()


class _Writer:
    """Collects sentences; a pending intro replaces the next sentence's connector."""

    def __init__(self):
        self.sentences: list[Sentence] = []
        self.pending: tuple[str, tuple[str, ...]] | None = None

    def set_intro(self, intro: str, elements: tuple[str, ...]) -> None:
        self.pending = (intro, elements)

    def emit(self, body: str, elements: tuple[str, ...],
             connector: str | None = None, template_body: bool = False) -> None:
        """Emit ``body`` as a sentence.

        ``template_body`` marks bodies with their own leading capital (kept
        when standalone, lowered after an intro); label-led bodies are never
        case-transformed.
        """
        if self.pending is not None:
            intro, intro_ids = self.pending
            self.pending = None
            text = f"{intro}, {body[0].lower() + body[1:] if template_body else body}"
            elements = intro_ids + elements
        elif connector is not None:
            text = f"{connector}, {body}"
        else:
            text = body if template_body else body
        self.sentences.append(Sentence(text + ".", elements))


def describe(model: ProcessModel, tree: bt.Sequence) -> Description:
    """Generate the description of ``model`` from its block tree."""
    writer = _Writer()
    _render_sequence(model, tree, writer, top_level=True)
    return Description(tuple(writer.sentences))


def _render_sequence(model: ProcessModel, seq: bt.Sequence, writer: _Writer,
                     top_level: bool = False,
                     first_intro: tuple[str, tuple[str, ...]] | None = None) -> None:
    connector_idx = 0
    if first_intro is not None:
        writer.set_intro(*first_intro)
    for child in seq.children:
        if isinstance(child, bt.Leaf):
            node = model.node_by_id[child.node]
            if node.kind is NodeKind.START_EVENT:
                writer.emit(f"The {model.name or model.id} process starts when "
                            f"{node.label or node.id}", (node.id,))
            elif node.kind is NodeKind.END_EVENT:
                writer.emit(f"The process ends with {node.label or node.id}",
                            (node.id,), template_body=True)
            else:
                connector = None
                if writer.pending is None:
                    connector = SEQUENCE_CONNECTORS[connector_idx
                                                    % len(SEQUENCE_CONNECTORS)]
                    connector_idx += 1
                writer.emit(node.label or node.id, (node.id,), connector=connector)
        elif isinstance(child, bt.Choice):
            _render_choice(model, child, writer)
        elif isinstance(child, bt.Parallel):
            _render_parallel(model, child, writer)
        elif isinstance(child, bt.Loop):
            _render_loop(model, child, writer)
        else:
            raise TypeError(f"unexpected block in sequence: {child!r}")


def _branch_condition(branch: bt.Branch, index: int) -> str:
    return branch.condition or f"option {number_word(index + 1)}"


def _render_choice(model: ProcessModel, block: bt.Choice, writer: _Writer) -> None:
    from .model import GatewayKind

    if block.kind is GatewayKind.INCLUSIVE:
        count = number_word(len(block.branches)).capitalize()
        writer.emit(f"{count} alternative procedures may be executed",
                    (block.gateway,), template_body=True)
        for i, branch in enumerate(block.branches):
            intro = f"In the {ordinal_word(i + 1)} procedure"
            _render_sequence(model, branch.body, writer,
                             first_intro=(intro, (branch.flow,)))
        writer.set_intro("Afterwards", (block.join,))
        return

    # exclusive: list the conditions, empty branch mentioned last with a clause
    label = model.node_by_id[block.gateway].label or "decision"
    filled = [b for b in block.branches if not b.is_empty]
    empty = [b for b in block.branches if b.is_empty]
    ordered = filled + empty
    conditions = [_branch_condition(b, i) for i, b in enumerate(block.branches)]
    by_branch = dict(zip(block.branches, conditions))
    mentions = [by_branch[b] for b in ordered]
    listed = ", or ".join(mentions) if len(mentions) == 2 else \
        ", ".join(mentions[:-1]) + ", or " + mentions[-1]
    sentence = f"The {label} may either be {listed}"
    elements = (block.gateway,) + tuple(b.flow for b in ordered)
    if empty:
        sentence += ", in which case nothing further is required before the next step"
    writer.emit(sentence, elements, template_body=True)
    for branch in filled:
        _render_sequence(model, branch.body, writer,
                         first_intro=(f"If {by_branch[branch]}", (branch.flow,)))
    writer.set_intro("In any of these cases", (block.join,))


def _render_parallel(model: ProcessModel, block: bt.Parallel, writer: _Writer) -> None:
    count = number_word(len(block.branches)).capitalize()
    writer.emit(f"{count} procedures are executed in an arbitrary order",
                (block.gateway,), template_body=True)
    for i, branch in enumerate(block.branches):
        if i == 0:
            _render_sequence(model, branch.body, writer)
        else:
            intro = PARALLEL_BRANCH_INTROS[(i - 1) % len(PARALLEL_BRANCH_INTROS)]
            _render_sequence(model, branch.body, writer,
                             first_intro=(intro, (branch.flow,)))
    writer.set_intro("After each case", (block.join,))


def _render_loop(model: ProcessModel, block: bt.Loop, writer: _Writer) -> None:
    _render_sequence(model, block.body, writer)
    writer.emit("If required, the latter steps are repeated and continue with "
                "the next iteration", (block.back_flow, block.exit_gateway),
                template_body=True)
    writer.set_intro("Once the loop is finished", (block.exit_gateway,))
