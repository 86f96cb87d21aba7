"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class BpmnKitError(Exception):
    """Base class for all toolkit errors."""


class ModelError(BpmnKitError):
    """A model violates a construction-time invariant."""


class BpmnXmlError(BpmnKitError):
    """The input is not a well-formed XML document."""


class BpmnSchemaError(BpmnXmlError):
    """A supported element is missing a required attribute."""


class DanglingRefError(BpmnXmlError):
    """An id reference points to a nonexistent element."""


class ScenarioSyntaxError(BpmnKitError):
    """A scenario file line could not be parsed."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class ScenarioRangeError(BpmnKitError):
    """A scenario value is outside its permitted range."""


class BindError(BpmnKitError):
    """A scenario could not be bound to a model."""


class MissingDurationError(BindError):
    """Tasks exist for which no duration entry matches."""

    def __init__(self, labels: list[str]):
        super().__init__("no duration for task(s): " + "; ".join(labels))
        self.labels = labels


class MissingProbabilityError(BindError):
    """An exclusive split has outgoing flows without a resolvable probability."""


class AmbiguousMatchError(BindError):
    """Several glob entries match one task with conflicting durations."""


class ProbabilitySumError(BindError):
    """Explicit branch probabilities of a split do not sum to one."""


class CyclicModelError(BpmnKitError):
    """The sequence-flow graph contains a cycle where none is supported."""


class UnstructuredModelError(BpmnKitError):
    """No matched split/join block decomposition exists."""


class InclusiveGatewayError(BpmnKitError):
    """Inclusive gateways have no execution semantics in this toolkit."""
