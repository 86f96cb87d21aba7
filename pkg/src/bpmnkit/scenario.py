"""Simulation scenarios: task durations and exclusive-branch probabilities.

Scenario files are line oriented, UTF-8::

    scenario "estimated-times"
    [durations]
    "Check Field Geo-Data in FMIS *" = 05:00
    "Plan Beet Seeding"              = 15:00
    [probabilities]
    # gateway label / condition label / value - or a raw flow id
    "Field Geo-Data up-to-date?" / "out-of-date" = 0.05

Durations are exact integer seconds, accepted as ``MM:SS`` (both below 60)
or ``H:MM:SS`` with unpadded hours allowed. ``*`` in a task matcher matches
any run of characters; exact matchers beat globs. Probabilities are exact
decimals kept as rationals so that expected values stay exact; a lone
unresolved branch of a split receives the complement.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    AmbiguousMatchError,
    MissingDurationError,
    MissingProbabilityError,
    ProbabilitySumError,
    ScenarioRangeError,
    ScenarioSyntaxError,
)
from .model import GatewayKind, NodeKind, ProcessModel

SUM_TOLERANCE = Fraction(1, 10**9)


@dataclass(frozen=True, order=True)
class Duration:
    """Non-negative exact duration in whole seconds."""

    seconds: int

    def __post_init__(self):
        if self.seconds < 0:
            raise ScenarioRangeError(f"negative duration: {self.seconds}")

    @classmethod
    def parse(cls, text: str) -> "Duration":
        parts = text.strip().split(":")
        if len(parts) == 2:
            h, (m, s) = 0, parts
        elif len(parts) == 3:
            h, m, s = parts
        else:
            raise ValueError(f"expected MM:SS or H:MM:SS, got {text!r}")
        if not all(str(p).isdigit() for p in (h, m, s)):
            raise ValueError(f"expected MM:SS or H:MM:SS, got {text!r}")
        h, m, s = int(h), int(m), int(s)
        if m >= 60 or s >= 60:
            raise ScenarioRangeError(f"minutes and seconds must be below 60 in {text!r}")
        return cls(h * 3600 + m * 60 + s)

    def render(self) -> str:
        """``H:MM:SS`` with unpadded hours, e.g. ``8:57:15``."""
        h, rest = divmod(self.seconds, 3600)
        m, s = divmod(rest, 60)
        return f"{h}:{m:02d}:{s:02d}"

    def __str__(self) -> str:
        return self.render()

    def __add__(self, other: "Duration") -> "Duration":
        return Duration(self.seconds + other.seconds)


def render_signed(seconds: int) -> str:
    """Signed ``H:MM:SS`` for time deltas, e.g. ``-0:11:30``."""
    sign = "-" if seconds < 0 else ""
    return sign + Duration(abs(seconds)).render()


@dataclass(frozen=True)
class FlowRef:
    """Probability entry addressing a sequence flow by id."""

    flow_id: str


@dataclass(frozen=True)
class PairRef:
    """Probability entry addressing flows by gateway label and condition label."""

    gateway_label: str
    condition_label: str


@dataclass(frozen=True)
class Scenario:
    name: str
    durations: tuple[tuple[str, Duration], ...] = ()
    probabilities: tuple[tuple[FlowRef | PairRef, Fraction], ...] = ()


_PROBABILITY_RE = re.compile(r"^\d+(\.\d+)?$")


def _parse_probability(text: str, line_no: int) -> Fraction:
    if not _PROBABILITY_RE.fullmatch(text):
        raise ScenarioSyntaxError(line_no, f"not a probability literal: {text!r}")
    value = Fraction(text)  # exact decimal, no binary float detour
    if not 0 <= value <= 1:
        raise ScenarioRangeError(f"line {line_no}: probability {text} outside [0, 1]")
    return value


def _strip_comment(line: str) -> str:
    quoted = False
    for i, ch in enumerate(line):
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            return line[:i]
    return line


def _tokenize(line: str, line_no: int) -> list[tuple[str, str]]:
    """Split into (kind, text) tokens: quoted strings, punctuation, bare words."""
    tokens = []
    i = 0
    while i < len(line):
        ch = line[i]
        if ch.isspace():
            i += 1
        elif ch == '"':
            end = line.find('"', i + 1)
            if end < 0:
                raise ScenarioSyntaxError(line_no, "unterminated string")
            tokens.append(("str", line[i + 1:end]))
            i = end + 1
        elif ch in "=/":
            tokens.append((ch, ch))
            i += 1
        else:
            m = re.match(r"[^\s=/\"]+", line[i:])
            tokens.append(("word", m.group(0)))
            i += len(m.group(0))
    return tokens


def parse_scenario(data: bytes | str) -> Scenario:
    """Parse a scenario file; raises ScenarioSyntaxError / ScenarioRangeError."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScenarioSyntaxError(0, f"not UTF-8: {exc}") from None
    else:
        text = data

    name = ""
    durations: list[tuple[str, Duration]] = []
    probabilities: list[tuple[FlowRef | PairRef, Fraction]] = []
    seen_matchers: set[str] = set()
    seen_refs: set[FlowRef | PairRef] = set()
    section = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("durations", "probabilities"):
                raise ScenarioSyntaxError(line_no, f"unknown section {section!r}")
            continue
        tokens = _tokenize(line, line_no)
        if tokens and tokens[0] == ("word", "scenario"):
            if section is not None or len(tokens) != 2 or tokens[1][0] != "str":
                raise ScenarioSyntaxError(line_no, "malformed scenario header")
            name = tokens[1][1]
            continue
        if section == "durations":
            if len(tokens) != 3 or tokens[0][0] != "str" or tokens[1][0] != "=":
                raise ScenarioSyntaxError(line_no, 'expected "matcher" = duration')
            matcher = tokens[0][1]
            if not matcher:
                raise ScenarioSyntaxError(line_no, "empty task matcher")
            if matcher in seen_matchers:
                raise ScenarioSyntaxError(line_no, f"duplicate matcher {matcher!r}")
            seen_matchers.add(matcher)
            try:
                duration = Duration.parse(tokens[2][1])
            except ValueError as exc:
                raise ScenarioSyntaxError(line_no, str(exc)) from None
            durations.append((matcher, duration))
        elif section == "probabilities":
            ref: FlowRef | PairRef
            if len(tokens) == 5 and tokens[1][0] == "/" and tokens[3][0] == "=":
                if tokens[0][0] != "str" or tokens[2][0] != "str":
                    raise ScenarioSyntaxError(line_no, "labels must be quoted")
                ref = PairRef(tokens[0][1], tokens[2][1])
            elif len(tokens) == 3 and tokens[1][0] == "=":
                ref = FlowRef(tokens[0][1])
            else:
                raise ScenarioSyntaxError(
                    line_no, 'expected "gateway" / "condition" = p, or flow_id = p')
            if not (ref.flow_id if isinstance(ref, FlowRef) else ref.gateway_label):
                raise ScenarioSyntaxError(line_no, "empty flow reference")
            if ref in seen_refs:
                raise ScenarioSyntaxError(line_no, f"duplicate probability entry {ref}")
            seen_refs.add(ref)
            probabilities.append((ref, _parse_probability(tokens[-1][1], line_no)))
        else:
            raise ScenarioSyntaxError(line_no, "entry outside of any section")

    return Scenario(name, tuple(durations), tuple(probabilities))


def _glob_to_re(pattern: str) -> re.Pattern:
    parts = [re.escape(p) for p in pattern.split("*")]
    return re.compile(".*".join(parts))


@dataclass(frozen=True)
class BoundScenario:
    """A scenario resolved against one model: total duration and probability maps."""

    model: ProcessModel
    task_duration: dict[str, Duration]
    branch_probability: dict[tuple[str, str], Fraction]

    def path_probability(self, branch_choices) -> Fraction:
        p = Fraction(1)
        for gateway, flow in branch_choices:
            p *= self.branch_probability[(gateway, flow)]
        return p


def bind(scenario: Scenario, model: ProcessModel) -> BoundScenario:
    """Resolve matchers and probabilities to a total binding for ``model``.

    Exact matchers beat globs; a split with exactly one unresolved branch
    gets the complement. Raises MissingDurationError, MissingProbabilityError,
    AmbiguousMatchError or ProbabilitySumError.
    """
    exact = {matcher: d for matcher, d in scenario.durations if "*" not in matcher}
    globs = [(m, _glob_to_re(m), d) for m, d in scenario.durations if "*" in m]

    task_duration: dict[str, Duration] = {}
    missing: list[str] = []
    for node in model.nodes:
        if node.kind is not NodeKind.TASK:
            task_duration[node.id] = Duration(0)
            continue
        if node.label in exact:
            task_duration[node.id] = exact[node.label]
            continue
        hits = [(m, d) for m, rx, d in globs if rx.fullmatch(node.label)]
        values = {d.seconds for _, d in hits}
        if len(values) > 1:
            raise AmbiguousMatchError(
                f"task {node.label!r} matched by conflicting globs: "
                + "; ".join(f"{m!r} = {d}" for m, d in hits))
        if hits:
            task_duration[node.id] = hits[0][1]
        else:
            missing.append(node.label)
    if missing:
        raise MissingDurationError(missing)

    by_flow = {ref.flow_id: p for ref, p in scenario.probabilities
               if isinstance(ref, FlowRef)}
    by_pair = {(ref.gateway_label, ref.condition_label): p
               for ref, p in scenario.probabilities if isinstance(ref, PairRef)}

    branch_probability: dict[tuple[str, str], Fraction] = {}
    for node in model.nodes:
        if node.gateway is not GatewayKind.EXCLUSIVE or not model.is_split(node):
            continue
        resolved: dict[str, Fraction] = {}
        open_flows: list[str] = []
        for flow in model.outgoing[node.id]:
            if flow.id in by_flow:
                resolved[flow.id] = by_flow[flow.id]
            elif (node.label, flow.condition_label) in by_pair:
                resolved[flow.id] = by_pair[(node.label, flow.condition_label)]
            else:
                open_flows.append(flow.id)
        total = sum(resolved.values(), Fraction(0))
        if len(open_flows) == 1:
            if total > 1:
                raise ProbabilitySumError(
                    f"split {node.id!r}: explicit probabilities sum to {float(total)}, "
                    "leaving no room for the open branch")
            resolved[open_flows[0]] = 1 - total
        elif open_flows:
            raise MissingProbabilityError(
                f"split {node.id!r}: no probability for flows {open_flows}")
        elif abs(total - 1) > SUM_TOLERANCE:
            raise ProbabilitySumError(
                f"split {node.id!r}: probabilities sum to {float(total)}, expected 1")
        for flow_id, p in resolved.items():
            branch_probability[(node.id, flow_id)] = p

    return BoundScenario(model, task_duration, branch_probability)
