"""Cross-platform event ontology and the canonical event record.

Every platform exposes its own event vocabulary (pushes, retweets,
comments, ...) but all of them reduce to four fundamental activity kinds
(create / post / vote / follow) over four entity roles (actor / content /
action / space).  This module owns that mapping plus the wire format used
by every other module: JSON-lines, one event per line, keys emitted in
lexicographic order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Optional

from .errors import UnknownAction


class Platform(str, Enum):
    GITHUB = "github"
    TWITTER = "twitter"
    REDDIT = "reddit"


class OntologyAction(str, Enum):
    CREATE = "create"
    POST = "post"
    VOTE = "vote"
    FOLLOW = "follow"


class EntityRole(str, Enum):
    ACTOR = "actor"
    CONTENT = "content"
    ACTION = "action"
    SPACE = "space"


@dataclass(frozen=True, slots=True)
class Entity:
    """An identified participant in the environment; role is fixed at construction."""

    role: EntityRole
    id: str


# Ontology mapping table, version 1.  One versioned constant so tests can
# pin the entire table; bump ONTOLOGY_VERSION on any change.
ONTOLOGY_VERSION = 1

ONTOLOGY: dict[Platform, dict[str, OntologyAction]] = {
    Platform.GITHUB: {
        "create": OntologyAction.CREATE,
        "push": OntologyAction.POST,
        "pull_request": OntologyAction.POST,
        "issues": OntologyAction.POST,
        "commit_comment": OntologyAction.POST,
        "issue_comment": OntologyAction.POST,
        "fork": OntologyAction.POST,
        "delete": OntologyAction.POST,
        "watch": OntologyAction.VOTE,
    },
    Platform.TWITTER: {
        "tweet": OntologyAction.CREATE,
        "retweet": OntologyAction.POST,
        "quote": OntologyAction.POST,
        "reply": OntologyAction.POST,
    },
    Platform.REDDIT: {
        "post": OntologyAction.CREATE,
        "comment": OntologyAction.POST,
    },
}

#: Valid wire-format actions per platform.
PLATFORM_ACTIONS: dict[Platform, frozenset[str]] = {
    platform: frozenset(table) for platform, table in ONTOLOGY.items()
}


def map_platform_action(action: str, platform: Platform) -> OntologyAction:
    """Map a platform-specific action name onto its ontology kind.

    Total and deterministic over each platform's event set; raises
    UnknownAction for any pair outside it.
    """
    platform = Platform(platform)
    try:
        return ONTOLOGY[platform][action]
    except KeyError:
        raise UnknownAction(f"{action!r} is not a {platform.value} event") from None


@dataclass(frozen=True, slots=True)
class Event:
    """One timestamped platform action by an actor on a content target.

    The universal record of both ground truth and simulation output.
    ``content`` identifies the conversation / repository / subreddit /
    root tweet; ``message`` is an opaque message id when the platform has
    one; ``parent`` links replies and shares to an earlier event.
    """

    event_id: str
    timestamp: int
    actor: str
    action: str
    content: str
    platform: Platform
    message: Optional[str] = None
    parent: Optional[str] = None

    def to_obj(self) -> dict:
        obj = {
            "id": self.event_id,
            "ts": self.timestamp,
            "actor": self.actor,
            "action": self.action,
            "content": self.content,
            "platform": self.platform.value,
        }
        if self.message is not None:
            obj["message"] = self.message
        if self.parent is not None:
            obj["parent"] = self.parent
        return obj


EventLog = list


_REQUIRED_FIELDS = ("id", "ts", "actor", "action", "content", "platform")


def event_from_obj(obj: Mapping) -> Event:
    """Build an Event from a decoded JSON object; raises ValueError on bad shape."""
    missing = [k for k in _REQUIRED_FIELDS if k not in obj]
    if missing:
        raise ValueError(f"missing fields: {', '.join(missing)}")
    ts = obj["ts"]
    if not isinstance(ts, int) or isinstance(ts, bool):
        raise ValueError("ts must be an integer")
    try:
        platform = Platform(obj["platform"])
    except ValueError:
        raise ValueError(f"unknown platform {obj['platform']!r}") from None
    return Event(
        event_id=str(obj["id"]),
        timestamp=ts,
        actor=str(obj["actor"]),
        action=str(obj["action"]),
        content=str(obj["content"]),
        platform=platform,
        message=None if obj.get("message") is None else str(obj["message"]),
        parent=None if obj.get("parent") is None else str(obj["parent"]),
    )


def dumps_event(event: Event) -> str:
    """Serialize one event: compact JSON, keys in lexicographic order."""
    return json.dumps(event.to_obj(), sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def loads_event(line: str) -> Event:
    return event_from_obj(json.loads(line))


def write_events(path, events: Iterable[Event]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for event in events:
            fh.write(dumps_event(event))
            fh.write("\n")


# -- validation ---------------------------------------------------------

VIOLATION_UNKNOWN_ACTION = "unknown_action"
VIOLATION_NEGATIVE_TIMESTAMP = "negative_timestamp"
VIOLATION_PARENT_ORDERING = "parent_ordering"


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_event(event: Event, known: Optional[Mapping[str, int]] = None) -> ValidationResult:
    """Check an event against the record invariants; violations are data, not failures.

    ``known`` maps previously seen event ids to their timestamps; parent
    ordering can only be checked when the parent is resolvable through it.
    """
    violations = []
    if event.timestamp < 0:
        violations.append(VIOLATION_NEGATIVE_TIMESTAMP)
    if event.action not in PLATFORM_ACTIONS[event.platform]:
        violations.append(VIOLATION_UNKNOWN_ACTION)
    if event.parent is not None and known is not None and event.parent in known:
        if known[event.parent] > event.timestamp:
            violations.append(VIOLATION_PARENT_ORDERING)
    return ValidationResult(tuple(violations))
