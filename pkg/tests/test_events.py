import json

import pytest

from osnsim.errors import UnknownAction
from osnsim.events import (
    ONTOLOGY,
    PLATFORM_ACTIONS,
    Event,
    OntologyAction,
    Platform,
    dumps_event,
    loads_event,
    map_platform_action,
    validate_event,
)

from conftest import make_event


# The full mapping table is pinned: any change must be deliberate.
PINNED_TABLE = {
    ("github", "create"): "create",
    ("github", "push"): "post",
    ("github", "pull_request"): "post",
    ("github", "issues"): "post",
    ("github", "commit_comment"): "post",
    ("github", "issue_comment"): "post",
    ("github", "fork"): "post",
    ("github", "delete"): "post",
    ("github", "watch"): "vote",
    ("twitter", "tweet"): "create",
    ("twitter", "retweet"): "post",
    ("twitter", "quote"): "post",
    ("twitter", "reply"): "post",
    ("reddit", "post"): "create",
    ("reddit", "comment"): "post",
}


def test_mapping_table_pinned_exhaustively():
    flattened = {
        (platform.value, action): kind.value
        for platform, table in ONTOLOGY.items()
        for action, kind in table.items()
    }
    assert flattened == PINNED_TABLE


def test_mapping_is_total_over_every_platform_event_set():
    for platform, actions in PLATFORM_ACTIONS.items():
        for action in actions:
            kind = map_platform_action(action, platform)
            assert isinstance(kind, OntologyAction)


def test_mapping_examples():
    assert map_platform_action("fork", Platform.GITHUB) == OntologyAction.POST
    assert map_platform_action("watch", Platform.GITHUB) == OntologyAction.VOTE
    assert map_platform_action("tweet", Platform.TWITTER) == OntologyAction.CREATE


def test_mapping_unknown_pair_raises():
    with pytest.raises(UnknownAction):
        map_platform_action("retweet", Platform.GITHUB)


def test_validate_ok_event():
    e = make_event("e1", 100, "alice", action="push", platform=Platform.GITHUB)
    assert validate_event(e).ok


def test_validate_unknown_action():
    e = make_event("e1", 100, "alice", action="retweet", platform=Platform.GITHUB)
    result = validate_event(e)
    assert not result.ok
    assert "unknown_action" in result.violations


def test_validate_parent_ordering():
    parent = make_event("p", 200, "alice")
    child = make_event("c", 100, "bob", parent="p")
    result = validate_event(child, known={"p": parent.timestamp})
    assert "parent_ordering" in result.violations
    ok_child = make_event("c2", 300, "bob", parent="p")
    assert validate_event(ok_child, known={"p": parent.timestamp}).ok


def test_validate_negative_timestamp():
    e = make_event("e1", -5, "alice")
    assert "negative_timestamp" in validate_event(e).violations


def test_serialization_sorted_keys_and_roundtrip():
    e = make_event("e1", 100, "alice", action="push", platform=Platform.GITHUB,
                   message="m9", parent="p0")
    line = dumps_event(e)
    keys = list(json.loads(line).keys())
    assert keys == sorted(keys)
    assert loads_event(line) == e
    # serialize(parse(line)) is byte-identical
    assert dumps_event(loads_event(line)) == line


def test_optional_fields_omitted():
    e = make_event("e1", 100, "alice")
    obj = json.loads(dumps_event(e))
    assert "message" not in obj and "parent" not in obj
