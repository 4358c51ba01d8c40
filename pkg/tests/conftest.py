import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from osnsim.events import Event, Platform


def make_event(event_id, ts, actor, action="tweet", content="c1",
               platform=Platform.TWITTER, message=None, parent=None):
    return Event(event_id=str(event_id), timestamp=ts, actor=actor, action=action,
                 content=content, platform=platform, message=message, parent=parent)
