# Python Version: 3.x
"""This module reads and writes the textual trace format.

A trace is a whitespace-separated sequence of tokens:

    b1 c1 a1            begin, commit and abort of t1
    r1(x?) r1(x)        an unresolved read of key x
    r1(x2)              a read of the version of x written by t2
    w1(x) w1(x1)        a write of x by t1

Keys consist of letters and underscores; digits always denote transaction ids.
"""

import re
from typing import *

from essn_verify.errors import TraceSyntaxError
from essn_verify.history.index import keys_of, validate_events
from essn_verify.history.type import *

_CONTROL_PATTERN = re.compile(r'([bca])(\d+)')
_ACCESS_PATTERN = re.compile(r'([rw])(\d+)\(([A-Za-z_]+)(\?|\d+)?\)')

_CONTROL_KINDS = {
    'b': EventKind.BEGIN,
    'c': EventKind.COMMIT,
    'a': EventKind.ABORT,
}


def _parse_token(position: int, token: str) -> Event:
    match = _CONTROL_PATTERN.fullmatch(token)
    if match:
        return Event(kind=_CONTROL_KINDS[match.group(1)], txn=int(match.group(2)))
    match = _ACCESS_PATTERN.fullmatch(token)
    if match:
        txn = int(match.group(2))
        key = match.group(3)
        subscript = match.group(4)
        version = int(subscript) if subscript is not None and subscript != '?' else None
        if match.group(1) == 'w':
            return Event(kind=EventKind.WRITE, txn=txn, key=key, version=txn if version is None else version)
        return Event(kind=EventKind.READ, txn=txn, key=key, version=version)
    raise TraceSyntaxError(position, token)


def parse_events(text: str) -> Tuple[Event, ...]:
    """
    :raises TraceSyntaxError:
    :raises TraceInvariantError:
    """

    events = []
    for position, token in enumerate(text.split()):
        events.append(_parse_token(position, token))
    validate_events(events)
    return tuple(events)


def parse_trace(text: str) -> InputTrace:
    return InputTrace(events=parse_events(text))


def parse_traces(text: str) -> List[InputTrace]:
    """parse_traces reads one trace per line. Empty lines and lines starting with `#` are skipped.
    """

    traces = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        traces.append(parse_trace(line))
    return traces


def parse_schedule(text: str) -> MVSchedule:
    """parse_schedule reads a trace whose reads are all resolved.
    """

    events = parse_events(text)
    for position, event in enumerate(events):
        if event.kind == EventKind.READ and event.version is None:
            raise TraceSyntaxError(position, format_event(event))
    return MVSchedule(events=events, keys=keys_of(events))


def format_event(event: Event) -> str:
    if event.kind in (EventKind.BEGIN, EventKind.COMMIT, EventKind.ABORT):
        return '{}{}'.format(event.kind.value, event.txn)
    subscript = '?' if event.version is None else str(event.version)
    return '{}{}({}{})'.format(event.kind.value, event.txn, event.key, subscript)


def format_events(events: Iterable[Event]) -> str:
    return ' '.join(map(format_event, events))


def format_trace(trace: Union[InputTrace, MVSchedule]) -> str:
    return format_events(trace.events)


def canonical(text: str) -> str:
    return format_trace(parse_trace(text))
