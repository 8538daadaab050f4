# Python Version: 3.x
"""This module generates traces: the mixed long/short workload of the abort-rate experiment, and small random snapshot-isolation histories.

Both generators take a numpy Generator, so a run is fully determined by its seed.
"""

import string
from logging import getLogger
from typing import *

import numpy as np

from essn_verify.history.resolve import resolve_reads
from essn_verify.history.type import *
from essn_verify.workload.type import WorkloadParams

logger = getLogger(__name__)

SPECIAL_KEY = 'z'  # read by t1; the write target of t2 when it overwrites t1's read
SUMMARY_KEY = 'summary'  # written by t2 otherwise; nobody else touches it
T1 = 1  # the read-only long
T2 = 2  # the long which writes once at its end
FIRST_SHORT = 3


def letter_key(index: int, width: int, *, prefix: str = 'k') -> str:
    """letter_key spells index in base 26 with a fixed number of letters, since digits in a key would read as a version.
    """

    letters = []
    for _ in range(width):
        index, digit = divmod(index, 26)
        letters.append(string.ascii_lowercase[digit])
    assert index == 0, 'width is too small'
    return prefix + ''.join(reversed(letters))


def key_names(n_keys: int) -> List[str]:
    """key_names returns the key domain of the mixed workload. The first key is the special one.

    The summary key which t2 writes when it does not pivot is not part of this domain, so no short or read ever touches it.
    """

    width = 1
    while 26**width < n_keys - 1:
        width += 1
    return [SPECIAL_KEY] + [letter_key(i, width) for i in range(n_keys - 1)]


def generate_mixed(params: WorkloadParams, rng: Optional[np.random.Generator] = None) -> InputTrace:
    """generate_mixed builds one schedule with two longs and params.n_shorts write-only shorts.

    Events are laid out on a continuous timeline and then sorted. Short i begins at i plus a jitter and lasts between 0.5 and 2.0 time units. Each long begins right after an anchor short from the first quartile, so the next short runs entirely inside it, spreads its reads until the shorts are over, and commits only after every short that wrote one of its keys has committed.

    t2 writes the special key with probability params.pivot_prob and otherwise the summary key, an extra key outside key_names(params.n_keys). The trace may therefore mention up to n_keys + 1 keys.

    :raises InfeasibleParams:
    """

    params.validate()
    if rng is None:
        rng = np.random.default_rng(params.seed)
    keys = key_names(params.n_keys)
    ordinary = keys[1:]
    timeline: List[Tuple[float, int, Event]] = []

    def emit(time: float, event: Event) -> None:
        timeline.append((time, len(timeline), event))

    # reads of the longs
    t1_reads = [ordinary[i] for i in rng.choice(len(ordinary), size=params.read_size, replace=False)]
    t1_reads.insert(int(rng.integers(0, len(t1_reads) + 1)), SPECIAL_KEY)
    t2_reads = [ordinary[i] for i in rng.choice(len(ordinary), size=params.read_size, replace=False)]
    t2_target = SPECIAL_KEY if rng.random() < params.pivot_prob else SUMMARY_KEY
    long_read = sorted(set(t1_reads + t2_reads) - {SPECIAL_KEY})
    cold = sorted(set(ordinary) - set(long_read))

    # shorts
    short_span: List[Tuple[float, float]] = []
    short_keys: List[List[str]] = []
    for i in range(params.n_shorts):
        txn = FIRST_SHORT + i
        begin = i + rng.uniform(0.0, 0.8)
        commit = begin + rng.uniform(0.5, 2.0)
        chosen: List[str] = []
        while len(chosen) < params.short_writes:
            hit = rng.random() < params.short_hit_prob
            pool = [key for key in (long_read if hit or not cold else cold) if key not in chosen]
            if not pool:
                pool = [key for key in ordinary if key not in chosen]
            chosen.append(pool[int(rng.integers(0, len(pool)))])
        emit(begin, Event(kind=EventKind.BEGIN, txn=txn))
        for time, key in zip(sorted(rng.uniform(begin, commit, size=len(chosen))), chosen):
            emit(time, Event(kind=EventKind.WRITE, txn=txn, key=key, version=txn))
        emit(commit, Event(kind=EventKind.COMMIT, txn=txn))
        short_span.append((begin, commit))
        short_keys.append(chosen)
    short_phase_end = max(commit for _, commit in short_span)

    # longs
    quartile = max(1, params.n_shorts // 4)
    for txn, reads in ((T1, t1_reads), (T2, t2_reads)):
        anchor = int(rng.integers(0, min(quartile, params.n_shorts - 1)))
        begin = short_span[anchor][0] + 0.01
        emit(begin, Event(kind=EventKind.BEGIN, txn=txn))
        times = sorted(rng.uniform(begin, short_phase_end, size=len(reads)))
        for time, key in zip(times, reads):
            emit(time, Event(kind=EventKind.READ, txn=txn, key=key))
        last = times[-1] if times else begin
        if txn == T2:
            last += 0.01
            emit(last, Event(kind=EventKind.WRITE, txn=txn, key=t2_target, version=txn))
        read_set = set(reads)
        relevant = [commit for (_, commit), written in zip(short_span, short_keys) if read_set & set(written)]
        commit = max([last, short_span[anchor + 1][1]] + relevant) + rng.uniform(0.01, 0.5)
        emit(commit, Event(kind=EventKind.COMMIT, txn=txn))

    events = tuple(event for _, _, event in sorted(timeline))
    logger.debug('generated %d events (t2 writes %s)', len(events), t2_target)
    return InputTrace(events=events)


def generate_si_history(rng: np.random.Generator, n_txns: int, n_keys: int, *, max_ops: int = 4) -> MVSchedule:
    """generate_si_history returns a random snapshot-isolation history.

    Transactions interleave at random. Reads see the snapshot at their begin, and a commit that would make two concurrent transactions both write a key turns into an abort (first committer wins).
    """

    keys = [letter_key(i, 1, prefix='') for i in range(n_keys)]
    plans: Dict[TxnId, List[Event]] = {}
    for txn in range(1, n_txns + 1):
        ops = [Event(kind=EventKind.BEGIN, txn=txn)]
        written: Set[str] = set()
        for _ in range(int(rng.integers(1, max_ops + 1))):
            key = keys[int(rng.integers(0, n_keys))]
            if rng.random() < 0.5 or key in written:
                ops.append(Event(kind=EventKind.READ, txn=txn, key=key))
            else:
                ops.append(Event(kind=EventKind.WRITE, txn=txn, key=key, version=txn))
                written.add(key)
        ops.append(Event(kind=EventKind.COMMIT, txn=txn))
        plans[txn] = ops

    events: List[Event] = []
    begin_at: Dict[TxnId, int] = {}
    committed_writes: List[Tuple[int, FrozenSet[str]]] = []  # (commit position, keys)
    while plans:
        txn = sorted(plans)[int(rng.integers(0, len(plans)))]
        event = plans[txn].pop(0)
        if not plans[txn]:
            del plans[txn]
        if event.kind == EventKind.BEGIN:
            begin_at[txn] = len(events)
        elif event.kind == EventKind.COMMIT:
            mine = frozenset(e.key for e in events if e.txn == txn and e.kind == EventKind.WRITE and e.key is not None)
            if any(position > begin_at[txn] and mine & others for position, others in committed_writes):
                event = event._replace(kind=EventKind.ABORT)
            else:
                committed_writes.append((len(events), mine))
        events.append(event)
    return resolve_reads(InputTrace(events=tuple(events)), RfPolicy.SNAPSHOT_AT_BEGIN)
