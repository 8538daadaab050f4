# Python Version: 3.x
"""This module loads the golden schedules shipped in essn_verify_resources/corpus.yml.
"""

import functools
import importlib.resources
from logging import getLogger
from typing import *

import yaml

from essn_verify.certifiers.models import Protocol
from essn_verify.errors import EssnVerifyError
from essn_verify.history.parse import parse_trace
from essn_verify.history.type import InputTrace, KtoFlavor, RfPolicy, TxnId

logger = getLogger(__name__)

_RESOURCE_PACKAGE = 'essn_verify_resources'
_CORPUS_PATH = 'corpus.yml'


class CorpusEntry(NamedTuple):
    name: str
    text: str
    kto_flavor: KtoFlavor
    rf_policy: RfPolicy
    abort_targets: bool
    aborts: Dict[Protocol, FrozenSet[TxnId]]
    note: str = ''

    def trace(self) -> InputTrace:
        return parse_trace(self.text)


def _entry(name: str, data: Dict[str, Any]) -> CorpusEntry:
    return CorpusEntry(
        name=name,
        text=data['trace'],
        kto_flavor=KtoFlavor(data.get('kto', 'commit')),
        rf_policy=RfPolicy(data.get('rf_policy', 'as_of_read_commit')),
        abort_targets=bool(data.get('abort_targets', False)),
        aborts={Protocol(protocol): frozenset(txns) for protocol, txns in data.get('aborts', {}).items()},
        note=data.get('note', ''),
    )


@functools.lru_cache(maxsize=None)
def load_corpus() -> Dict[str, CorpusEntry]:
    data = yaml.safe_load(importlib.resources.read_text(_RESOURCE_PACKAGE, _CORPUS_PATH))
    return {name: _entry(name, item) for name, item in data.items()}


def get_entry(name: str) -> CorpusEntry:
    corpus = load_corpus()
    if name not in corpus:
        raise EssnVerifyError('unknown corpus entry {!r}; available: {}'.format(name, ', '.join(sorted(corpus))))
    return corpus[name]
