# Python Version: 3.x
"""This module defines the exceptions raised by essn_verify.

Every error carries its payload as attributes so that callers (and the CLI) can report it without parsing messages.
"""

from typing import *


class EssnVerifyError(Exception):
    pass


class TraceSyntaxError(EssnVerifyError):
    def __init__(self, position: int, token: str) -> None:
        super().__init__('syntax error at token {}: {!r}'.format(position, token))
        self.position = position
        self.token = token


class TraceInvariantError(EssnVerifyError):
    def __init__(self, txn: int, rule: str) -> None:
        super().__init__('{}(t{})'.format(rule, txn))
        self.txn = txn
        self.rule = rule


class MissingTerminal(EssnVerifyError):
    def __init__(self, txn: int) -> None:
        super().__init__('t{} has neither commit nor abort'.format(txn))
        self.txn = txn


class UnknownVersion(EssnVerifyError):
    def __init__(self, key: str, writer: int) -> None:
        super().__init__('unknown version {}{}'.format(key, writer))
        self.key = key
        self.writer = writer


class ProtocolPrecondition(EssnVerifyError):
    pass


class NotSiHistory(EssnVerifyError):
    def __init__(self, reasons: Sequence[str]) -> None:
        super().__init__('not a snapshot-isolation history: {}'.format('; '.join(reasons)))
        self.reasons = list(reasons)


class AlignmentViolation(EssnVerifyError):
    def __init__(self, violations: Sequence[str]) -> None:
        super().__init__('version function / version order not aligned with the KTO: {}'.format('; '.join(violations)))
        self.violations = list(violations)


class InfeasibleParams(EssnVerifyError):
    pass


class EqualTimestamps(EssnVerifyError):
    pass


class TooManyTxns(EssnVerifyError):
    def __init__(self, count: int, limit: int) -> None:
        super().__init__('{} transactions exceed the enumeration limit of {}'.format(count, limit))
        self.count = count
        self.limit = limit


class StallRequired(EssnVerifyError):
    """StallRequired is raised by a read that must wait for the outcome of KTO-earlier writers.
    """
    def __init__(self, txn: int, key: str, blockers: Sequence[int]) -> None:
        super().__init__('t{} must wait on {} for {}'.format(txn, key, ', '.join('t{}'.format(b) for b in blockers)))
        self.txn = txn
        self.key = key
        self.blockers = tuple(blockers)


class InvariantViolation(EssnVerifyError):
    """InvariantViolation reports a broken internal invariant, e.g. a cycle among committed transactions.
    """
