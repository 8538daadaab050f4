# Python Version: 3.x
from typing import *

from essn_verify.certifiers.models import CertResult, Protocol


def format_report(results: Sequence[CertResult]) -> str:
    """format_report prints one line per transaction in σ order: `t<id> <pi> <eta> <xi> <protocol>=<C|A> ...`.

    π and ξ are taken from the ESSN result and η from the SSN result when present, since with excision they depend on the protocol.
    """

    if not results:
        return ''
    by_protocol = {result.protocol: result for result in results}
    first = results[0]
    pi_xi_source = by_protocol.get(Protocol.ESSN, first)
    eta_source = by_protocol.get(Protocol.SSN, first)
    lines = []
    for txn in sorted(first.verdicts, key=lambda txn: first.verdicts[txn].sigma):
        row = pi_xi_source.verdicts[txn]
        columns = ['t{}'.format(txn), str(row.pi), str(eta_source.verdicts[txn].eta), str(row.xi)]
        for result in results:
            columns.append('{}={}'.format(result.protocol.value, result.verdict(txn).value))
        lines.append(' '.join(columns))
    return '\n'.join(lines)


def format_witness(result: CertResult) -> str:
    lines = []
    for txn in sorted(result.aborted(), key=lambda txn: result.verdicts[txn].sigma):
        witness = result.verdicts[txn].witness
        if witness is not None:
            lines.append('{} t{}: {}; {}'.format(result.protocol.value, txn, witness[0], witness[1]))
    return '\n'.join(lines)
