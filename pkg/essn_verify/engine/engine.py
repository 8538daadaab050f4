# Python Version: 3.x
"""This module has the online commit-time engine.

Reads and writes only record what they touch. A commit evaluates π and the exclusion bound from the immediate neighbours of the versions it touched (the read versions, and the chain tails it overwrites), decides once, and only then publishes metadata. Under a begin-ordered KTO a commit waits until every σ-smaller transaction has terminated, unless a read-only transaction can prove that nothing pending can lower its π to its bound.
"""

from logging import getLogger
from typing import *

from essn_verify.certifiers.models import Protocol
from essn_verify.engine.objects import *
from essn_verify.errors import InvariantViolation, ProtocolPrecondition, StallRequired
from essn_verify.history.type import INITIAL_TXN, KtoFlavor, RfPolicy, TxnId, TxnStatus
from essn_verify.stamp import NEG_INF, POS_INF, Stamp, finite

logger = getLogger(__name__)


class Engine:
    def __init__(self, config: EngineConfig = EngineConfig()) -> None:
        if config.kto_flavor == KtoFlavor.EXTERNAL:
            raise ProtocolPrecondition('the engine draws σ itself; an external KTO is offline only')
        if config.protocol == Protocol.SSI:
            raise ProtocolPrecondition('the engine implements the ESSN and SSN exclusion rules only')
        self.config = config
        self.txns: Dict[TxnId, TxnObject] = {}
        self.chains: Dict[str, List[VersionObject]] = {}  # committed versions, oldest first
        self.stalls = StallQueue()
        self.log: List[str] = []
        self.last_commit_accesses = 0
        self._deferred: List[TxnId] = []  # bypassed readers whose registration waits for σ-smaller transactions
        self._tick = 0
        self._kto_counter = 0

    def next_kto_scalar(self, txn: TxnId) -> Stamp:
        self._kto_counter += 1
        return finite(self._kto_counter, txn)

    def _next_tick(self) -> int:
        self._tick += 1
        return self._tick

    def _emit(self, op: str, txn: TxnId, outcome: str, key: Optional[str] = None, version: Optional[TxnId] = None) -> None:
        columns = [op, str(txn)]
        if key is not None:
            columns.append(key)
        if version is not None:
            columns.append(str(version))
        line = '{} -> {}'.format(' '.join(columns), outcome)
        logger.debug('%s', line)
        self.log.append(line)

    def _chain(self, key: str) -> List[VersionObject]:
        chain = self.chains.get(key)
        if chain is None:
            chain = self.chains[key] = [VersionObject(key=key, writer=INITIAL_TXN)]
        return chain

    def _tail(self, key: str) -> VersionObject:
        return self._chain(key)[-1]

    def _in_flight(self, txn: TxnId) -> TxnObject:
        t = self.txns.get(txn)
        if t is None:
            raise ProtocolPrecondition('t{} has not begun'.format(txn))
        if t.status != TxnStatus.IN_FLIGHT:
            raise ProtocolPrecondition('t{} is already {}'.format(txn, t.status.value))
        return t

    def _earlier_in_flight(self, t: TxnObject) -> List[TxnId]:
        assert t.sigma is not None
        return sorted(u.txn for u in self.txns.values() if u is not t and u.status == TxnStatus.IN_FLIGHT and u.sigma is not None and u.sigma < t.sigma)

    def begin(self, txn: TxnId, *, long: bool = False) -> TxnObject:
        if txn in self.txns or txn == INITIAL_TXN:
            raise ProtocolPrecondition('t{} has already begun'.format(txn))
        if long and self.config.priority_restart:
            for u in list(self.txns.values()):
                if u.status == TxnStatus.IN_FLIGHT and not u.long:
                    self.abort(u.txn, reason='restart')
        t = TxnObject(txn=txn, begin_tick=self._next_tick(), long=long)
        self.txns[txn] = t
        if self.config.kto_flavor == KtoFlavor.BEGIN:
            t.sigma = self.next_kto_scalar(txn)
            self._emit('begin', txn, 'sigma={}'.format(t.sigma))
        else:
            self._emit('begin', txn, 'ok')
        return t

    def _choose_version(self, t: TxnObject, key: str) -> VersionObject:
        chain = self._chain(key)
        policy = self.config.rf_policy
        if policy == RfPolicy.AS_OF_READ_COMMIT:
            return chain[-1]
        if policy == RfPolicy.SNAPSHOT_AT_BEGIN:
            for v in reversed(chain):
                if v.commit_tick < t.begin_tick:
                    return v
            assert False, 'the base version is always visible'
        if policy == RfPolicy.NEAREST_BEGIN_KTO:
            candidates = [u for u in self.txns.values() if u is not t and u.begin_tick < t.begin_tick and u.status != TxnStatus.ABORTED and key in u.writes]
            if not candidates:
                return chain[0]
            nearest = max(candidates, key=lambda u: u.begin_tick)
            if nearest.status == TxnStatus.IN_FLIGHT:
                raise StallRequired(t.txn, key, [nearest.txn])
            return nearest.writes[key]
        assert False

    def read(self, txn: TxnId, key: str) -> VersionObject:
        """
        :raises StallRequired: when the version to read belongs to a writer whose outcome is still open
        """

        t = self._in_flight(txn)
        self._next_tick()
        if key in t.writes:
            self._emit('read', txn, 'own', key, txn)
            return t.writes[key]
        v = self._choose_version(t, key)
        if self.config.shortcut and v.sstamp != POS_INF:
            # the overwriter is committed, so its π is final
            t.sstamp = min(t.sstamp, v.sstamp)
            t.psstamp = max(t.psstamp, v.crepi)
            t.pstamp = max(t.pstamp, v.cstamp)
            if self.config.protocol == Protocol.SSN:
                t.reads.append(v)
            self._emit('read', txn, 'shortcut', key, v.writer)
            return v
        t.reads.append(v)
        self._emit('read', txn, 'ok', key, v.writer)
        return v

    def write(self, txn: TxnId, key: str) -> VersionObject:
        t = self._in_flight(txn)
        self._next_tick()
        v = VersionObject(key=key, writer=txn, prev=self._tail(key))
        t.writes[key] = v
        self._emit('write', txn, 'staged', key, txn)
        return v

    def abort(self, txn: TxnId, *, reason: str = 'user') -> None:
        t = self._in_flight(txn)
        self._next_tick()
        t.status = TxnStatus.ABORTED
        t.reason = reason
        t.writes.clear()
        self.stalls.discard(txn)
        self._emit('abort', txn, reason)

    def _bound(self, xi: Stamp, eta: Stamp) -> Stamp:
        return xi if self.config.protocol == Protocol.ESSN else eta

    def _read_stamps(self, t: TxnObject) -> Tuple[Stamp, Stamp, Stamp]:
        assert t.sigma is not None
        pi = min(t.sigma, t.sstamp)
        xi, eta = t.psstamp, t.pstamp
        for u in t.reads:
            self.last_commit_accesses += 1
            pi = min(pi, u.sstamp)
            xi = max(xi, u.crepi)
            eta = max(eta, u.cstamp)
        return pi, xi, eta

    def stall_bypass(self, t: TxnObject) -> bool:
        """stall_bypass tells whether a stalled read-only transaction may commit now.

        Its bound can no longer grow, and π(t) can only drop to the smallest σ of a pending σ-smaller transaction or the smallest π of a committed σ-smaller writer. Read-only transactions have no back in-edges, so they never lower anyone's π.
        """

        if not t.is_read_only() or t.sigma is None:
            return False
        saved = self.last_commit_accesses
        pi, xi, eta = self._read_stamps(t)
        self.last_commit_accesses = saved
        floor = pi
        for u in self.txns.values():
            if u is t or u.sigma is None or not u.sigma < t.sigma:
                continue
            if u.status == TxnStatus.IN_FLIGHT:
                floor = min(floor, u.sigma)
            elif u.status == TxnStatus.COMMITTED and not u.is_read_only():
                floor = min(floor, u.sstamp)
        return self._bound(xi, eta) < floor

    def _register_reader(self, u: VersionObject, pi: Stamp, sigma: Stamp) -> None:
        tail = self._tail(u.key)
        for v in (u, tail) if tail is not u else (u, ):
            v.psstamp = max(v.psstamp, pi)
            v.pstamp = max(v.pstamp, sigma)
        self.last_commit_accesses += 2

    def _flush_deferred(self) -> None:
        for txn in list(self._deferred):
            t = self.txns[txn]
            if self._earlier_in_flight(t):
                continue
            assert t.sigma is not None
            for u in t.reads:
                t.sstamp = min(t.sstamp, u.sstamp)
            for u in t.reads:
                self._register_reader(u, t.sstamp, t.sigma)
            self._deferred.remove(txn)
            self._emit('flush', txn, 'pi={}'.format(t.sstamp))

    def commit(self, txn: TxnId) -> Outcome:
        """commit certifies and finalizes t, or reports that it has to wait.

        Evaluation: π = min(σ, u.sstamp over read versions); ξ = max(u.crepi over read versions, prev.crepi and prev.psstamp over overwritten tails); η likewise with σ stamps. The transaction aborts iff π <= ξ (π <= η for SSN). Finalization publishes prev.sstamp, v.crepi and the reader registrations.
        """

        t = self._in_flight(txn)
        if t.sigma is None:
            t.sigma = self.next_kto_scalar(txn)
        if self.config.kto_flavor == KtoFlavor.BEGIN:
            blockers = self._earlier_in_flight(t)
            if blockers:
                if self.config.stall_bypass and self.stall_bypass(t):
                    return self._commit_bypassed(t)
                if txn not in self.stalls:
                    self._emit('commit', txn, 'stalled on {}'.format(','.join(map(str, blockers))))
                self.stalls.push(t, blockers)
                return Stalled(txn=txn, blockers=tuple(blockers))
        self.stalls.discard(txn)
        self._flush_deferred()
        tick = self._next_tick()

        self.last_commit_accesses = 0
        pi, xi, eta = self._read_stamps(t)
        for key, v in t.writes.items():
            prev = self._tail(key)
            v.prev = prev
            self.last_commit_accesses += 1
            xi = max(xi, prev.crepi, prev.psstamp)
            eta = max(eta, prev.cstamp, prev.pstamp)
        bound = self._bound(xi, eta)
        if pi <= bound:
            t.status = TxnStatus.ABORTED
            t.reason = 'exclusion'
            t.writes.clear()
            self._emit('commit', txn, 'aborted pi={} bound={}'.format(pi, bound))
            return Aborted(txn=txn, pi=pi, bound=bound)

        t.status = TxnStatus.COMMITTED
        t.sstamp, t.psstamp, t.pstamp = pi, xi, eta
        for key, v in t.writes.items():
            prev = v.prev
            assert prev is not None
            prev.sstamp = pi
            v.crepi = pi
            v.cstamp = t.sigma
            v.psstamp = prev.psstamp
            v.pstamp = prev.pstamp
            v.commit_tick = tick
            self._chain(key).append(v)
            self.last_commit_accesses += 2
        for u in t.reads:
            self._register_reader(u, pi, t.sigma)
        self._emit('commit', txn, 'committed pi={} bound={}'.format(pi, bound))
        return Committed(txn=txn, pi=pi, bound=bound)

    def _commit_bypassed(self, t: TxnObject) -> Committed:
        self._next_tick()
        pi, xi, eta = self._read_stamps(t)
        bound = self._bound(xi, eta)
        t.status = TxnStatus.COMMITTED
        t.bypassed = True
        t.sstamp, t.psstamp, t.pstamp = pi, xi, eta
        self.stalls.discard(t.txn)
        self._deferred.append(t.txn)
        self._emit('commit', t.txn, 'bypassed pi>={} bound={}'.format(pi, bound))
        return Committed(txn=t.txn, pi=pi, bound=bound, bypassed=True)

    def drain(self) -> List[Outcome]:
        """drain retries the stalled commits in σ order until none of them makes progress.
        """

        outcomes: List[Outcome] = []
        progress = True
        while progress:
            progress = False
            self._flush_deferred()
            for txn in self.stalls.pending():
                if self.txns[txn].status != TxnStatus.IN_FLIGHT:
                    self.stalls.discard(txn)
                    continue
                outcome = self.commit(txn)
                if not isinstance(outcome, Stalled):
                    outcomes.append(outcome)
                    progress = True
                    break
        return outcomes

    def sigma_map(self) -> Dict[TxnId, Stamp]:
        sigma = {INITIAL_TXN: NEG_INF}
        for t in self.txns.values():
            if t.sigma is not None:
                sigma[t.txn] = t.sigma
        return sigma

    def check_chain_monotonicity(self) -> None:
        """
        :raises InvariantViolation: when π does not strictly increase along a version chain
        """

        for key, chain in sorted(self.chains.items()):
            for older, newer in zip(chain, chain[1:]):
                if not older.crepi < newer.crepi:
                    raise InvariantViolation('pi is not increasing on {}: t{} ({}) then t{} ({})'.format(key, older.writer, older.crepi, newer.writer, newer.crepi))
