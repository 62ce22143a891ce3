"""
Segment list (JSONL) input and JSON report output.

One segment per line::

    {"session_id": "s1", "speaker": "A", "words": "a b", "start_time": 0.0, "end_time": 1.2}

``session_id``, ``speaker`` and ``words`` are required; unknown fields are
ignored. In hypothesis files ``speaker`` names the output channel.
"""
from __future__ import annotations

import json
import typing
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping, Optional, Union

from meval.core import (
    ErrorCounts,
    HypothesisSet,
    MevalError,
    ReferenceSet,
    Utterance,
    WerResult,
    format_rate,
    tokenize,
)

__all__ = [
    'ParseError',
    'SegmentRecord',
    'Session',
    'Report',
    'REPORT_SCHEMA',
    'parse_seglst',
    'dump_seglst',
    'group_sessions',
    'result_to_json',
    'write_report',
]

REPORT_SCHEMA = 'meval-report/1'
REQUIRED_FIELDS = ('session_id', 'speaker', 'words')


class ParseError(MevalError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class SegmentRecord:
    session_id: str
    speaker: str
    words: str
    start_time: Optional[float] = None
    end_time: Optional[float] = None
    source_index: int = 0

    def __post_init__(self):
        if not self.session_id or not self.speaker:
            raise ValueError('session_id and speaker must be non-empty')
        for name in ('start_time', 'end_time'):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f'{name} must be non-negative')
        if (self.start_time is not None and self.end_time is not None
                and self.end_time < self.start_time):
            raise ValueError('end_time must not be smaller than start_time')

    def to_json(self) -> dict:
        d = {'session_id': self.session_id, 'speaker': self.speaker, 'words': self.words}
        if self.start_time is not None:
            d['start_time'] = self.start_time
        if self.end_time is not None:
            d['end_time'] = self.end_time
        return d


def _optional_time(value, name, line):
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f'{name} must be a number, got {value!r}', line)
    return float(value)


def parse_seglst(fd: Union[IO[bytes], IO[str], Iterable]) -> list[SegmentRecord]:
    """
    Parses newline-delimited JSON segments. Blank lines are skipped;
    ``source_index`` is the 1-based line number.

    >>> parse_seglst([b'{"session_id": "s1", "speaker": "A", "words": "a b"}'])
    [SegmentRecord(session_id='s1', speaker='A', words='a b', start_time=None, end_time=None, source_index=1)]
    """
    records = []
    for line_number, line in enumerate(fd, start=1):
        if isinstance(line, bytes):
            try:
                line = line.decode('utf-8')
            except UnicodeDecodeError as e:
                raise ParseError(f'invalid UTF-8: {e}', line_number) from e
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(f'malformed JSON: {e}', line_number) from e
        if not isinstance(obj, dict):
            raise ParseError('expected a JSON object', line_number)
        for name in REQUIRED_FIELDS:
            if name not in obj:
                raise ParseError(f'missing required field {name!r}', line_number)
            if not isinstance(obj[name], str):
                raise ParseError(f'field {name!r} must be a string', line_number)
        try:
            records.append(SegmentRecord(
                obj['session_id'], obj['speaker'], obj['words'],
                _optional_time(obj.get('start_time'), 'start_time', line_number),
                _optional_time(obj.get('end_time'), 'end_time', line_number),
                line_number,
            ))
        except ValueError as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(str(e), line_number) from e
    return records


def dump_seglst(records: Iterable[SegmentRecord], fd: IO[str]):
    for r in records:
        fd.write(json.dumps(r.to_json(), sort_keys=True, ensure_ascii=False) + '\n')


class Session(typing.NamedTuple):
    session_id: str
    reference: ReferenceSet
    hypothesis: HypothesisSet


def _channel_words(records: list[SegmentRecord]) -> tuple[str, ...]:
    if all(r.start_time is not None for r in records):
        records = sorted(records, key=lambda r: (r.start_time, r.source_index))
    else:
        records = sorted(records, key=lambda r: r.source_index)
    return tuple(w for r in records for w in tokenize(r.words))


def group_sessions(
        references: Iterable[SegmentRecord], hypotheses: Iterable[SegmentRecord]
) -> list[Session]:
    """
    Buckets segments by session. Speakers and channels are ordered by first
    appearance, sessions by id. A session without hypothesis segments gets
    one empty channel.
    """
    refs: dict[str, dict[str, list[Utterance]]] = {}
    hyps: dict[str, dict[str, list[SegmentRecord]]] = {}
    for r in references:
        refs.setdefault(r.session_id, {}).setdefault(r.speaker, []).append(
            Utterance(tokenize(r.words), r.start_time, r.source_index, r.speaker)
        )
    for r in hypotheses:
        hyps.setdefault(r.session_id, {}).setdefault(r.speaker, []).append(r)

    sessions = []
    for session_id in sorted(refs.keys() | hyps.keys()):
        channels = {
            label: _channel_words(records)
            for label, records in hyps.get(session_id, {}).items()
        } or {'': ()}
        sessions.append(Session(
            session_id,
            ReferenceSet(refs.get(session_id, {})),
            HypothesisSet(channels),
        ))
    return sessions


def counts_to_json(counts: ErrorCounts) -> dict:
    rate, decimal = format_rate(counts)
    return {
        'errors': counts.errors,
        'length': counts.ref_length,
        'substitutions': counts.substitutions,
        'insertions': counts.insertions,
        'deletions': counts.deletions,
        'correct': counts.correct,
        'rate': rate,
        'rate_decimal': decimal,
        'undefined': counts.ref_length == 0,
    }


def result_to_json(result: WerResult) -> dict:
    d = counts_to_json(result.counts)
    d['cost'] = result.cost
    d['assignment'] = result.assignment.to_json()
    return d


@dataclass(frozen=True)
class Report:
    per_session: Mapping[str, Mapping[str, WerResult]]
    metadata: Mapping[str, typing.Any] = field(default_factory=dict)

    def aggregate(self) -> dict[str, ErrorCounts]:
        """Counts pooled over sessions, per metric."""
        pooled = {}
        for results in self.per_session.values():
            for metric, result in results.items():
                pooled[metric] = pooled.get(metric, ErrorCounts()) + result.counts
        return pooled

    def to_json(self) -> dict:
        metrics = {m for results in self.per_session.values() for m in results}
        metrics |= set(self.metadata.get('metrics', ()))
        aggregate = self.aggregate()
        return {
            'schema': REPORT_SCHEMA,
            'metadata': dict(self.metadata),
            'aggregate': {
                m: counts_to_json(aggregate.get(m, ErrorCounts())) for m in metrics
            },
            'per_session': {
                session_id: {m: result_to_json(r) for m, r in results.items()}
                for session_id, results in self.per_session.items()
            },
        }


def write_report(report: Report) -> bytes:
    """Canonical JSON: sorted keys, exact integer counts, trailing newline."""
    return (json.dumps(report.to_json(), sort_keys=True, indent=2, ensure_ascii=False) + '\n').encode('utf-8')
