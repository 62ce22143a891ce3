"""
Domain types shared by all solvers: utterances, reference/hypothesis sets,
edit costs and error counts.
"""
from __future__ import annotations

import dataclasses
import fractions
import typing
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence

__all__ = [
    'MevalError',
    'BudgetExceeded',
    'EnumerationLimitExceeded',
    'MissingBeginTime',
    'Utterance',
    'ReferenceSet',
    'HypothesisSet',
    'CostConfig',
    'DEFAULT_COSTS',
    'ErrorCounts',
    'Decision',
    'Assignment',
    'WerResult',
    'tokenize',
    'combine',
    'error_rate',
    'format_rate',
    'intern_words',
]


class MevalError(Exception):
    """Base class for all errors raised by this package."""


class BudgetExceeded(MevalError):
    """A solver would need more memory or states than it is allowed to use."""

    def __init__(self, message, size=None, limit=None):
        super().__init__(message)
        self.size = size
        self.limit = limit


class EnumerationLimitExceeded(BudgetExceeded):
    pass


class MissingBeginTime(MevalError, ValueError):
    pass


def tokenize(text: str) -> tuple[str, ...]:
    """
    >>> tokenize('a  b\\tc')
    ('a', 'b', 'c')
    >>> tokenize('')
    ()
    """
    return tuple(text.split())


def _check_words(words):
    for w in words:
        if not isinstance(w, str) or not w or w != w.strip() or len(w.split()) != 1:
            raise ValueError(f'Invalid word: {w!r}')


@dataclass(frozen=True)
class Utterance:
    words: tuple[str, ...]
    begin_time: Optional[float] = None
    source_index: int = 0
    speaker: Optional[str] = None  # original speaker label, kept through merging

    def __post_init__(self):
        if not isinstance(self.words, tuple):
            object.__setattr__(self, 'words', tuple(self.words))
        _check_words(self.words)
        if self.begin_time is not None and self.begin_time < 0:
            raise ValueError(f'Negative begin time: {self.begin_time}')


def _order_utterances(utterances: Sequence[Utterance]) -> tuple[Utterance, ...]:
    if utterances and all(u.begin_time is not None for u in utterances):
        return tuple(sorted(utterances, key=lambda u: (u.begin_time, u.source_index)))
    return tuple(sorted(utterances, key=lambda u: u.source_index))


@dataclass(frozen=True)
class ReferenceSet:
    """
    Reference utterances of one session, grouped by speaker.

    The utterances of each speaker are ordered by begin time if every
    utterance of that speaker has one, otherwise by source index.
    """
    speakers: Mapping[str, tuple[Utterance, ...]]

    def __post_init__(self):
        speakers = {}
        for label, utterances in self.speakers.items():
            utterances = [
                u if u.speaker is not None else dataclasses.replace(u, speaker=label)
                for u in utterances
            ]
            speakers[label] = _order_utterances(utterances)
        indices = [u.source_index for utts in speakers.values() for u in utts]
        if len(set(indices)) != len(indices):
            raise ValueError('source_index must be unique within a session')
        object.__setattr__(self, 'speakers', MappingProxyType(speakers))

    def __reduce__(self):
        return type(self), (dict(self.speakers),)

    @property
    def K(self) -> int:
        return len(self.speakers)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.speakers)

    @property
    def num_words(self) -> int:
        return sum(len(u.words) for utts in self.speakers.values() for u in utts)

    def words(self, label) -> tuple[str, ...]:
        """All words of one speaker, concatenated in utterance order."""
        return tuple(w for u in self.speakers[label] for w in u.words)

    @classmethod
    def from_words(
            cls,
            speakers: Mapping[str, Sequence[typing.Union[str, Sequence[str]]]],
            begin_times: Optional[Mapping[str, Sequence[float]]] = None,
    ) -> 'ReferenceSet':
        """
        Convenience constructor. Each utterance is either a string that is
        tokenized or a sequence of words. Source indices are assigned in
        iteration order.

        >>> r = ReferenceSet.from_words({'A': ['a b', 'c'], 'B': [['d']]})
        >>> r.K, r.words('A'), r.num_words
        (2, ('a', 'b', 'c'), 4)
        """
        index = 0
        grouped = {}
        for label, utterances in speakers.items():
            grouped[label] = []
            for i, utt in enumerate(utterances):
                words = tokenize(utt) if isinstance(utt, str) else tuple(utt)
                begin = begin_times[label][i] if begin_times else None
                grouped[label].append(Utterance(words, begin, index, label))
                index += 1
        return cls(grouped)


@dataclass(frozen=True)
class HypothesisSet:
    """Word streams of the output channels of one session."""
    channels: Mapping[str, tuple[str, ...]]

    def __post_init__(self):
        channels = {}
        for label, words in self.channels.items():
            words = tuple(words)
            _check_words(words)
            channels[label] = words
        object.__setattr__(self, 'channels', MappingProxyType(channels))

    def __reduce__(self):
        return type(self), (dict(self.channels),)

    @property
    def C(self) -> int:
        return len(self.channels)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.channels)

    @property
    def num_words(self) -> int:
        return sum(len(w) for w in self.channels.values())

    @classmethod
    def from_words(cls, channels: Mapping[str, typing.Union[str, Sequence[str]]]) -> 'HypothesisSet':
        return cls({
            label: tokenize(words) if isinstance(words, str) else tuple(words)
            for label, words in channels.items()
        })


@dataclass(frozen=True)
class CostConfig:
    correct: int = 0
    substitution: int = 1
    insertion: int = 1
    deletion: int = 1

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f'{f.name} cost must be a non-negative integer, got {v!r}')
        if self.correct > self.substitution:
            raise ValueError(
                f'correct cost ({self.correct}) must not exceed substitution '
                f'cost ({self.substitution})'
            )

    @classmethod
    def parse(cls, text: str) -> 'CostConfig':
        """
        >>> CostConfig.parse('0,1,1,1') == CostConfig()
        True
        """
        parts = text.split(',')
        if len(parts) != 4:
            raise ValueError(f'Expected four comma separated costs, got {text!r}')
        return cls(*(int(p) for p in parts))

    def as_tuple(self) -> tuple[int, int, int, int]:
        return self.correct, self.substitution, self.insertion, self.deletion


DEFAULT_COSTS = CostConfig()


@dataclass(frozen=True)
class ErrorCounts:
    substitutions: int = 0
    insertions: int = 0
    deletions: int = 0
    correct: int = 0
    ref_length: int = 0

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f'{f.name} must be non-negative')
        if self.substitutions + self.deletions + self.correct != self.ref_length:
            raise ValueError(
                f'sub {self.substitutions} + del {self.deletions} + corr '
                f'{self.correct} != ref_length {self.ref_length}'
            )

    @property
    def errors(self) -> int:
        return self.substitutions + self.insertions + self.deletions

    @property
    def hyp_length(self) -> int:
        return self.substitutions + self.insertions + self.correct

    def __add__(self, other: 'ErrorCounts') -> 'ErrorCounts':
        if not isinstance(other, ErrorCounts):
            return NotImplemented
        return ErrorCounts(
            self.substitutions + other.substitutions,
            self.insertions + other.insertions,
            self.deletions + other.deletions,
            self.correct + other.correct,
            self.ref_length + other.ref_length,
        )

    def __radd__(self, other):
        # Support sum()
        if isinstance(other, int) and other == 0:
            return self
        return NotImplemented

    @property
    def rate(self) -> Optional[fractions.Fraction]:
        return error_rate(self)


def combine(a: ErrorCounts, b: ErrorCounts) -> ErrorCounts:
    return a + b


def error_rate(counts: ErrorCounts) -> Optional[fractions.Fraction]:
    """
    Errors divided by the number of reference words. ``None`` marks the
    undefined case of errors without any reference word.

    >>> error_rate(ErrorCounts(0, 2, 2, 0, 2))
    Fraction(2, 1)
    >>> error_rate(ErrorCounts()) == 0
    True
    >>> error_rate(ErrorCounts(insertions=3)) is None
    True
    """
    if counts.ref_length == 0:
        return fractions.Fraction(0) if counts.errors == 0 else None
    return fractions.Fraction(counts.errors, counts.ref_length)


def format_rate(counts: ErrorCounts) -> tuple[str, Optional[str]]:
    """
    Renders the rate as unreduced ``errors/length`` and as a fixed
    6-decimal string (``None`` if undefined).

    >>> format_rate(ErrorCounts(2, 0, 2, 4, 8))
    ('4/8', '0.500000')
    """
    rate = error_rate(counts)
    decimal = None if rate is None else f'{float(rate):.6f}'
    return f'{counts.errors}/{counts.ref_length}', decimal


class Decision(typing.NamedTuple):
    speaker: Optional[str]
    utterance: int  # index within the speaker's ordered utterances
    channel: Optional[str]  # None: matched to an empty dummy channel


@dataclass(frozen=True)
class Assignment:
    """
    Mapping of reference utterances to hypothesis channels, in the order in
    which they were consumed. ``pairs`` is only set for cpWER and lists the
    speaker-channel bijection (``None`` marks dummy padding).
    """
    decisions: tuple[Decision, ...] = ()
    pairs: Optional[tuple[tuple[Optional[str], Optional[str]], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, 'decisions', tuple(Decision(*d) for d in self.decisions))
        if self.pairs is not None:
            object.__setattr__(self, 'pairs', tuple(tuple(p) for p in self.pairs))

    def channel_streams(self, refset: ReferenceSet) -> dict[Optional[str], list[str]]:
        """Reference words concatenated per channel in decision order."""
        streams = {}
        for speaker, index, channel in self.decisions:
            streams.setdefault(channel, []).extend(refset.speakers[speaker][index].words)
        return streams

    def to_json(self):
        d = {'decisions': [list(d) for d in self.decisions]}
        if self.pairs is not None:
            d['pairs'] = [list(p) for p in self.pairs]
        return d


@dataclass(frozen=True)
class WerResult:
    counts: ErrorCounts
    assignment: Assignment = field(default_factory=Assignment)
    cost: Optional[int] = None  # DP cost under the cost config used

    @property
    def errors(self) -> int:
        return self.counts.errors

    @property
    def length(self) -> int:
        return self.counts.ref_length

    @property
    def rate(self) -> Optional[fractions.Fraction]:
        return error_rate(self.counts)


def intern_words(*streams: Iterable[str]) -> dict[str, int]:
    """
    Maps every word that occurs in ``streams`` to a non-negative integer.
    Negative symbols are reserved for out-of-band markers.

    >>> intern_words(['b', 'a'], ['a', 'c'])
    {'b': 0, 'a': 1, 'c': 2}
    """
    table = {}
    for stream in streams:
        for w in stream:
            if w not in table:
                table[w] = len(table)
    return table
