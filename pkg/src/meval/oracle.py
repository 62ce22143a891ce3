"""
Brute-force reference implementations. They enumerate every candidate
solution and are exponential by design; use them to audit the dynamic
programs on small inputs.
"""
from __future__ import annotations

import functools
import itertools
import math
import time
from typing import Optional

from meval.core import (
    DEFAULT_COSTS,
    Assignment,
    CostConfig,
    Decision,
    EnumerationLimitExceeded,
    HypothesisSet,
    ReferenceSet,
)
from meval.levenshtein import distance
from meval.matchers import merge_references

__all__ = [
    'DEFAULT_ENUMERATION_LIMIT',
    'brute_force_orc',
    'brute_force_mimo',
    'brute_force_cp',
    'count_interleavings',
]

DEFAULT_ENUMERATION_LIMIT = 2 ** 20


def _check_limit(count, limit, what):
    if count > limit:
        raise EnumerationLimitExceeded(
            f'Enumeration limit exceeded: {count} {what}, limit is {limit}',
            size=count, limit=limit,
        )


class _Deadline:
    def __init__(self, seconds):
        self.end = None if seconds is None else time.monotonic() + seconds
        self.seconds = seconds

    def check(self):
        if self.end is not None and time.monotonic() > self.end:
            raise EnumerationLimitExceeded(
                f'Enumeration did not finish within {self.seconds} s',
                limit=self.seconds,
            )


def count_interleavings(lengths) -> int:
    """
    Number of merges of sequences with the given lengths that keep the
    order within each sequence.

    >>> count_interleavings([2, 2])
    6
    """
    return math.factorial(sum(lengths)) // math.prod(math.factorial(n) for n in lengths)


def _interleavings(lengths):
    """All sequences of speaker indices in which speaker k occurs lengths[k] times."""
    if sum(lengths) == 0:
        yield ()
        return
    for k, n in enumerate(lengths):
        if n > 0:
            rest = list(lengths)
            rest[k] -= 1
            for tail in _interleavings(rest):
                yield (k,) + tail


def _enumerate(orders, refset, hypset, costs, deadline):
    """
    Scores every (utterance order, channel assignment) pair. ``orders``
    yields sequences of (speaker, utterance index). Returns the first
    minimum in enumeration order.
    """
    channels = hypset.labels
    utterance_words = {
        (label, i): u.words
        for label, utts in refset.speakers.items() for i, u in enumerate(utts)
    }

    @functools.lru_cache(maxsize=None)
    def channel_cost(c, keys):
        ref = [w for key in keys for w in utterance_words[key]]
        return distance(ref, hypset.channels[channels[c]], costs)

    best, best_decisions = None, None
    checked = 0
    for order in orders:
        for choice in itertools.product(range(len(channels)), repeat=len(order)):
            checked += 1
            if checked % 4096 == 0:
                deadline.check()
            per_channel = [[] for _ in channels]
            for key, c in zip(order, choice):
                per_channel[c].append(key)
            cost = sum(channel_cost(c, tuple(keys)) for c, keys in enumerate(per_channel))
            if best is None or cost < best:
                best = cost
                best_decisions = tuple(
                    Decision(speaker, i, channels[c]) for (speaker, i), c in zip(order, choice)
                )
    return best, Assignment(best_decisions)


def brute_force_orc(
        refset: ReferenceSet,
        hypset: HypothesisSet,
        costs: CostConfig = DEFAULT_COSTS,
        limit: int = DEFAULT_ENUMERATION_LIMIT,
        time_limit: Optional[float] = None,
) -> tuple[int, Assignment]:
    """
    Tries all C^U channel assignments of the utterances merged by begin
    time.
    """
    merged = merge_references(refset)
    U = sum(len(u) for u in merged.speakers.values())
    _check_limit(hypset.C ** U, limit, 'channel assignments')
    origin = {
        u.source_index: (label, i)
        for label, utts in refset.speakers.items() for i, u in enumerate(utts)
    }
    order = tuple(origin[u.source_index] for utts in merged.speakers.values() for u in utts)
    return _enumerate([order], refset, hypset, costs, _Deadline(time_limit))


def brute_force_mimo(
        refset: ReferenceSet,
        hypset: HypothesisSet,
        costs: CostConfig = DEFAULT_COSTS,
        limit: int = DEFAULT_ENUMERATION_LIMIT,
        time_limit: Optional[float] = None,
) -> tuple[int, Assignment]:
    """
    Tries every interleaving of the speakers' utterance sequences combined
    with every channel assignment.
    """
    labels = refset.labels
    lengths = [len(refset.speakers[label]) for label in labels]
    U = sum(lengths)
    _check_limit(count_interleavings(lengths) * hypset.C ** U, limit, 'candidate assignments')

    def orders():
        for interleaving in _interleavings(lengths):
            progress = [0] * len(labels)
            order = []
            for k in interleaving:
                order.append((labels[k], progress[k]))
                progress[k] += 1
            yield tuple(order)

    return _enumerate(orders(), refset, hypset, costs, _Deadline(time_limit))


def brute_force_cp(
        refset: ReferenceSet,
        hypset: HypothesisSet,
        costs: CostConfig = DEFAULT_COSTS,
        limit: int = DEFAULT_ENUMERATION_LIMIT,
) -> tuple[int, tuple[tuple[Optional[str], Optional[str]], ...]]:
    """
    Tries every bijection between speakers and channels after padding the
    smaller side with empty streams (``None``). Returns the cost and the
    (speaker, channel) pairs of the first optimum.
    """
    n = max(refset.K, hypset.C)
    _check_limit(math.factorial(n), limit, 'permutations')
    speakers = list(refset.labels) + [None] * (n - refset.K)
    channels = list(hypset.labels) + [None] * (n - hypset.C)
    refs = [refset.words(s) if s is not None else () for s in speakers]
    hyps = [hypset.channels[c] if c is not None else () for c in channels]

    best, best_pairs = None, None
    for perm in itertools.permutations(range(n)):
        cost = sum(distance(refs[i], hyps[j], costs) for i, j in enumerate(perm))
        if best is None or cost < best:
            best = cost
            best_pairs = tuple((speakers[i], channels[j]) for i, j in enumerate(perm))
    return best, best_pairs
