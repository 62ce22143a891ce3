"""
Multi-speaker WER solvers: MIMO WER, ORC WER and cpWER.

MIMO and ORC share one dynamic program. Reference utterances are atomic:
each one is matched as a whole against a contiguous piece of one hypothesis
channel, and the active (speaker, channel) pair may only change between
utterances. A lattice node is the vector of utterances consumed so far per
speaker. Every node stores a tensor with one axis per hypothesis channel
holding the cheapest cost of having consumed that many words on each
channel. Moving from one node to the next runs a Levenshtein block of the
next utterance of one speaker against one channel axis, while all other
channel positions are carried through unchanged.

ORC WER is the same program with all references merged into one stream
sorted by begin time, which makes the lattice a chain and the runtime
polynomial in the number of utterances.
"""
from __future__ import annotations

import itertools
import math
from typing import Optional, Sequence

import numpy as np
import scipy.optimize

from meval.core import (
    DEFAULT_COSTS,
    Assignment,
    BudgetExceeded,
    CostConfig,
    Decision,
    ErrorCounts,
    HypothesisSet,
    MissingBeginTime,
    ReferenceSet,
    WerResult,
    intern_words,
)
from meval.levenshtein import distance, distance_with_counts

__all__ = [
    'CHANGE_TOKEN',
    'DEFAULT_MEMORY_LIMIT',
    'build_reference_streams',
    'lattice_size',
    'mimo_distance',
    'mimo_wer',
    'merge_references',
    'orc_distance',
    'orc_wer',
    'pairwise_distances',
    'cp_wer',
    'assignment_cost',
]

DEFAULT_MEMORY_LIMIT = 2 * 1024 ** 3
MERGED_SPEAKER = '<merged>'


class _ChangeToken:
    """Out-of-band marker between reference utterances."""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return '*'

    def __reduce__(self):
        return _ChangeToken, ()


CHANGE_TOKEN = _ChangeToken()


def build_reference_streams(refset: ReferenceSet) -> list[tuple]:
    """
    One stream per speaker: a change token before every utterance followed
    by that utterance's words.

    >>> build_reference_streams(ReferenceSet.from_words({'A': ['a b', 'c']}))
    [(*, 'a', 'b', *, 'c')]
    """
    streams = []
    for utterances in refset.speakers.values():
        stream = []
        for utt in utterances:
            stream.append(CHANGE_TOKEN)
            stream.extend(utt.words)
        streams.append(tuple(stream))
    return streams


def lattice_size(utterance_counts: Sequence[int], hyp_lengths: Sequence[int]) -> int:
    """Number of cells of the constrained lattice, counting one layer per
    (active speaker, active channel) pair."""
    return (
        math.prod(u + 1 for u in utterance_counts)
        * max(len(utterance_counts), 1) * max(len(hyp_lengths), 1)
        * math.prod(m + 1 for m in hyp_lengths)
    )


def _cost_dtype(refset, hypset, costs):
    bound = (refset.num_words + hypset.num_words + 2) * (max(costs.as_tuple()) + 1)
    return np.int32 if bound < 2 ** 31 - 1 else np.int64


def _relax_insertions(row, ins_ramp):
    """row[..., h] = min_{j <= h} row[..., j] + (h - j) * insertion cost"""
    return np.minimum.accumulate(row - ins_ramp, axis=-1) + ins_ramp


class _Kernel:
    """Levenshtein blocks of one utterance along one channel axis."""

    def __init__(self, hyp_symbols, costs, dtype):
        self.hyp = hyp_symbols
        self.costs = costs
        self.dtype = dtype
        self.ramps = [np.arange(len(h) + 1, dtype=dtype) * costs.insertion for h in hyp_symbols]
        self._sub_cache = {}

    def substitution_costs(self, channel, symbol):
        key = channel, symbol
        if key not in self._sub_cache:
            self._sub_cache[key] = np.where(
                self.hyp[channel] == symbol, self.costs.correct, self.costs.substitution
            ).astype(self.dtype)
        return self._sub_cache[key]

    def rows(self, init, utterance, channel):
        """Yields the DP rows, ``init`` with the channel axis last."""
        ramp = self.ramps[channel]
        row = _relax_insertions(init, ramp)
        yield row
        for symbol in utterance:
            new = row + self.costs.deletion
            np.minimum(
                new[..., 1:],
                row[..., :-1] + self.substitution_costs(channel, symbol),
                out=new[..., 1:],
            )
            row = _relax_insertions(new, ramp)
            yield row

    def block(self, tensor, utterance, channel):
        init = np.ascontiguousarray(np.moveaxis(tensor, channel, -1))
        for row in self.rows(init, utterance, channel):
            pass
        return np.moveaxis(row, -1, channel)

    def start_position(self, line, utterance, channel, end):
        """
        For a 1-d slice ``line`` of the predecessor tensor along ``channel``,
        the hypothesis position where an optimal block ending at ``end``
        started.
        """
        c = self.costs
        rows = list(self.rows(line, utterance, channel))
        i, h = len(utterance), end
        while i > 0:
            value = rows[i][h]
            if h > 0 and value == rows[i - 1][h - 1] + self.substitution_costs(channel, utterance[i - 1])[h - 1]:
                i, h = i - 1, h - 1
            elif value == rows[i - 1][h] + c.deletion:
                i -= 1
            else:
                assert h > 0 and value == rows[i][h - 1] + c.insertion
                h -= 1
        # Insertions in front of the utterance
        while rows[0][h] != line[h]:
            h -= 1
        return h


def _solve(refset: ReferenceSet, hypset: HypothesisSet, costs: CostConfig, memory_limit: int):
    if hypset.C < 1:
        raise ValueError('At least one hypothesis channel is required')
    utterances = [refset.speakers[label] for label in refset.labels]
    channels = [hypset.channels[label] for label in hypset.labels]
    symbols = intern_words(
        *[u.words for utts in utterances for u in utts], *channels,
    )
    dtype = _cost_dtype(refset, hypset, costs)
    size = lattice_size([len(u) for u in utterances], [len(h) for h in channels])
    if size * np.dtype(dtype).itemsize > memory_limit:
        raise BudgetExceeded(
            f'Instance too large: the lattice has {size} cells '
            f'({size * np.dtype(dtype).itemsize} bytes), memory limit is '
            f'{memory_limit} bytes',
            size=size, limit=memory_limit,
        )

    ref_symbols = [
        [np.array([symbols[w] for w in u.words], dtype=np.int64) for u in utts]
        for utts in utterances
    ]
    hyp_symbols = [np.array([symbols[w] for w in h], dtype=np.int64) for h in channels]
    kernel = _Kernel(hyp_symbols, costs, dtype)

    K, C = len(utterances), len(channels)
    shape = tuple(len(h) + 1 for h in channels)
    start = np.zeros(shape, dtype=dtype)
    for c in range(C):
        start += np.arange(shape[c], dtype=dtype).reshape(
            [-1 if i == c else 1 for i in range(C)]) * costs.insertion

    # Topological order: total number of consumed utterances, then lexicographic
    nodes = sorted(
        itertools.product(*[range(len(u) + 1) for u in utterances]),
        key=lambda g: (sum(g), g),
    )
    lattice = {nodes[0]: start}
    for node in nodes[1:]:
        best = None
        for k in range(K):
            if node[k] == 0:
                continue
            previous = lattice[node[:k] + (node[k] - 1,) + node[k + 1:]]
            utterance = ref_symbols[k][node[k] - 1]
            for c in range(C):
                candidate = kernel.block(previous, utterance, c)
                if best is None:
                    best = candidate
                else:
                    np.minimum(best, candidate, out=best)
        lattice[node] = best

    node = nodes[-1]
    position = [len(h) for h in channels]
    cost = int(lattice[node][tuple(position)])

    decisions = []
    while any(node):
        target = lattice[node][tuple(position)]
        found = False
        # Prefer the lower channel index, then the lower speaker index
        for c in range(C):
            for k in range(K):
                if node[k] == 0:
                    continue
                previous_node = node[:k] + (node[k] - 1,) + node[k + 1:]
                index = tuple(position[:c]) + (slice(None),) + tuple(position[c + 1:])
                line = lattice[previous_node][index]
                utterance = ref_symbols[k][node[k] - 1]
                rows = kernel.rows(line, utterance, c)
                for row in rows:
                    pass
                if row[position[c]] != target:
                    continue
                position[c] = kernel.start_position(line, utterance, c, position[c])
                decisions.append((k, node[k] - 1, c))
                node = previous_node
                found = True
                break
            if found:
                break
        assert found, 'Backtracking failed'
    decisions.reverse()
    return cost, decisions


def mimo_distance(
        refset: ReferenceSet,
        hypset: HypothesisSet,
        costs: CostConfig = DEFAULT_COSTS,
        memory_limit: int = DEFAULT_MEMORY_LIMIT,
) -> tuple[int, Assignment]:
    """
    Minimal edit cost over all assignments of reference utterances to
    hypothesis channels that keep each speaker's utterance order and keep
    every utterance on a single channel.

    >>> r = ReferenceSet.from_words({'A': ['a b'], 'B': ['e f']})
    >>> h = HypothesisSet.from_words({'1': 'a b e f', '2': ''})
    >>> mimo_distance(r, h)[0]
    0
    """
    cost, decisions = _solve(refset, hypset, costs, memory_limit)
    speakers, channels = refset.labels, hypset.labels
    return cost, Assignment(tuple(
        Decision(speakers[k], i, channels[c]) for k, i, c in decisions
    ))


def assignment_cost(
        refset: ReferenceSet,
        hypset: HypothesisSet,
        assignment: Assignment,
        costs: CostConfig = DEFAULT_COSTS,
) -> tuple[int, ErrorCounts]:
    """
    Replays an assignment: concatenates the assigned reference words per
    channel in decision order and aligns each channel separately. Words
    assigned to the dummy channel ``None`` count as deletions.
    """
    streams = assignment.channel_streams(refset)
    unknown = set(streams) - set(hypset.labels) - {None}
    if unknown:
        raise ValueError(f'Assignment uses unknown channels: {sorted(unknown)}')
    total = 0
    counts = ErrorCounts()
    for label in (*hypset.labels, None):
        ref = streams.get(label, [])
        hyp = hypset.channels[label] if label is not None else ()
        cost, c, _ = distance_with_counts(ref, hyp, costs)
        total += cost
        counts += c
    return total, counts


def _check_assignment(refset, assignment):
    seen = {label: -1 for label in refset.labels}
    for speaker, index, _ in assignment.decisions:
        assert index == seen[speaker] + 1, 'Utterances consumed out of order'
        seen[speaker] = index
    for label, utterances in refset.speakers.items():
        assert seen[label] == len(utterances) - 1, f'Missing utterances of {label}'


def _wer_from_assignment(refset, hypset, cost, assignment, costs):
    _check_assignment(refset, assignment)
    replayed, counts = assignment_cost(refset, hypset, assignment, costs)
    assert replayed == cost, (replayed, cost)
    return WerResult(counts, assignment, cost)


def mimo_wer(
        refset: ReferenceSet,
        hypset: HypothesisSet,
        costs: CostConfig = DEFAULT_COSTS,
        memory_limit: int = DEFAULT_MEMORY_LIMIT,
) -> WerResult:
    cost, assignment = mimo_distance(refset, hypset, costs, memory_limit)
    return _wer_from_assignment(refset, hypset, cost, assignment, costs)


def merge_references(refset: ReferenceSet) -> ReferenceSet:
    """
    Merges all speakers into one pseudo speaker whose utterances are sorted
    by begin time (stable w.r.t. the source index). The utterances keep
    their original speaker label.
    """
    if refset.K <= 1:
        return refset
    for label, utterances in refset.speakers.items():
        for u in utterances:
            if u.begin_time is None:
                raise MissingBeginTime(
                    f'Utterance {u.source_index} of speaker {label!r} has no '
                    f'begin time, which is required to merge {refset.K} speakers'
                )
    return ReferenceSet({MERGED_SPEAKER: [
        u for utterances in refset.speakers.values() for u in utterances
    ]})


def _unmerge(refset: ReferenceSet, merged: ReferenceSet, assignment: Assignment) -> Assignment:
    if merged is refset:
        return assignment
    origin = {}
    for label, utterances in refset.speakers.items():
        for i, u in enumerate(utterances):
            origin[u.source_index] = (label, i)
    return Assignment(tuple(
        Decision(*origin[merged.speakers[speaker][index].source_index], channel)
        for speaker, index, channel in assignment.decisions
    ))


def orc_distance(
        refset: ReferenceSet,
        hypset: HypothesisSet,
        costs: CostConfig = DEFAULT_COSTS,
        memory_limit: int = DEFAULT_MEMORY_LIMIT,
) -> tuple[int, Assignment]:
    merged = merge_references(refset)
    cost, assignment = mimo_distance(merged, hypset, costs, memory_limit)
    return cost, _unmerge(refset, merged, assignment)


def orc_wer(
        refset: ReferenceSet,
        hypset: HypothesisSet,
        costs: CostConfig = DEFAULT_COSTS,
        memory_limit: int = DEFAULT_MEMORY_LIMIT,
) -> WerResult:
    cost, assignment = orc_distance(refset, hypset, costs, memory_limit)
    return _wer_from_assignment(refset, hypset, cost, assignment, costs)


def _padded_labels(refset, hypset) -> tuple[list[Optional[str]], list[Optional[str]]]:
    n = max(refset.K, hypset.C)
    speakers = list(refset.labels) + [None] * (n - refset.K)
    channels = list(hypset.labels) + [None] * (n - hypset.C)
    return speakers, channels


def pairwise_distances(
        refset: ReferenceSet, hypset: HypothesisSet, costs: CostConfig = DEFAULT_COSTS
) -> np.ndarray:
    """
    Distances between the concatenated words of every speaker (rows) and
    every channel (columns). The smaller side is padded with empty streams
    to a square matrix.
    """
    speakers, channels = _padded_labels(refset, hypset)
    matrix = np.zeros((len(speakers), len(channels)), dtype=np.int64)
    for i, s in enumerate(speakers):
        ref = refset.words(s) if s is not None else ()
        for j, c in enumerate(channels):
            matrix[i, j] = distance(ref, hypset.channels[c] if c is not None else (), costs)
    return matrix


def cp_wer(
        refset: ReferenceSet, hypset: HypothesisSet, costs: CostConfig = DEFAULT_COSTS
) -> WerResult:
    """
    Concatenated minimum-permutation WER: the cheapest bijection between
    (padded) speakers and channels.
    """
    speakers, channels = _padded_labels(refset, hypset)
    matrix = pairwise_distances(refset, hypset, costs)
    rows, cols = scipy.optimize.linear_sum_assignment(matrix)
    pairs = tuple((speakers[i], channels[j]) for i, j in zip(rows, cols))
    decisions = tuple(
        Decision(speaker, i, channel)
        for speaker, channel in pairs if speaker is not None
        for i in range(len(refset.speakers[speaker]))
    )
    assignment = Assignment(decisions, pairs)
    cost = int(matrix[rows, cols].sum())
    return _wer_from_assignment(refset, hypset, cost, assignment, costs)
