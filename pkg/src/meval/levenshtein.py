"""
Levenshtein distance between word sequences.

``distance`` and ``distance_with_counts`` implement the classic
two-dimensional recursion. ``multidim_distance`` generalizes it to K
references and C hypotheses, where the references may be interleaved
arbitrarily (each keeping its own word order) and matched against an
arbitrary interleaving of the hypotheses. It is exponential in K and C and
only meant as a reference for small inputs.
"""
from __future__ import annotations

import itertools
import math
import typing
from typing import Optional, Sequence

from meval.core import DEFAULT_COSTS, BudgetExceeded, CostConfig, ErrorCounts

__all__ = [
    'AlignmentOp',
    'Alignment',
    'distance',
    'distance_matrix',
    'distance_with_counts',
    'multidim_distance',
    'DEFAULT_STATE_LIMIT',
]

DEFAULT_STATE_LIMIT = 10 ** 8

CORRECT = 'correct'
SUBSTITUTE = 'substitute'
INSERT = 'insert'
DELETE = 'delete'


class AlignmentOp(typing.NamedTuple):
    kind: str
    ref_position: Optional[int]  # 1-based
    hyp_position: Optional[int]  # 1-based


class Alignment(typing.NamedTuple):
    ops: tuple[AlignmentOp, ...]

    def counts(self) -> ErrorCounts:
        tally = {CORRECT: 0, SUBSTITUTE: 0, INSERT: 0, DELETE: 0}
        for op in self.ops:
            tally[op.kind] += 1
        return ErrorCounts(
            substitutions=tally[SUBSTITUTE],
            insertions=tally[INSERT],
            deletions=tally[DELETE],
            correct=tally[CORRECT],
            ref_length=tally[CORRECT] + tally[SUBSTITUTE] + tally[DELETE],
        )

    def apply(self, ref: Sequence[str], hyp: Sequence[str]) -> list[str]:
        """
        Replays the edit operations on ``ref``. Substituted and inserted
        words are taken from ``hyp``, so the result equals ``hyp`` for every
        valid alignment.
        """
        out = []
        for kind, r, h in self.ops:
            if kind == CORRECT:
                out.append(ref[r - 1])
            elif kind in (SUBSTITUTE, INSERT):
                out.append(hyp[h - 1])
        return out

    def cost(self, costs: CostConfig = DEFAULT_COSTS) -> int:
        per_op = {
            CORRECT: costs.correct, SUBSTITUTE: costs.substitution,
            INSERT: costs.insertion, DELETE: costs.deletion,
        }
        return sum(per_op[op.kind] for op in self.ops)


def distance(ref: Sequence, hyp: Sequence, costs: CostConfig = DEFAULT_COSTS) -> int:
    """
    Minimal edit cost to transform ``ref`` into ``hyp``.

    >>> distance('abcd', 'afch')
    2
    >>> distance([], ['a', 'b'])
    2
    """
    c_cor, c_sub, c_ins, c_del = costs.as_tuple()
    prev = [h * c_ins for h in range(len(hyp) + 1)]
    for r_word in ref:
        row = [prev[0] + c_del]
        for h, h_word in enumerate(hyp):
            row.append(min(
                prev[h] + (c_cor if r_word == h_word else c_sub),
                prev[h + 1] + c_del,
                row[h] + c_ins,
            ))
        prev = row
    return prev[-1]


def distance_matrix(ref: Sequence, hyp: Sequence, costs: CostConfig = DEFAULT_COSTS) -> list[list[int]]:
    """The full (len(ref)+1) x (len(hyp)+1) cost matrix."""
    c_cor, c_sub, c_ins, c_del = costs.as_tuple()
    matrix = [[h * c_ins for h in range(len(hyp) + 1)]]
    for r, r_word in enumerate(ref):
        prev = matrix[r]
        row = [prev[0] + c_del]
        for h, h_word in enumerate(hyp):
            row.append(min(
                prev[h] + (c_cor if r_word == h_word else c_sub),
                prev[h + 1] + c_del,
                row[h] + c_ins,
            ))
        matrix.append(row)
    return matrix


def distance_with_counts(
        ref: Sequence, hyp: Sequence, costs: CostConfig = DEFAULT_COSTS
) -> tuple[int, ErrorCounts, Alignment]:
    """
    Distance plus one optimal alignment and its error counts.

    Ties are broken deterministically: the diagonal (correct/substitution)
    wins over a deletion, which wins over an insertion.

    >>> cost, counts, _ = distance_with_counts('ab', 'abef')
    >>> cost, counts
    (2, ErrorCounts(substitutions=0, insertions=2, deletions=0, correct=2, ref_length=2))
    """
    c_cor, c_sub, c_ins, c_del = costs.as_tuple()
    matrix = distance_matrix(ref, hyp, costs)
    ops = []
    r, h = len(ref), len(hyp)
    while r > 0 or h > 0:
        value = matrix[r][h]
        if r > 0 and h > 0:
            same = ref[r - 1] == hyp[h - 1]
            if value == matrix[r - 1][h - 1] + (c_cor if same else c_sub):
                ops.append(AlignmentOp(CORRECT if same else SUBSTITUTE, r, h))
                r, h = r - 1, h - 1
                continue
        if r > 0 and value == matrix[r - 1][h] + c_del:
            ops.append(AlignmentOp(DELETE, r, None))
            r -= 1
        else:
            assert h > 0 and value == matrix[r][h - 1] + c_ins, (r, h)
            ops.append(AlignmentOp(INSERT, None, h))
            h -= 1
    alignment = Alignment(tuple(reversed(ops)))
    return matrix[-1][-1], alignment.counts(), alignment


def multidim_distance(
        refs: Sequence[Sequence],
        hyps: Sequence[Sequence],
        costs: CostConfig = DEFAULT_COSTS,
        state_limit: int = DEFAULT_STATE_LIMIT,
) -> int:
    """
    Levenshtein distance between all interleavings of ``refs`` and all
    interleavings of ``hyps``, filled over a dense tensor with one axis per
    sequence.

    >>> multidim_distance(['abcd', 'efgh'], ['afch', 'ebgd'])
    0
    >>> multidim_distance(['ab', 'ef'], ['aebf'])
    0
    """
    if len(refs) < 1 or len(hyps) < 1:
        raise ValueError('Need at least one reference and one hypothesis')
    c_cor, c_sub, c_ins, c_del = costs.as_tuple()
    shape = [len(s) + 1 for s in refs] + [len(s) + 1 for s in hyps]
    size = math.prod(shape)
    if size > state_limit:
        raise BudgetExceeded(
            f'Distance tensor has {size} states, limit is {state_limit}',
            size=size, limit=state_limit,
        )

    K = len(refs)
    strides = [0] * len(shape)
    stride = 1
    for axis in reversed(range(len(shape))):
        strides[axis] = stride
        stride *= shape[axis]
    ref_axes = range(K)
    hyp_axes = range(K, len(shape))

    lev = [0] * size
    for flat, index in enumerate(itertools.product(*[range(n) for n in shape])):
        if flat == 0:
            continue
        best = math.inf
        for a in ref_axes:
            if index[a] == 0:
                continue
            r_word = refs[a][index[a] - 1]
            best = min(best, lev[flat - strides[a]] + c_del)
            for b in hyp_axes:
                if index[b] == 0:
                    continue
                h_word = hyps[b - K][index[b] - 1]
                best = min(
                    best,
                    lev[flat - strides[a] - strides[b]]
                    + (c_cor if r_word == h_word else c_sub)
                )
        for b in hyp_axes:
            if index[b] > 0:
                best = min(best, lev[flat - strides[b]] + c_ins)
        lev[flat] = best
    return lev[-1]
