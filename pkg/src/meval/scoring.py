"""Dispatch from metric names to solvers, shared by the CLI and the tests."""
from __future__ import annotations

from meval.core import DEFAULT_COSTS, Assignment, CostConfig, HypothesisSet, ReferenceSet, WerResult
from meval.matchers import DEFAULT_MEMORY_LIMIT, assignment_cost, cp_wer, mimo_wer, orc_wer
from meval.oracle import DEFAULT_ENUMERATION_LIMIT, brute_force_cp, brute_force_mimo, brute_force_orc

METRICS = ('mimo', 'orcwer', 'cpwer')


def _brute_force(metric, refset, hypset, costs, limit) -> WerResult:
    if metric == 'cpwer':
        cost, pairs = brute_force_cp(refset, hypset, costs, limit)
        assignment = Assignment(
            tuple(
                (speaker, i, channel)
                for speaker, channel in pairs if speaker is not None
                for i in range(len(refset.speakers[speaker]))
            ),
            pairs,
        )
    else:
        solver = brute_force_mimo if metric == 'mimo' else brute_force_orc
        cost, assignment = solver(refset, hypset, costs, limit)
    replayed, counts = assignment_cost(refset, hypset, assignment, costs)
    assert replayed == cost, (replayed, cost)
    return WerResult(counts, assignment, cost)


def score_session(
        reference: ReferenceSet,
        hypothesis: HypothesisSet,
        metric: str,
        costs: CostConfig = DEFAULT_COSTS,
        method: str = 'dp',
        memory_limit: int = DEFAULT_MEMORY_LIMIT,
        enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT,
) -> WerResult:
    if metric not in METRICS:
        raise ValueError(f'Unknown metric {metric!r}, choose from {METRICS}')
    if method == 'brute-force':
        return _brute_force(metric, reference, hypothesis, costs, enumeration_limit)
    if method != 'dp':
        raise ValueError(f'Unknown method {method!r}')
    if metric == 'mimo':
        return mimo_wer(reference, hypothesis, costs, memory_limit)
    if metric == 'orcwer':
        return orc_wer(reference, hypothesis, costs, memory_limit)
    return cp_wer(reference, hypothesis, costs)
