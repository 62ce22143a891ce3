"""
Synthetic sessions and a wall-clock runtime benchmark for the solvers.
"""
from __future__ import annotations

import csv
import dataclasses
import itertools
import logging
import random
import statistics
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, TextIO

from meval.core import (
    DEFAULT_COSTS,
    BudgetExceeded,
    CostConfig,
    HypothesisSet,
    ReferenceSet,
    Utterance,
)
from meval.matchers import DEFAULT_MEMORY_LIMIT, cp_wer, mimo_distance, orc_distance
from meval.oracle import DEFAULT_ENUMERATION_LIMIT, brute_force_orc

__all__ = [
    'BenchScenario',
    'generate_scenario',
    'parse_grid',
    'METHODS',
    'run_bench',
    'CSV_FIELDS',
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BenchScenario:
    num_speakers: int = 4
    num_channels: int = 2
    num_utterances: int = 10
    words_per_utterance: int = 10
    vocabulary_size: int = 100
    seed: int = 0
    corruption: float = 0.0  # per-word probability of a random edit

    def __post_init__(self):
        for name in ('num_speakers', 'num_channels', 'num_utterances',
                     'words_per_utterance', 'vocabulary_size'):
            if getattr(self, name) < 1:
                raise ValueError(f'{name} must be positive')
        if not 0 <= self.corruption <= 1:
            raise ValueError('corruption must be in [0, 1]')


def generate_scenario(s: BenchScenario) -> tuple[ReferenceSet, HypothesisSet]:
    """
    Builds a deterministic session: utterances are dealt round-robin to the
    speakers with increasing begin times and every utterance is put on a
    random channel. Each hypothesis word is then substituted, deleted or
    followed by an inserted word with total probability ``s.corruption``.
    """
    rng = random.Random(s.seed)
    vocabulary = [f'w{i}' for i in range(s.vocabulary_size)]
    speakers = {f'spk{k}': [] for k in range(s.num_speakers)}
    channels = {f'ch{c}': [] for c in range(s.num_channels)}
    for u in range(s.num_utterances):
        words = tuple(rng.choice(vocabulary) for _ in range(s.words_per_utterance))
        speaker = f'spk{u % s.num_speakers}'
        speakers[speaker].append(Utterance(words, float(u), u, speaker))
        hyp = channels[f'ch{rng.randrange(s.num_channels)}']
        for w in words:
            if rng.random() >= s.corruption:
                hyp.append(w)
                continue
            edit = rng.randrange(3)
            if edit == 0:
                hyp.append(rng.choice(vocabulary))
            elif edit == 2:
                hyp.extend([w, rng.choice(vocabulary)])
    return ReferenceSet(speakers), HypothesisSet(channels)


_GRID_KEYS = {
    'K': 'num_speakers', 'C': 'num_channels', 'U': 'num_utterances',
    'W': 'words_per_utterance', 'V': 'vocabulary_size', 'seed': 'seed',
}


def _parse_values(text: str) -> list[int]:
    """
    >>> _parse_values('2:10:4'), _parse_values('1|3'), _parse_values('5')
    ([2, 6, 10], [1, 3], [5])
    """
    if ':' in text:
        parts = [int(p) for p in text.split(':')]
        if len(parts) not in (2, 3):
            raise ValueError(f'Invalid range: {text!r}')
        start, stop, step = parts[0], parts[1], parts[2] if len(parts) == 3 else 1
        if step < 1:
            raise ValueError(f'Invalid step in {text!r}')
        return list(range(start, stop + 1, step))
    return [int(p) for p in text.split('|')]


def parse_grid(spec: str, corruption: float = 0.0) -> list[BenchScenario]:
    """
    Parses a grid like ``K=4,C=2,U=2:80:2,W=10``. Values are a single
    number, alternatives separated by ``|`` or an inclusive range
    ``start:stop[:step]``. Keys are K, C, U, W, V and seed.

    >>> [s.num_utterances for s in parse_grid('U=2:6:2')]
    [2, 4, 6]
    """
    axes = {}
    for item in filter(None, spec.replace(' ', '').split(',')):
        key, sep, value = item.partition('=')
        if not sep or key not in _GRID_KEYS:
            raise ValueError(f'Invalid grid entry {item!r}, expected one of {sorted(_GRID_KEYS)}')
        axes[_GRID_KEYS[key]] = _parse_values(value)
    names = list(axes)
    return [
        BenchScenario(**dict(zip(names, values)), corruption=corruption)
        for values in itertools.product(*axes.values())
    ]


def _methods(costs, memory_limit, enumeration_limit, time_limit) -> dict[str, Callable]:
    return {
        'mimo': lambda r, h: mimo_distance(r, h, costs, memory_limit),
        'orc-dp': lambda r, h: orc_distance(r, h, costs, memory_limit),
        'orc-brute-force': lambda r, h: brute_force_orc(
            r, h, costs, enumeration_limit, time_limit=time_limit),
        'cpwer': lambda r, h: cp_wer(r, h, costs),
    }


METHODS = tuple(_methods(None, None, None, None))

CSV_FIELDS = ('method', 'K', 'C', 'U', 'W', 'seed', 'seconds')


def _time(fn, reference, hypothesis, repetitions):
    # One warm-up solve, then the median over the timed repetitions
    fn(reference, hypothesis)
    times = []
    for _ in range(repetitions):
        start = time.perf_counter()
        fn(reference, hypothesis)
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def run_bench(
        scenarios: Iterable[BenchScenario],
        methods: Iterable[str] = METHODS,
        repetitions: int = 1,
        costs: CostConfig = DEFAULT_COSTS,
        memory_limit: int = DEFAULT_MEMORY_LIMIT,
        enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT,
        time_limit: Optional[float] = None,
) -> Iterator[dict]:
    """
    Times every method on every scenario and yields one CSV row each.
    ``seconds`` is ``'skipped'`` if a method exceeded its budget. Once a
    method is skipped it stays skipped for larger instances of the same
    scenario family.
    """
    solvers = _methods(costs, memory_limit, enumeration_limit, time_limit)
    methods = list(methods)
    for m in methods:
        if m not in solvers:
            raise ValueError(f'Unknown method {m!r}, choose from {METHODS}')
    skipped_from = {}
    for scenario in scenarios:
        reference, hypothesis = generate_scenario(scenario)
        family = dataclasses.replace(scenario, num_utterances=1)
        for m in methods:
            row = {
                'method': m, 'K': scenario.num_speakers, 'C': scenario.num_channels,
                'U': scenario.num_utterances, 'W': scenario.words_per_utterance,
                'seed': scenario.seed,
            }
            limit = skipped_from.get((m, family))
            if limit is not None and scenario.num_utterances >= limit:
                row['seconds'] = 'skipped'
            else:
                try:
                    row['seconds'] = f'{_time(solvers[m], reference, hypothesis, repetitions):.6f}'
                except BudgetExceeded as e:
                    logger.info('%s skipped at %s: %s', m, scenario, e)
                    skipped_from[(m, family)] = scenario.num_utterances
                    row['seconds'] = 'skipped'
            yield row


def write_csv(rows: Iterable[dict], fd: TextIO):
    writer = csv.DictWriter(fd, fieldnames=CSV_FIELDS, lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
        fd.flush()
