"""
Command line interface.

    meval score mimo --ref ref.jsonl --hyp hyp.jsonl --out report.json
    meval bench --grid K=4,C=2,U=2:80:2 --reps 3 --out bench.csv
"""
from __future__ import annotations

import argparse
import concurrent.futures
import logging
import os
import sys
from pathlib import Path

import meval
from meval.bench import METHODS, parse_grid, run_bench, write_csv
from meval.core import DEFAULT_COSTS, BudgetExceeded, CostConfig, MevalError, MissingBeginTime
from meval.io import ParseError, Report, group_sessions, parse_seglst, write_report
from meval.matchers import DEFAULT_MEMORY_LIMIT
from meval.oracle import DEFAULT_ENUMERATION_LIMIT
from meval.scoring import score_session

logger = logging.getLogger('meval')

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f'{self.prog}: error: {message}\n')


def _costs(text):
    try:
        return CostConfig.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _read_segments(path):
    with open(path, 'rb') as fd:
        return parse_seglst(fd)


def cmd_score(args) -> int:
    try:
        sessions = group_sessions(_read_segments(args.ref), _read_segments(args.hyp))
    except (ParseError, OSError) as e:
        print(f'meval: input error: {e}', file=sys.stderr)
        return EXIT_INPUT

    jobs = args.jobs or os.cpu_count() or 1
    task = dict(
        metric=args.metric, costs=args.costs, method=args.method,
        memory_limit=args.memory_limit, enumeration_limit=args.enumeration_limit,
    )
    try:
        if jobs > 1 and len(sessions) > 1:
            with concurrent.futures.ProcessPoolExecutor(min(jobs, len(sessions))) as pool:
                results = list(pool.map(
                    score_session,
                    [s.reference for s in sessions], [s.hypothesis for s in sessions],
                    *[[v] * len(sessions) for v in task.values()],
                ))
        else:
            results = [score_session(s.reference, s.hypothesis, **task) for s in sessions]
    except MissingBeginTime as e:
        print(f'meval: input error: {e}', file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as e:
        print(f'meval: resource budget exceeded: {e}', file=sys.stderr)
        return EXIT_BUDGET

    report = Report(
        {s.session_id: {args.metric: r} for s, r in zip(sessions, results)},
        metadata={
            'tool': 'meval', 'version': meval.__version__,
            'costs': dict(zip(('correct', 'substitution', 'insertion', 'deletion'),
                              args.costs.as_tuple())),
            'method': args.method,
            'metrics': [args.metric],
        },
    )
    data = write_report(report)
    if args.out is None or args.out == '-':
        sys.stdout.buffer.write(data)
    else:
        Path(args.out).write_bytes(data)
        aggregate = report.aggregate()[args.metric]
        print(f'{args.metric}: {aggregate.errors}/{aggregate.ref_length} '
              f'(sub {aggregate.substitutions}, ins {aggregate.insertions}, '
              f'del {aggregate.deletions})', file=sys.stderr)
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        scenarios = parse_grid(args.grid, corruption=args.corruption)
    except ValueError as e:
        print(f'meval: {e}', file=sys.stderr)
        return EXIT_USAGE
    rows = run_bench(
        scenarios, methods=args.methods, repetitions=args.reps, costs=args.costs,
        memory_limit=args.memory_limit, enumeration_limit=args.enumeration_limit,
        time_limit=args.time_limit,
    )
    if args.out is None or args.out == '-':
        write_csv(rows, sys.stdout)
    else:
        with open(args.out, 'w', newline='') as fd:
            write_csv(rows, fd)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog='meval', description=__doc__.split('\n')[1])
    parser.add_argument('-v', '--verbose', action='store_true')
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_ArgumentParser)

    def common(p):
        p.add_argument('--costs', type=_costs, default=DEFAULT_COSTS,
                       help='correct,substitution,insertion,deletion (default: 0,1,1,1)')
        p.add_argument('--memory-limit', type=int, default=DEFAULT_MEMORY_LIMIT,
                       help='maximal lattice size in bytes')
        p.add_argument('--enumeration-limit', type=int, default=DEFAULT_ENUMERATION_LIMIT,
                       help='maximal number of candidates for brute-force solvers')
        p.add_argument('--out', default=None)

    score = sub.add_parser('score', help='score hypotheses against references')
    score.add_argument('metric', choices=('mimo', 'orcwer', 'cpwer'))
    score.add_argument('--ref', required=True)
    score.add_argument('--hyp', required=True)
    score.add_argument('--method', choices=('dp', 'brute-force'), default='dp')
    score.add_argument('--jobs', type=int, default=None,
                       help='worker processes (default: number of processors)')
    common(score)
    score.set_defaults(func=cmd_score)

    bench = sub.add_parser('bench', help='runtime benchmark on generated sessions')
    bench.add_argument('--grid', required=True,
                       help='e.g. K=4,C=2,U=2:80:2,W=10,V=100,seed=0')
    bench.add_argument('--reps', type=int, default=1)
    bench.add_argument('--methods', nargs='+', choices=METHODS, default=list(METHODS))
    bench.add_argument('--corruption', type=float, default=0.0)
    bench.add_argument('--time-limit', type=float, default=60.0,
                       help='seconds before a brute-force solve is skipped')
    common(bench)
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except MevalError as e:
        print(f'meval: {e}', file=sys.stderr)
        return EXIT_INPUT


if __name__ == '__main__':
    sys.exit(main())
