import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from meval.cli import EXIT_BUDGET, EXIT_INPUT, EXIT_OK, EXIT_USAGE, main

DATA = Path(__file__).parent / 'data'


def score(tmp_path, *args, fig='fig1a'):
    out = tmp_path / 'report.json'
    status = main([
        'score', *args,
        '--ref', str(DATA / f'{fig}_ref.jsonl'), '--hyp', str(DATA / f'{fig}_hyp.jsonl'),
        '--out', str(out), '--jobs', '1',
    ])
    return status, (json.loads(out.read_text()) if status == EXIT_OK else None)


def aggregate(report, metric):
    a = report['aggregate'][metric]
    return a['errors'], a['length']


@pytest.mark.parametrize('fig, metric, expected', [
    ('fig1a', 'mimo', (0, 4)),
    ('fig1a', 'orcwer', (0, 4)),
    ('fig1a', 'cpwer', (4, 4)),
    ('fig1b', 'cpwer', (4, 8)),
    ('fig1c', 'mimo', (2, 5)),
    ('fig1c', 'orcwer', (4, 5)),
])
def test_score(tmp_path, fig, metric, expected):
    status, report = score(tmp_path, metric, fig=fig)
    assert status == EXIT_OK
    assert aggregate(report, metric) == expected


@pytest.mark.parametrize('metric', ['mimo', 'orcwer', 'cpwer'])
def test_brute_force_method_agrees(tmp_path, metric):
    _, dp = score(tmp_path, metric, '--method', 'dp', fig='fig1c')
    _, bf = score(tmp_path, metric, '--method', 'brute-force', fig='fig1c')
    assert aggregate(dp, metric) == aggregate(bf, metric)
    assert bf['metadata']['method'] == 'brute-force'


def test_costs_flag(tmp_path):
    _, report = score(tmp_path, 'cpwer', '--costs', '0,1,2,1')
    assert report['metadata']['costs'] == {'correct': 0, 'substitution': 1, 'insertion': 2, 'deletion': 1}
    # Counts stay unit counts, the cost follows the configuration
    assert aggregate(report, 'cpwer') == (4, 4)
    assert report['per_session']['fig1a']['cpwer']['cost'] == 6


def test_report_is_byte_identical(tmp_path):
    args = ['score', 'mimo', '--ref', str(DATA / 'fig1b_ref.jsonl'),
            '--hyp', str(DATA / 'fig1b_hyp.jsonl'), '--jobs', '1', '--out']
    main(args + [str(tmp_path / 'a.json')])
    main(args + [str(tmp_path / 'b.json')])
    assert (tmp_path / 'a.json').read_bytes() == (tmp_path / 'b.json').read_bytes()


def test_parallel_sessions_match_sequential(tmp_path):
    ref = tmp_path / 'ref.jsonl'
    hyp = tmp_path / 'hyp.jsonl'
    ref.write_bytes(b''.join((DATA / f'{f}_ref.jsonl').read_bytes() for f in ('fig1a', 'fig1b', 'fig1c')))
    hyp.write_bytes(b''.join((DATA / f'{f}_hyp.jsonl').read_bytes() for f in ('fig1c', 'fig1a', 'fig1b')))
    reports = []
    for jobs in ('1', '3'):
        out = tmp_path / f'{jobs}.json'
        assert main(['score', 'orcwer', '--ref', str(ref), '--hyp', str(hyp),
                     '--jobs', jobs, '--out', str(out)]) == EXIT_OK
        reports.append(out.read_bytes())
    assert reports[0] == reports[1]
    assert aggregate(json.loads(reports[0]), 'orcwer') == (8, 17)


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / 'bad.jsonl'
    bad.write_text('{"session_id": "s"}\n')
    assert main(['score', 'mimo', '--ref', str(bad), '--hyp', str(bad)]) == EXIT_INPUT
    assert 'line 1' in capsys.readouterr().err
    assert main(['score', 'mimo', '--ref', str(tmp_path / 'missing'), '--hyp', str(bad)]) == EXIT_INPUT


def test_orc_requires_begin_times(tmp_path, capsys):
    ref = tmp_path / 'ref.jsonl'
    ref.write_text(
        '{"session_id": "s", "speaker": "A", "words": "a"}\n'
        '{"session_id": "s", "speaker": "B", "words": "b"}\n'
    )
    assert main(['score', 'orcwer', '--ref', str(ref), '--hyp', str(ref), '--jobs', '1']) == EXIT_INPUT
    assert 'begin time' in capsys.readouterr().err


def test_budget_error(tmp_path, capsys):
    status, _ = score(tmp_path, 'mimo', '--memory-limit', '10')
    assert status == EXIT_BUDGET
    assert 'budget' in capsys.readouterr().err


@pytest.mark.parametrize('args', [
    [],
    ['score', 'wer', '--ref', 'x', '--hyp', 'y'],
    ['score', 'mimo', '--ref', 'x'],
    ['score', 'mimo', '--ref', 'x', '--hyp', 'y', '--costs', '1,0,1,1'],
    ['bench', '--grid', 'X=3'],
])
def test_usage_errors(args):
    with pytest.raises(SystemExit) as e:
        status = main(args)
        raise SystemExit(status)
    assert e.value.code == EXIT_USAGE


def test_bench_csv(tmp_path):
    out = tmp_path / 'bench.csv'
    assert main(['bench', '--grid', 'K=2,C=2,U=2|4,W=3,V=5', '--reps', '2',
                 '--methods', 'orc-dp', 'orc-brute-force', '--out', str(out)]) == EXIT_OK
    rows = list(csv.DictReader(out.open()))
    assert [(r['method'], r['U']) for r in rows] == [
        ('orc-dp', '2'), ('orc-brute-force', '2'), ('orc-dp', '4'), ('orc-brute-force', '4'),
    ]
    assert all(float(r['seconds']) >= 0 for r in rows)


def test_console_script(tmp_path):
    proc = subprocess.run(
        [sys.executable, '-m', 'meval.cli', 'score', 'cpwer',
         '--ref', str(DATA / 'fig1b_ref.jsonl'), '--hyp', str(DATA / 'fig1b_hyp.jsonl')],
        capture_output=True, check=True,
    )
    report = json.loads(proc.stdout)
    assert aggregate(report, 'cpwer') == (4, 8)
    assert report['aggregate']['cpwer']['rate'] == '4/8'
