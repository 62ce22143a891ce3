import pytest

from meval.bench import BenchScenario, generate_scenario, parse_grid, run_bench
from meval.matchers import mimo_wer, orc_wer


def test_generation_is_deterministic():
    s = BenchScenario(3, 2, 12, 4, 20, seed=7, corruption=0.3)
    assert generate_scenario(s) == generate_scenario(s)
    assert generate_scenario(s) != generate_scenario(BenchScenario(3, 2, 12, 4, 20, seed=8, corruption=0.3))


def test_generated_session_shape():
    refset, hypset = generate_scenario(BenchScenario(4, 2, 10, 5, 50, seed=1))
    assert (refset.K, hypset.C, refset.num_words, hypset.num_words) == (4, 2, 50, 50)
    assert [len(u) for u in refset.speakers.values()] == [3, 3, 2, 2]
    begin = sorted(u.begin_time for utts in refset.speakers.values() for u in utts)
    assert len(set(begin)) == len(begin)


@pytest.mark.parametrize('seed', range(5))
def test_uncorrupted_scenario_has_zero_orc_error(seed):
    refset, hypset = generate_scenario(BenchScenario(3, 2, 15, 3, 5, seed=seed))
    assert orc_wer(refset, hypset).errors == 0


def test_uncorrupted_scenario_has_zero_mimo_error():
    refset, hypset = generate_scenario(BenchScenario(4, 2, 25, 10, 100, seed=0))
    assert mimo_wer(refset, hypset).errors == 0


def test_corruption_introduces_errors():
    refset, hypset = generate_scenario(BenchScenario(2, 2, 20, 10, 100, seed=0, corruption=0.2))
    assert orc_wer(refset, hypset).errors > 0


def test_parse_grid():
    grid = parse_grid('K=4, C=2, U=2:8:3, W=10, seed=1|2', corruption=0.1)
    assert [(s.num_utterances, s.seed) for s in grid] == [(2, 1), (2, 2), (5, 1), (5, 2), (8, 1), (8, 2)]
    assert all(s.corruption == 0.1 and s.num_speakers == 4 for s in grid)
    for bad in ('K', 'Q=1', 'U=1:2:0', 'U=1:2:3:4', 'K=0'):
        with pytest.raises(ValueError):
            parse_grid(bad)


def test_repetitions_keep_non_time_columns():
    grid = parse_grid('K=2,C=2,U=3,W=2,V=4,seed=5')
    first = list(run_bench(grid, methods=['mimo', 'cpwer'], repetitions=3))
    second = list(run_bench(grid, methods=['mimo', 'cpwer'], repetitions=1))
    strip = lambda rows: [{k: v for k, v in r.items() if k != 'seconds'} for r in rows]
    assert strip(first) == strip(second)


def test_skipped_methods_stay_skipped():
    grid = parse_grid('K=2,C=2,U=4:12:4,W=2,V=4')
    rows = list(run_bench(grid, methods=['orc-brute-force', 'orc-dp'], enumeration_limit=2 ** 6))
    brute = [r['seconds'] for r in rows if r['method'] == 'orc-brute-force']
    assert brute[0] != 'skipped'
    assert brute[1:] == ['skipped', 'skipped']
    assert all(r['seconds'] != 'skipped' for r in rows if r['method'] == 'orc-dp')


def test_unknown_method():
    with pytest.raises(ValueError):
        list(run_bench(parse_grid('U=2'), methods=['nope']))
