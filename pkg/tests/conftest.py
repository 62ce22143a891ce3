import random

import pytest

from meval import HypothesisSet, ReferenceSet, Utterance


def fig1a():
    return (
        ReferenceSet.from_words({'spk1': ['a b'], 'spk2': ['e f']},
                                begin_times={'spk1': [0.0], 'spk2': [1.0]}),
        HypothesisSet.from_words({'ch1': 'a b e f', 'ch2': ''}),
    )


def fig1b():
    return (
        ReferenceSet.from_words({'spk1': ['a b c d'], 'spk2': ['e f g h']},
                                begin_times={'spk1': [0.0], 'spk2': [0.5]}),
        HypothesisSet.from_words({'ch1': 'a f c h', 'ch2': 'e b g d'}),
    )


def fig1c():
    # The annotation of spk2 wrongly merges two utterances into one that
    # starts before spk1's utterance.
    return (
        ReferenceSet.from_words({'spk1': ['a b'], 'spk2': ['c d e']},
                                begin_times={'spk1': [1.0], 'spk2': [0.0]}),
        HypothesisSet.from_words({'ch1': 'c a b d e', 'ch2': ''}),
    )


FIGURES = {'fig1a': fig1a, 'fig1b': fig1b, 'fig1c': fig1c}


def random_instance(rng: random.Random, max_speakers=3, max_channels=2,
                    max_utterances=6, max_words=4, alphabet='abc',
                    single_word=False, with_times=True):
    """
    A small random session. Half of the hypotheses are derived from a
    random utterance-to-channel assignment with random edits, half are
    pure noise.
    """
    K = rng.randint(1, max_speakers)
    C = rng.randint(1, max_channels)
    U = rng.randint(1, max_utterances)
    speakers = {f's{k}': [] for k in range(K)}
    utterances = []
    for u in range(U):
        n = 1 if single_word else rng.randint(1, max_words)
        words = tuple(rng.choice(alphabet) for _ in range(n))
        label = f's{rng.randrange(K)}'
        # Begin times with occasional ties
        begin = float(rng.randint(0, 2 * U)) if with_times else None
        utt = Utterance(words, begin, u, label)
        speakers[label].append(utt)
        utterances.append(utt)
    refset = ReferenceSet(speakers)

    channels = {f'h{c}': [] for c in range(C)}
    if rng.random() < 0.5:
        order = sorted(utterances, key=lambda u: (u.begin_time or 0, u.source_index))
        for utt in order:
            target = channels[f'h{rng.randrange(C)}']
            for w in utt.words:
                r = rng.random()
                if r < 0.15:
                    target.append(rng.choice(alphabet))
                elif r < 0.25:
                    continue
                elif r < 0.3:
                    target.extend([w, rng.choice(alphabet)])
                else:
                    target.append(w)
    else:
        for label in channels:
            channels[label] = [rng.choice(alphabet) for _ in range(rng.randint(0, 2 * max_words))]
    return refset, HypothesisSet(channels)


@pytest.fixture
def rng():
    return random.Random(1234)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section('acceptance criteria')
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
