"""
Test-only oracles that share no code with the library.
"""
import functools
import itertools


def enumerate_alignments(ref, hyp):
    """Every edit script from ref to hyp as (kind, ...) tuples; exponential."""
    if not ref and not hyp:
        yield ()
        return
    if ref and hyp:
        kind = 'C' if ref[0] == hyp[0] else 'S'
        for rest in enumerate_alignments(ref[1:], hyp[1:]):
            yield (kind,) + rest
    if ref:
        for rest in enumerate_alignments(ref[1:], hyp):
            yield ('D',) + rest
    if hyp:
        for rest in enumerate_alignments(ref, hyp[1:]):
            yield ('I',) + rest


def exhaustive_distance(ref, hyp, costs=(0, 1, 1, 1)):
    """Minimal cost and the set of (sub, ins, del, corr) tallies reaching it."""
    weight = dict(zip('CSID', costs))
    best, tallies = None, set()
    for script in enumerate_alignments(tuple(ref), tuple(hyp)):
        cost = sum(weight[op] for op in script)
        tally = (script.count('S'), script.count('I'), script.count('D'), script.count('C'))
        if best is None or cost < best:
            best, tallies = cost, {tally}
        elif cost == best:
            tallies.add(tally)
    return best, tallies


def table_distance(ref, hyp):
    """Unit-cost Levenshtein via a memoized recursion over suffixes."""
    @functools.lru_cache(maxsize=None)
    def d(i, j):
        if i == len(ref):
            return len(hyp) - j
        if j == len(hyp):
            return len(ref) - i
        return min(
            d(i + 1, j + 1) + (ref[i] != hyp[j]),
            d(i + 1, j) + 1,
            d(i, j + 1) + 1,
        )
    return d(0, 0)


def interleavings(a, b):
    """All merges of two sequences that keep each sequence's order."""
    n = len(a) + len(b)
    for positions in itertools.combinations(range(n), len(a)):
        out, ia, ib = [], iter(a), iter(b)
        for i in range(n):
            out.append(next(ia) if i in positions else next(ib))
        yield out
