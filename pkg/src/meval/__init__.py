"""Word error rates for multi-speaker transcription: MIMO WER, ORC WER and cpWER."""
from meval.core import *
from meval.levenshtein import distance, distance_with_counts, multidim_distance
from meval.matchers import (
    build_reference_streams,
    cp_wer,
    merge_references,
    mimo_distance,
    mimo_wer,
    orc_distance,
    orc_wer,
    pairwise_distances,
)

__version__ = '0.1.0'
