'''
This module evaluates similarity scores against gold judgments and measures
hubness: how often every word shows up among the k nearest neighbors of other
words, within one space or across two.
'''


# core libraries
import enum
import logging
from dataclasses import dataclass
from typing import Mapping, Sequence, TextIO, Tuple

# third party libraries
import numpy as np
from scipy import stats
from scipy.spatial.distance import cdist

# local libraries
from .embeddings import SemanticSpace, Sentence
from .errors import DimensionMismatchError, PreconditionError, ZeroVarianceError
from .sts import StsPipeline
from .transforms import AlignmentMatrix


# number of query rows scanned against the targets at once
_BLOCK_SIZE = 512


def pearson_correlation(first: Sequence[float], second: Sequence[float]) -> float:
    '''
    Sample Pearson correlation of two equally long sequences.
    '''
    first_array = np.asarray(first, dtype=np.float64)
    second_array = np.asarray(second, dtype=np.float64)
    if first_array.shape != second_array.shape or first_array.ndim != 1:
        raise PreconditionError(f"sequences must have equal lengths, got {first_array.shape} and {second_array.shape}")
    if len(first_array) < 2:
        raise PreconditionError("correlation needs at least two values")
    if np.ptp(first_array) == 0 or np.ptp(second_array) == 0:
        raise ZeroVarianceError("correlation is undefined for a sequence with zero variance")
    return float(stats.pearsonr(first_array, second_array)[0])


def skewness(values: Sequence[float]) -> float:
    '''
    Third standardized moment, with population moments.
    '''
    array = np.asarray(values, dtype=np.float64)
    if len(array) < 2:
        raise PreconditionError("skewness needs at least two values")
    if np.ptp(array) == 0:
        raise ZeroVarianceError("skewness is undefined for a sample with zero standard deviation")
    return float(stats.skew(array, bias=True))


class HubnessMode(enum.Enum):
    '''
    Whether queries and neighbors come from the same space or from two.
    '''
    WITHIN = "within-space"
    CROSS = "cross-lingual"


@dataclass(frozen=True)
class HubnessReport:
    '''
    N_k of every target word (zeros included, in vocabulary order) and the
    skewness of their distribution.
    '''
    counts: Mapping[str, int]
    k: int
    skewness: float
    mode: HubnessMode
    query_count: int

    def top_hubs(self, size: int) -> list[Tuple[str, int]]:
        '''
        The `size` words with the highest N_k; ties keep vocabulary order.
        '''
        return sorted(self.counts.items(), key=lambda item: -item[1])[:size]


    def write_tsv(self, stream: TextIO) -> None:
        '''
        Write "word<TAB>count" lines after a commented header.
        '''
        stream.write(f"# k={self.k}\n")
        stream.write(f"# mode={self.mode.value}\n")
        stream.write(f"# skewness={self.skewness:.6f}\n")
        stream.write(f"# queries={self.query_count}\n")
        for word, count in self.counts.items():
            stream.write(f"{word}\t{count}\n")


def nearest_neighbors(queries: np.ndarray, targets: np.ndarray, k: int, exclude_self: bool=False) -> np.ndarray:
    '''
    Row indices of the k nearest targets (Euclidean) of every query, nearest
    first; equal distances go to the lower index. With `exclude_self`, query i
    never lists target i.
    '''
    neighbors = np.empty((len(queries), k), dtype=np.int64)
    for start in range(0, len(queries), _BLOCK_SIZE):
        stop = min(start + _BLOCK_SIZE, len(queries))
        distances = cdist(queries[start:stop], targets, metric="euclidean")
        if exclude_self:
            distances[np.arange(stop - start), np.arange(start, stop)] = np.inf
        neighbors[start:stop] = np.argsort(distances, axis=1, kind="stable")[:, :k]
    return neighbors


def hubness_counts(queries: SemanticSpace, targets: SemanticSpace, k: int=20,
                   query_limit: int | None=None) -> HubnessReport:
    '''
    Count, for every target word, the queries listing it among their k nearest
    neighbors. Passing the same space as queries and targets measures hubness
    within that space and excludes every word from its own list; otherwise the
    queries (e.g. a mapped source space) look for neighbors in the targets.
    `query_limit` restricts the queries to the first words of the space.
    '''
    mode = HubnessMode.WITHIN if queries is targets else HubnessMode.CROSS
    if queries.dim != targets.dim:
        raise DimensionMismatchError(f"queries have dimension {queries.dim}, targets {targets.dim}")
    if not 1 <= k < len(targets):
        raise PreconditionError(f"k must lie in [1, {len(targets) - 1}] for {len(targets)} target words, got {k}")

    query_vectors = queries.vectors if query_limit is None else queries.vectors[:query_limit]
    logging.info("Computing %s hubness N_%d for %d queries over %d targets", mode.value, k, len(query_vectors),
                 len(targets))
    neighbors = nearest_neighbors(query_vectors, targets.vectors, k, exclude_self=mode is HubnessMode.WITHIN)
    counts = np.bincount(neighbors.ravel(), minlength=len(targets))

    try:
        skew = skewness(counts)
    except ZeroVarianceError:
        logging.warning("Every target word has the same N_%d; reporting skewness 0", k)
        skew = 0.0

    return HubnessReport(dict(zip(targets.vocab, counts.tolist())), k, skew, mode, len(query_vectors))


def retrieval_precision(alignment: AlignmentMatrix, X: np.ndarray, Y: np.ndarray, k: int=1) -> float:
    '''
    Precision@k of word translation: the fraction of rows of X T whose aligned
    row of Y is among their k most cosine-similar rows of Y (ties go to the
    lower index).
    '''
    mapped = alignment.apply(X)
    mapped_norms = np.linalg.norm(mapped, axis=1, keepdims=True)
    target_norms = np.linalg.norm(Y, axis=1, keepdims=True)
    mapped = np.divide(mapped, mapped_norms, out=np.zeros_like(mapped), where=mapped_norms > 0)
    targets = np.divide(Y, target_norms, out=np.zeros_like(Y), where=target_norms > 0)

    ranked = np.argsort(-(mapped @ targets.T), axis=1, kind="stable")[:, :k]
    hits = np.any(ranked == np.arange(len(X))[:, np.newaxis], axis=1)
    return float(np.mean(hits))


@dataclass(frozen=True)
class EvaluationResult:
    '''
    Pearson correlation of the scores against the gold judgments, the per-pair
    scores (None for pairs that could not be read), and the number of pairs
    scored 0 because a side had no in-vocabulary word.
    '''
    pearson: float
    scores: Tuple[float | None, ...]
    undefined_pairs: int
    skipped_pairs: int


def evaluate_dataset(pairs: Sequence[Tuple[Sentence | None, Sentence | None]], gold: Sequence[float],
                     pipeline: StsPipeline) -> EvaluationResult:
    '''
    Score every sentence pair with the pipeline and correlate the scores with the
    gold judgments. Pairs given as None (unreadable) are left out of the
    correlation.
    '''
    if len(pairs) != len(gold):
        raise PreconditionError(f"{len(pairs)} sentence pairs but {len(gold)} gold scores")

    scores: list[float | None] = []
    undefined = 0
    for sentence_x, sentence_y in pairs:
        if sentence_x is None or sentence_y is None:
            scores.append(None)
            continue
        similarity = pipeline.score(sentence_x, sentence_y)
        undefined += similarity.undefined
        scores.append(similarity.value)

    kept = [(score, target) for score, target in zip(scores, gold) if score is not None]
    skipped = len(scores) - len(kept)
    if undefined:
        logging.warning("%d pairs had a side without in-vocabulary words and were scored 0", undefined)
    if skipped:
        logging.warning("%d unreadable pairs were left out of the correlation", skipped)

    pearson = pearson_correlation([score for score, _ in kept], [target for _, target in kept])
    logging.info("Pearson correlation over %d pairs: %.4f", len(kept), pearson)
    return EvaluationResult(pearson, tuple(scores), undefined, skipped)
