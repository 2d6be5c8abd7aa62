'''
This module scores the semantic similarity of two sentences, possibly drawn
from two aligned semantic spaces, by linear combination, principal angles, or
optimal matching of their weighted word vectors.
'''


# core libraries
import enum
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

# third party libraries
import numpy as np
from scipy import linalg
from scipy.optimize import linear_sum_assignment

# local libraries
from .embeddings import IdfWeights, SemanticSpace, Sentence, WeightedBag, sentence_lookup
from .errors import DimensionMismatchError, PreconditionError
from .transforms import AlignmentMatrix


# relative slack when comparing matching totals and reduced costs
_TIE_TOLERANCE = 1e-9


class StsMethod(enum.Enum):
    '''
    The sentence similarity methods.
    '''
    LC = "lc"
    PA = "pa"
    OM = "om"


class Weighting(enum.Enum):
    '''
    Word weighting schemes.
    '''
    UNIFORM = "uniform"
    IDF = "idf"


@dataclass(frozen=True)
class StsConfig:
    '''
    Which method scores the sentences, the subspace rank for principal angles,
    and how words are weighted.
    '''
    method: StsMethod = StsMethod.LC
    rank: int = 4
    weighting: Weighting = Weighting.UNIFORM

    def __post_init__(self) -> None:
        '''
        Accept the method and weighting by value and reject a non-positive rank.
        '''
        if isinstance(self.method, str):
            object.__setattr__(self, "method", StsMethod(self.method.lower()))
        if isinstance(self.weighting, str):
            object.__setattr__(self, "weighting", Weighting(self.weighting.lower()))
        if self.rank < 1:
            raise PreconditionError(f"principal angles rank must be positive, got {self.rank}")


@dataclass(frozen=True)
class SimilarityScore:
    '''
    A similarity value with its diagnostics. `undefined` marks scores forced to
    0 because a sentence had no usable vector.
    '''
    value: float
    undefined: bool = False
    oov_x: int = 0
    oov_y: int = 0
    matching: Tuple[Tuple[int, int], ...] = ()


def cosine(first: np.ndarray, second: np.ndarray) -> float:
    '''
    Cosine of the angle between two vectors; 0 when either is the zero vector.
    '''
    norms = float(np.linalg.norm(first) * np.linalg.norm(second))
    if norms == 0:
        return 0.0
    return float(np.clip(np.dot(first, second) / norms, -1.0, 1.0))


def _undefined(bag_x: WeightedBag, bag_y: WeightedBag) -> SimilarityScore:
    '''
    A score of 0 flagged as undefined.
    '''
    return SimilarityScore(0.0, undefined=True, oov_x=bag_x.skipped, oov_y=bag_y.skipped)


def _unusable(bag: WeightedBag) -> bool:
    '''
    True for bags with no vectors or no positive weight.
    '''
    return bag.is_empty or bag.total_weight <= 0


def sim_linear_combination(bag_x: WeightedBag, bag_y: WeightedBag) -> SimilarityScore:
    '''
    Cosine between the weighted averages of the word vectors of each sentence.
    '''
    if _unusable(bag_x) or _unusable(bag_y):
        return _undefined(bag_x, bag_y)

    composite_x = bag_x.weights @ bag_x.vectors / bag_x.total_weight
    composite_y = bag_y.weights @ bag_y.vectors / bag_y.total_weight
    if not (np.any(composite_x) and np.any(composite_y)):
        return _undefined(bag_x, bag_y)

    return SimilarityScore(cosine(composite_x, composite_y), oov_x=bag_x.skipped, oov_y=bag_y.skipped)


def _subspace(bag: WeightedBag, rank: int) -> np.ndarray:
    '''
    Orthonormal basis (as columns) of the leading `rank` left singular vectors
    of the sentence matrix whose columns are the weighted word vectors. Fewer
    columns come back when the sentence matrix has lower rank.
    '''
    sentence_matrix = (bag.vectors * bag.weights[:, np.newaxis]).T
    return linalg.orth(sentence_matrix)[:, :rank]


def sim_principal_angles(bag_x: WeightedBag, bag_y: WeightedBag, rank: int=4) -> SimilarityScore:
    '''
    L2 norm of the cosines of the principal angles between the rank-r subspaces
    spanned by the two sentences.
    '''
    if bag_x.is_empty or bag_y.is_empty:
        return _undefined(bag_x, bag_y)

    basis_x, basis_y = _subspace(bag_x, rank), _subspace(bag_y, rank)
    if basis_x.shape[1] == 0 or basis_y.shape[1] == 0:
        return _undefined(bag_x, bag_y)

    cosines = np.minimum(linalg.svdvals(basis_x.T @ basis_y), 1.0)
    return SimilarityScore(float(np.sqrt(np.sum(cosines ** 2))), oov_x=bag_x.skipped, oov_y=bag_y.skipped)


def hungarian_matching(weights: np.ndarray) -> Tuple[Tuple[int, int], ...]:
    '''
    Maximum-weight matching of the rows and columns of a weight matrix, of size
    min(rows, columns), as (row, column) pairs sorted by row.

    Among several optimal matchings the lexicographically smallest pair set is
    returned. Only pairs that are tight under an optimal dual can belong to an
    optimum, so a unique optimum is returned as soon as it is found; otherwise
    rows are fixed in order, each to the smallest column that still completes
    to an optimal matching.
    '''
    weights = np.asarray(weights, dtype=np.float64)
    if weights.size == 0:
        return ()
    if not np.all(np.isfinite(weights)):
        raise PreconditionError("matching weights must be finite")

    num_rows, num_columns = weights.shape
    size = min(num_rows, num_columns)
    padded, assignment = _padded_assignment(weights)
    solution = sorted((row, column) for row, column in enumerate(assignment.tolist())
                      if row < num_rows and column < num_columns)
    optimum = float(sum(weights[row, column] for row, column in solution))
    tolerance = _TIE_TOLERANCE * max(1.0, float(np.abs(weights).max())) * max(num_rows, num_columns)

    tight = _tight_pairs(padded, assignment, tolerance)[:num_rows, :num_columns]
    if np.count_nonzero(tight) == size:
        return tuple(solution)

    fixed: List[Tuple[int, int]] = []
    fixed_total = 0.0
    while len(fixed) < size:
        completion = _smaller_completion(weights, tight, fixed, fixed_total, solution[len(fixed)],
                                         optimum - tolerance)
        if completion is not None:
            solution = fixed + completion
        row, column = solution[len(fixed)]
        fixed.append((row, column))
        fixed_total += weights[row, column]
    return tuple(fixed)


def _padded_assignment(weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    '''
    Square zero-padded copy of the weights and an optimal column for every row.
    '''
    side = max(weights.shape)
    padded = np.zeros((side, side))
    padded[:weights.shape[0], :weights.shape[1]] = weights
    _, assignment = linear_sum_assignment(padded, maximize=True)
    return padded, assignment


def _tight_pairs(padded: np.ndarray, assignment: np.ndarray, tolerance: float) -> np.ndarray:
    '''
    Mask of the pairs with zero reduced cost under an optimal dual, recovered
    from the optimal assignment by shortest paths over the columns.
    '''
    rows = np.arange(padded.shape[0])
    # exchanging column assignment[i] for column j costs row i this much
    distances = np.empty_like(padded)
    distances[assignment, :] = padded[rows, assignment][:, np.newaxis] - padded
    for via in range(padded.shape[0]):
        distances = np.minimum(distances, distances[:, via, np.newaxis] + distances[np.newaxis, via, :])

    column_duals = -np.minimum(distances.min(axis=0), 0.0)
    row_duals = padded[rows, assignment] - column_duals[assignment]
    reduced = row_duals[:, np.newaxis] + column_duals[np.newaxis, :] - padded
    return reduced <= tolerance


def _smaller_completion(weights: np.ndarray, tight: np.ndarray, fixed: List[Tuple[int, int]], fixed_total: float,
                        current: Tuple[int, int], target: float) -> Optional[List[Tuple[int, int]]]:
    '''
    The first pair preceding `current` that extends the fixed pairs to an
    optimal matching, followed by an optimal completion; None when no such
    pair exists.
    '''
    num_rows, num_columns = weights.shape
    needed = min(num_rows, num_columns) - len(fixed) - 1
    first_row = fixed[-1][0] + 1 if fixed else 0
    used = {column for _, column in fixed}

    for row in range(first_row, current[0] + 1):
        for column in np.flatnonzero(tight[row]).tolist():
            if (row, column) >= current:
                break
            if column in used:
                continue
            rest_rows = np.arange(row + 1, num_rows)
            rest_columns = np.array([other for other in range(num_columns) if other not in used and other != column],
                                    dtype=int)
            if min(len(rest_rows), len(rest_columns)) != needed:
                continue
            rest: List[Tuple[int, int]] = []
            total = fixed_total + weights[row, column]
            if needed:
                rest_weights = weights[np.ix_(rest_rows, rest_columns)]
                sub_rows, sub_columns = linear_sum_assignment(rest_weights, maximize=True)
                total += float(rest_weights[sub_rows, sub_columns].sum())
                rest = sorted(zip(rest_rows[sub_rows].tolist(), rest_columns[sub_columns].tolist()))
            if total >= target:
                return [(row, column)] + rest
    return None


def _unit_rows(vectors: np.ndarray) -> np.ndarray:
    '''
    Rows scaled to unit length; zero rows stay zero.
    '''
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    return np.divide(vectors, norms, out=np.zeros_like(vectors), where=norms > 0)


def sim_optimal_matching(bag_x: WeightedBag, bag_y: WeightedBag) -> SimilarityScore:
    '''
    Align the words of the two sentences by the maximum-weight matching of their
    cosine similarities, average the matched similarities weighted by each
    side's word weights, and average the two sides. Unmatched words count in
    the sentence weight but contribute no similarity.
    '''
    if _unusable(bag_x) or _unusable(bag_y):
        return _undefined(bag_x, bag_y)

    similarities = np.clip(_unit_rows(bag_x.vectors) @ _unit_rows(bag_y.vectors).T, -1.0, 1.0)
    matching = hungarian_matching(similarities)
    rows = np.array([row for row, _ in matching], dtype=int)
    columns = np.array([column for _, column in matching], dtype=int)
    matched = similarities[rows, columns]

    side_x = float(bag_x.weights[rows] @ matched) / bag_x.total_weight
    side_y = float(bag_y.weights[columns] @ matched) / bag_y.total_weight
    return SimilarityScore((side_x + side_y) / 2, oov_x=bag_x.skipped, oov_y=bag_y.skipped, matching=matching)


def sentence_similarity(bag_x: WeightedBag, bag_y: WeightedBag, config: StsConfig) -> SimilarityScore:
    '''
    Score two weighted bags with the configured method.
    '''
    if config.method is StsMethod.LC:
        return sim_linear_combination(bag_x, bag_y)
    if config.method is StsMethod.PA:
        return sim_principal_angles(bag_x, bag_y, config.rank)
    return sim_optimal_matching(bag_x, bag_y)


@dataclass(frozen=True, eq=False)
class StsPipeline:
    '''
    Everything needed to score sentence pairs: the two spaces, an optional
    mapping of the source space into the target space, the word weights, and
    the method. Monolingual scoring uses the same space on both sides and no
    mapping.
    '''
    src_space: SemanticSpace
    tgt_space: SemanticSpace
    config: StsConfig = StsConfig()
    alignment: AlignmentMatrix | None = None
    src_idf: IdfWeights | None = None
    tgt_idf: IdfWeights | None = None

    def __post_init__(self) -> None:
        '''
        Check that the spaces and the mapping share one dimension.
        '''
        if self.alignment is not None and self.alignment.dim != self.src_space.dim:
            raise DimensionMismatchError(f"a {self.alignment.dim}-dimensional mapping cannot map a "
                                         f"{self.src_space.dim}-dimensional source space")
        if self.src_space.dim != self.tgt_space.dim:
            raise DimensionMismatchError(f"source space has dimension {self.src_space.dim}, target space "
                                         f"{self.tgt_space.dim}")
        if self.config.weighting is Weighting.IDF and (self.src_idf is None or self.tgt_idf is None):
            raise PreconditionError("IDF weighting needs IDF weights for both sides")


    def _weights(self, idf: IdfWeights | None) -> IdfWeights:
        '''
        The given IDF weights, or uniform weights when none are set.
        '''
        if self.config.weighting is Weighting.UNIFORM or idf is None:
            return IdfWeights.uniform()
        return idf


    def bags(self, sentence_x: Sentence, sentence_y: Sentence) -> Tuple[WeightedBag, WeightedBag]:
        '''
        Resolve both sentences, mapping the source side when a mapping is set.
        '''
        bag_x = sentence_lookup(sentence_x, self.src_space, self._weights(self.src_idf))
        bag_y = sentence_lookup(sentence_y, self.tgt_space, self._weights(self.tgt_idf))
        if self.alignment is not None:
            bag_x = bag_x.mapped(self.alignment)
        return bag_x, bag_y


    def score(self, sentence_x: Sentence, sentence_y: Sentence) -> SimilarityScore:
        '''
        Score one sentence pair.
        '''
        bag_x, bag_y = self.bags(sentence_x, sentence_y)
        similarity = sentence_similarity(bag_x, bag_y, self.config)
        if similarity.undefined:
            logging.debug("No usable vector for pair %s / %s; scored 0", sentence_x.tokens, sentence_y.tokens)
        return similarity
