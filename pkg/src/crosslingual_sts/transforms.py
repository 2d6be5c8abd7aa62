'''
This module fits linear mappings T between two semantic spaces from a bilingual
dictionary and applies them to vectors.

Vectors are rows throughout: the estimate of a target vector is y_hat = x T and
the backward estimate used by the orthogonal ranking transformation is
x_hat = y T^t.
'''


# core libraries
import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence, TextIO, Tuple

# third party libraries
import numpy as np
from scipy import linalg

# local libraries
from .embeddings import SemanticSpace
from .errors import (DimensionMismatchError, DivergenceError, EmptyDictionaryError, InputFormatError, NumericalError,
                     PreconditionError, RankDeficientError)


# relative floor of the default ridge term: epsilon = _RIDGE_SCALE * trace(C) / d
_RIDGE_SCALE = 1e-8

# singular values below this fraction of the largest are treated as zero
_PINV_CUTOFF = 1e-10

# eigenvalues below this fraction of the largest make a covariance singular
_SINGULAR_CUTOFF = 1e-12


class AlignmentMethod(enum.Enum):
    '''
    The five ways of fitting a mapping.
    '''
    LS = "ls"
    OT = "ot"
    CCA = "cca"
    RT = "rt"
    ORT = "ort"


class Distance(enum.Enum):
    '''
    Distances available to the ranking losses. Inverse cosine is 1 - cos.
    '''
    EUCLIDEAN = "euclidean"
    INVERSE_COSINE = "inverse-cosine"

    @classmethod
    def from_name(cls, name: str) -> "Distance":
        '''
        Look a distance up by its name, in any case, with '-' or '_'.
        '''
        try:
            return cls(name.strip().lower().replace("_", "-"))
        except ValueError as err:
            raise PreconditionError(f"unknown distance '{name}'") from err


@dataclass(frozen=True)
class RankingConfig:
    '''
    Hyperparameters of the ranking transformations.
    '''
    margin: float = 0.0
    negatives_per_side: int = 50
    epochs: int = 5
    learning_rate: float = 0.01
    distance: Distance = Distance.EUCLIDEAN
    seed: int = 0

    def __post_init__(self) -> None:
        '''
        Reject out-of-range hyperparameters.
        '''
        if not self.margin >= 0:
            raise PreconditionError(f"margin must be nonnegative, got {self.margin}")
        if self.negatives_per_side < 1:
            raise PreconditionError(f"negatives per side must be positive, got {self.negatives_per_side}")
        if self.epochs < 0:
            raise PreconditionError(f"epochs must be nonnegative, got {self.epochs}")
        if not (self.learning_rate > 0 and np.isfinite(self.learning_rate)):
            raise PreconditionError(f"learning rate must be a positive real, got {self.learning_rate}")
        if isinstance(self.distance, str):
            object.__setattr__(self, "distance", Distance.from_name(self.distance))


@dataclass(frozen=True)
class BilingualDictionary:
    '''
    Ordered (source word, target word) pairs. Order matters: dictionaries list
    the most frequent source words first.
    '''
    pairs: Tuple[Tuple[str, str], ...]

    def __len__(self) -> int:
        '''
        Number of word pairs.
        '''
        return len(self.pairs)


    def head(self, size: int) -> "BilingualDictionary":
        '''
        The dictionary restricted to its first `size` pairs.
        '''
        return BilingualDictionary(self.pairs[:size])


def load_dictionary(source: Iterable[str]) -> BilingualDictionary:
    '''
    Read a "source<TAB>target" dictionary. Blank lines and lines starting with
    '#' are ignored; both words are lowercased.
    '''
    pairs = []
    for line_number, line in enumerate(source, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [word.strip().lower() for word in line.rstrip("\r\n").split("\t")]
        if len(fields) != 2 or not all(fields):
            raise InputFormatError("expected 'source<TAB>target'", line_number)
        pairs.append((fields[0], fields[1]))

    logging.info("Loaded a bilingual dictionary of %d pairs", len(pairs))
    return BilingualDictionary(tuple(pairs))


class TrainingMatrices(NamedTuple):
    '''
    Row-aligned dictionary matrices and the number of pairs dropped as out of
    vocabulary.
    '''
    X: np.ndarray
    Y: np.ndarray
    dropped: int


def build_training_matrices(dictionary: BilingualDictionary, src: SemanticSpace,
                            tgt: SemanticSpace) -> TrainingMatrices:
    '''
    Stack the source and target vectors of every dictionary pair into the
    matrices X and Y. Pairs with an out-of-vocabulary side are dropped.
    '''
    if src.dim != tgt.dim:
        raise DimensionMismatchError(f"source space has dimension {src.dim}, target space {tgt.dim}")
    if not (src.preprocessed and tgt.preprocessed):
        logging.warning("Building training matrices from spaces that were not centered and normalized")

    src_rows, tgt_rows = [], []
    for source_word, target_word in dictionary.pairs:
        src_row, tgt_row = src.index_of(source_word), tgt.index_of(target_word)
        if src_row is None or tgt_row is None:
            continue
        src_rows.append(src_row)
        tgt_rows.append(tgt_row)

    dropped = len(dictionary) - len(src_rows)
    if not src_rows:
        raise EmptyDictionaryError(f"none of the {len(dictionary)} dictionary pairs is covered by both spaces")
    if dropped:
        logging.warning("Dropped %d of %d dictionary pairs with an out-of-vocabulary side", dropped, len(dictionary))

    return TrainingMatrices(src.vectors[src_rows], tgt.vectors[tgt_rows], dropped)


def orthogonality_defect(matrix: np.ndarray) -> float:
    '''
    The Frobenius norm of T T^t - I.
    '''
    return float(np.linalg.norm(matrix @ matrix.T - np.eye(matrix.shape[0])))


@dataclass(frozen=True)
class FitReport:
    '''
    Diagnostics recorded while fitting a mapping.
    '''
    residual: float
    orthogonality_defect: float
    epoch_losses: Tuple[float, ...] = ()
    epoch_defects: Tuple[float, ...] = ()
    canonical_correlations: Tuple[float, ...] = ()
    ridge: float | None = None


@dataclass(frozen=True, eq=False)
class AlignmentMatrix:
    '''
    A fitted d x d mapping with the method that produced it. The matrix is a
    read-only copy.
    '''
    matrix: np.ndarray
    method: AlignmentMethod
    report: FitReport | None = field(default=None)

    def __post_init__(self) -> None:
        '''
        Validate the matrix and store a read-only copy.
        '''
        matrix = np.array(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"alignment matrix must be square, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise NumericalError("alignment matrix contains non-finite entries")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)


    @property
    def dim(self) -> int:
        '''
        The dimension d of the mapped spaces.
        '''
        return int(self.matrix.shape[0])


    def apply(self, vectors: np.ndarray) -> np.ndarray:
        '''
        Map a row vector, or every row of a matrix, through T.
        '''
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.shape[-1] != self.dim:
            raise DimensionMismatchError(f"vectors of dimension {vectors.shape[-1]} cannot be mapped by a "
                                         f"{self.dim} x {self.dim} matrix")
        return vectors @ self.matrix


    def save(self, stream: TextIO) -> None:
        '''
        Write the "<METHOD> <d>" header and d rows of d reals at 17 significant
        digits, which round-trips every double exactly.
        '''
        stream.write(f"{self.method.name} {self.dim}\n")
        for row in self.matrix:
            stream.write(" ".join(format(value, ".17g") for value in row) + "\n")


    @classmethod
    def load(cls, stream: TextIO) -> "AlignmentMatrix":
        '''
        Read a matrix written by save().
        '''
        lines = iter(stream)
        try:
            method_name, dim_field = next(lines).split()
            method = AlignmentMethod[method_name.upper()]
            dim = int(dim_field)
        except (StopIteration, KeyError, ValueError) as err:
            raise InputFormatError("malformed header, expected '<method> <d>'", 1) from err
        if dim < 1:
            raise InputFormatError(f"invalid dimension {dim}", 1)

        rows = []
        for line_number, line in enumerate(lines, start=2):
            if not line.strip():
                continue
            try:
                row = [float(value) for value in line.split()]
            except ValueError as err:
                raise InputFormatError("non-numeric matrix entry", line_number) from err
            if len(row) != dim:
                raise InputFormatError(f"expected {dim} values, found {len(row)}", line_number)
            rows.append(row)
        if len(rows) != dim:
            raise InputFormatError(f"expected {dim} matrix rows, found {len(rows)}")

        return cls(np.array(rows), method)


def apply_transform(alignment: AlignmentMatrix, vector: np.ndarray) -> np.ndarray:
    '''
    Map a row vector (or the rows of a matrix) into the target space: v T.
    '''
    return alignment.apply(vector)


def _check_matrices(X: np.ndarray, Y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    '''
    Validate a pair of row-aligned dictionary matrices.
    '''
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.ndim != 2 or X.shape != Y.shape:
        raise DimensionMismatchError(f"X and Y must have identical shapes, got {X.shape} and {Y.shape}")
    if X.shape[0] < 1:
        raise EmptyDictionaryError("X and Y have no rows")
    return X, Y


def _residual(X: np.ndarray, Y: np.ndarray, matrix: np.ndarray) -> float:
    '''
    Squared Frobenius norm of Y - X T.
    '''
    return float(np.sum((Y - X @ matrix) ** 2))


def _default_ridge(covariance: np.ndarray) -> float:
    '''
    Ridge scaled to the mean diagonal entry of the covariance.
    '''
    return _RIDGE_SCALE * float(np.trace(covariance)) / covariance.shape[0]


def fit_least_squares(X: np.ndarray, Y: np.ndarray, ridge: float | None=None) -> AlignmentMatrix:
    '''
    Minimize the squared residuals ||Y - X T||: T = (X^t X + eps I)^-1 X^t Y,
    solved with a Cholesky factorization. `ridge` is eps; None selects the
    scale-aware default 1e-8 trace(X^t X) / d.
    '''
    X, Y = _check_matrices(X, Y)
    gram = X.T @ X
    epsilon = _default_ridge(gram) if ridge is None else ridge
    if epsilon < 0:
        raise PreconditionError(f"ridge must be nonnegative, got {epsilon}")
    if epsilon == 0 and np.linalg.matrix_rank(X) < X.shape[1]:
        raise RankDeficientError("X^t X is singular; use a positive ridge (--ridge) to fit least squares")

    logging.info("Fitting least squares mapping on %d pairs (ridge %.3g)", X.shape[0], epsilon)
    try:
        factor = linalg.cho_factor(gram + epsilon * np.eye(gram.shape[0]))
        matrix = linalg.cho_solve(factor, X.T @ Y)
    except linalg.LinAlgError as err:
        raise RankDeficientError("X^t X is singular; use a positive ridge (--ridge) to fit least squares") from err

    report = FitReport(residual=_residual(X, Y, matrix), orthogonality_defect=orthogonality_defect(matrix),
                       ridge=epsilon)
    return AlignmentMatrix(matrix, AlignmentMethod.LS, report)


def fit_orthogonal(X: np.ndarray, Y: np.ndarray) -> AlignmentMatrix:
    '''
    Least squares under the constraint that T is orthogonal (Procrustes): with
    Y^t X = U S V^t, T = V U^t.
    '''
    X, Y = _check_matrices(X, Y)
    logging.info("Fitting orthogonal mapping on %d pairs", X.shape[0])
    try:
        u, _, vt = linalg.svd(Y.T @ X)
    except linalg.LinAlgError as err:
        raise NumericalError(f"SVD of Y^t X failed: {err}") from err
    matrix = vt.T @ u.T

    report = FitReport(residual=_residual(X, Y, matrix), orthogonality_defect=orthogonality_defect(matrix))
    return AlignmentMatrix(matrix, AlignmentMethod.OT, report)


def _inverse_sqrt(covariance: np.ndarray, side: str) -> np.ndarray:
    '''
    The inverse square root of a symmetric positive definite covariance.
    '''
    eigenvalues, eigenvectors = linalg.eigh(covariance)
    if eigenvalues[-1] <= 0 or eigenvalues[0] <= _SINGULAR_CUTOFF * eigenvalues[-1]:
        usable = int(np.count_nonzero(eigenvalues > _SINGULAR_CUTOFF * max(eigenvalues[-1], 0.0)))
        raise RankDeficientError(f"only {usable} of {covariance.shape[0]} usable directions in the {side} "
                                 "covariance; use a positive ridge (--ridge) to fit CCA")
    return (eigenvectors / np.sqrt(eigenvalues)) @ eigenvectors.T


def _pseudo_inverse(matrix: np.ndarray) -> np.ndarray:
    '''
    Moore-Penrose pseudo-inverse dropping singular values below 1e-10 of the
    largest.
    '''
    u, singular_values, vt = linalg.svd(matrix)
    keep = singular_values > _PINV_CUTOFF * singular_values[0]
    return (vt[keep].T / singular_values[keep]) @ u[:, keep].T


def fit_cca(X: np.ndarray, Y: np.ndarray, ridge: float | None=None) -> AlignmentMatrix:
    '''
    Canonical correlation analysis: compute all d pairs of canonical directions
    (C_x, C_y) on the column-centered matrices and map with T = C_x C_y^-1.
    `ridge` regularizes both covariances as in fit_least_squares.
    '''
    X, Y = _check_matrices(X, Y)
    rows = X.shape[0]
    centered_x = X - X.mean(axis=0)
    centered_y = Y - Y.mean(axis=0)
    cov_xx = centered_x.T @ centered_x / rows
    cov_yy = centered_y.T @ centered_y / rows
    cov_xy = centered_x.T @ centered_y / rows

    epsilon_x = _default_ridge(cov_xx) if ridge is None else ridge
    epsilon_y = _default_ridge(cov_yy) if ridge is None else ridge
    if min(epsilon_x, epsilon_y) < 0:
        raise PreconditionError(f"ridge must be nonnegative, got {ridge}")

    logging.info("Fitting CCA mapping on %d pairs", rows)
    identity = np.eye(X.shape[1])
    whiten_x = _inverse_sqrt(cov_xx + epsilon_x * identity, "source")
    whiten_y = _inverse_sqrt(cov_yy + epsilon_y * identity, "target")
    u, correlations, vt = linalg.svd(whiten_x @ cov_xy @ whiten_y)
    directions_x = whiten_x @ u
    directions_y = whiten_y @ vt.T
    matrix = directions_x @ _pseudo_inverse(directions_y)

    report = FitReport(residual=_residual(X, Y, matrix), orthogonality_defect=orthogonality_defect(matrix),
                       canonical_correlations=tuple(float(value) for value in correlations),
                       ridge=max(epsilon_x, epsilon_y))
    return AlignmentMatrix(matrix, AlignmentMethod.CCA, report)


def _distances(vector: np.ndarray, rows: np.ndarray, distance: Distance) -> np.ndarray:
    '''
    Distances from one vector to every row of a matrix.
    '''
    rows = np.atleast_2d(rows)
    if distance is Distance.EUCLIDEAN:
        return np.linalg.norm(rows - vector, axis=1)

    norms = np.linalg.norm(rows, axis=1) * np.linalg.norm(vector)
    dots = rows @ vector
    cosines = np.divide(dots, norms, out=np.zeros_like(dots), where=norms > 0)
    return 1.0 - cosines


def _distance_gradients(vector: np.ndarray, rows: np.ndarray, distance: Distance) -> np.ndarray:
    '''
    Gradients of D(vector, row) with respect to the vector, one per row. Zero
    where the distance is not differentiable.
    '''
    rows = np.atleast_2d(rows)
    if distance is Distance.EUCLIDEAN:
        differences = vector - rows
        norms = np.linalg.norm(differences, axis=1, keepdims=True)
        return np.divide(differences, norms, out=np.zeros_like(differences), where=norms > 0)

    vector_norm = np.linalg.norm(vector)
    row_norms = np.linalg.norm(rows, axis=1, keepdims=True)
    if vector_norm == 0:
        return np.zeros_like(rows)
    dots = rows @ vector
    with np.errstate(divide="ignore", invalid="ignore"):
        gradients = (dots[:, np.newaxis] * vector) / (vector_norm ** 3 * row_norms)
        gradients -= rows / (vector_norm * row_norms)
    return np.where(row_norms > 0, gradients, 0.0)


def rank_loss(estimate: np.ndarray, truth: np.ndarray, negatives: np.ndarray, margin: float,
              distance: Distance) -> float:
    '''
    The max-margin ranking loss: sum over the negatives n of
    max(0, margin + D(estimate, truth) - D(estimate, n)).
    '''
    negatives = np.asarray(negatives, dtype=np.float64)
    if negatives.size == 0:
        return 0.0
    positive = _distances(estimate, truth, distance)[0]
    hinges = margin + positive - _distances(estimate, negatives, distance)
    return float(np.maximum(hinges, 0.0).sum())


def _rank_loss_with_gradient(estimate: np.ndarray, truth: np.ndarray, negatives: np.ndarray, margin: float,
                             distance: Distance) -> Tuple[float, np.ndarray]:
    '''
    The ranking loss and its subgradient with respect to the estimate. The
    subgradient of a hinge at its kink is taken as 0.
    '''
    positive = _distances(estimate, truth, distance)[0]
    hinges = margin + positive - _distances(estimate, negatives, distance)
    if not np.all(np.isfinite(hinges)):
        return float("nan"), np.zeros_like(estimate)
    active = hinges > 0
    if not np.any(active):
        return 0.0, np.zeros_like(estimate)

    gradient = np.count_nonzero(active) * _distance_gradients(estimate, truth, distance)[0]
    gradient -= _distance_gradients(estimate, negatives[active], distance).sum(axis=0)
    return float(hinges[active].sum()), gradient


def select_negatives(estimate: np.ndarray, truth: np.ndarray, pool: np.ndarray, count: int, distance: Distance,
                     exclude: int | None=None) -> np.ndarray:
    '''
    Indices of the `count` rows n of the pool that intrude most on the pair,
    i.e. with the smallest D(estimate, n) - D(truth, n). The row `exclude` (the
    truth itself) and any row equal to the truth, such as a repeated dictionary
    pair, are never selected; ties go to the lower index.
    '''
    scores = _distances(estimate, pool, distance) - _distances(truth, pool, distance)
    candidates = np.flatnonzero(np.any(pool != truth, axis=1))
    if exclude is not None:
        candidates = candidates[candidates != exclude]
    order = np.argsort(scores[candidates], kind="stable")
    return candidates[order[:min(count, len(candidates))]]


def _example_terms(matrix: np.ndarray, X: np.ndarray, Y: np.ndarray, row: int, forward: np.ndarray,
                   backward: np.ndarray | None, config: RankingConfig) -> Tuple[float, np.ndarray]:
    '''
    The loss of one dictionary row, each side averaged over its negatives, and
    its subgradient with respect to T. `backward` is None for the one-sided
    ranking transformation.
    '''
    x, y = X[row], Y[row]
    loss, gradient = 0.0, np.zeros_like(matrix)
    if len(forward):
        side_loss, estimate_gradient = _rank_loss_with_gradient(x @ matrix, y, Y[forward], config.margin,
                                                                config.distance)
        loss += side_loss / len(forward)
        gradient += np.outer(x, estimate_gradient) / len(forward)
    if backward is not None and len(backward):
        side_loss, estimate_gradient = _rank_loss_with_gradient(y @ matrix.T, x, X[backward], config.margin,
                                                                config.distance)
        loss += side_loss / len(backward)
        gradient += np.outer(estimate_gradient, y) / len(backward)
    return loss, gradient


def ranking_objective(matrix: np.ndarray, X: np.ndarray, Y: np.ndarray, negatives: Sequence[np.ndarray],
                      config: RankingConfig) -> float:
    '''
    The ranking objective summed over all dictionary rows, for a fixed choice of
    negative rows of Y per example.
    '''
    return sum(_example_terms(matrix, X, Y, row, negatives[row], None, config)[0] for row in range(len(X)))


def ranking_gradient(matrix: np.ndarray, X: np.ndarray, Y: np.ndarray, negatives: Sequence[np.ndarray],
                     config: RankingConfig) -> np.ndarray:
    '''
    Subgradient of ranking_objective with respect to T.
    '''
    return sum((_example_terms(matrix, X, Y, row, negatives[row], None, config)[1] for row in range(len(X))),
               np.zeros_like(matrix))


def orthogonal_ranking_objective(matrix: np.ndarray, X: np.ndarray, Y: np.ndarray,
                                 forward_negatives: Sequence[np.ndarray], backward_negatives: Sequence[np.ndarray],
                                 config: RankingConfig) -> float:
    '''
    The two-sided objective: the ranking loss of x T against Y plus the ranking
    loss of y T^t against X, summed over all dictionary rows for fixed negatives.
    '''
    return sum(_example_terms(matrix, X, Y, row, forward_negatives[row], backward_negatives[row], config)[0]
               for row in range(len(X)))


def orthogonal_ranking_gradient(matrix: np.ndarray, X: np.ndarray, Y: np.ndarray,
                                forward_negatives: Sequence[np.ndarray], backward_negatives: Sequence[np.ndarray],
                                config: RankingConfig) -> np.ndarray:
    '''
    Subgradient of orthogonal_ranking_objective with respect to T.
    '''
    return sum((_example_terms(matrix, X, Y, row, forward_negatives[row], backward_negatives[row], config)[1]
                for row in range(len(X))), np.zeros_like(matrix))


# callback receiving the epoch number and the mapping reached after it
EpochCallback = Callable[[int, AlignmentMatrix], None]


def _fit_by_ranking(X: np.ndarray, Y: np.ndarray, config: RankingConfig, method: AlignmentMethod,
                    on_epoch: EpochCallback | None) -> AlignmentMatrix:
    '''
    Stochastic gradient descent shared by RT and ORT. Starts from the
    orthogonal mapping, visits the rows in a seeded random order every epoch,
    and picks fresh negatives for every example.
    '''
    X, Y = _check_matrices(X, Y)
    initial = fit_orthogonal(X, Y)
    matrix = np.array(initial.matrix)
    if on_epoch:
        on_epoch(0, AlignmentMatrix(matrix, method, initial.report))

    rows = X.shape[0]
    count = config.negatives_per_side
    if count >= rows:
        count = rows - 1
        logging.warning("Only %d dictionary pairs; using %d negatives per side instead of %d", rows, count,
                        config.negatives_per_side)

    two_sided = method is AlignmentMethod.ORT
    generator = np.random.default_rng(config.seed)
    losses: list[float] = []
    defects: list[float] = []
    epochs = config.epochs if count > 0 else 0
    for epoch in range(1, epochs + 1):
        total = 0.0
        for row in generator.permutation(rows):
            forward = select_negatives(X[row] @ matrix, Y[row], Y, count, config.distance, exclude=row)
            backward = None
            if two_sided:
                backward = select_negatives(Y[row] @ matrix.T, X[row], X, count, config.distance, exclude=row)
            loss, gradient = _example_terms(matrix, X, Y, row, forward, backward, config)
            total += loss
            matrix -= config.learning_rate * gradient

        epoch_loss = total / rows
        if not (np.isfinite(epoch_loss) and np.all(np.isfinite(matrix))):
            raise DivergenceError(f"loss diverged in epoch {epoch} with learning rate {config.learning_rate}; "
                                  "lower the learning rate (--lr)")
        losses.append(epoch_loss)
        defects.append(orthogonality_defect(matrix))
        logging.info("%s epoch %d: loss %.6g, orthogonality defect %.6g", method.name, epoch, epoch_loss, defects[-1])

        if on_epoch:
            partial = FitReport(residual=_residual(X, Y, matrix), orthogonality_defect=defects[-1],
                                epoch_losses=tuple(losses), epoch_defects=tuple(defects))
            on_epoch(epoch, AlignmentMatrix(matrix, method, partial))

    report = FitReport(residual=_residual(X, Y, matrix), orthogonality_defect=orthogonality_defect(matrix),
                       epoch_losses=tuple(losses), epoch_defects=tuple(defects))
    return AlignmentMatrix(matrix, method, report)


def fit_ranking(X: np.ndarray, Y: np.ndarray, config: RankingConfig | None=None,
                on_epoch: EpochCallback | None=None) -> AlignmentMatrix:
    '''
    Ranking transformation: minimize the max-margin ranking loss of x T against
    the rows of Y by stochastic gradient descent.
    '''
    logging.info("Fitting ranking mapping")
    return _fit_by_ranking(X, Y, config or RankingConfig(), AlignmentMethod.RT, on_epoch)


def fit_orthogonal_ranking(X: np.ndarray, Y: np.ndarray, config: RankingConfig | None=None,
                           on_epoch: EpochCallback | None=None) -> AlignmentMatrix:
    '''
    Orthogonal ranking transformation: one matrix trained with the ranking loss
    in both directions, x T against Y and y T^t against X, which keeps T nearly
    orthogonal.
    '''
    logging.info("Fitting orthogonal ranking mapping")
    return _fit_by_ranking(X, Y, config or RankingConfig(), AlignmentMethod.ORT, on_epoch)


def fit_alignment(method: AlignmentMethod, X: np.ndarray, Y: np.ndarray, config: RankingConfig | None=None,
                  ridge: float | None=None, on_epoch: EpochCallback | None=None) -> AlignmentMatrix:
    '''
    Fit a mapping with the named method.
    '''
    if method is AlignmentMethod.LS:
        return fit_least_squares(X, Y, ridge)
    if method is AlignmentMethod.OT:
        return fit_orthogonal(X, Y)
    if method is AlignmentMethod.CCA:
        return fit_cca(X, Y, ridge)
    if method is AlignmentMethod.RT:
        return fit_ranking(X, Y, config, on_epoch)
    return fit_orthogonal_ranking(X, Y, config, on_epoch)
