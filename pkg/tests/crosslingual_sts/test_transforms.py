'''
Test the module crosslingual_sts.transforms
'''


# core libraries
import io
import itertools

# third party libraries
import numpy as np

# testing libraries
import pytest

# cross-lingual sts libraries
from crosslingual_sts import transforms as test_transforms
from crosslingual_sts.diagnostics import retrieval_precision
from crosslingual_sts.embeddings import SemanticSpace
from crosslingual_sts.errors import (DimensionMismatchError, DivergenceError, EmptyDictionaryError, InputFormatError,
                                     PreconditionError, RankDeficientError)


def _random_rotation(rng, dim):
    '''
    A random orthogonal matrix from the QR decomposition of a gaussian matrix.
    '''
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
    return q * np.sign(np.diag(r))


def _unit_rows(rng, rows, dim):
    matrix = rng.normal(size=(rows, dim))
    return matrix / np.linalg.norm(matrix, axis=1, keepdims=True)


@pytest.fixture
def noisy_rotation(rng):
    '''
    Dictionary matrices related by a rotation plus gaussian noise (sigma 0.01),
    with 100 held out pairs.
    '''
    dim, train, held_out = 10, 500, 100
    rotation = _random_rotation(rng, dim)
    X = _unit_rows(rng, train + held_out, dim)
    Y = X @ rotation + rng.normal(scale=0.01, size=X.shape)
    return X[:train], Y[:train], X[train:], Y[train:]


def test_load_dictionary():
    '''
    Test the load_dictionary() function skips comments and blank lines and
    lowercases both words.
    '''
    dictionary = test_transforms.load_dictionary(["# comment\n", "Cat\tGato\n", "\n", "dog\tperro\r\n"])
    assert (("cat", "gato"), ("dog", "perro")) == dictionary.pairs
    assert (("cat", "gato"),) == dictionary.head(1).pairs


@pytest.mark.parametrize("line", ["cat gato\n", "cat\t\n", "cat\tgato\tgata\n"])
def test_load_dictionary_malformed(line):
    '''
    Test the load_dictionary() function names the malformed line.
    '''
    with pytest.raises(InputFormatError) as err:
        test_transforms.load_dictionary(["cat\tgato\n", line])
    assert 2 == err.value.line_number


def test_build_training_matrices(caplog):
    '''
    Test the build_training_matrices() function drops pairs with an
    out-of-vocabulary side and keeps duplicate pairs.
    '''
    src = SemanticSpace(("cat", "dog"), np.eye(2), preprocessed=True)
    tgt = SemanticSpace(("gato", "perro"), np.array([[0.0, 1.0], [1.0, 0.0]]), preprocessed=True)
    dictionary = test_transforms.BilingualDictionary((("cat", "gato"), ("zebra", "cebra"), ("dog", "perro"),
                                                      ("cat", "gato")))

    matrices = test_transforms.build_training_matrices(dictionary, src, tgt)
    assert 1 == matrices.dropped
    np.testing.assert_array_equal([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]], matrices.X)
    np.testing.assert_array_equal([[0.0, 1.0], [1.0, 0.0], [0.0, 1.0]], matrices.Y)
    assert "Dropped 1 of 4" in caplog.text


def test_build_training_matrices_identical():
    '''
    Test identical dictionaries against identical spaces give X equal to Y.
    '''
    space = SemanticSpace(("a", "b", "c"), np.arange(6.0).reshape(3, 2), preprocessed=True)
    dictionary = test_transforms.BilingualDictionary((("a", "a"), ("c", "c"), ("b", "b")))
    matrices = test_transforms.build_training_matrices(dictionary, space, space)
    np.testing.assert_array_equal(matrices.X, matrices.Y)


def test_build_training_matrices_errors():
    '''
    Test the build_training_matrices() function rejects mismatched dimensions
    and dictionaries with no covered pair.
    '''
    src = SemanticSpace(("cat",), np.ones((1, 2)))
    with pytest.raises(DimensionMismatchError):
        test_transforms.build_training_matrices(test_transforms.BilingualDictionary((("cat", "gato"),)), src,
                                                SemanticSpace(("gato",), np.ones((1, 3))))
    with pytest.raises(EmptyDictionaryError):
        test_transforms.build_training_matrices(test_transforms.BilingualDictionary((("zebra", "gato"),)), src,
                                                SemanticSpace(("gato",), np.ones((1, 2))))


def test_fit_orthogonal_is_orthogonal(rng):
    '''
    Test the fit_orthogonal() function always returns an orthogonal matrix.
    '''
    for _, dim, factor in itertools.product(range(9), (2, 5, 20), (1, 5)):
        X = rng.normal(size=(dim * factor, dim))
        Y = rng.normal(size=(dim * factor, dim))
        matrix = test_transforms.fit_orthogonal(X, Y).matrix
        assert np.max(np.abs(matrix @ matrix.T - np.eye(dim))) < 1e-8


def test_fit_orthogonal_recovery(rng):
    '''
    Test the fit_orthogonal() function recovers a rotation exactly, and the
    identity for Y = X.
    '''
    rotation = _random_rotation(rng, 3)
    X = rng.normal(size=(10, 3))
    alignment = test_transforms.fit_orthogonal(X, X @ rotation)
    assert np.linalg.norm(alignment.matrix - rotation) < 1e-8
    assert test_transforms.AlignmentMethod.OT is alignment.method
    assert alignment.report.orthogonality_defect < 1e-8

    assert np.linalg.norm(test_transforms.fit_orthogonal(X, X).matrix - np.eye(3)) < 1e-10


def test_fit_orthogonal_rotated_source(rng):
    '''
    Test that rotating the source rows by Q rotates the fitted matrix by Q^t.
    '''
    for dim in (2, 5, 10):
        X = rng.normal(size=(4 * dim, dim))
        Y = rng.normal(size=(4 * dim, dim))
        rotation = _random_rotation(rng, dim)
        fitted = test_transforms.fit_orthogonal(X, Y).matrix
        rotated = test_transforms.fit_orthogonal(X @ rotation, Y).matrix
        assert np.linalg.norm(rotated - rotation.T @ fitted) < 1e-8


def test_fit_orthogonal_preserves_angles(rng):
    '''
    Test that mapping through a fitted orthogonal matrix keeps the cosine of
    every pair of vectors.
    '''
    alignment = test_transforms.fit_orthogonal(rng.normal(size=(30, 6)), rng.normal(size=(30, 6)))
    for _ in range(20):
        u, v = rng.normal(size=(2, 6))
        mapped_u = test_transforms.apply_transform(alignment, u)
        mapped_v = test_transforms.apply_transform(alignment, v)
        before = u @ v / (np.linalg.norm(u) * np.linalg.norm(v))
        after = mapped_u @ mapped_v / (np.linalg.norm(mapped_u) * np.linalg.norm(mapped_v))
        assert before == pytest.approx(after, abs=1e-10)


def test_noisy_rotation_retrieval(noisy_rotation):
    '''
    Test OT and ORT translate held out words with precision@1 of at least 0.95
    under small noise.
    '''
    X, Y, X_test, Y_test = noisy_rotation
    assert retrieval_precision(test_transforms.fit_orthogonal(X, Y), X_test, Y_test) >= 0.95
    assert retrieval_precision(test_transforms.fit_orthogonal_ranking(X, Y), X_test, Y_test) >= 0.95


def test_ranking_retrieval_not_worse_than_least_squares(noisy_rotation):
    '''
    Test RT translates held out words at least as well as least squares under
    small noise.
    '''
    X, Y, X_test, Y_test = noisy_rotation
    ranking = retrieval_precision(test_transforms.fit_ranking(X, Y), X_test, Y_test)
    assert ranking >= 0.95
    assert ranking >= retrieval_precision(test_transforms.fit_least_squares(X, Y), X_test, Y_test)


def test_fit_least_squares(rng):
    '''
    Test the fit_least_squares() function against an independent least squares
    solution, and that its residual never exceeds the orthogonal one.
    '''
    for _ in range(20):
        X = rng.normal(size=(20, 4))
        Y = rng.normal(size=(20, 4))
        alignment = test_transforms.fit_least_squares(X, Y, ridge=0.0)
        oracle = np.linalg.lstsq(X, Y, rcond=None)[0]
        assert np.linalg.norm(alignment.matrix - oracle) < 1e-8
        assert alignment.report.residual <= test_transforms.fit_orthogonal(X, Y).report.residual + 1e-12


def test_fit_least_squares_examples(rng):
    '''
    Test the fit_least_squares() function returns Y when X is the identity and
    recovers a known linear map.
    '''
    Y = rng.normal(size=(3, 3))
    assert np.linalg.norm(test_transforms.fit_least_squares(np.eye(3), Y, ridge=0.0).matrix - Y) < 1e-10

    X = rng.normal(size=(50, 5))
    linear_map = rng.normal(size=(5, 5))
    assert np.linalg.norm(test_transforms.fit_least_squares(X, X @ linear_map, ridge=0.0).matrix - linear_map) < 1e-8

    # the default ridge perturbs the solution only slightly
    alignment = test_transforms.fit_least_squares(X, X @ linear_map)
    assert alignment.report.ridge > 0
    assert np.linalg.norm(alignment.matrix - linear_map) < 1e-5


def test_fit_least_squares_rank_deficient(rng):
    '''
    Test the fit_least_squares() function refuses a singular X^t X without a
    ridge, and solves it with one.
    '''
    X = rng.normal(size=(10, 3))
    X[:, 2] = X[:, 0]
    Y = rng.normal(size=(10, 3))
    with pytest.raises(RankDeficientError) as err:
        test_transforms.fit_least_squares(X, Y, ridge=0.0)
    assert "ridge" in str(err.value)
    assert np.all(np.isfinite(test_transforms.fit_least_squares(X, Y, ridge=1e-3).matrix))
    with pytest.raises(PreconditionError):
        test_transforms.fit_least_squares(X, Y, ridge=-1.0)


def test_fit_cca_identical(rng):
    '''
    Test the fit_cca() function finds correlations of 1 and the identity map
    when Y = X.
    '''
    X = rng.normal(size=(50, 4))
    alignment = test_transforms.fit_cca(X, X, ridge=0.0)
    np.testing.assert_allclose(np.ones(4), alignment.report.canonical_correlations, atol=1e-8)
    assert np.linalg.norm(alignment.matrix - np.eye(4)) < 1e-6


def test_fit_cca_grid_oracle():
    '''
    Test the first canonical correlation of a hand-sized instance against a
    dense grid search over unit directions.
    '''
    X = np.array([[1.0, 2.0], [2.0, 1.0], [3.0, 5.0], [4.0, 3.0], [5.0, 6.0], [6.0, 4.0]])
    Y = np.array([[2.0, 0.5], [1.0, 2.5], [4.0, 1.0], [3.5, 3.0], [5.0, 2.0], [4.5, 5.5]])
    alignment = test_transforms.fit_cca(X, Y, ridge=0.0)

    angles = np.linspace(0.0, np.pi, 1441)
    directions = np.vstack([np.cos(angles), np.sin(angles)])
    projected_x = (X - X.mean(axis=0)) @ directions
    projected_y = (Y - Y.mean(axis=0)) @ directions
    projected_x /= np.linalg.norm(projected_x, axis=0)
    projected_y /= np.linalg.norm(projected_y, axis=0)
    oracle = np.max(np.abs(projected_x.T @ projected_y))

    assert abs(alignment.report.canonical_correlations[0] - oracle) < 1e-3


def test_fit_cca_rank_deficient(rng):
    '''
    Test the fit_cca() function refuses a covariance with a dead direction
    without a ridge.
    '''
    X = rng.normal(size=(10, 3))
    X[:, 1] = 2.0
    with pytest.raises(RankDeficientError):
        test_transforms.fit_cca(X, rng.normal(size=(10, 3)), ridge=0.0)


@pytest.mark.parametrize("estimate, negatives, expected", [
    ((1.0, 0.0), [(5.0, 5.0)], 0.0),
    ((0.0, 0.0), [(0.5, 0.0)], 0.5),
    ((0.0, 0.0), [(3.0, 0.0)], 0.0),
    ((0.0, 0.0), np.zeros((0, 2)), 0.0),
])
def test_rank_loss(estimate, negatives, expected):
    '''
    Test the rank_loss() function on hand-computed hinges.
    '''
    loss = test_transforms.rank_loss(np.array(estimate), np.array([1.0, 0.0]), np.array(negatives), 0.0,
                                     test_transforms.Distance.EUCLIDEAN)
    assert expected == pytest.approx(loss)


def test_rank_loss_inverse_cosine():
    '''
    Test the rank_loss() function with the inverse cosine distance.
    '''
    loss = test_transforms.rank_loss(np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([[1.0, 1.0]]), 0.1,
                                     test_transforms.Distance.INVERSE_COSINE)
    assert 0.1 + 1.0 - (1.0 - 1.0 / np.sqrt(2)) == pytest.approx(loss)


def test_select_negatives(rng):
    '''
    Test the select_negatives() function against exhaustive scoring.
    '''
    pool = rng.normal(size=(5, 3))
    for row in range(5):
        estimate = pool[row] + rng.normal(scale=0.5, size=3)
        scores = [(np.linalg.norm(estimate - pool[j]) - np.linalg.norm(pool[row] - pool[j]), j)
                  for j in range(5) if j != row]
        expected = [j for _, j in sorted(scores)[:2]]
        selected = test_transforms.select_negatives(estimate, pool[row], pool, 2,
                                                    test_transforms.Distance.EUCLIDEAN, exclude=row)
        assert expected == selected.tolist()


def test_select_negatives_ties():
    '''
    Test the select_negatives() function breaks equal scores by lower index.
    '''
    pool = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    selected = test_transforms.select_negatives(pool[0], pool[0], pool, 3, test_transforms.Distance.EUCLIDEAN,
                                                exclude=0)
    assert [1, 2, 3] == selected.tolist()


def test_select_negatives_repeated_pair():
    '''
    Test the select_negatives() function skips rows equal to the truth, as left
    by a repeated dictionary pair.
    '''
    pool = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [-1.0, 0.0]])
    selected = test_transforms.select_negatives(pool[0], pool[0], pool, 3, test_transforms.Distance.EUCLIDEAN,
                                                exclude=0)
    assert [1, 3] == selected.tolist()


def _smallest_hinge(matrix, X, Y, forward, backward, margin, distance):
    '''
    The hinge closest to its kink over every example and negative.
    '''
    # pylint: disable=protected-access
    smallest = np.inf
    for row in range(len(X)):
        sides = [(X[row] @ matrix, Y[row], Y[forward[row]])]
        if backward is not None:
            sides.append((Y[row] @ matrix.T, X[row], X[backward[row]]))
        for estimate, truth, negatives in sides:
            hinges = (margin + test_transforms._distances(estimate, truth, distance)[0]
                      - test_transforms._distances(estimate, negatives, distance))
            smallest = min(smallest, float(np.min(np.abs(hinges))))
    return smallest


def _numeric_gradient(objective, matrix, step=1e-5):
    gradient = np.zeros_like(matrix)
    for index in np.ndindex(*matrix.shape):
        shift = np.zeros_like(matrix)
        shift[index] = step
        gradient[index] = (objective(matrix + shift) - objective(matrix - shift)) / (2 * step)
    return gradient


@pytest.mark.parametrize("distance", list(test_transforms.Distance))
@pytest.mark.parametrize("two_sided", [False, True])
def test_ranking_gradients(rng, distance, two_sided):
    '''
    Test the analytic subgradients of both ranking objectives against central
    finite differences at points away from any kink.
    '''
    rows, dim = 6, 3
    X = rng.normal(size=(rows, dim))
    Y = rng.normal(size=(rows, dim))
    forward = [np.array([(row + 1) % rows, (row + 2) % rows]) for row in range(rows)]
    backward = [np.array([(row + 3) % rows, (row + 4) % rows]) for row in range(rows)] if two_sided else None
    config = test_transforms.RankingConfig(margin=0.5, distance=distance)

    if two_sided:
        def objective(matrix):
            return test_transforms.orthogonal_ranking_objective(matrix, X, Y, forward, backward, config)

        def gradient(matrix):
            return test_transforms.orthogonal_ranking_gradient(matrix, X, Y, forward, backward, config)
    else:
        def objective(matrix):
            return test_transforms.ranking_objective(matrix, X, Y, forward, config)

        def gradient(matrix):
            return test_transforms.ranking_gradient(matrix, X, Y, forward, config)

    checked = 0
    while checked < 20:
        matrix = rng.normal(size=(dim, dim))
        if _smallest_hinge(matrix, X, Y, forward, backward, config.margin, distance) < 1e-3:
            continue
        numeric = _numeric_gradient(objective, matrix)
        analytic = gradient(matrix)
        assert np.linalg.norm(analytic - numeric) / max(np.linalg.norm(numeric), 1e-8) < 1e-4
        checked += 1


def test_orthogonal_ranking_objective_identity(rng):
    '''
    Test the two-sided objective vanishes at T = I when Y = X and the margin is 0.
    '''
    X = rng.normal(size=(5, 3))
    negatives = [np.array([(row + 1) % 5]) for row in range(5)]
    config = test_transforms.RankingConfig(margin=0.0)
    assert 0.0 == test_transforms.orthogonal_ranking_objective(np.eye(3), X, X, negatives, negatives, config)


@pytest.mark.parametrize("fit", [test_transforms.fit_ranking, test_transforms.fit_orthogonal_ranking])
def test_ranking_epoch_zero(rng, fit):
    '''
    Test zero epochs returns the orthogonal mapping exactly.
    '''
    X = rng.normal(size=(30, 4))
    Y = rng.normal(size=(30, 4))
    alignment = fit(X, Y, test_transforms.RankingConfig(epochs=0))
    np.testing.assert_array_equal(test_transforms.fit_orthogonal(X, Y).matrix, alignment.matrix)
    assert () == alignment.report.epoch_losses


def test_orthogonal_ranking_behavior(noisy_rotation):
    '''
    Test ORT starts from OT, never ends with a higher loss than after its first
    epoch, and stays at least as orthogonal as RT on the same data and seed.
    '''
    X, Y, _, _ = noisy_rotation
    snapshots = {}

    def record(epoch, alignment):
        snapshots[epoch] = alignment

    ort = test_transforms.fit_orthogonal_ranking(X, Y, on_epoch=record)
    rt = test_transforms.fit_ranking(X, Y)

    np.testing.assert_array_equal(test_transforms.fit_orthogonal(X, Y).matrix, snapshots[0].matrix)
    assert [0, 1, 2, 3, 4, 5] == sorted(snapshots)
    assert 5 == len(ort.report.epoch_losses)
    assert ort.report.epoch_losses[4] <= ort.report.epoch_losses[0]
    assert ort.report.orthogonality_defect <= rt.report.orthogonality_defect
    assert test_transforms.AlignmentMethod.ORT is ort.method


def test_orthogonal_ranking_reversal(rng):
    '''
    Test fitting ORT in the opposite direction approximately gives the
    transposed matrix.
    '''
    rotation = _random_rotation(rng, 5)
    X = _unit_rows(rng, 200, 5)
    Y = X @ rotation
    forward = test_transforms.fit_orthogonal_ranking(X, Y)
    backward = test_transforms.fit_orthogonal_ranking(Y, X)
    assert np.linalg.norm(backward.matrix - forward.matrix.T) < 0.1


def test_ranking_seeded(rng):
    '''
    Test the same seed gives bitwise identical mappings.
    '''
    X = rng.normal(size=(40, 3))
    Y = rng.normal(size=(40, 3))
    config = test_transforms.RankingConfig(margin=0.2, negatives_per_side=5, epochs=2, seed=7)
    first = test_transforms.fit_orthogonal_ranking(X, Y, config)
    second = test_transforms.fit_orthogonal_ranking(X, Y, config)
    np.testing.assert_array_equal(first.matrix, second.matrix)
    assert first.report.epoch_losses == second.report.epoch_losses


def test_ranking_few_pairs(rng, caplog):
    '''
    Test the negatives are capped below the number of dictionary pairs.
    '''
    X = rng.normal(size=(4, 2))
    alignment = test_transforms.fit_ranking(X, X, test_transforms.RankingConfig(epochs=1))
    assert 1 == len(alignment.report.epoch_losses)
    assert "using 3 negatives" in caplog.text


def test_ranking_divergence(rng):
    '''
    Test a huge learning rate aborts with a DivergenceError.
    '''
    X = rng.normal(size=(20, 3))
    Y = rng.normal(size=(20, 3))
    config = test_transforms.RankingConfig(margin=1.0, negatives_per_side=5, epochs=5, learning_rate=1e200,
                                           distance=test_transforms.Distance.EUCLIDEAN)
    with pytest.raises(DivergenceError):
        test_transforms.fit_ranking(X, Y, config)


@pytest.mark.parametrize("kwargs", [
    {"margin": -1.0},
    {"negatives_per_side": 0},
    {"epochs": -1},
    {"learning_rate": 0.0},
    {"distance": "manhattan"},
])
def test_ranking_config_invalid(kwargs):
    '''
    Test the RankingConfig rejects out-of-range hyperparameters.
    '''
    with pytest.raises(PreconditionError):
        test_transforms.RankingConfig(**kwargs)


def test_apply_transform():
    '''
    Test apply_transform() multiplies row vectors on the right.
    '''
    identity = test_transforms.AlignmentMatrix(np.eye(2), test_transforms.AlignmentMethod.OT)
    np.testing.assert_array_equal([0.3, -0.4], test_transforms.apply_transform(identity, np.array([0.3, -0.4])))

    rotation = test_transforms.AlignmentMatrix(np.array([[0.0, 1.0], [-1.0, 0.0]]), test_transforms.AlignmentMethod.OT)
    np.testing.assert_array_equal([0.0, 1.0], test_transforms.apply_transform(rotation, np.array([1.0, 0.0])))
    with pytest.raises(DimensionMismatchError):
        test_transforms.apply_transform(rotation, np.ones(3))


def test_alignment_matrix_save_load(rng):
    '''
    Test a saved matrix reads back exactly with its method.
    '''
    alignment = test_transforms.AlignmentMatrix(rng.normal(size=(3, 3)), test_transforms.AlignmentMethod.CCA)
    stream = io.StringIO()
    alignment.save(stream)
    assert stream.getvalue().startswith("CCA 3\n")

    stream.seek(0)
    loaded = test_transforms.AlignmentMatrix.load(stream)
    assert test_transforms.AlignmentMethod.CCA is loaded.method
    np.testing.assert_array_equal(alignment.matrix, loaded.matrix)


@pytest.mark.parametrize("text", ["", "XYZ 2\n1 0\n0 1\n", "OT 2\n1 0\n", "OT 2\n1 0\n0 x\n", "OT 2\n1 0 0\n0 1\n"])
def test_alignment_matrix_load_malformed(text):
    '''
    Test malformed matrix files are rejected.
    '''
    with pytest.raises(InputFormatError):
        test_transforms.AlignmentMatrix.load(io.StringIO(text))


def test_fit_alignment_dispatch(rng):
    '''
    Test fit_alignment() routes every method to its fit.
    '''
    X = rng.normal(size=(20, 3))
    Y = rng.normal(size=(20, 3))
    config = test_transforms.RankingConfig(epochs=1, negatives_per_side=3)
    for method in test_transforms.AlignmentMethod:
        assert method is test_transforms.fit_alignment(method, X, Y, config).method
