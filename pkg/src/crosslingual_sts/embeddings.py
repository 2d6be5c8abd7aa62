'''
This module loads, preprocesses, and queries monolingual semantic spaces and
IDF weights, and resolves sentences into weighted bags of word vectors.
'''


# core libraries
import logging
import math
import string
from collections import Counter
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, BinaryIO, Dict, Iterable, Mapping, Tuple

# third party libraries
import numpy as np

# local libraries
from .errors import AlreadyPreprocessedError, DimensionMismatchError, EmptySentenceError, InputFormatError

if TYPE_CHECKING:
    from .transforms import AlignmentMatrix


# characters stripped from both ends of every token
_PUNCTUATION = string.punctuation + "¡¿«»“”‘’…"


def tokenize(text: str) -> list[str]:
    '''
    Lowercase the text, split it on whitespace, and strip leading / trailing
    punctuation from every token. Tokens made only of punctuation disappear.
    '''
    tokens = (raw.strip(_PUNCTUATION) for raw in text.lower().split())
    return [token for token in tokens if token]


@dataclass(frozen=True, eq=False)
class SemanticSpace:
    '''
    A vocabulary with one d-dimensional vector per word. Instances are
    immutable: the vector matrix is a read-only copy.
    '''
    vocab: Tuple[str, ...]
    vectors: np.ndarray
    preprocessed: bool = False
    _index: Dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        '''
        Validate the vocabulary against the vectors and build the word index.
        '''
        vectors = np.array(self.vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(self.vocab):
            raise DimensionMismatchError(f"expected {len(self.vocab)} rows of vectors, got shape {vectors.shape}")
        if vectors.shape[1] < 1:
            raise DimensionMismatchError("vectors need at least one dimension")
        if not np.all(np.isfinite(vectors)):
            raise InputFormatError("vectors contain non-finite values")
        index = {word: row for row, word in enumerate(self.vocab)}
        if len(index) != len(self.vocab):
            raise InputFormatError("vocabulary contains duplicate words")

        vectors.setflags(write=False)
        object.__setattr__(self, "vocab", tuple(self.vocab))
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "_index", index)


    @property
    def dim(self) -> int:
        '''
        The embedding dimension d.
        '''
        return int(self.vectors.shape[1])


    def __len__(self) -> int:
        '''
        Number of words in the vocabulary.
        '''
        return len(self.vocab)


    def __contains__(self, word: object) -> bool:
        '''
        Whether the word is in the vocabulary.
        '''
        return word in self._index


    def index_of(self, word: str) -> int | None:
        '''
        Row of the word in the vector matrix, None when out of vocabulary.
        '''
        return self._index.get(word)


    def vector(self, word: str) -> np.ndarray:
        '''
        The vector of an in-vocabulary word.
        '''
        return self.vectors[self._index[word]]


    def head(self, limit: int) -> "SemanticSpace":
        '''
        A space made of the first `limit` words (pretrained files list the most
        frequent words first).
        '''
        return SemanticSpace(self.vocab[:limit], self.vectors[:limit], self.preprocessed)


    def mapped(self, alignment: "AlignmentMatrix") -> "SemanticSpace":
        '''
        A new space holding every vector of this one mapped through the
        alignment matrix.
        '''
        return SemanticSpace(self.vocab, alignment.apply(self.vectors), self.preprocessed)


def _parse_header(line: bytes) -> Tuple[int, int]:
    '''
    Parse the "<count> <dim>" header of a word-vector text file.
    '''
    try:
        count_field, dim_field = line.decode("utf-8").split()
        count, dim = int(count_field), int(dim_field)
    except (UnicodeDecodeError, ValueError) as err:
        raise InputFormatError("malformed header, expected '<count> <dim>'", 1) from err
    if count < 0 or dim < 1:
        raise InputFormatError(f"malformed header, invalid count {count} or dimension {dim}", 1)
    return count, dim


def load_vectors(source: BinaryIO | Iterable[bytes], max_vocab: int | None=None) -> SemanticSpace:
    '''
    Load a semantic space from the word-vector text format: a "<count> <dim>"
    header followed by one word and `dim` reals per line. Words are lowercased
    and the first occurrence of a word wins. Any malformed line rejects the
    whole load with an error naming the line.
    '''
    lines = iter(source)
    try:
        header = next(lines)
    except StopIteration as err:
        raise InputFormatError("empty vector file, expected '<count> <dim>' header", 1) from err
    count, dim = _parse_header(header)

    vocab: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    duplicates = 0
    entries = 0
    for line_number, raw_line in enumerate(lines, start=2):
        if entries >= count or (max_vocab is not None and len(vocab) >= max_vocab):
            break
        try:
            fields = raw_line.decode("utf-8").split()
        except UnicodeDecodeError as err:
            raise InputFormatError("line is not valid UTF-8", line_number) from err
        if not fields:
            continue
        entries += 1

        if len(fields) - 1 != dim:
            raise InputFormatError(f"expected {dim} values, found {len(fields) - 1}", line_number)
        try:
            row = np.array(fields[1:], dtype=np.float64)
        except ValueError as err:
            raise InputFormatError(f"non-numeric value in vector of '{fields[0]}'", line_number) from err
        if not np.all(np.isfinite(row)):
            raise InputFormatError(f"non-finite value in vector of '{fields[0]}'", line_number)

        word = fields[0].lower()
        if word in seen:
            duplicates += 1
            continue
        seen.add(word)
        vocab.append(word)
        rows.append(row)

    if duplicates:
        logging.warning("Dropped %d duplicate words while loading vectors (first occurrence kept)", duplicates)
    if max_vocab is not None and len(vocab) >= max_vocab:
        logging.info("Vocabulary capped at %d words", max_vocab)
    logging.info("Loaded %d word vectors of dimension %d", len(vocab), dim)

    matrix = np.vstack(rows) if rows else np.zeros((0, dim))
    return SemanticSpace(tuple(vocab), matrix)


def preprocess_space(space: SemanticSpace) -> SemanticSpace:
    '''
    Center every dimension on its mean over all words, then rescale every row to
    unit Euclidean norm. Rows that are exactly zero after centering are left as
    zero vectors.
    '''
    if space.preprocessed:
        raise AlreadyPreprocessedError("space has already been centered and normalized")

    if len(space) == 0:
        return SemanticSpace(space.vocab, space.vectors, preprocessed=True)

    centered = space.vectors - space.vectors.mean(axis=0)
    norms = np.linalg.norm(centered, axis=1)
    nonzero = norms > 0
    normalized = centered.copy()
    normalized[nonzero] /= norms[nonzero, np.newaxis]

    if zero_rows := int(np.count_nonzero(~nonzero)):
        logging.debug("%d rows are zero after centering and were left unnormalized", zero_rows)

    return SemanticSpace(space.vocab, normalized, preprocessed=True)


@dataclass(frozen=True)
class IdfWeights:
    '''
    Per-word importance weights. Words missing from the map take the default
    weight; uniform weighting is the empty map with a default of 1.
    '''
    weights: Mapping[str, float]
    default_weight: float
    doc_count: int

    def __post_init__(self) -> None:
        '''
        Reject a non-positive document count and negative or non-finite weights.
        '''
        if self.doc_count < 1:
            raise InputFormatError(f"document count must be positive, got {self.doc_count}")
        values = list(self.weights.values()) + [self.default_weight]
        if not all(math.isfinite(value) and value >= 0 for value in values):
            raise InputFormatError("IDF weights must be finite and nonnegative")


    @classmethod
    def uniform(cls) -> "IdfWeights":
        '''
        Weights equal to 1 for every word.
        '''
        return cls({}, 1.0, 1)


    def weight(self, word: str) -> float:
        '''
        The weight of a word, falling back to the default for unseen words.
        '''
        return self.weights.get(word, self.default_weight)


def compute_idf(corpus: Iterable[str]) -> IdfWeights:
    '''
    Estimate IDF weights from a corpus holding one document per line:
    weight(w) = ln(N / df(w)) with N the number of non-empty documents and df(w)
    the number of documents containing w. Unseen words weigh ln(N).
    '''
    document_frequency: Counter[str] = Counter()
    doc_count = 0
    for line in corpus:
        tokens = tokenize(line)
        if not tokens:
            continue
        doc_count += 1
        document_frequency.update(set(tokens))

    if doc_count == 0:
        raise InputFormatError("corpus contains no non-empty document")

    logging.info("Estimated IDF weights for %d words over %d documents", len(document_frequency), doc_count)
    weights = {word: math.log(doc_count / frequency) for word, frequency in document_frequency.items()}
    return IdfWeights(weights, math.log(doc_count), doc_count)


@dataclass(frozen=True)
class Sentence:
    '''
    A bag of word tokens, repetitions allowed.
    '''
    tokens: Tuple[str, ...]

    def __post_init__(self) -> None:
        '''
        Reject empty sentences.
        '''
        if not self.tokens:
            raise EmptySentenceError("sentence has no tokens")
        object.__setattr__(self, "tokens", tuple(self.tokens))


    @classmethod
    def parse(cls, text: str) -> "Sentence":
        '''
        Tokenize raw text into a sentence.
        '''
        return cls(tuple(tokenize(text)))


@dataclass(frozen=True, eq=False)
class WeightedBag:
    '''
    The in-vocabulary tokens of a sentence as rows of vectors with their weights.
    An empty bag means every token was out of vocabulary.
    '''
    tokens: Tuple[str, ...]
    vectors: np.ndarray
    weights: np.ndarray
    skipped: int = 0

    @property
    def total_weight(self) -> float:
        '''
        The sentence weight: the sum of the weights of the retained tokens.
        '''
        return float(self.weights.sum())


    @property
    def is_empty(self) -> bool:
        '''
        True when no token of the sentence was found in the space.
        '''
        return len(self.tokens) == 0


    def mapped(self, alignment: "AlignmentMatrix") -> "WeightedBag":
        '''
        The same bag with every vector mapped through the alignment matrix.
        '''
        return WeightedBag(self.tokens, alignment.apply(self.vectors), self.weights, self.skipped)


def sentence_lookup(sentence: Sentence, space: SemanticSpace, idf: IdfWeights) -> WeightedBag:
    '''
    Resolve every token of the sentence to its vector and weight. Out of
    vocabulary tokens are skipped and counted; duplicates are kept.
    '''
    rows = [space.index_of(token) for token in sentence.tokens]
    kept = [(token, row) for token, row in zip(sentence.tokens, rows) if row is not None]
    skipped = len(rows) - len(kept)
    if skipped:
        logging.debug("Skipped %d out-of-vocabulary tokens of %d", skipped, len(rows))

    tokens = tuple(token for token, _ in kept)
    vectors = space.vectors[[row for _, row in kept]] if kept else np.zeros((0, space.dim))
    weights = np.array([idf.weight(token) for token in tokens], dtype=np.float64)
    return WeightedBag(tokens, vectors, weights, skipped)
