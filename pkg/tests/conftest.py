'''
Common fixtures used in tests across multiple test modules.
'''


# core libraries
import os
import pathlib
from types import SimpleNamespace

# third party libraries
import numpy as np

# testing libraries
import pytest


@pytest.fixture(autouse=True)
def environment_variables():
    '''
    A fixture that captures the current environment, yields to the test where
    environment variables can be set without consequence, then restores the old
    environment when the test has finished.
    '''
    # capture the current environment as a dictionary
    current_environment = dict(os.environ)

    # run the test
    yield

    # replace the environment
    os.environ.clear()
    os.environ.update(current_environment)


@pytest.fixture
def rng():
    '''
    A seeded random generator.
    '''
    return np.random.default_rng(20180611)


# toy English space: word -> 4-dimensional vector
TOY_ENGLISH = {
    "cat": (0.9, 0.1, 0.0, 0.2),
    "dog": (0.8, 0.3, 0.1, 0.0),
    "house": (0.1, 0.9, 0.2, 0.1),
    "home": (0.2, 0.8, 0.3, 0.0),
    "car": (0.0, 0.2, 0.9, 0.1),
    "road": (0.1, 0.1, 0.8, 0.4),
    "sun": (0.3, 0.0, 0.1, 0.9),
    "moon": (0.2, 0.1, 0.0, 0.8),
    "water": (0.5, 0.5, 0.1, 0.1),
    "fire": (0.1, 0.4, 0.5, 0.6),
    "the": (0.4, 0.4, 0.4, 0.4),
    "big": (0.6, 0.2, 0.3, 0.3),
}

# toy Spanish translations of the English words, in the same order
TOY_TRANSLATIONS = {
    "cat": "gato", "dog": "perro", "house": "casa", "home": "hogar", "car": "coche", "road": "camino",
    "sun": "sol", "moon": "luna", "water": "agua", "fire": "fuego", "the": "el", "big": "grande",
}


def toy_spanish_vector(vector):
    '''
    The Spanish space is the English one under a signed permutation of the
    coordinates, an exact orthogonal map.
    '''
    first, second, third, fourth = vector
    return (second, first, fourth, -third)


def write_vectors(path, space):
    '''
    Write a word -> vector mapping in the word-vector text format.
    '''
    dim = len(next(iter(space.values())))
    lines = [f"{len(space)} {dim}"]
    lines += [word + " " + " ".join(repr(float(value)) for value in vector) for word, vector in space.items()]
    pathlib.Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@pytest.fixture
def toy_files(tmp_path):
    '''
    Two tiny spaces, a 10-pair dictionary, sentence pairs with gold scores, and
    two corpora, written to a temporary directory.
    '''
    spanish = {TOY_TRANSLATIONS[word]: toy_spanish_vector(vector) for word, vector in TOY_ENGLISH.items()}
    files = SimpleNamespace(
        en=tmp_path / "en.vec",
        es=tmp_path / "es.vec",
        dictionary=tmp_path / "en-es.tsv",
        pairs=tmp_path / "pairs.tsv",
        mono_pairs=tmp_path / "mono_pairs.tsv",
        gold=tmp_path / "gold.txt",
        corpus_en=tmp_path / "corpus.en",
        corpus_es=tmp_path / "corpus.es",
        directory=tmp_path,
    )
    write_vectors(files.en, TOY_ENGLISH)
    write_vectors(files.es, spanish)

    pairs = list(TOY_TRANSLATIONS.items())[:10]
    files.dictionary.write_text("# toy dictionary\n" + "".join(f"{en}\t{es}\n" for en, es in pairs),
                                encoding="utf-8")

    files.pairs.write_text("the big cat\tel gato grande\n"
                           "the sun\tla luna\n"
                           "a house on the road\tel coche\n"
                           "water and fire\tagua fuego\n", encoding="utf-8")
    files.gold.write_text("5.0\n3.0\n1.0\n4.5\n", encoding="utf-8")
    files.mono_pairs.write_text("the cat\tthe cat\n"
                                "\n"
                                "dog house\tthe big home\n", encoding="utf-8")

    files.corpus_en.write_text("the cat and the dog\nthe house\nthe sun and the moon\nbig fire\n", encoding="utf-8")
    files.corpus_es.write_text("el gato y el perro\nla casa\nel sol y la luna\nfuego grande\n", encoding="utf-8")
    return files
