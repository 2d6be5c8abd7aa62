'''
This module provides the batch command line: fit mappings, score sentence pair
files, evaluate them against gold judgments, draw learning curves, and report
hubness. Every run writes a JSON manifest next to its output.
'''


# core libraries
import argparse
import json
import logging
import pathlib
import sys
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, NoReturn, Sequence, Tuple

# local libraries
from . import __version__, configuration
from .diagnostics import evaluate_dataset, hubness_counts
from .embeddings import IdfWeights, SemanticSpace, Sentence, compute_idf, load_vectors, preprocess_space
from .errors import CrossLingualStsError, EmptySentenceError, InputFormatError, NumericalError, PreconditionError
from .sts import StsConfig, StsMethod, StsPipeline, Weighting
from .transforms import (AlignmentMatrix, AlignmentMethod, Distance, RankingConfig, build_training_matrices,
                         fit_alignment, load_dictionary)


# exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3

# flags naming input files, echoed separately in the manifest
_INPUT_FLAGS = ("src_vectors", "tgt_vectors", "vectors", "dict", "transform", "pairs", "gold", "idf_corpus_src",
                "idf_corpus_tgt")

# sentinel written for pairs that could not be scored
NA = "NA"


@dataclass
class RunManifest:
    '''
    Everything needed to reproduce a run: the subcommand, its inputs, the
    resolved settings (including the seed), counts gathered on the way, and the
    output path.
    '''
    subcommand: str
    inputs: Dict[str, Any]
    settings: Dict[str, Any]
    seed: int | None
    output: str
    counts: Dict[str, int] = field(default_factory=dict)
    results: Dict[str, float] = field(default_factory=dict)
    version: str = __version__

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunManifest":
        '''
        Split the parsed arguments into inputs and settings.
        '''
        arguments = {key: value for key, value in vars(args).items() if key not in ("func", "parser", "verbose")}
        inputs = {key: arguments.pop(key) for key in _INPUT_FLAGS if key in arguments}
        output = arguments.pop("out")
        return cls(arguments.pop("subcommand"), inputs, arguments, arguments.get("seed"), output)


    def write(self) -> pathlib.Path:
        '''
        Write the manifest as <output>.manifest.json.
        '''
        path = pathlib.Path(f"{self.output}.manifest.json")
        with open(path, "w", encoding="utf-8") as manifest_fp:
            json.dump(asdict(self), manifest_fp, indent=2, sort_keys=True)
            manifest_fp.write("\n")
        logging.info("Wrote manifest '%s'", path)
        return path


class _ArgumentParser(argparse.ArgumentParser):
    '''
    Argument parser exiting with the usage exit code on errors.
    '''

    def error(self, message: str) -> NoReturn:
        '''
        Print the usage and exit with the usage exit code.
        '''
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_space(path: str, max_vocab: int | None=None) -> SemanticSpace:
    '''
    Load a word-vector file, then center and normalize it.
    '''
    logging.info("Loading vectors from '%s'", path)
    with open(path, "rb") as vectors_fp:
        space = load_vectors(vectors_fp, max_vocab)
    return preprocess_space(space)


def _load_alignment(path: str) -> AlignmentMatrix:
    '''
    Read an alignment matrix file.
    '''
    with open(path, encoding="utf-8") as matrix_fp:
        return AlignmentMatrix.load(matrix_fp)


def _load_idf(path: str) -> IdfWeights:
    '''
    Estimate IDF weights from a corpus file with one document per line.
    '''
    logging.info("Estimating IDF weights from '%s'", path)
    with open(path, encoding="utf-8") as corpus_fp:
        return compute_idf(corpus_fp)


def _ranking_config(args: argparse.Namespace) -> RankingConfig:
    '''
    Collect the ranking hyperparameters from the parsed flags.
    '''
    return RankingConfig(margin=args.margin, negatives_per_side=args.negatives, epochs=args.epochs,
                         learning_rate=args.lr, distance=Distance.from_name(args.distance), seed=args.seed)


def _fit_from_args(args: argparse.Namespace, manifest: RunManifest,
                   on_epoch: Callable[[int, AlignmentMatrix], None] | None=None,
                   spaces: Tuple[SemanticSpace, SemanticSpace] | None=None) -> AlignmentMatrix:
    '''
    Load both spaces (unless already loaded) and the dictionary, then fit the
    requested mapping.
    '''
    if spaces is None:
        spaces = (_load_space(args.src_vectors, args.max_vocab), _load_space(args.tgt_vectors, args.max_vocab))
    src, tgt = spaces
    with open(args.dict, encoding="utf-8") as dict_fp:
        dictionary = load_dictionary(dict_fp)
    if args.dict_size is not None:
        dictionary = dictionary.head(args.dict_size)

    matrices = build_training_matrices(dictionary, src, tgt)
    manifest.counts.update(dictionary_pairs=len(dictionary), dropped_pairs=matrices.dropped,
                           training_pairs=len(matrices.X))
    return fit_alignment(AlignmentMethod(args.method), matrices.X, matrices.Y, _ranking_config(args), args.ridge,
                         on_epoch)


def cmd_align(args: argparse.Namespace) -> None:
    '''
    Fit a mapping from a bilingual dictionary and write the matrix file.
    '''
    manifest = RunManifest.from_args(args)
    alignment = _fit_from_args(args, manifest)
    with open(args.out, "w", encoding="utf-8") as out_fp:
        alignment.save(out_fp)
    logging.info("Wrote %s mapping to '%s'", alignment.method.name, args.out)
    manifest.write()


def _read_pairs(path: str) -> List[Tuple[Sentence | None, Sentence | None]]:
    '''
    Read "sentence<TAB>sentence" lines. Lines that cannot be read become
    (None, None) with a warning.
    '''
    with open(path, encoding="utf-8") as pairs_fp:
        lines = pairs_fp.read().splitlines()

    pairs: List[Tuple[Sentence | None, Sentence | None]] = []
    for line_number, line in enumerate(lines, start=1):
        fields = line.split("\t")
        try:
            if len(fields) != 2:
                raise InputFormatError("expected 'sentence<TAB>sentence'", line_number)
            pairs.append((Sentence.parse(fields[0]), Sentence.parse(fields[1])))
        except (InputFormatError, EmptySentenceError) as err:
            logging.warning("Pair on line %d cannot be scored (%s); writing %s", line_number, err, NA)
            pairs.append((None, None))
    return pairs


def _read_gold(path: str) -> List[float]:
    '''
    Read one gold score per line.
    '''
    with open(path, encoding="utf-8") as gold_fp:
        lines = gold_fp.read().splitlines()
    gold = []
    for line_number, line in enumerate(lines, start=1):
        try:
            gold.append(float(line))
        except ValueError as err:
            raise InputFormatError(f"expected a real number, found '{line}'", line_number) from err
    return gold


def _build_pipeline(args: argparse.Namespace) -> StsPipeline:
    '''
    Assemble the scoring pipeline from the sts flags. Without target vectors the
    source space is scored against itself.
    '''
    try:
        weighting = Weighting(args.weighting)
    except ValueError:
        args.parser.error(f"unknown weighting '{args.weighting}'")
    if weighting is Weighting.IDF and not args.idf_corpus_src:
        args.parser.error("--weighting idf requires --idf-corpus-src")

    src = _load_space(args.src_vectors, args.max_vocab)
    tgt = _load_space(args.tgt_vectors, args.max_vocab) if args.tgt_vectors else src
    transform = getattr(args, "transform", None)
    alignment = _load_alignment(transform) if transform else None

    src_idf = tgt_idf = None
    if weighting is Weighting.IDF:
        src_idf = _load_idf(args.idf_corpus_src)
        tgt_idf = _load_idf(args.idf_corpus_tgt) if args.idf_corpus_tgt else src_idf

    config = StsConfig(method=StsMethod(args.sts), rank=args.rank_r, weighting=weighting)
    return StsPipeline(src, tgt, config, alignment, src_idf, tgt_idf)


def _format_score(score: float | None) -> str:
    '''
    Six decimal places, or NA for a pair that could not be read.
    '''
    return NA if score is None else f"{score:.6f}"


def _write_scores(path: str, scores: Sequence[float | None]) -> None:
    '''
    Write one formatted score per line.
    '''
    with open(path, "w", encoding="utf-8", newline="\n") as out_fp:
        for score in scores:
            out_fp.write(_format_score(score) + "\n")


def cmd_sts(args: argparse.Namespace) -> None:
    '''
    Score every line of a sentence pair file, one score per line.
    '''
    manifest = RunManifest.from_args(args)
    pipeline = _build_pipeline(args)
    pairs = _read_pairs(args.pairs)

    scores: List[float | None] = []
    undefined = oov_x = oov_y = 0
    for sentence_x, sentence_y in pairs:
        if sentence_x is None or sentence_y is None:
            scores.append(None)
            continue
        similarity = pipeline.score(sentence_x, sentence_y)
        undefined += similarity.undefined
        oov_x += similarity.oov_x
        oov_y += similarity.oov_y
        scores.append(similarity.value)

    _write_scores(args.out, scores)
    manifest.counts.update(pairs_read=len(pairs), malformed_pairs=scores.count(None), undefined_pairs=undefined,
                           oov_tokens_src=oov_x, oov_tokens_tgt=oov_y)
    logging.info("Wrote %d scores to '%s'", len(scores), args.out)
    manifest.write()


def cmd_eval(args: argparse.Namespace) -> None:
    '''
    Score a sentence pair file, write the scores, and print the Pearson
    correlation with the gold judgments.
    '''
    manifest = RunManifest.from_args(args)
    pipeline = _build_pipeline(args)
    pairs = _read_pairs(args.pairs)
    gold = _read_gold(args.gold)

    result = evaluate_dataset(pairs, gold, pipeline)
    _write_scores(args.out, result.scores)
    manifest.counts.update(pairs_read=len(pairs), malformed_pairs=result.skipped_pairs,
                           undefined_pairs=result.undefined_pairs)
    manifest.results["pearson"] = round(result.pearson, 12)
    manifest.write()
    print(f"{result.pearson:.4f}")


def cmd_curve(args: argparse.Namespace) -> None:
    '''
    Fit RT or ORT and evaluate the sentence pairs after every epoch, writing
    "epoch<TAB>loss<TAB>defect<TAB>pearson" rows.
    '''
    manifest = RunManifest.from_args(args)
    pipeline = _build_pipeline(args)
    pairs = _read_pairs(args.pairs)
    gold = _read_gold(args.gold)

    rows = []

    def evaluate_epoch(epoch: int, alignment: AlignmentMatrix) -> None:
        '''
        Score the pairs with the matrix of this epoch and record its correlation.
        '''
        scored = StsPipeline(pipeline.src_space, pipeline.tgt_space, pipeline.config, alignment, pipeline.src_idf,
                             pipeline.tgt_idf)
        result = evaluate_dataset(pairs, gold, scored)
        report = alignment.report
        losses = report.epoch_losses if report else ()
        loss = f"{losses[-1]:.6f}" if epoch and losses else NA
        defect = f"{report.orthogonality_defect:.6f}" if report else NA
        rows.append(f"{epoch}\t{loss}\t{defect}\t{result.pearson:.6f}")

    _fit_from_args(args, manifest, on_epoch=evaluate_epoch, spaces=(pipeline.src_space, pipeline.tgt_space))
    with open(args.out, "w", encoding="utf-8", newline="\n") as out_fp:
        out_fp.write("epoch\tloss\tdefect\tpearson\n")
        for row in rows:
            out_fp.write(row + "\n")
    manifest.counts.update(pairs_read=len(pairs), epochs_evaluated=len(rows))
    manifest.write()


def cmd_hubness(args: argparse.Namespace) -> None:
    '''
    Write the N_k table of a space (or of a mapped space, or across two spaces)
    and print its skewness.
    '''
    manifest = RunManifest.from_args(args)
    if args.vectors:
        queries = targets = _load_space(args.vectors, args.max_vocab)
    elif args.src_vectors:
        queries = _load_space(args.src_vectors, args.max_vocab)
        if args.transform:
            queries = queries.mapped(_load_alignment(args.transform))
        targets = _load_space(args.tgt_vectors, args.max_vocab) if args.tgt_vectors else queries
    else:
        args.parser.error("either --vectors or --src-vectors is required")

    report = hubness_counts(queries, targets, args.k, args.query_limit)
    with open(args.out, "w", encoding="utf-8", newline="\n") as out_fp:
        report.write_tsv(out_fp)
    manifest.counts.update(queries=report.query_count, targets=len(targets))
    manifest.settings["mode"] = report.mode.value
    manifest.results["skewness"] = round(report.skewness, 12)
    manifest.write()
    print(f"{report.skewness:.4f}")


def _add_vector_flags(parser: argparse.ArgumentParser, settings: Dict[str, Any], target_required: bool) -> None:
    '''
    Flags naming the word vector files and the vocabulary cap.
    '''
    parser.add_argument("--src-vectors", required=True, help="source word vectors (text format)")
    parser.add_argument("--tgt-vectors", required=target_required, help="target word vectors (text format)")
    parser.add_argument("--max-vocab", type=int, default=settings["max-vocab"],
                        help="keep only the first N words of every vector file")


def _add_ranking_flags(parser: argparse.ArgumentParser, settings: Dict[str, Any]) -> None:
    '''
    The dictionary flags and the hyperparameters of the ranking transformations.
    '''
    parser.add_argument("--dict", required=True, help="bilingual dictionary, 'source<TAB>target' per line")
    parser.add_argument("--dict-size", type=int, default=None, help="use only the first N dictionary pairs")
    parser.add_argument("--epochs", type=int, default=settings["epochs"])
    parser.add_argument("--negatives", type=int, default=settings["negatives"], help="negatives per side")
    parser.add_argument("--margin", type=float, default=settings["margin"])
    parser.add_argument("--lr", type=float, default=settings["learning-rate"], help="learning rate")
    parser.add_argument("--distance", choices=[distance.value for distance in Distance],
                        default=settings["distance"])
    parser.add_argument("--seed", type=int, default=settings["seed"])
    parser.add_argument("--ridge", type=float, default=settings["ridge"],
                        help="ridge term for LS and CCA (default: 1e-8 trace / d)")


def _add_sts_flags(parser: argparse.ArgumentParser, settings: Dict[str, Any]) -> None:
    '''
    Flags choosing the similarity method and its word weights.
    '''
    parser.add_argument("--pairs", required=True, help="sentence pairs, 'sentence<TAB>sentence' per line")
    parser.add_argument("--sts", choices=[method.value for method in StsMethod], default="lc")
    parser.add_argument("--weighting", choices=[weighting.value for weighting in Weighting],
                        default=settings["weighting"])
    parser.add_argument("--idf-corpus-src", help="source corpus, one document per line")
    parser.add_argument("--idf-corpus-tgt", help="target corpus (default: the source corpus)")
    parser.add_argument("--rank-r", type=int, default=settings["rank-r"], help="principal angles subspace rank")


def build_parser(settings: Dict[str, Any] | None=None) -> argparse.ArgumentParser:
    '''
    Build the argument parser, taking flag defaults from the resolved settings.
    '''
    settings = settings or dict(configuration.DEFAULTS)
    parser = _ArgumentParser(prog="crosslingual-sts", description=__doc__)
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    align = subparsers.add_parser("align", help="fit a mapping between two spaces")
    _add_vector_flags(align, settings, target_required=True)
    _add_ranking_flags(align, settings)
    align.add_argument("--method", choices=[method.value for method in AlignmentMethod], required=True)
    align.add_argument("--out", required=True, help="matrix file to write")
    align.set_defaults(func=cmd_align, parser=align)

    for name, func, helptext in (("sts", cmd_sts, "score sentence pairs"),
                                 ("eval", cmd_eval, "score sentence pairs and correlate with gold scores")):
        sts = subparsers.add_parser(name, help=helptext)
        _add_vector_flags(sts, settings, target_required=False)
        _add_sts_flags(sts, settings)
        sts.add_argument("--transform", help="matrix mapping the source space onto the target space")
        if name == "eval":
            sts.add_argument("--gold", required=True, help="gold scores, one per line")
        sts.add_argument("--out", required=True, help="score file to write")
        sts.set_defaults(func=func, parser=sts)

    curve = subparsers.add_parser("curve", help="evaluate RT / ORT after every training epoch")
    _add_vector_flags(curve, settings, target_required=True)
    _add_ranking_flags(curve, settings)
    _add_sts_flags(curve, settings)
    curve.add_argument("--method", choices=[AlignmentMethod.RT.value, AlignmentMethod.ORT.value], default="ort")
    curve.add_argument("--gold", required=True, help="gold scores, one per line")
    curve.add_argument("--out", required=True, help="learning curve TSV to write")
    curve.set_defaults(func=cmd_curve, parser=curve)

    hubness = subparsers.add_parser("hubness", help="report N_k counts and their skewness")
    hubness.add_argument("--vectors", help="space measured within itself")
    hubness.add_argument("--src-vectors", help="query space (mapped by --transform when given)")
    hubness.add_argument("--tgt-vectors", help="target space for cross-lingual hubness")
    hubness.add_argument("--transform", help="matrix mapping the query space")
    hubness.add_argument("--k", type=int, default=settings["k"])
    hubness.add_argument("--query-limit", type=int, default=None, help="use only the first N query words")
    hubness.add_argument("--max-vocab", type=int, default=settings["max-vocab"])
    hubness.add_argument("--out", required=True, help="TSV file to write")
    hubness.set_defaults(func=cmd_hubness, parser=hubness)

    return parser


def main(argv: Sequence[str] | None=None) -> int:
    '''
    Run one subcommand and return its exit code: 0 success, 1 usage, 2 I/O,
    3 numeric or precondition failure.
    '''
    parser = build_parser(configuration.resolve_settings())
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s - %(levelname)s: %(message)s')

    try:
        args.func(args)
    except (OSError, InputFormatError) as err:
        logging.critical("%s", err)
        return EXIT_IO
    except (NumericalError, PreconditionError) as err:
        logging.critical("%s", err)
        return EXIT_NUMERIC
    except CrossLingualStsError as err:
        logging.critical("%s", err)
        return EXIT_NUMERIC

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
