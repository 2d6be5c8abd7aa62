'''
Cross-lingual semantic textual similarity: align monolingual word-embedding
spaces with linear mappings and score sentence pairs across them.
'''


__version__ = "1.0.0"

# public api
from .diagnostics import (EvaluationResult, HubnessMode, HubnessReport, evaluate_dataset, hubness_counts,
                          pearson_correlation, retrieval_precision, skewness)
from .embeddings import (IdfWeights, SemanticSpace, Sentence, WeightedBag, compute_idf, load_vectors, preprocess_space,
                         sentence_lookup)
from .errors import CrossLingualStsError
from .sts import (SimilarityScore, StsConfig, StsMethod, StsPipeline, Weighting, hungarian_matching,
                  sim_linear_combination, sim_optimal_matching, sim_principal_angles)
from .transforms import (AlignmentMatrix, AlignmentMethod, BilingualDictionary, Distance, RankingConfig,
                         apply_transform, build_training_matrices, fit_cca, fit_least_squares, fit_orthogonal,
                         fit_orthogonal_ranking, fit_ranking, load_dictionary, rank_loss, select_negatives)
