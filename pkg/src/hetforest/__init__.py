"""Tree ensembles with depth-weighted feature sampling and a benchmark harness.

The training core covers classic bagging, random forests, and a
heterogeneity-driven variant that down-weights features used near the root
of earlier trees when sampling each node's candidate features. Around it
sit a structural dissimilarity measure for tree pairs, synthetic dataset
generators, and a study/comparison harness with reporting.
"""

__version__ = "0.1.0"

from .data import (Dataset, SplitPlan, impute_missing, kfold_indices, load_csv,
                   split_train_test)
from .diversity import (DominanceVector, chi2_homogeneity, dissimilarity_matrix,
                        dominance, mean_pairwise_dissimilarity, wilson_hilferty)
from .forest import (METHODS, DepthLedger, Forest, ForestConfig, accuracy,
                     bootstrap_sample, fit_forest, forest_from_dict,
                     forest_to_dict, load_forest, predict_majority, predict_rows,
                     sample_candidate_features, save_forest, update_weights)
from .harness import (StudyConfig, compare_methods, estimate_noise_proportion,
                      run_bias_study, run_diversity_study, run_noise_study,
                      run_study, tune_hrf_cv)
from .report import StudyReport, report_to_json, write_report
from .simulate import SimSpec, gen_sim1, gen_sim2, make_binary_target
from .stats import WilcoxonResult, wilcoxon_signed_rank
from .tree import (DecisionTree, GrowthParams, TreeNode, best_split,
                   feature_depths, gini, grow_tree, impurity_importance, predict,
                   predict_batch)

__all__ = [
    "__version__",
    "Dataset", "SplitPlan", "load_csv", "impute_missing", "split_train_test",
    "kfold_indices",
    "DecisionTree", "TreeNode", "GrowthParams", "gini", "best_split", "grow_tree",
    "predict", "predict_batch", "feature_depths", "impurity_importance",
    "METHODS", "Forest", "ForestConfig", "DepthLedger", "bootstrap_sample",
    "sample_candidate_features", "update_weights", "fit_forest", "predict_majority",
    "predict_rows", "accuracy", "forest_to_dict", "forest_from_dict", "save_forest",
    "load_forest",
    "DominanceVector", "dominance", "chi2_homogeneity", "wilson_hilferty",
    "mean_pairwise_dissimilarity", "dissimilarity_matrix",
    "SimSpec", "gen_sim1", "gen_sim2", "make_binary_target",
    "WilcoxonResult", "wilcoxon_signed_rank",
    "StudyConfig", "run_study", "run_bias_study", "run_diversity_study",
    "run_noise_study", "compare_methods", "tune_hrf_cv", "estimate_noise_proportion",
    "StudyReport", "report_to_json", "write_report",
]
