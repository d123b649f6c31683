"""Decision predicate graphs for tree-ensemble classifiers.

Turns a trained ensemble plus a dataset into a weighted directed graph whose
nodes are split predicates and class outcomes, then offers centrality,
community, and per-class constraint analyses on top of it.
"""

__version__ = "0.1.0"

from .errors import (
    DatasetError,
    DPGError,
    EnsembleFormatError,
    GraphFormatError,
    TraversalError,
)
from .model import (
    CanonicalizationPolicy,
    ClassSchema,
    Dataset,
    DecisionTree,
    FeatureSchema,
    PathTrace,
    Predicate,
    TreeEnsemble,
    TreeNode,
    canonical_predicate,
    ensemble_from_json,
    ensemble_to_json,
    load_ensemble,
    predict_majority,
    predict_many,
    save_ensemble,
    traverse,
    validate_ensemble,
)
from .graph import (
    DPG,
    DPGEdge,
    DPGNode,
    dpg_from_json,
    dpg_to_json,
    load_dpg,
    parse_label,
    render_label,
    save_dpg,
    validate_dpg,
)
from .build import build_dpg, trace_edges
from .kernels import available_backends, default_backend_name, get_backend
from .metrics import (
    CentralityReport,
    CommunityReport,
    betweenness_centrality,
    community_classes,
    detect_communities,
    local_reaching_centrality,
)
from .constraints import (
    ClassConstraints,
    FeatureInterval,
    constraint_match,
    evaluate_constraints,
    extract_constraints,
    reachable_to_class,
)
from .train import (
    EvalReport,
    SplitReport,
    TrainConfig,
    evaluate,
    feature_importance_mdi,
    fit_forest,
    fit_tree,
    train_test_split,
)
from .io import RunManifest, load_csv, save_csv
from .dot import DotDocument, export_dot
from .report import report

__all__ = [
    "CanonicalizationPolicy",
    "CentralityReport",
    "ClassConstraints",
    "ClassSchema",
    "CommunityReport",
    "DPG",
    "DPGEdge",
    "DPGError",
    "DPGNode",
    "Dataset",
    "DatasetError",
    "DecisionTree",
    "DotDocument",
    "EnsembleFormatError",
    "EvalReport",
    "FeatureInterval",
    "FeatureSchema",
    "GraphFormatError",
    "PathTrace",
    "Predicate",
    "RunManifest",
    "SplitReport",
    "TrainConfig",
    "TraversalError",
    "TreeEnsemble",
    "TreeNode",
    "available_backends",
    "betweenness_centrality",
    "build_dpg",
    "canonical_predicate",
    "community_classes",
    "constraint_match",
    "default_backend_name",
    "detect_communities",
    "dpg_from_json",
    "dpg_to_json",
    "ensemble_from_json",
    "ensemble_to_json",
    "evaluate",
    "evaluate_constraints",
    "export_dot",
    "extract_constraints",
    "feature_importance_mdi",
    "fit_forest",
    "fit_tree",
    "get_backend",
    "load_csv",
    "load_dpg",
    "load_ensemble",
    "local_reaching_centrality",
    "parse_label",
    "predict_majority",
    "predict_many",
    "reachable_to_class",
    "render_label",
    "report",
    "save_csv",
    "save_dpg",
    "save_ensemble",
    "trace_edges",
    "train_test_split",
    "traverse",
    "validate_ensemble",
    "validate_dpg",
    "__version__",
]
