"""Export scikit-learn random forests to the portable ensemble JSON format.

Writes a four-file bundle (model.json, train.csv, test.csv, eval.json) that
the dpg toolkit consumes as-is: the model schema matches its ensemble JSON
(left child = condition true, x <= threshold), thresholds are kept at full
precision, and the CSVs use a trailing ``label`` column.

Also provides the two reference benchmark setups used throughout the docs:
the four-feature flower dataset with a 5-tree forest, and a frozen 1000x16
four-class synthetic table with 20- or 100-tree forests.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass

import numpy as np
import sklearn
from sklearn.ensemble import RandomForestClassifier
from sklearn.model_selection import train_test_split

FORMAT_VERSION = 1
IRIS_TEST_FRACTION = 0.3
SYNTH_TEST_FRACTION = 0.2
_SYNTH_CSV = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", "synthetic.csv")


@dataclass(frozen=True)
class ExportBundle:
    """Paths of one exported model + split, plus its held-out accuracy."""

    model_path: str
    train_path: str
    test_path: str
    eval_path: str
    accuracy: float


def _check_forest(clf) -> None:
    if not hasattr(clf, "estimators_") or not hasattr(clf, "classes_"):
        raise ValueError("expected a fitted decision-forest classifier")
    if getattr(clf, "n_outputs_", 1) != 1:
        raise ValueError("multi-output models are not supported")
    for est in clf.estimators_:
        if not hasattr(est, "tree_"):
            raise ValueError("every base estimator must be a decision tree")


def _tree_to_json(tree) -> dict:
    left = tree.children_left
    right = tree.children_right
    nodes = []
    for i in range(tree.node_count):
        if left[i] < 0:
            cls = int(np.argmax(tree.value[i][0]))
            nodes.append({"id": i, "kind": "leaf", "class": cls})
        else:
            nodes.append(
                {
                    "id": i,
                    "kind": "split",
                    "feature": int(tree.feature[i]),
                    "threshold": float(tree.threshold[i]),
                    "left": int(left[i]),
                    "right": int(right[i]),
                }
            )
    return {"root": 0, "nodes": nodes}


def _write_json(path: str, obj: dict) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps(obj, indent=2, sort_keys=True))
        fh.write("\n")


def _write_csv(path: str, feature_names, X, y) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(feature_names) + ["label"])
        for row, label in zip(X, y):
            writer.writerow([repr(float(v)) for v in row] + [str(label)])


def _confusion(y_true_idx, y_pred_idx, n_classes: int) -> list:
    m = np.zeros((n_classes, n_classes), dtype=int)
    for t, p in zip(y_true_idx, y_pred_idx):
        m[t, p] += 1
    return m.tolist()


def export_forest(
    clf,
    feature_names,
    class_labels,
    out_dir,
    X_train=None,
    y_train=None,
    X_test=None,
    y_test=None,
    metadata=None,
) -> ExportBundle:
    """Serialize a fitted forest (and optionally its split) into *out_dir*.

    model.json is always written.  train.csv/test.csv/eval.json are written
    when the corresponding arrays are given; eval.json records the confusion
    matrix, accuracy, and the scikit-learn version the model came from.
    """
    _check_forest(clf)
    feature_names = [str(n) for n in feature_names]
    class_labels = [str(c) for c in class_labels]
    if len(class_labels) != len(clf.classes_):
        raise ValueError(
            f"got {len(class_labels)} class labels for {len(clf.classes_)} model classes"
        )
    os.makedirs(out_dir, exist_ok=True)

    model = {
        "format_version": FORMAT_VERSION,
        "features": [{"name": n, "kind": "numeric"} for n in feature_names],
        "classes": class_labels,
        "trees": [_tree_to_json(est.tree_) for est in clf.estimators_],
        "metadata": {
            "source": "sklearn.ensemble.RandomForestClassifier",
            "sklearn_version": sklearn.__version__,
            "n_estimators": len(clf.estimators_),
            **(metadata or {}),
        },
    }
    model_path = os.path.join(out_dir, "model.json")
    _write_json(model_path, model)

    train_path = test_path = eval_path = ""
    accuracy = float("nan")
    if X_train is not None and y_train is not None:
        train_path = os.path.join(out_dir, "train.csv")
        _write_csv(train_path, feature_names, X_train, y_train)
    if X_test is not None and y_test is not None:
        test_path = os.path.join(out_dir, "test.csv")
        _write_csv(test_path, feature_names, X_test, y_test)
        pred = clf.predict(X_test)
        to_idx = {c: i for i, c in enumerate(clf.classes_)}
        true_idx = [to_idx[v] for v in y_test]
        pred_idx = [to_idx[v] for v in pred]
        accuracy = float(np.mean(np.asarray(true_idx) == np.asarray(pred_idx)))
        eval_path = os.path.join(out_dir, "eval.json")
        _write_json(
            eval_path,
            {
                "accuracy": accuracy,
                "confusion": _confusion(true_idx, pred_idx, len(class_labels)),
                "classes": class_labels,
                "n_train": 0 if X_train is None else int(len(X_train)),
                "n_test": int(len(X_test)),
                "sklearn_version": sklearn.__version__,
            },
        )
    return ExportBundle(model_path, train_path, test_path, eval_path, accuracy)


def _iris_data():
    from sklearn.datasets import load_iris

    data = load_iris()
    return np.asarray(data.data, dtype=np.float64), data.target, list(data.feature_names)


def _synthetic_data():
    with open(_SYNTH_CSV, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    names = header[:-1]
    X = np.array([[float(c) for c in r[:-1]] for r in rows], dtype=np.float64)
    y = np.array([int(r[-1]) for r in rows], dtype=int)
    return X, y, names


def reference_setup(dataset: str, n_trees: int, seed: int, out_dir) -> ExportBundle:
    """Train and export one of the two reference benchmark setups.

    ``iris`` holds out 30% of the 150 rows; ``synthetic`` holds out 20% of
    the frozen 1000-row table.  Both split and fit with the given seed.
    """
    if dataset == "iris":
        X, y, names = _iris_data()
        test_fraction = IRIS_TEST_FRACTION
    elif dataset == "synthetic":
        X, y, names = _synthetic_data()
        test_fraction = SYNTH_TEST_FRACTION
    else:
        raise ValueError(f"unknown dataset {dataset!r}; expected 'iris' or 'synthetic'")
    X_train, X_test, y_train, y_test = train_test_split(
        X, y, test_size=test_fraction, random_state=seed
    )
    clf = RandomForestClassifier(n_estimators=n_trees, random_state=seed)
    clf.fit(X_train, y_train)
    return export_forest(
        clf,
        names,
        [str(c) for c in clf.classes_],
        out_dir,
        X_train=X_train,
        y_train=y_train,
        X_test=X_test,
        y_test=y_test,
        metadata={"dataset": dataset, "seed": seed, "test_fraction": test_fraction},
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Export a scikit-learn random forest as a portable ensemble bundle."
    )
    parser.add_argument("--dataset", choices=("iris", "synthetic"), required=True)
    parser.add_argument("--trees", type=int, required=True)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out", required=True, help="output directory")
    args = parser.parse_args(argv)
    bundle = reference_setup(args.dataset, args.trees, args.seed, args.out)
    print(f"wrote {bundle.model_path} (test accuracy {bundle.accuracy:.4f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
