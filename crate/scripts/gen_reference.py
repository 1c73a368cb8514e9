"""Freeze scikit-learn reference accuracies for the classifier equivalence test.

Writes crates/core/tests/fixtures/reference.json. Each case holds a training
set of at most 200 points, a held-out set from the same generator, and the
test accuracy of each reference model with matched hyperparameters.
"""

import json
import pathlib

import numpy as np
import sklearn
from sklearn.datasets import make_classification
from sklearn.neighbors import KNeighborsClassifier
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler
from sklearn.svm import SVC
from sklearn.tree import DecisionTreeClassifier

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates/core/tests/fixtures/reference.json"


def models():
    return {
        # k = 2 with nearest-neighbor tie breaking reduces to 1-NN
        "knn": make_pipeline(StandardScaler(), KNeighborsClassifier(n_neighbors=1)),
        "svm-linear": make_pipeline(StandardScaler(), SVC(kernel="linear", C=1.0, tol=1e-3, shrinking=False)),
        "svm-rbf": make_pipeline(StandardScaler(), SVC(kernel="rbf", C=1.0, gamma="scale", tol=1e-3, shrinking=False)),
        "tree": DecisionTreeClassifier(criterion="gini", min_samples_leaf=5, random_state=0),
    }


def main():
    rng = np.random.default_rng(20240611)
    cases = []
    for i in range(20):
        n_train = int(rng.integers(60, 201))
        n_features = int(rng.integers(2, 10))
        n_classes = int(rng.integers(2, 5))
        n_informative = min(n_features, max(2, int(rng.integers(2, n_features + 1))))
        x, y = make_classification(
            n_samples=n_train + 400,
            n_features=n_features,
            n_informative=n_informative,
            n_redundant=0,
            n_repeated=0,
            n_classes=n_classes,
            n_clusters_per_class=1,
            class_sep=float(rng.uniform(0.6, 1.6)),
            flip_y=0.02,
            random_state=int(rng.integers(0, 2**31 - 1)),
        )
        # a few columns on wildly different scales
        x = x * rng.choice([1.0, 1e-3, 50.0], size=n_features)
        xtr, ytr, xte, yte = x[:n_train], y[:n_train], x[n_train:], y[n_train:]
        acc = {}
        for name, m in models().items():
            m.fit(xtr, ytr)
            acc[name] = float((m.predict(xte) == yte).mean())
        # scikit-learn breaks ties between equally good splits through a
        # random feature permutation, so its own accuracy moves with the seed
        spread = [
            float((DecisionTreeClassifier(criterion="gini", min_samples_leaf=5, random_state=r).fit(xtr, ytr).predict(xte) == yte).mean())
            for r in range(30)
        ]
        cases.append(
            {
                "name": f"case{i:02}",
                "n_classes": n_classes,
                "train_x": xtr.tolist(),
                "train_y": ytr.tolist(),
                "test_x": xte.tolist(),
                "test_y": yte.tolist(),
                "accuracy": acc,
                "tree_range": [min(spread), max(spread)],
            }
        )
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"sklearn": sklearn.__version__, "cases": cases}, indent=1))


if __name__ == "__main__":
    main()
