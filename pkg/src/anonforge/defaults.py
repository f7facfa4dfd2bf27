"""Tunable defaults for evaluation: classifier hyperparameters and the
education-level class bins. Override per call (ClassifierSpec.hyperparams)
rather than editing in place."""

LOGISTIC_REGRESSION = {"learning_rate": 0.1, "epochs": 500, "l2": 1e-3}
LINEAR_SVC = {"learning_rate": 0.1, "epochs": 500, "l2": 1e-3}
RANDOM_FOREST = {
    "n_trees": 50,
    "max_depth": 8,
    "bootstrap_fraction": 1.0,
    "max_features": None,
    "min_samples_split": 2,
}
GRADIENT_BOOSTING = {"n_stumps": 100, "shrinkage": 0.1}

CLASSIFIER_DEFAULTS = {
    "logistic_regression": LOGISTIC_REGRESSION,
    "linear_svc": LINEAR_SVC,
    "random_forest": RANDOM_FOREST,
    "gradient_boosting": GRADIENT_BOOSTING,
}

# education_num -> ordinal class: <=8, 9-10, 11-12, >=13
EDUCATION_BIN_UPPER_EDGES = (8, 10, 12)

DEFAULT_FOLDS = 5
