"""Models, evaluation metrics, and null benchmarks for node-activity prediction.

The classifier is an L2-penalized logistic regression fit by Newton/IRLS on
standardized features, with Wald p-values taken from the observed information
at the optimum. The regressor is ordinary least squares with a tiny ridge
jitter for conditioning. Evaluation follows the usual schema: precision and
recall at a probability threshold with exact binomial intervals, AUC by the
midrank statistic with a percentile bootstrap, and two null benchmarks
(training-prior label draws and random-edge-presence labels).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from .errors import DataError, NumericalError
from .features import FeatureTable
from .graphs import TemporalNetwork

CONSTANT_STD = 1e-12
SEPARATION_BOUND = 30.0


@dataclass(frozen=True)
class StandardizationConstants:
    columns: tuple
    means: np.ndarray
    stds: np.ndarray
    dropped: tuple


def standardize(table: FeatureTable):
    """Center and scale features to zero mean, unit standard deviation.

    Near-constant columns (std <= 1e-12) carry no information and break the
    scaling, so they are dropped with a warning. Returns the standardized
    table and the constants needed to transform other tables the same way.
    """
    stds_all = table.X.std(axis=0)
    keep = [c for c, s in zip(table.columns, stds_all) if s > CONSTANT_STD]
    dropped = tuple(c for c in table.columns if c not in keep)
    if dropped:
        warnings.warn(f"dropping near-constant feature columns: {', '.join(dropped)}")
    reduced = table.select_columns(keep)
    means = reduced.X.mean(axis=0)
    stds = reduced.X.std(axis=0)
    constants = StandardizationConstants(columns=tuple(keep), means=means, stds=stds, dropped=dropped)
    reduced.X = (reduced.X - means) / stds
    reduced.meta = dict(reduced.meta)
    reduced.meta["standardization"] = {
        "columns": list(keep),
        "means": [float(v) for v in means],
        "stds": [float(v) for v in stds],
    }
    return reduced, constants


def apply_standardization(constants: StandardizationConstants, table: FeatureTable) -> FeatureTable:
    """Transform a table with previously fitted constants."""
    reduced = table.select_columns(constants.columns)
    reduced.X = (reduced.X - constants.means) / constants.stds
    reduced.meta = dict(reduced.meta)
    reduced.meta["standardization"] = {
        "columns": list(constants.columns),
        "means": [float(v) for v in constants.means],
        "stds": [float(v) for v in constants.stds],
    }
    return reduced


def oversample(table: FeatureTable, seed=0) -> FeatureTable:
    """Balance a binary-labeled table by duplicating minority rows.

    Duplicates are drawn uniformly with replacement and appended until both
    classes have equal counts. Raises DataError when only one class is
    present.
    """
    if table.y is None:
        raise DataError("oversample needs a labeled table")
    y = table.y.astype(int)
    n1 = int((y == 1).sum())
    n0 = int((y == 0).sum())
    if n1 == 0 or n0 == 0:
        raise DataError("oversample needs both classes present")
    if n1 == n0:
        return table.select_rows(np.ones(len(y), dtype=bool))
    minority = 1 if n1 < n0 else 0
    idx = np.flatnonzero(y == minority)
    rng = np.random.default_rng(seed)
    extra = rng.choice(idx, size=abs(n1 - n0), replace=True)
    out = table.select_rows(np.ones(len(y), dtype=bool))
    out.X = np.vstack([out.X, table.X[extra]])
    out.y = np.concatenate([out.y, table.y[extra]])
    out.node_ids = out.node_ids + tuple(table.node_ids[i] for i in extra)
    return out


@dataclass
class LogisticModel:
    feature_names: tuple
    intercept: float
    coef: np.ndarray
    coef_se: np.ndarray
    coef_pvalues: np.ndarray
    intercept_se: float
    intercept_pvalue: float
    l2: float
    converged: bool
    n_iter: int
    grad_norm: float
    separation_warning: bool
    feature_means: np.ndarray
    feature_stds: np.ndarray

    def log_odds(self, x: np.ndarray) -> np.ndarray:
        """alpha + beta . x on already-standardized features."""
        x = np.asarray(x, dtype=float)
        return self.intercept + x @ self.coef

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return special.expit(self.log_odds(x))


def _penalized_ll(design, y, beta, l2):
    eta = design @ beta
    ll = float(np.sum(y * eta - np.logaddexp(0.0, eta)))
    return ll - 0.5 * l2 * float(np.sum(beta[1:] ** 2))


def fit_logistic(
    table: FeatureTable,
    l2: float = 1.0,
    max_iter: int = 500,
    tol: float = 1e-8,
    constants: StandardizationConstants | None = None,
) -> LogisticModel:
    """Newton/IRLS fit of L2-penalized logistic regression.

    The penalty excludes the intercept. Convergence is a gradient 2-norm at
    or below ``tol``; perfect separation (any standardized coefficient
    passing 30 in magnitude) stops the fit with a clamped solution and a
    warning flag instead of diverging. Failing to converge without separation
    raises NumericalError with the iteration diagnostics.

    Wald standard errors come from the observed information of the penalized
    objective at the optimum.
    """
    if l2 < 0:
        raise ValueError("l2 must be nonnegative")
    if table.y is None:
        raise DataError("fit_logistic needs a labeled table")
    y = table.y.astype(float)
    if not np.all(np.isin(y, (0.0, 1.0))):
        raise DataError("fit_logistic needs binary 0/1 labels")
    if y.min() == y.max():
        raise DataError("fit_logistic needs both classes present")

    n, p = table.X.shape
    design = np.hstack([np.ones((n, 1)), table.X])
    ridge = np.diag([0.0] + [l2] * p)
    beta = np.zeros(p + 1)
    separation = False
    converged = False
    grad_norm = np.inf
    it = 0

    for it in range(1, max_iter + 1):
        eta = design @ beta
        prob = special.expit(eta)
        grad = design.T @ (y - prob) - ridge @ beta
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= tol:
            converged = True
            break
        w = prob * (1.0 - prob)
        hess = design.T @ (design * w[:, None]) + ridge
        step = np.linalg.solve(hess + 1e-12 * np.eye(p + 1), grad)
        # step halving keeps Newton from overshooting on near-separable data
        current = _penalized_ll(design, y, beta, l2)
        scale = 1.0
        for _ in range(30):
            candidate = beta + scale * step
            if _penalized_ll(design, y, candidate, l2) >= current - 1e-12:
                break
            scale *= 0.5
        beta = beta + scale * step
        if np.max(np.abs(beta)) > SEPARATION_BOUND:
            beta = np.clip(beta, -SEPARATION_BOUND, SEPARATION_BOUND)
            separation = True
            break

    if not converged and not separation:
        raise NumericalError(
            f"logistic fit did not converge: {it} iterations, gradient norm {grad_norm:.3e}"
        )

    prob = special.expit(design @ beta)
    w = prob * (1.0 - prob)
    info = design.T @ (design * w[:, None]) + ridge
    cov = np.linalg.inv(info + 1e-12 * np.eye(p + 1))
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, beta / se, np.inf)
    pvals = 2.0 * special.ndtr(-np.abs(z))

    means = constants.means if constants is not None else np.zeros(p)
    stds = constants.stds if constants is not None else np.ones(p)
    return LogisticModel(
        feature_names=tuple(table.columns),
        intercept=float(beta[0]),
        coef=beta[1:].copy(),
        coef_se=se[1:].copy(),
        coef_pvalues=pvals[1:].copy(),
        intercept_se=float(se[0]),
        intercept_pvalue=float(pvals[0]),
        l2=float(l2),
        converged=converged,
        n_iter=it,
        grad_norm=grad_norm,
        separation_warning=separation,
        feature_means=np.asarray(means, dtype=float),
        feature_stds=np.asarray(stds, dtype=float),
    )


def auc_score(y_true, scores) -> float:
    """Area under the ROC curve via the rank-sum statistic, ties by midrank."""
    y = np.asarray(y_true).astype(int)
    s = np.asarray(scores, dtype=float)
    n1 = int((y == 1).sum())
    n0 = int((y == 0).sum())
    if n1 == 0 or n0 == 0:
        raise DataError("AUC needs both classes present")
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(len(s))
    sorted_s = s[order]
    i = 0
    while i < len(s):
        j = i
        while j + 1 < len(s) and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    rank_sum = ranks[y == 1].sum()
    return float((rank_sum - n1 * (n1 + 1) / 2.0) / (n1 * n0))


@dataclass
class EvaluationReport:
    """Classification metrics plus the optional benchmarking extras.

    evaluate() fills the metric fields; the prediction pipeline attaches CIs,
    null-model summaries, permutation importances, attribution values, and
    the coefficient table before serialization.
    """

    n_rows: int
    n_positive: int
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float | None
    recall: float | None
    auc: float | None
    threshold: float
    notes: list = field(default_factory=list)
    precision_ci: tuple | None = None
    recall_ci: tuple | None = None
    auc_ci: tuple | None = None
    ci_method: str | None = None
    null_prior: dict | None = None
    null_edge_presence: dict | None = None
    permutation_importance: dict | None = None
    shap_mean_abs: dict | None = None
    coefficients: list | None = None

    def to_json_dict(self) -> dict:
        out = {}
        for key, val in self.__dict__.items():
            if isinstance(val, tuple):
                val = list(val)
            out[key] = val
        return out


def evaluate(model: LogisticModel, table: FeatureTable, threshold: float = 0.5) -> EvaluationReport:
    """Score a fitted classifier on a labeled table (metrics only).

    Predictions are positive at probability >= threshold. Precision is
    reported as None (with a note) when nothing is predicted positive; AUC is
    None when the table is single-class.
    """
    if table.y is None:
        raise DataError("evaluate needs a labeled table")
    y = table.y.astype(int)
    prob = model.predict_proba(table.X)
    yhat = (prob >= threshold).astype(int)
    tp = int(np.sum((yhat == 1) & (y == 1)))
    fp = int(np.sum((yhat == 1) & (y == 0)))
    fn = int(np.sum((yhat == 0) & (y == 1)))
    tn = int(np.sum((yhat == 0) & (y == 0)))
    notes = []
    if tp + fp == 0:
        precision = None
        notes.append("no positive predictions; precision undefined")
    else:
        precision = tp / (tp + fp)
    if tp + fn == 0:
        recall = None
        notes.append("no positive labels; recall undefined")
    else:
        recall = tp / (tp + fn)
    try:
        auc = auc_score(y, prob)
    except DataError:
        auc = None
        notes.append("single-class labels; AUC undefined")
    return EvaluationReport(
        n_rows=len(y),
        n_positive=int((y == 1).sum()),
        tp=tp,
        fp=fp,
        fn=fn,
        tn=tn,
        precision=precision,
        recall=recall,
        auc=auc,
        threshold=threshold,
        notes=notes,
    )


def binom_ci(successes: int, n: int, alpha: float = 0.05, method: str = "exact"):
    """Two-sided binomial proportion interval.

    "exact" is Clopper-Pearson solved by bisection on the binomial CDF;
    "normal" is the flagged large-n approximation p +- z * sqrt(p(1-p)/n),
    clipped to [0, 1].
    """
    if not 0 <= successes <= n or n < 1:
        raise ValueError("need 0 <= successes <= n with n >= 1")
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    if method == "normal":
        phat = successes / n
        z = float(special.ndtri(1.0 - alpha / 2.0))
        half = z * np.sqrt(phat * (1.0 - phat) / n)
        return (max(0.0, phat - half), min(1.0, phat + half))
    if method != "exact":
        raise ValueError(f"unknown method {method!r}")

    def bisect(fn, lo, hi):
        # fn must change sign over [lo, hi]
        flo = fn(lo)
        for _ in range(60):
            mid = (lo + hi) / 2.0
            fmid = fn(mid)
            if (flo <= 0) == (fmid <= 0):
                lo, flo = mid, fmid
            else:
                hi = mid
            if hi - lo <= 1e-10:
                break
        return (lo + hi) / 2.0

    if successes == 0:
        lower = 0.0
    else:
        lower = bisect(lambda p: (1.0 - stats.binom.cdf(successes - 1, n, p)) - alpha / 2.0, 0.0, 1.0)
    if successes == n:
        upper = 1.0
    else:
        upper = bisect(lambda p: alpha / 2.0 - stats.binom.cdf(successes, n, p), 0.0, 1.0)
    return (lower, upper)


def bootstrap_auc_ci(model: LogisticModel, table: FeatureTable, iters: int = 1000, seed=0, alpha: float = 0.05):
    """Percentile bootstrap interval for the AUC on a labeled table.

    Resamples rows with replacement. A resample that loses one class leaves
    the AUC undefined, so it is redrawn up to 10 times; a slot still
    single-class after that is skipped and counted.
    """
    if table.y is None:
        raise DataError("bootstrap needs a labeled table")
    y = table.y.astype(int)
    scores = model.predict_proba(table.X)
    rng = np.random.default_rng(seed)
    n = len(y)
    samples = []
    skipped = 0
    for _ in range(iters):
        for _attempt in range(11):
            idx = rng.integers(0, n, size=n)
            yb = y[idx]
            if yb.min() != yb.max():
                samples.append(auc_score(yb, scores[idx]))
                break
        else:
            skipped += 1
    if skipped:
        warnings.warn(f"bootstrap skipped {skipped} persistently single-class resamples")
    if not samples:
        raise NumericalError("every bootstrap resample was single-class")
    lo, hi = np.percentile(samples, [100 * alpha / 2.0, 100 * (1.0 - alpha / 2.0)])
    return (float(lo), float(hi))


def _percentile_summary(values) -> dict:
    arr = np.asarray(values, dtype=float)
    arr = arr[~np.isnan(arr)]
    if arr.size == 0:
        return {"mean": None, "ci90": None, "ci95": None}
    return {
        "mean": float(arr.mean()),
        "ci90": [float(v) for v in np.percentile(arr, [5.0, 95.0])],
        "ci95": [float(v) for v in np.percentile(arr, [2.5, 97.5])],
    }


def null_prior_predictor(train_y, test_y, trials: int = 100, seed=0) -> dict:
    """Benchmark: draw positive predictions at the training prior.

    Each trial predicts labels i.i.d. Bernoulli(prior) for the test rows and
    scores them against the true test labels. Returns per-metric means with
    empirical ci90 and ci95 (both labeled because the conventions differ).
    """
    if trials < 20:
        raise ValueError(f"need at least 20 trials for stable quantiles, got {trials}")
    train_y = np.asarray(train_y).astype(int)
    test_y = np.asarray(test_y).astype(int)
    if train_y.size == 0 or test_y.size == 0:
        raise DataError("null prior predictor needs nonempty label arrays")
    prior = float(train_y.mean())
    rng = np.random.default_rng(seed)
    precisions, recalls, aucs = [], [], []
    for _ in range(trials):
        yhat = (rng.random(test_y.size) < prior).astype(int)
        tp = int(np.sum((yhat == 1) & (test_y == 1)))
        fp = int(np.sum((yhat == 1) & (test_y == 0)))
        fn = int(np.sum((yhat == 0) & (test_y == 1)))
        precisions.append(tp / (tp + fp) if tp + fp else np.nan)
        recalls.append(tp / (tp + fn) if tp + fn else np.nan)
        if test_y.min() != test_y.max() and yhat.min() != yhat.max():
            aucs.append(auc_score(test_y, yhat.astype(float)))
        else:
            aucs.append(np.nan)
    return {
        "kind": "prior_predictor",
        "prior": prior,
        "trials": trials,
        "precision": _percentile_summary(precisions),
        "recall": _percentile_summary(recalls),
        "auc": _percentile_summary(aucs),
    }


def edge_presence_labels(n_nodes: int, density: float, rng: np.random.Generator) -> np.ndarray:
    """Presence labels from one random graph draw: pair on with prob density."""
    if n_nodes < 2:
        return np.zeros(n_nodes, dtype=int)
    present = np.zeros(n_nodes, dtype=bool)
    draws = rng.random((n_nodes, n_nodes)) < density
    iu = np.triu_indices(n_nodes, k=1)
    adj = np.zeros((n_nodes, n_nodes), dtype=bool)
    adj[iu] = draws[iu]
    adj |= adj.T
    present = adj.any(axis=1)
    return present.astype(int)


def null_edge_presence(tn: TemporalNetwork, t: int, scores_by_node: dict, trials: int = 100, seed=0) -> dict:
    """Benchmark for the presence target: labels from random-graph snapshots.

    Each trial synthesizes snapshot t+1 as an independent random graph over
    the nodes present at t, with pair probability equal to the observed edge
    density of the real snapshot t+1 over those nodes, then scores the given
    predicted probabilities against the synthetic presence labels.
    """
    if not 0 <= t < tn.n_snapshots - 1:
        raise ValueError("null_edge_presence needs snapshot t+1 to exist")
    cur = tn.snapshots[t]
    n_t = cur.n_nodes
    if n_t < 2:
        raise DataError("need at least two present nodes")
    density = min(1.0, tn.snapshots[t + 1].n_edges / (n_t * (n_t - 1) / 2.0))
    node_pos = {v: i for i, v in enumerate(cur.node_ids)}
    scored = [v for v in cur.node_ids if v in scores_by_node]
    if not scored:
        raise DataError("no scored nodes are present at t")
    scores = np.array([scores_by_node[v] for v in scored])
    rows = np.array([node_pos[v] for v in scored])

    rng = np.random.default_rng(seed)
    precisions, recalls, aucs = [], [], []
    for _ in range(trials):
        labels = edge_presence_labels(n_t, density, rng)[rows]
        yhat = (scores >= 0.5).astype(int)
        tp = int(np.sum((yhat == 1) & (labels == 1)))
        fp = int(np.sum((yhat == 1) & (labels == 0)))
        fn = int(np.sum((yhat == 0) & (labels == 1)))
        precisions.append(tp / (tp + fp) if tp + fp else np.nan)
        recalls.append(tp / (tp + fn) if tp + fn else np.nan)
        aucs.append(auc_score(labels, scores) if labels.min() != labels.max() else np.nan)
    return {
        "kind": "edge_presence",
        "density": density,
        "n_nodes": n_t,
        "trials": trials,
        "precision": _percentile_summary(precisions),
        "recall": _percentile_summary(recalls),
        "auc": _percentile_summary(aucs),
    }


def permutation_importance(model: LogisticModel, table: FeatureTable, repeats: int = 10, seed=0) -> dict:
    """Mean increase in 1 - AUC when one feature column is shuffled.

    Positive values mean the model leaned on the feature; a feature with a
    zero coefficient scores exactly zero because predictions cannot change.
    """
    if table.y is None:
        raise DataError("permutation importance needs a labeled table")
    base = auc_score(table.y, model.predict_proba(table.X))
    out = {}
    for j, name in enumerate(table.columns):
        deltas = []
        for r in range(repeats):
            rng = np.random.default_rng([seed, j, r])
            xp = table.X.copy()
            xp[:, j] = rng.permutation(xp[:, j])
            deltas.append(base - auc_score(table.y, model.predict_proba(xp)))
        out[name] = float(np.mean(deltas))
    return out


def shap_linear(model: LogisticModel, x: np.ndarray, background_mean: np.ndarray | None = None):
    """Exact per-feature attribution of the linear log-odds.

    For a linear score the Shapley value of feature j at row x is
    beta_j * (x_j - mean_j) against a background mean. The default background
    is the all-zero vector, the mean of the standardized training data.
    Accepts a FeatureTable or a raw row matrix. Returns (phi matrix, base
    value); base + phi row sums reproduce the log-odds exactly.
    """
    if hasattr(x, "X"):
        x = x.X
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    mean = np.zeros(x.shape[1]) if background_mean is None else np.asarray(background_mean, dtype=float)
    phi = model.coef[None, :] * (x - mean[None, :])
    base = float(model.intercept + model.coef @ mean)
    return phi, base


@dataclass
class LinearModel:
    feature_names: tuple
    intercept: float
    coef: np.ndarray
    coef_se: np.ndarray
    coef_pvalues: np.ndarray
    intercept_se: float
    intercept_pvalue: float
    r2: float | None
    feature_means: np.ndarray
    feature_stds: np.ndarray

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.intercept + np.asarray(x, dtype=float) @ self.coef


def r2_score(y_true, y_pred) -> float:
    y = np.asarray(y_true, dtype=float)
    tss = float(np.sum((y - y.mean()) ** 2))
    if tss <= 0:
        raise DataError("R^2 undefined for a constant target")
    rss = float(np.sum((y - np.asarray(y_pred, dtype=float)) ** 2))
    return 1.0 - rss / tss


def fit_linear(
    table: FeatureTable,
    heldout: FeatureTable | None = None,
    jitter: float = 1e-10,
    constants: StandardizationConstants | None = None,
) -> LinearModel:
    """Least squares with a ridge jitter for conditioning.

    Coefficient p-values are classical two-sided t-tests. ``r2`` is computed
    on ``heldout`` when given, otherwise in-sample.
    """
    if table.y is None:
        raise DataError("fit_linear needs a labeled table")
    n, p = table.X.shape
    if n <= p + 1:
        raise DataError(f"need more rows ({n}) than parameters ({p + 1})")
    design = np.hstack([np.ones((n, 1)), table.X])
    gram = design.T @ design + jitter * np.eye(p + 1)
    if np.linalg.matrix_rank(design) < p + 1:
        warnings.warn("rank-deficient design; falling back to the pseudo-inverse")
        beta = np.linalg.pinv(design) @ table.y
    else:
        beta = np.linalg.solve(gram, design.T @ table.y)
    resid = table.y - design @ beta
    dof = n - (p + 1)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(gram)
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        tstat = np.where(se > 0, beta / se, np.inf)
    pvals = 2.0 * special.stdtr(dof, -np.abs(tstat))

    means = constants.means if constants is not None else np.zeros(p)
    stds = constants.stds if constants is not None else np.ones(p)
    model = LinearModel(
        feature_names=tuple(table.columns),
        intercept=float(beta[0]),
        coef=beta[1:].copy(),
        coef_se=se[1:].copy(),
        coef_pvalues=pvals[1:].copy(),
        intercept_se=float(se[0]),
        intercept_pvalue=float(pvals[0]),
        r2=None,
        feature_means=np.asarray(means, dtype=float),
        feature_stds=np.asarray(stds, dtype=float),
    )
    target = heldout if heldout is not None else table
    model.r2 = r2_score(target.y, model.predict(target.X))
    return model


def null_shuffle_regression(train: FeatureTable, heldout: FeatureTable, trials: int = 100, seed=0) -> dict:
    """Held-out R^2 distribution after shuffling the target.

    Each trial permutes the pooled train+heldout target, refits on the train
    rows, and scores R^2 on the held-out rows.
    """
    y_all = np.concatenate([train.y, heldout.y])
    n_train = len(train.y)
    rng = np.random.default_rng(seed)
    scores = []
    for _ in range(trials):
        perm = rng.permutation(y_all)
        t2 = train.select_rows(np.ones(n_train, dtype=bool))
        t2.y = perm[:n_train]
        h2 = heldout.select_rows(np.ones(len(heldout.y), dtype=bool))
        h2.y = perm[n_train:]
        try:
            m = fit_linear(t2, heldout=h2)
            scores.append(m.r2)
        except DataError:
            scores.append(np.nan)
    return {"kind": "shuffled_target", "trials": trials, "r2": _percentile_summary(scores)}
