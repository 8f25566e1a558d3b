"""Grid-partitioned adaptive Sugeno network with hybrid training.

The network alternates two parameter groups each epoch:

- consequent coefficients, solved globally by ridge-regularized linear
  least squares for the current premises (the solve is exact, so train
  RMSE can only drop across this half-step);
- premise membership parameters, moved one gradient-descent step
  against the mean squared error (triangular premises are kept fixed:
  their vertices make the gradient undefined, so triangular models
  train consequents only).

Array conventions, for a model with d inputs, M membership functions
per input, and R = M^d rules:

    X       (n, d)       encoded sample features
    D       (n, d, M)    membership degrees per input
    W       (n, R)       rule firing strengths (product AND)
    Wbar    (n, R)       normalized strengths (uniform fallback rows
                         where the total strength is exactly zero)
    F       (n, R)       per-rule consequent values  p0 + p . x
    y       (n,)         network output, sum_i Wbar * F

A "single" model regresses the class value 1..4 and classifies by
rounding; a "binary" model is one member of a one-against-all ensemble
and regresses a 0/1 target for its positive class.
"""

from __future__ import annotations

import copy
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .data import to_arrays
from .errors import NumericError
from .fuzzy import MF_SHAPES, SugenoRule, mf_from_dict

__all__ = [
    "AnfisModel",
    "AnfisEnsemble",
    "TrainingConfig",
    "TrainingTrace",
    "ForwardDetail",
    "build_grid_model",
    "anfis_forward",
    "lse_consequents",
    "premise_gradients",
    "premise_gradient_step",
    "train_hybrid",
    "train_oaa",
    "decode_values",
    "predict_class",
    "predict_classes",
    "predict_score",
    "binary_decision",
    "class_scores",
    "ensemble_predict_classes",
]

MODEL_FORMAT_VERSION = 1
_MIN_WIDTH = 1e-6


@dataclass
class TrainingConfig:
    epochs: int = 100
    learn_rate: float = 0.01
    ridge: float = 1e-8
    seed: int = 0
    early_stop_rmse: float = 0.0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not self.learn_rate > 0:
            raise ValueError(f"learn_rate must be > 0, got {self.learn_rate}")
        if self.ridge < 0:
            raise ValueError(f"ridge must be >= 0, got {self.ridge}")
        if self.early_stop_rmse < 0:
            raise ValueError(
                f"early_stop_rmse must be >= 0, got {self.early_stop_rmse}")

    def to_dict(self):
        return {"epochs": self.epochs, "learn_rate": self.learn_rate,
                "ridge": self.ridge, "seed": self.seed,
                "early_stop_rmse": self.early_stop_rmse}


@dataclass
class TrainingTrace:
    train_rmse: list = field(default_factory=list)
    test_rmse: float | None = None
    epochs_run: int = 0

    def to_dict(self):
        return {"train_rmse": [float(v) for v in self.train_rmse],
                "test_rmse": None if self.test_rmse is None else float(self.test_rmse),
                "epochs_run": self.epochs_run}


@dataclass(eq=False)
class AnfisModel:
    mf_shape: str
    mfs_per_input: int
    input_dim: int
    input_range: tuple
    mf_bank: list                 # per input: list of membership functions
    antecedents: np.ndarray       # (R, input_dim) int
    consequents: np.ndarray       # (R, input_dim + 1) float
    consequent_order: str = "linear"
    output_mode: str = "single"   # single | binary
    positive_class: int | None = None
    seed: int = 0
    training: dict | None = None

    @property
    def n_rules(self):
        return len(self.antecedents)

    @property
    def rules(self):
        """The rule base as explicit Sugeno rules (reference path)."""
        return [SugenoRule(antecedent=tuple(int(a) for a in ant),
                           consequent=tuple(float(p) for p in cons))
                for ant, cons in zip(self.antecedents, self.consequents)]

    def to_dict(self):
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": "anfis",
            "output_mode": self.output_mode,
            "mf_shape": self.mf_shape,
            "mfs_per_input": self.mfs_per_input,
            "input_dim": self.input_dim,
            "input_range": [float(self.input_range[0]), float(self.input_range[1])],
            "consequent_order": self.consequent_order,
            "positive_class": self.positive_class,
            "seed": self.seed,
            "mf_bank": [[mf.to_dict() for mf in per_input]
                        for per_input in self.mf_bank],
            "antecedents": self.antecedents.tolist(),
            "consequents": self.consequents.tolist(),
            "training": self.training,
        }

    @classmethod
    def from_dict(cls, d):
        model = cls(
            mf_shape=d["mf_shape"],
            mfs_per_input=int(d["mfs_per_input"]),
            input_dim=int(d["input_dim"]),
            input_range=tuple(d["input_range"]),
            mf_bank=[[mf_from_dict(m) for m in per_input]
                     for per_input in d["mf_bank"]],
            antecedents=np.array(d["antecedents"], dtype=int),
            consequents=np.array(d["consequents"], dtype=float),
            consequent_order=d["consequent_order"],
            output_mode=d["output_mode"],
            positive_class=d["positive_class"],
            seed=int(d["seed"]),
            training=d["training"])
        R = model.antecedents.shape[0] if model.antecedents.ndim == 2 else -1
        if (model.antecedents.shape != (R, model.input_dim)
                or model.consequents.shape != (R, model.input_dim + 1)
                or len(model.mf_bank) != model.input_dim
                or any(len(row) != model.mfs_per_input
                       for row in model.mf_bank)):
            raise ValueError("inconsistent rule table dimensions")
        return model


@dataclass(eq=False)
class AnfisEnsemble:
    """Four binary models, one per class; scores feed argmax and ROC."""

    members: list

    def to_dict(self):
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": "anfis",
            "output_mode": "oaa",
            "members": [m.to_dict() for m in self.members],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(members=[AnfisModel.from_dict(m) for m in d["members"]])


def build_grid_model(mf_shape, mfs_per_input=2, input_range=(-1.0, 1.0),
                     seed=0, input_dim=5, consequent_order="linear",
                     output_mode="single", positive_class=None):
    """Enumerate the full rule grid with evenly spread membership functions.

    Centers sit on an even grid over ``input_range`` and widths are set
    so adjacent functions cross near degree 0.5.  Consequents start at
    zero.  Construction is deterministic; ``seed`` is recorded for the
    training config echo.
    """
    if mfs_per_input < 2:
        raise ValueError(f"mfs_per_input must be >= 2, got {mfs_per_input}")
    if mf_shape not in MF_SHAPES:
        raise ValueError(f"unknown mf_shape {mf_shape!r}")
    if consequent_order not in ("linear", "constant"):
        raise ValueError(f"unknown consequent_order {consequent_order!r}")
    if output_mode not in ("single", "binary"):
        raise ValueError(f"unknown output_mode {output_mode!r}")
    lo, hi = float(input_range[0]), float(input_range[1])
    if not hi > lo:
        raise ValueError(f"input_range must satisfy hi > lo, got {input_range}")

    spacing = (hi - lo) / (mfs_per_input - 1)
    centers = [lo + m * spacing for m in range(mfs_per_input)]

    def make_mf(c):
        if mf_shape == "gbell":
            return MF_SHAPES["gbell"](a=spacing / 2.0, b=2.0, c=c)
        if mf_shape == "gauss2":
            sigma = spacing / (2.0 * math.sqrt(2.0 * math.log(2.0)))
            return MF_SHAPES["gauss2"](sigma_left=sigma, c_left=c,
                                       sigma_right=sigma, c_right=c)
        return MF_SHAPES["triangular"](left=c - spacing, peak=c, right=c + spacing)

    mf_bank = [[make_mf(c) for c in centers] for _ in range(input_dim)]
    antecedents = np.array(
        list(itertools.product(range(mfs_per_input), repeat=input_dim)),
        dtype=int)
    consequents = np.zeros((len(antecedents), input_dim + 1))
    return AnfisModel(
        mf_shape=mf_shape, mfs_per_input=mfs_per_input, input_dim=input_dim,
        input_range=(lo, hi), mf_bank=mf_bank, antecedents=antecedents,
        consequents=consequents, consequent_order=consequent_order,
        output_mode=output_mode, positive_class=positive_class, seed=seed)


def _membership_matrix(model, X):
    n = X.shape[0]
    D = np.empty((n, model.input_dim, model.mfs_per_input))
    for j in range(model.input_dim):
        for m in range(model.mfs_per_input):
            D[:, j, m] = model.mf_bank[j][m].degree(X[:, j])
    return D


def _forward_batch(model, X):
    """Returns (y, W, Wbar, F, degenerate_rows)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.input_dim:
        raise ValueError(
            f"expected (n, {model.input_dim}) inputs, got {X.shape}")
    D = _membership_matrix(model, X)
    W = np.ones((X.shape[0], model.n_rules))
    for j in range(model.input_dim):
        W = W * D[:, j, model.antecedents[:, j]]
    S = W.sum(axis=1)
    degenerate = S == 0.0
    Wbar = np.empty_like(W)
    ok = ~degenerate
    Wbar[ok] = W[ok] / S[ok, None]
    Wbar[degenerate] = 1.0 / model.n_rules
    if __debug__:
        assert np.all(np.abs(Wbar.sum(axis=1) - 1.0) < 1e-9)

    X1 = np.hstack([np.ones((X.shape[0], 1)), X])
    F = X1 @ model.consequents.T
    y = (Wbar * F).sum(axis=1)
    return y, W, Wbar, F, degenerate


@dataclass(frozen=True)
class ForwardDetail:
    """One forward pass with every layer exposed."""

    y: float
    firing: np.ndarray
    normalized: np.ndarray
    rule_outputs: np.ndarray
    contributions: np.ndarray
    degenerate: bool


def anfis_forward(model, x):
    """Evaluate one input and return all intermediate layer outputs."""
    x = np.asarray(x, dtype=float)
    y, W, Wbar, F, degen = _forward_batch(model, x[None, :])
    return ForwardDetail(
        y=float(y[0]), firing=W[0], normalized=Wbar[0], rule_outputs=F[0],
        contributions=Wbar[0] * F[0], degenerate=bool(degen[0]))


def _design_matrix(model, Wbar, X):
    if model.consequent_order == "constant":
        return Wbar
    X1 = np.hstack([np.ones((X.shape[0], 1)), X])
    # rule-major blocks: [wbar_i, wbar_i * x_1, ..., wbar_i * x_d] per rule
    return (Wbar[:, :, None] * X1[:, None, :]).reshape(X.shape[0], -1)


def lse_consequents(model, X, targets, ridge=1e-8):
    """Globally optimal consequents for the current premises.

    Minimizes ||Phi p - t||^2 + ridge * ||p||^2 via least squares on the
    ridge-augmented system; premises are untouched.  Returns the
    residual train RMSE.
    """
    X = np.asarray(X, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if len(X) < 1:
        raise ValueError("need at least one training sample")
    _, _, Wbar, _, _ = _forward_batch(model, X)
    Phi = _design_matrix(model, Wbar, X)
    n_coef = Phi.shape[1]
    if ridge > 0:
        A = np.vstack([Phi, math.sqrt(ridge) * np.eye(n_coef)])
        b = np.concatenate([targets, np.zeros(n_coef)])
    else:
        A, b = Phi, targets
    solution, _, _, _ = np.linalg.lstsq(A, b, rcond=None)
    if not np.all(np.isfinite(solution)):
        raise NumericError("consequent solve produced non-finite values")

    if model.consequent_order == "constant":
        model.consequents[:, :] = 0.0
        model.consequents[:, 0] = solution
    else:
        model.consequents = solution.reshape(model.n_rules, model.input_dim + 1)
    residual = Phi @ solution - targets
    return float(np.sqrt(np.mean(residual**2)))


def premise_gradients(model, X, t):
    """Mean-squared-error loss and its gradient in the premise parameters.

    Returns ``(loss, grads)`` where ``grads[j]`` has one row per
    membership function of input j.  Rows where the total firing
    strength is exactly zero sit on the uniform fallback and contribute
    no gradient.  Triangular banks return zero gradients.
    """
    X = np.asarray(X, dtype=float)
    t = np.asarray(t, dtype=float)
    n = len(X)
    y, W, Wbar, F, degenerate = _forward_batch(model, X)
    loss = float(np.mean((y - t) ** 2))

    n_params = len(model.mf_bank[0][0].params())
    grads = [np.zeros((model.mfs_per_input, n_params))
             for _ in range(model.input_dim)]
    if not model.mf_bank[0][0].trainable:
        return loss, grads

    D = _membership_matrix(model, X)
    dEdy = 2.0 * (y - t) / n
    S = W.sum(axis=1)
    ok = ~degenerate
    # dE/dW_i = dE/dy * (F_i - y) / S, valid only off the fallback rows
    dEdW = np.zeros_like(W)
    dEdW[ok] = (dEdy[ok, None] * (F[ok] - y[ok, None])) / S[ok, None]

    M = model.mfs_per_input
    for j in range(model.input_dim):
        excl = np.ones_like(W)
        for jp in range(model.input_dim):
            if jp != j:
                excl = excl * D[:, jp, model.antecedents[:, jp]]
        G = dEdW * excl                                   # (n, R)
        onehot = model.antecedents[:, j][:, None] == np.arange(M)[None, :]
        A = G @ onehot                                    # (n, M)
        for m in range(M):
            _, dmu = model.mf_bank[j][m].degree_and_param_grads(X[:, j])
            grads[j][m] = dmu @ A[:, m]
    return loss, grads


def _clamped_step(mf, new_params):
    """Build the stepped function, repairing invariants first.

    Widths are clamped positive; a crossed two-sided plateau is fixed
    by swapping sides before construction, which would otherwise
    reject the parameters.
    """
    p = np.array(new_params, dtype=float)
    if mf.shape_name == "gbell":
        p[0] = max(p[0], _MIN_WIDTH)          # width
        p[1] = max(p[1], _MIN_WIDTH)          # slope
    elif mf.shape_name == "gauss2":
        p[0] = max(p[0], _MIN_WIDTH)
        p[2] = max(p[2], _MIN_WIDTH)
        if p[1] > p[3]:                       # plateau edges crossed: swap sides
            p = np.array([p[2], p[3], p[0], p[1]])
    return mf.with_params(p)


def premise_gradient_step(model, X, t, learn_rate):
    """One gradient-descent step on every trainable premise parameter.

    Widths are clamped positive and a crossed two-sided plateau is
    repaired by swapping sides, so membership invariants survive any
    step size.  Triangular premises are left untouched.
    """
    if not model.mf_bank[0][0].trainable:
        return model
    _, grads = premise_gradients(model, X, t)
    for j in range(model.input_dim):
        for m in range(model.mfs_per_input):
            mf = model.mf_bank[j][m]
            model.mf_bank[j][m] = _clamped_step(
                mf, mf.params() - learn_rate * grads[j][m])
    return model


def _targets_for(model, samples):
    _, values, onehot, _ = to_arrays(samples)
    if model.output_mode == "single":
        return values
    if model.positive_class is None:
        raise ValueError("binary model needs positive_class set")
    return onehot[:, model.positive_class]


def train_hybrid(model, train, test, config):
    """Hybrid training: per epoch, an exact consequent solve then one
    premise gradient step.  Deterministic; returns a trained copy and
    the per-epoch RMSE trace.
    """
    if not train:
        raise ValueError("training set is empty")
    model = copy.deepcopy(model)
    X_train, _, _, _ = to_arrays(train)
    t_train = _targets_for(model, train)

    trace = TrainingTrace()
    for _ in range(config.epochs):
        lse_consequents(model, X_train, t_train, ridge=config.ridge)
        premise_gradient_step(model, X_train, t_train, config.learn_rate)
        y, _, _, _, _ = _forward_batch(model, X_train)
        rmse = float(np.sqrt(np.mean((y - t_train) ** 2)))
        trace.train_rmse.append(rmse)
        trace.epochs_run += 1
        if config.early_stop_rmse > 0 and rmse <= config.early_stop_rmse:
            break

    if test:
        X_test = to_arrays(test)[0]
        t_test = _targets_for(model, test)
        y_test, _, _, _, _ = _forward_batch(model, X_test)
        trace.test_rmse = float(np.sqrt(np.mean((y_test - t_test) ** 2)))
    model.training = config.to_dict()
    return model, trace


def train_oaa(proto, train, test, config):
    """Train four one-against-all copies of ``proto``, one per class.

    The members are independent; each regresses a 0/1 target for its
    own positive class.
    """
    members, traces = [], []
    for k in range(4):
        member = copy.deepcopy(proto)
        member.output_mode = "binary"
        member.positive_class = k
        trained, trace = train_hybrid(member, train, test, config)
        members.append(trained)
        traces.append(trace)
    return AnfisEnsemble(members=members), traces


def decode_values(y):
    """Map regression outputs to class indices: round, clamp to 1..4.

    Rounding is half away from zero, implemented as floor(y + 0.5);
    on the clamped target range the two rules agree.  The decision
    depends on y only through the boundaries 1.5, 2.5, 3.5.
    """
    values = np.clip(np.floor(np.asarray(y, dtype=float) + 0.5), 1, 4)
    return values.astype(int) - 1


def predict_class(model, x):
    """Single-output decision for one input."""
    return int(decode_values(anfis_forward(model, x).y))


def predict_classes(model, X):
    """Vectorized ``predict_class`` over rows of X."""
    y, _, _, _, _ = _forward_batch(model, np.asarray(X, dtype=float))
    return decode_values(y)


def predict_score(model, x):
    """Raw network output of a binary member, uncapped; the ROC score."""
    return anfis_forward(model, x).y


def binary_decision(model, x):
    """A binary member's hard call: positive at score >= 0.5."""
    return predict_score(model, x) >= 0.5


def class_scores(model, X):
    """Per-class ranking scores, (n, 4).

    An ensemble reports each member's raw output.  A single-output
    model ranks by closeness of y to each class value, -|y - (k + 1)|,
    which preserves the rounding decision's ordering.
    """
    X = np.asarray(X, dtype=float)
    if isinstance(model, AnfisEnsemble):
        cols = [_forward_batch(member, X)[0] for member in model.members]
        return np.column_stack(cols)
    y, _, _, _, _ = _forward_batch(model, X)
    return -np.abs(y[:, None] - (np.arange(4)[None, :] + 1.0))


def ensemble_predict_classes(ensemble, X):
    """Argmax of the member scores (ties go to the lower class index)."""
    return np.argmax(class_scores(ensemble, X), axis=1)
