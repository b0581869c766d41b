"""Gaussian-process regression surrogate for the wave-resistance coefficient.

An anisotropic squared-exponential kernel with per-dimension length
scales, fitted by maximizing the log marginal likelihood (L-BFGS with
analytic gradients from a fixed set of starting points, so fits are
deterministic).  A fitted model is immutable and cheap to query, which is
what lets the exploration modes show performance without running the
direct evaluator in the loop.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular
from scipy.optimize import minimize

from .config import GeneratorConfig, HydroConfig, SurrogateConfig
from .generator import DesignSpaceBounds, describe_design, uniform_sample
from .hydro import FlowConditions, ThinShipEvaluator


class ConditioningError(RuntimeError):
    """Kernel matrix stayed non-positive-definite through the jitter ladder."""


@dataclass
class Hyperparameters:
    length_scales: np.ndarray  # (LATENT_DIM,)
    signal_std: float
    noise_std: float


@dataclass
class Prediction:
    mean: float
    variance: float  # >= 0, clamped at the numerical floor


@dataclass
class HoldoutReport:
    n_train: int
    n_holdout: int
    rmse: float
    r2: float

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(["n_train", "n_holdout", "rmse", "r2"])
        writer.writerow([self.n_train, self.n_holdout, repr(self.rmse), repr(self.r2)])
        return out.getvalue()


def _sq_dists(xa: np.ndarray, xb: np.ndarray) -> np.ndarray:
    """Per-dimension squared differences, shape (na, nb, d)."""
    return (xa[:, None, :] - xb[None, :, :]) ** 2


def _kernel(sq: np.ndarray, length_scales: np.ndarray, signal_var: float) -> np.ndarray:
    return signal_var * np.exp(-0.5 * np.sum(sq / length_scales**2, axis=-1))


class GPRModel:
    """Fitted GP posterior over standardized targets.

    Instances are built by :func:`fit`; they hold the training set, the
    kernel hyperparameters, and the cached Cholesky solve.
    """

    def __init__(self, inputs: np.ndarray, targets: np.ndarray,
                 hyper: Hyperparameters, jitter_ladder=(1e-10, 1e-9, 1e-8, 1e-7, 1e-6)):
        self.inputs = np.asarray(inputs, dtype=float)
        self.targets = np.asarray(targets, dtype=float)
        self.hyper = hyper
        self.target_mean = float(np.mean(self.targets))
        scale = float(np.std(self.targets))
        self.target_scale = scale if scale > 0.0 else 1.0

        y = (self.targets - self.target_mean) / self.target_scale
        sq = _sq_dists(self.inputs, self.inputs)
        k = _kernel(sq, hyper.length_scales, hyper.signal_std**2)
        k[np.diag_indices_from(k)] += hyper.noise_std**2
        self._cho = _factor_with_jitter(k, self.inputs, jitter_ladder)
        self.weights = cho_solve(self._cho, y)

    def predict(self, latent: np.ndarray) -> Prediction:
        mean, var = self.predict_batch(np.asarray(latent, dtype=float)[None, :])
        return Prediction(float(mean[0]), float(var[0]))

    def predict_batch(self, latents: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and variance at many points, original target units."""
        latents = np.asarray(latents, dtype=float)
        sq = _sq_dists(latents, self.inputs)
        k_star = _kernel(sq, self.hyper.length_scales, self.hyper.signal_std**2)
        mean = k_star @ self.weights * self.target_scale + self.target_mean
        half = solve_triangular(self._cho[0], k_star.T, lower=self._cho[1])
        var = self.hyper.signal_std**2 - np.sum(half**2, axis=0)
        var = np.maximum(var, 0.0) * self.target_scale**2
        return mean, var


def _factor_with_jitter(k: np.ndarray, inputs: np.ndarray, ladder) -> tuple:
    signal = float(np.max(np.diag(k)))
    for jitter in (0.0, *ladder):
        try:
            return cho_factor(k + jitter * signal * np.eye(k.shape[0]), lower=True)
        except np.linalg.LinAlgError:
            continue
    sq = np.sum(_sq_dists(inputs, inputs), axis=-1)
    np.fill_diagonal(sq, np.inf)
    i, j = np.unravel_index(np.argmin(sq), sq.shape)
    raise ConditioningError(
        "kernel matrix not positive definite after maximum jitter; "
        f"closest input pair is ({i}, {j}) at distance {np.sqrt(sq[i, j]):.3e} "
        "(duplicate inputs with zero noise?)"
    )


def _neg_log_marginal_likelihood(log_params: np.ndarray, sq: np.ndarray,
                                 y: np.ndarray) -> tuple[float, np.ndarray]:
    """Negative LML and its gradient w.r.t. log(length scales, signal, noise)."""
    n, d = y.size, sq.shape[-1]
    ls = np.exp(log_params[:d])
    signal_var = np.exp(2.0 * log_params[d])
    noise_var = np.exp(2.0 * log_params[d + 1])

    k_se = _kernel(sq, ls, signal_var)
    k = k_se + noise_var * np.eye(n)
    try:
        cho = cho_factor(k + 1e-12 * signal_var * np.eye(n), lower=True)
    except np.linalg.LinAlgError:
        return 1e25, np.zeros_like(log_params)
    alpha = cho_solve(cho, y)
    lml = (-0.5 * y @ alpha
           - np.sum(np.log(np.diag(cho[0])))
           - 0.5 * n * np.log(2.0 * np.pi))

    k_inv = cho_solve(cho, np.eye(n))
    outer = np.outer(alpha, alpha) - k_inv
    grad = np.empty_like(log_params)
    for dim in range(d):
        dk = k_se * (sq[:, :, dim] / ls[dim] ** 2)
        grad[dim] = 0.5 * np.sum(outer * dk)
    grad[d] = 0.5 * np.sum(outer * (2.0 * k_se))
    grad[d + 1] = 0.5 * np.trace(outer) * 2.0 * noise_var
    return -lml, -grad


def fit(inputs, targets, config: SurrogateConfig | None = None,
        hyper: Hyperparameters | None = None) -> GPRModel:
    """Fit a GP to (inputs, targets).

    Hyperparameters are optimized over the log marginal likelihood unless
    given explicitly.  The likelihood search runs on an evenly strided
    subset when the training set is large; the returned model always
    conditions on the full set.
    """
    cfg = config or SurrogateConfig()
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    targets = np.asarray(targets, dtype=float)
    if inputs.shape[0] != targets.size:
        raise ValueError("inputs and targets disagree on sample count")
    if targets.size < 2:
        raise ValueError("need at least 2 training samples")

    if hyper is None:
        hyper = _optimize_hyperparameters(inputs, targets, cfg)
    return GPRModel(inputs, targets, hyper, cfg.jitter_ladder)


def _optimize_hyperparameters(inputs: np.ndarray, targets: np.ndarray,
                              cfg: SurrogateConfig) -> Hyperparameters:
    n, d = inputs.shape
    if n > cfg.hyper_subset:
        stride = np.linspace(0, n - 1, cfg.hyper_subset).astype(int)
        inputs, targets = inputs[stride], targets[stride]
        n = cfg.hyper_subset

    mean = float(np.mean(targets))
    scale = float(np.std(targets))
    if scale == 0.0:
        scale = 1.0
    y = (targets - mean) / scale
    sq = _sq_dists(inputs, inputs)

    best = None
    for ls0, sf0, sn0 in cfg.hyper_starts:
        x0 = np.concatenate([np.full(d, np.log(ls0)), [np.log(sf0)], [np.log(sn0)]])
        res = minimize(
            _neg_log_marginal_likelihood, x0, args=(sq, y), jac=True,
            method="L-BFGS-B",
            bounds=[(np.log(1e-2), np.log(1e2))] * d
                   + [(np.log(1e-3), np.log(1e2)), (np.log(1e-6), np.log(1e1))],
            options={"maxiter": 150},
        )
        if best is None or res.fun < best.fun:
            best = res
    params = best.x
    return Hyperparameters(
        length_scales=np.exp(params[:d]),
        signal_std=float(np.exp(params[d])),
        noise_std=float(np.exp(params[d + 1])),
    )


def train_surrogate_pipeline(
    n_samples: int, seed: int,
    config: SurrogateConfig | None = None,
    generator_config: GeneratorConfig | None = None,
    hydro_config: HydroConfig | None = None,
) -> tuple[GPRModel, HoldoutReport]:
    """Sample the design space, evaluate the direct solver, and fit the GP.

    Space-filling latents over the root box are filtered to the feasible
    set, each evaluated for its wave-resistance coefficient, then split
    into a training set and a 10% holdout used for the accuracy report.
    Deterministic given the seed.
    """
    cfg = config or SurrogateConfig()
    gcfg = generator_config or GeneratorConfig()
    hcfg = hydro_config or HydroConfig()
    if n_samples < 50:
        raise ValueError("pipeline needs at least 50 samples")

    latents = uniform_sample(DesignSpaceBounds.root(), n_samples, seed)
    evaluator = ThinShipEvaluator(hcfg)
    xs, ys = [], []
    for i, latent in enumerate(latents):
        record = describe_design(f"t{i:06d}", latent, gcfg)
        if not record.constraints.all_satisfied:
            continue
        conditions = FlowConditions(hcfg.froude_number, hcfg.gravity,
                                    record.dimensions.length_waterline)
        xs.append(latent)
        ys.append(evaluator.evaluate(record.geometry, conditions).value)
    xs = np.array(xs)
    ys = np.array(ys)

    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(ys))
    n_holdout = max(1, int(round(cfg.holdout_fraction * len(ys))))
    hold, train = perm[:n_holdout], perm[n_holdout:]

    model = fit(xs[train], ys[train], cfg)
    pred, _ = model.predict_batch(xs[hold])
    residual = ys[hold] - pred
    rmse = float(np.sqrt(np.mean(residual**2)))
    total = float(np.sum((ys[hold] - np.mean(ys[hold])) ** 2))
    r2 = 1.0 - float(np.sum(residual**2)) / total if total > 0 else 1.0
    report = HoldoutReport(len(train), len(hold), rmse, r2)
    return model, report


def save_model(model: GPRModel, path) -> None:
    """Persist hyperparameters plus training set to an .npz container."""
    np.savez(
        path,
        inputs=model.inputs,
        targets=model.targets,
        length_scales=model.hyper.length_scales,
        signal_std=model.hyper.signal_std,
        noise_std=model.hyper.noise_std,
    )


def load_model(path, config: SurrogateConfig | None = None) -> GPRModel:
    cfg = config or SurrogateConfig()
    data = np.load(path)
    hyper = Hyperparameters(
        length_scales=data["length_scales"],
        signal_std=float(data["signal_std"]),
        noise_std=float(data["noise_std"]),
    )
    return GPRModel(data["inputs"], data["targets"], hyper, cfg.jitter_ladder)
