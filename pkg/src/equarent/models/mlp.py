"""Fully connected MLP trained with Adam on mean absolute error.

Hidden layers are rectified linear, the single output is a logistic
sigmoid, so predictions live strictly in (0, 1).  Backpropagation and
the optimizer are written out explicitly; the MAE subgradient at zero
residual is 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class TrainingError(RuntimeError):
    """Training diverged (non-finite loss); message names the epoch."""


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True)
class MLP:
    """Weights/biases per layer plus the training loss history.

    ``input_mean``/``input_scale`` standardize inputs before the first
    layer (fitted on the training data); they are fixed statistics, not
    trainable parameters, so they do not enter the parameter count.
    """

    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    loss_history: tuple[float, ...] = ()
    input_mean: np.ndarray | None = None
    input_scale: np.ndarray | None = None

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.weights[0].shape[0],) + tuple(w.shape[1] for w in self.weights)

    @property
    def n_parameters(self) -> int:
        return int(sum((w.shape[0] + 1) * w.shape[1] for w in self.weights))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return _forward(self, np.atleast_2d(np.asarray(X, dtype=np.float64)))[-1].ravel()

    def to_dict(self) -> dict:
        return {
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "loss_history": list(self.loss_history),
            "input_mean": None if self.input_mean is None else self.input_mean.tolist(),
            "input_scale": None if self.input_scale is None else self.input_scale.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MLP":
        def arr(key):
            v = d.get(key)
            return None if v is None else np.asarray(v, dtype=np.float64)

        return cls(
            weights=tuple(np.asarray(w, dtype=np.float64) for w in d["weights"]),
            biases=tuple(np.asarray(b, dtype=np.float64) for b in d["biases"]),
            loss_history=tuple(d.get("loss_history", ())),
            input_mean=arr("input_mean"),
            input_scale=arr("input_scale"),
        )


def init_mlp(n_inputs: int, hidden: tuple[int, ...] = (256, 128, 64),
             seed: int = 0, rng: np.random.Generator | None = None) -> MLP:
    """Fan-in-scaled normal initialization, zero biases, seeded."""
    rng = rng or np.random.default_rng(seed)
    sizes = (n_inputs, *hidden, 1)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        scale = np.sqrt(2.0 / fan_in)
        weights.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MLP(weights=tuple(weights), biases=tuple(biases))


def _forward(model: MLP, X: np.ndarray) -> list[np.ndarray]:
    """Activations per layer; the last entry is the sigmoid output.

    ``acts[0]`` is the (standardized) network input, which is what the
    first-layer weight gradient needs.
    """
    if model.input_mean is not None:
        X = (X - model.input_mean) / model.input_scale
    acts = [X]
    h = X
    last = len(model.weights) - 1
    for i, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ W + b
        h = _sigmoid(z) if i == last else np.maximum(z, 0.0)
        acts.append(h)
    return acts


def loss_mae(model: MLP, X: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(np.abs(model.predict(X) - np.asarray(y, dtype=np.float64))))


def gradient(model: MLP, X: np.ndarray, y: np.ndarray
             ) -> tuple[tuple[np.ndarray, ...], tuple[np.ndarray, ...]]:
    """Analytic MAE gradient over the batch, per weight and bias."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).reshape(-1, 1)
    acts = _forward(model, X)
    out = acts[-1]
    n = X.shape[0]
    delta = np.sign(out - y) / n          # dL/d(out); 0 at zero residual
    delta = delta * out * (1.0 - out)     # through the sigmoid
    grads_W: list[np.ndarray] = []
    grads_b: list[np.ndarray] = []
    for i in range(len(model.weights) - 1, -1, -1):
        grads_W.append(acts[i].T @ delta)
        grads_b.append(delta.sum(axis=0))
        if i > 0:
            delta = (delta @ model.weights[i].T) * (acts[i] > 0.0)
    return tuple(reversed(grads_W)), tuple(reversed(grads_b))


def fit_mlp(
    X: np.ndarray,
    y: np.ndarray,
    *,
    hidden: tuple[int, ...] = (256, 128, 64),
    epochs: int = 200,
    batch_size: int = 32,
    learning_rate: float = 0.001,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
    seed: int = 0,
) -> MLP:
    """Minibatch Adam on MAE; returns the model with its loss history.

    One seeded generator drives both initialization and the per-epoch
    shuffles, so a fixed seed reproduces training bit for bit.  The
    history starts with the pre-training loss, then one entry per epoch.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] != y.shape[0] or y.size == 0:
        raise ValueError("X and y must have matching nonzero length")
    if np.any((y < 0) | (y > 1)):
        raise ValueError("labels must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    std = X.std(axis=0)
    input_mean = X.mean(axis=0)
    input_scale = np.where(std > 0.0, std, 1.0)
    model = init_mlp(X.shape[1], hidden=hidden, rng=rng)
    model = MLP(weights=model.weights, biases=model.biases,
                input_mean=input_mean, input_scale=input_scale)
    params = [w.copy() for w in model.weights] + [b.copy() for b in model.biases]
    n_w = len(model.weights)
    m_state = [np.zeros_like(p) for p in params]
    v_state = [np.zeros_like(p) for p in params]
    t = 0
    n = X.shape[0]
    history = [loss_mae(_rebuild(model, params, n_w), X, y)]
    for epoch in range(epochs):
        perm = rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = perm[start:start + batch_size]
            current = _rebuild(model, params, n_w)
            grads_W, grads_b = gradient(current, X[idx], y[idx])
            grads = list(grads_W) + list(grads_b)
            t += 1
            for p, g, m, v in zip(params, grads, m_state, v_state):
                m *= beta1
                m += (1.0 - beta1) * g
                v *= beta2
                v += (1.0 - beta2) * (g * g)
                m_hat = m / (1.0 - beta1 ** t)
                v_hat = v / (1.0 - beta2 ** t)
                p -= learning_rate * m_hat / (np.sqrt(v_hat) + eps)
        epoch_loss = loss_mae(_rebuild(model, params, n_w), X, y)
        if not np.isfinite(epoch_loss):
            raise TrainingError(f"non-finite loss at epoch {epoch}")
        history.append(epoch_loss)
    return MLP(
        weights=tuple(params[:n_w]),
        biases=tuple(params[n_w:]),
        loss_history=tuple(history),
        input_mean=input_mean,
        input_scale=input_scale,
    )


def _rebuild(model: MLP, params: list[np.ndarray], n_w: int) -> MLP:
    return MLP(weights=tuple(params[:n_w]), biases=tuple(params[n_w:]),
               input_mean=model.input_mean, input_scale=model.input_scale)
