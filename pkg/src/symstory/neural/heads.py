"""Feedforward output heads: one rectified hidden layer, then linear out."""
from __future__ import annotations

from typing import Dict, Tuple

import numpy as np


class FeedforwardHead:
    def __init__(self, input_dim: int, hidden: int, output_dim: int, rng: np.random.Generator):
        self.input_dim = input_dim
        self.hidden = hidden
        self.output_dim = output_dim
        k1 = 1.0 / np.sqrt(input_dim)
        k2 = 1.0 / np.sqrt(hidden)
        self.W1 = rng.uniform(-k1, k1, size=(hidden, input_dim))
        self.b1 = rng.uniform(-k1, k1, size=hidden)
        self.W2 = rng.uniform(-k2, k2, size=(output_dim, hidden))
        self.b2 = rng.uniform(-k2, k2, size=output_dim)
        self.zero_grad()

    def zero_grad(self):
        self.dW1 = np.zeros_like(self.W1)
        self.db1 = np.zeros_like(self.b1)
        self.dW2 = np.zeros_like(self.W2)
        self.db2 = np.zeros_like(self.b2)

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.input_dim,):
            raise ValueError(f"head input width {x.shape} != ({self.input_dim},)")
        return self.W2 @ np.maximum(self.W1 @ x + self.b1, 0.0) + self.b2

    def forward_cached(self, x: np.ndarray) -> Tuple[np.ndarray, tuple]:
        x = np.asarray(x, dtype=np.float64)
        z1 = self.W1 @ x + self.b1
        a1 = np.maximum(z1, 0.0)
        return self.W2 @ a1 + self.b2, (x, z1, a1)

    def backward(self, dout: np.ndarray, cache) -> np.ndarray:
        """Accumulate parameter grads; return gradient w.r.t. the input."""
        x, z1, a1 = cache
        self.dW2 += np.outer(dout, a1)
        self.db2 += dout
        da1 = self.W2.T @ dout
        dz1 = da1 * (z1 > 0.0)
        self.dW1 += np.outer(dz1, x)
        self.db1 += dz1
        return self.W1.T @ dz1

    def parameters(self) -> Dict[str, np.ndarray]:
        return {"W1": self.W1, "b1": self.b1, "W2": self.W2, "b2": self.b2}

    def set_parameters(self, params: Dict[str, np.ndarray]):
        self.W1 = np.array(params["W1"], dtype=np.float64)
        self.b1 = np.array(params["b1"], dtype=np.float64)
        self.W2 = np.array(params["W2"], dtype=np.float64)
        self.b2 = np.array(params["b2"], dtype=np.float64)

    def grads_by_param(self) -> Dict[str, np.ndarray]:
        return {"W1": self.dW1, "b1": self.db1, "W2": self.dW2, "b2": self.db2}
