"""Stacked LSTM cells with explicit state threading and hand-rolled BPTT.

Everything is float64 numpy on single (unbatched) vectors; training batches
are handled by gradient accumulation over sequences. Gate layout in the
packed weight matrices is (input, forget, cell, output).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np


def sigmoid(z: np.ndarray) -> np.ndarray:
    # numerically stable piecewise form
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class HiddenState:
    """Per-layer (h, c) pairs. A fresh state is all zeros."""

    layers: List[Tuple[np.ndarray, np.ndarray]]

    @classmethod
    def zeros(cls, n_layers: int, hidden: int) -> "HiddenState":
        return cls([(np.zeros(hidden), np.zeros(hidden)) for _ in range(n_layers)])

    def copy(self) -> "HiddenState":
        return HiddenState([(h.copy(), c.copy()) for h, c in self.layers])

    def allclose(self, other: "HiddenState", tol: float = 0.0) -> bool:
        return all(
            np.allclose(h1, h2, atol=tol) and np.allclose(c1, c2, atol=tol)
            for (h1, c1), (h2, c2) in zip(self.layers, other.layers)
        )


class LstmLayer:
    """One LSTM layer: params Wx (4H, D), Wh (4H, H), b (4H,)."""

    def __init__(self, input_dim: int, hidden: int, rng: np.random.Generator):
        self.input_dim = input_dim
        self.hidden = hidden
        k = 1.0 / np.sqrt(hidden)
        self.Wx = rng.uniform(-k, k, size=(4 * hidden, input_dim))
        self.Wh = rng.uniform(-k, k, size=(4 * hidden, hidden))
        self.b = rng.uniform(-k, k, size=4 * hidden)
        self.zero_grad()

    def zero_grad(self):
        self.dWx = np.zeros_like(self.Wx)
        self.dWh = np.zeros_like(self.Wh)
        self.db = np.zeros_like(self.b)

    def step(self, x: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray):
        """One cell update; returns (h, c, cache) with cache for backward."""
        H = self.hidden
        z = self.Wx @ x + self.Wh @ h_prev + self.b
        i = sigmoid(z[:H])
        f = sigmoid(z[H : 2 * H])
        g = np.tanh(z[2 * H : 3 * H])
        o = sigmoid(z[3 * H :])
        c = f * c_prev + i * g
        h = o * np.tanh(c)
        cache = (x, h_prev, c_prev, i, f, g, o, c)
        return h, c, cache

    def backward_step(self, dh: np.ndarray, dc: np.ndarray, cache):
        """Backprop one step; accumulates parameter grads, returns upstream grads."""
        x, h_prev, c_prev, i, f, g, o, c = cache
        tc = np.tanh(c)
        do = dh * tc
        dc_total = dc + dh * o * (1.0 - tc * tc)
        di = dc_total * g
        df = dc_total * c_prev
        dg = dc_total * i
        dc_prev = dc_total * f
        dz = np.concatenate(
            [
                di * i * (1.0 - i),
                df * f * (1.0 - f),
                dg * (1.0 - g * g),
                do * o * (1.0 - o),
            ]
        )
        self.dWx += np.outer(dz, x)
        self.dWh += np.outer(dz, h_prev)
        self.db += dz
        dx = self.Wx.T @ dz
        dh_prev = self.Wh.T @ dz
        return dx, dh_prev, dc_prev


class RecurrentStack:
    """Stacked LSTM layers; output width equals the hidden width."""

    def __init__(self, input_dim: int, hidden: int, n_layers: int, rng: np.random.Generator):
        if n_layers < 1:
            raise ValueError("need at least one recurrent layer")
        self.input_dim = input_dim
        self.hidden = hidden
        self.n_layers = n_layers
        self.layers = [
            LstmLayer(input_dim if i == 0 else hidden, hidden, rng) for i in range(n_layers)
        ]

    def fresh_state(self) -> HiddenState:
        return HiddenState.zeros(self.n_layers, self.hidden)

    def step(self, x: np.ndarray, state: HiddenState) -> Tuple[np.ndarray, HiddenState]:
        """Advance one frame; O(1) in elapsed sequence length."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.input_dim,):
            raise ValueError(f"input width {x.shape} != ({self.input_dim},)")
        new_layers = []
        inp = x
        for layer, (h, c) in zip(self.layers, state.layers):
            h2, c2, _ = layer.step(inp, h, c)
            new_layers.append((h2, c2))
            inp = h2
        return inp, HiddenState(new_layers)

    def begin_run(self, state: Optional[HiddenState] = None) -> "StackRun":
        return StackRun(self, state or self.fresh_state())

    def forward_sequence(self, xs: Sequence[np.ndarray], state: Optional[HiddenState] = None):
        """Run a whole sequence, keeping caches for backward_sequence.

        Returns (hs, final_state, caches) where hs is (T, hidden).
        """
        run = self.begin_run(state)
        hs = [run.step(x) for x in xs]
        return (
            np.stack(hs) if hs else np.zeros((0, self.hidden)),
            run.state(),
            run.caches,
        )

    def backward_sequence(self, caches, dhs: np.ndarray):
        """BPTT over a forward_sequence run; accumulates grads, returns dxs."""
        T = len(caches)
        dh_next = [np.zeros(self.hidden) for _ in range(self.n_layers)]
        dc_next = [np.zeros(self.hidden) for _ in range(self.n_layers)]
        dxs = [None] * T
        for t in range(T - 1, -1, -1):
            d_from_above = np.asarray(dhs[t], dtype=np.float64)
            for li in range(self.n_layers - 1, -1, -1):
                layer = self.layers[li]
                dh = dh_next[li] + d_from_above
                dinp, dh_prev, dc_prev = layer.backward_step(dh, dc_next[li], caches[t][li])
                dh_next[li] = dh_prev
                dc_next[li] = dc_prev
                d_from_above = dinp
            dxs[t] = d_from_above
        return np.stack(dxs) if dxs else np.zeros((0, self.input_dim))

    def parameters(self) -> Dict[str, np.ndarray]:
        out = {}
        for i, layer in enumerate(self.layers):
            out[f"l{i}.Wx"] = layer.Wx
            out[f"l{i}.Wh"] = layer.Wh
            out[f"l{i}.b"] = layer.b
        return out

    def set_parameters(self, params: Dict[str, np.ndarray]):
        for i, layer in enumerate(self.layers):
            layer.Wx = np.array(params[f"l{i}.Wx"], dtype=np.float64)
            layer.Wh = np.array(params[f"l{i}.Wh"], dtype=np.float64)
            layer.b = np.array(params[f"l{i}.b"], dtype=np.float64)

    def gradients(self) -> Dict[str, np.ndarray]:
        out = {}
        for i, layer in enumerate(self.layers):
            out[f"l{i}.dWx"] = layer.dWx
            out[f"l{i}.dWh"] = layer.dWh
            out[f"l{i}.db"] = layer.db
        return out

    def grads_by_param(self) -> Dict[str, np.ndarray]:
        return {f"l{i}.{n}": g for i, layer in enumerate(self.layers)
                for n, g in (("Wx", layer.dWx), ("Wh", layer.dWh), ("b", layer.db))}

    def zero_grad(self):
        for layer in self.layers:
            layer.zero_grad()


class StackRun:
    """An in-progress cached forward pass over a RecurrentStack."""

    def __init__(self, stack: RecurrentStack, state: HiddenState):
        self.stack = stack
        self.cur = [(h, c) for h, c in state.layers]
        self.caches: List[list] = []

    def step(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.stack.input_dim,):
            raise ValueError(f"input width {x.shape} != ({self.stack.input_dim},)")
        step_caches = []
        inp = x
        for li, layer in enumerate(self.stack.layers):
            h, c, cache = layer.step(inp, self.cur[li][0], self.cur[li][1])
            self.cur[li] = (h, c)
            step_caches.append(cache)
            inp = h
        self.caches.append(step_caches)
        return inp

    def state(self) -> HiddenState:
        return HiddenState([(h.copy(), c.copy()) for h, c in self.cur])
