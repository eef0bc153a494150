"""Feed-forward networks over a base function class, with capacity functionals.

A network is evaluated on chain states: base neurons emit tabulated base
function values, layer-j neurons emit sigma_j(w . inputs) where inputs tap
any earlier signal (skip connections allowed). Capacity tracks per-layer
l1 weight norms W_k, the product Lambda(f) = prod(4 L_k W_k + 1), and
Gamma_alpha(f) = sum sqrt((alpha/2) log(2 + log2 W_k)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .empirical import FunctionClass

SIGMOID_GRID = np.arange(-50.0, 50.0 + 1e-9, 1e-3)
SLOPE_SLACK = 1e-6


@dataclass(frozen=True)
class Sigmoid:
    """Map from R into [-1, 1]; built-ins are tanh and symmetric clamp."""

    name: str
    xs: np.ndarray | None = None
    ys: np.ndarray | None = None

    def __call__(self, z):
        if self.name == "tanh":
            return np.tanh(z)
        if self.name == "clamp":
            return np.clip(z, -1.0, 1.0)
        return np.interp(z, self.xs, self.ys)

    def max_slope(self) -> float:
        if self.name in ("tanh", "clamp"):
            return 1.0
        dx = np.diff(self.xs)
        dy = np.diff(self.ys)
        return float(np.abs(dy / dx).max())

    def check_range(self):
        if self.name in ("tanh", "clamp"):
            return
        vals = self(SIGMOID_GRID)
        if np.abs(vals).max() > 1.0 + 1e-12:
            raise ValueError(f"sigmoid {self.name!r} escapes [-1, 1]")


def make_sigmoid(name: str, xs=None, ys=None) -> Sigmoid:
    if name in ("tanh", "clamp"):
        return Sigmoid(name=name)
    if xs is None or ys is None:
        raise ValueError("table sigmoids need xs and ys")
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or len(xs) < 2:
        raise ValueError("table sigmoid needs matching 1-d xs and ys")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("table sigmoid xs must be strictly increasing")
    sig = Sigmoid(name=name, xs=xs, ys=ys)
    sig.check_range()
    return sig


@dataclass(frozen=True)
class Neuron:
    """Weights over tapped signals; taps index the running signal vector
    (base outputs first, then earlier neurons in creation order)."""

    w: np.ndarray
    taps: tuple

    def __init__(self, w, taps):
        arr = np.array(w, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "w", arr)
        object.__setattr__(self, "taps", tuple(int(t) for t in taps))
        if len(self.w) != len(self.taps):
            raise ValueError("weight vector and taps disagree in length")

    @property
    def l1(self) -> float:
        return float(np.abs(self.w).sum())


@dataclass(frozen=True)
class Layer:
    neurons: tuple
    sigmoid: Sigmoid
    L: float
    budget: float | None = None


@dataclass(frozen=True)
class NetworkSpec:
    base: FunctionClass
    layers: tuple

    def __post_init__(self):
        if not self.layers:
            raise ValueError("network needs at least one layer")
        if len(self.layers[-1].neurons) != 1:
            raise ValueError("output layer must hold exactly one neuron")
        avail = self.base.size
        for j, layer in enumerate(self.layers, start=1):
            if layer.L < layer.sigmoid.max_slope() - SLOPE_SLACK:
                raise ValueError(
                    f"layer {j}: declared Lipschitz {layer.L} below observed "
                    f"slope {layer.sigmoid.max_slope()}"
                )
            for neuron in layer.neurons:
                for t in neuron.taps:
                    if not (0 <= t < avail):
                        raise ValueError(
                            f"layer {j}: tap {t} dangles (only {avail} signals exist)"
                        )
                if layer.budget is not None and neuron.l1 > layer.budget + 1e-12:
                    raise ValueError(
                        f"layer {j}: ||w||_1 = {neuron.l1} exceeds budget {layer.budget}"
                    )
            avail += len(layer.neurons)

    @property
    def depth(self) -> int:
        return len(self.layers)


@dataclass(frozen=True)
class NetworkCapacity:
    l_f: int
    W_k: tuple
    Lambda: float
    Gamma_alpha: float
    alpha: float
    gamma_floored: bool = field(default=False)


def forward(net: NetworkSpec, state: int) -> float:
    """Network output f(x) for one state index."""
    signals = list(net.base.values[:, state])
    for layer in net.layers:
        outs = []
        for neuron in layer.neurons:
            z = 0.0
            for w, t in zip(neuron.w, neuron.taps):
                z += w * signals[t]
            outs.append(float(layer.sigmoid(z)))
        signals.extend(outs)
    return signals[-1]


def tabulate(net: NetworkSpec, name: str = "net") -> FunctionClass:
    """Evaluate the network on every state of the base class's chain."""
    vals = np.array([forward(net, s) for s in range(net.base.n_states)])
    return FunctionClass(values=vals[None, :], names=(name,), M=max(1.0, float(np.abs(vals).max())))


def capacity(net: NetworkSpec, alpha: float) -> NetworkCapacity:
    """Exact per-layer max-l1 scan and the Lambda / Gamma_alpha functionals.

    W_k below 1/2 would push 2 + log2 W_k under 1, where the partition the
    adaptive bound relies on never reaches; the argument is floored at
    2 + log2(1/2) = 1 and the flooring is flagged.
    """
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    W = []
    floored = False
    for layer in net.layers:
        norms = max(neuron.l1 for neuron in layer.neurons)
        wk = norms if layer.budget is None else max(norms, layer.budget)
        W.append(wk)
    lam = 1.0
    gamma = 0.0
    for layer, wk in zip(net.layers, W):
        lam *= 4.0 * layer.L * wk + 1.0
        arg = 2.0 + math.log2(max(wk, 0.5))
        if wk < 0.5:
            floored = True
        gamma += math.sqrt((alpha / 2.0) * math.log(arg))
    return NetworkCapacity(
        l_f=net.depth,
        W_k=tuple(W),
        Lambda=lam,
        Gamma_alpha=gamma,
        alpha=alpha,
        gamma_floored=floored,
    )


def network_margins(net: NetworkSpec, labels) -> FunctionClass:
    """f~(x, y) = y f(x) tabulated for downstream bound evaluators.

    `labels` is either one +-1 value per base state (deterministic labels;
    result lives on S) or the +-1 alphabet of a lifted chain (result lives on
    S x Y in row-major state-then-label order).
    """
    f = tabulate(net).values[0]
    labels = np.asarray(labels, dtype=float)
    if np.any(np.abs(labels) != 1.0):
        raise ValueError("labels must be +-1")
    if labels.shape == (net.base.n_states,):
        vals = labels * f
        return FunctionClass(values=vals[None, :], names=("net~",), M=max(1.0, float(np.abs(vals).max())))
    lifted = np.stack([y * f for y in labels], axis=1).reshape(-1)
    return FunctionClass(
        values=lifted[None, :],
        names=("net~",),
        M=max(1.0, float(np.abs(lifted).max())),
        labeled=True,
        n_labels=len(labels),
    )
