"""Small dense networks used inside trial wavefunctions.

Complex networks apply selu to real and imaginary parts separately in the
hidden layers and an elementwise exp on the output layer. That split makes
the map non-holomorphic, so reverse accumulation carries an adjoint *pair*
(G, H) per node, meaning the differential contribution G*dz + H*d(conj z).
Holomorphic pieces (affine maps, exp, det) propagate H untouched; the selu
split mixes the pair with real factors

    p = (selu'(x) + selu'(y)) / 2,   q = (selu'(x) - selu'(y)) / 2.

At a complex parameter with accumulated pair (a, b) the derivatives with
respect to its real and imaginary parts are a + b and i*(a - b).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SELU_ALPHA = 1.6732632423543772
SELU_LAMBDA = 1.0507009873554805


def selu(x: np.ndarray) -> np.ndarray:
    neg = np.minimum(x, 0.0)
    return np.where(x >= 0.0, SELU_LAMBDA * x, SELU_LAMBDA * SELU_ALPHA * np.expm1(neg))


def selu_prime(x: np.ndarray) -> np.ndarray:
    neg = np.minimum(x, 0.0)
    return np.where(x >= 0.0, SELU_LAMBDA, SELU_LAMBDA * SELU_ALPHA * np.exp(neg))


def selu_complex(z):
    """selu applied to real and imaginary parts independently."""
    z = np.asarray(z)
    return selu(z.real) + 1j * selu(z.imag)


def slot_grad(alpha: np.ndarray, beta) -> np.ndarray:
    """Map an adjoint pair on a complex array to per-real-slot derivatives.

    Slots follow the interleaved (Re, Im) layout of ``arr.view(float64)``.
    """
    out = np.empty(2 * alpha.size, dtype=np.complex128)
    if isinstance(beta, (int, float)) and beta == 0:
        a = alpha.ravel()
        out[0::2] = a
        out[1::2] = 1j * a
        return out
    a = alpha.ravel()
    b = np.asarray(beta).ravel()
    out[0::2] = a + b
    out[1::2] = 1j * (a - b)
    return out


def hidden_widths(n_in: int, m_hidden: int, depth: int) -> list[int]:
    """Hidden-layer widths: n_in for the first ceil(D/2) layers, n_in + M after."""
    first = (depth + 1) // 2
    return [n_in if l < first else n_in + m_hidden for l in range(depth)]


@dataclass
class ComplexMlp:
    """Per-hidden-row network: selu_complex hidden layers, exp output."""

    weights: list = field(repr=False)  # complex (out, in) per layer, output last
    biases: list = field(repr=False)   # complex (out,) per layer

    @property
    def depth(self) -> int:
        return len(self.weights) - 1

    @property
    def n_complex(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    @classmethod
    def init(cls, n_in: int, n_out: int, m_hidden: int, depth: int, rng) -> "ComplexMlp":
        widths = hidden_widths(n_in, m_hidden, depth) + [n_out]
        weights, biases = [], []
        fan = n_in
        for w_out in widths:
            g = rng.normal(size=(w_out, fan, 2))
            weights.append((g[..., 0] + 1j * g[..., 1]) / np.sqrt(2.0 * fan))
            biases.append(np.zeros(w_out, dtype=np.complex128))
            fan = w_out
        return cls(weights, biases)

    def forward(self, x: np.ndarray):
        """x: (batch, n_in) real or complex. Returns (out, cache)."""
        a = np.asarray(x, dtype=np.complex128)
        acts = [a]
        zs = []
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            z = a @ w.T + b
            zs.append(z)
            a = selu_complex(z)
            acts.append(a)
        z_out = a @ self.weights[-1].T + self.biases[-1]
        zs.append(z_out)
        out = np.exp(z_out)
        return out, {"acts": acts, "zs": zs, "out": out}

    def backward(self, cache, g_out: np.ndarray, h_out=None):
        """Adjoint pair on the output -> per-real-slot gradients (complex).

        g_out/h_out: (batch, n_out). Returns a flat complex vector over this
        network's real parameter slots (weights then bias per layer).
        """
        acts, zs, out = cache["acts"], cache["zs"], cache["out"]
        g = g_out * out
        h = None if h_out is None else h_out * np.conj(out)  # None: identically 0
        pieces_w: list = [None] * len(self.weights)
        pieces_b: list = [None] * len(self.biases)
        for l in range(len(self.weights) - 1, -1, -1):
            a_in = acts[l]
            aw = g.T @ a_in
            bw = 0 if h is None else h.T @ np.conj(a_in)
            pieces_w[l] = slot_grad(aw, bw)
            pieces_b[l] = slot_grad(g.sum(axis=0),
                                    0 if h is None else h.sum(axis=0))
            if l == 0:
                break
            g_a = g @ self.weights[l]
            h_a = None if h is None else h @ np.conj(self.weights[l])
            z = zs[l - 1]
            dp = selu_prime(z.real)
            dq = selu_prime(z.imag)
            p = 0.5 * (dp + dq)
            q = 0.5 * (dp - dq)
            if h_a is None:
                g = g_a * p
                h = g_a * q
            else:
                g = g_a * p + h_a * q
                h = g_a * q + h_a * p
        return np.concatenate([np.concatenate([pieces_w[l], pieces_b[l]])
                               for l in range(len(self.weights))])

    def param_arrays(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out


@dataclass
class RealMlp:
    """Real network: selu hidden layers of a fixed width, linear scalar output."""

    weights: list = field(repr=False)
    biases: list = field(repr=False)

    @property
    def n_real(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    @classmethod
    def init(cls, n_in: int, width: int, depth: int, rng) -> "RealMlp":
        widths = [width] * depth + [1]
        weights, biases = [], []
        fan = n_in
        for w_out in widths:
            weights.append(rng.normal(size=(w_out, fan)) / np.sqrt(fan))
            biases.append(np.zeros(w_out))
            fan = w_out
        return cls(weights, biases)

    def forward(self, x: np.ndarray):
        a = np.asarray(x, dtype=np.float64)
        acts = [a]
        zs = []
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            z = a @ w.T + b
            zs.append(z)
            a = selu(z)
            acts.append(a)
        z_out = a @ self.weights[-1].T + self.biases[-1]
        return z_out[:, 0], {"acts": acts, "zs": zs}

    def backward(self, cache, g_out: np.ndarray):
        """g_out: (batch,) complex weights on the scalar output."""
        acts, zs = cache["acts"], cache["zs"]
        g = g_out[:, None].astype(np.complex128)
        pieces: list = [None] * len(self.weights)
        for l in range(len(self.weights) - 1, -1, -1):
            a_in = acts[l]
            gw = np.einsum("bo,bi->oi", g, a_in.astype(np.complex128))
            gb = g.sum(axis=0)
            pieces[l] = np.concatenate([gw.ravel(), gb.ravel()])
            if l == 0:
                break
            g = (g @ self.weights[l]) * selu_prime(zs[l - 1])
        return np.concatenate(pieces)

    def param_arrays(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out
