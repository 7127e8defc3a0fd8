"""
Reward network f(x, s): per-class embeddings, three message-passing passes
(V->C->V, S->V->S, S->C->S), multi-head attention over the separator nodes,
mean pooling and a two-layer scalar head.

Backpropagation is written out by hand over this fixed set of operators so
that forward and gradient share one cache and the gradient is exact.
"""

import hashlib
import json
import logging
from dataclasses import asdict, dataclass

import numpy as np

logger = logging.getLogger(__name__)

NODE_KINDS = ('v', 'c', 's')
# (name, target kind, source kind) in evaluation order
CONVOLUTIONS = (
    ('vc_c', 'c', 'v'),
    ('vc_v', 'v', 'c'),
    ('sv_v', 'v', 's'),
    ('sv_s', 's', 'v'),
    ('sc_c', 'c', 's'),
    ('sc_s', 's', 'c'),
)


@dataclass(frozen=True)
class Architecture:
    variable_dim: int = 17
    constraint_dim: int = 33
    separator_dim: int = 9
    hidden: int = 64
    heads: int = 4
    dropout: float = 0.1

    def __post_init__(self):
        if self.hidden % self.heads:
            raise ValueError(f'hidden={self.hidden} is not divisible by heads={self.heads}.')

    def input_dim(self, kind):
        return {'v': self.variable_dim, 'c': self.constraint_dim, 's': self.separator_dim}[kind]

    def digest(self):
        return hashlib.sha256(json.dumps(asdict(self), sort_keys=True).encode()).hexdigest()


def _relu(a):
    return np.maximum(a, 0.0)


def _softmax(scores):
    shifted = np.exp(scores - scores.max(axis=1, keepdims=True))
    return shifted / shifted.sum(axis=1, keepdims=True)


class RewardNet:

    def __init__(self, architecture=None, seed=0):
        self.architecture = architecture or Architecture()
        self.params = self._initial_params(np.random.default_rng(seed))
        self.stats = {
            kind: (np.zeros(self.architecture.input_dim(kind)), np.ones(self.architecture.input_dim(kind)))
            for kind in NODE_KINDS
        }
        self.stats_frozen = False

    def _initial_params(self, rng):
        arch = self.architecture
        d = arch.hidden

        def weight(fan_in, fan_out):
            return rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out))

        params = {}
        for kind in NODE_KINDS:
            params[f'emb_{kind}_w1'] = weight(arch.input_dim(kind), d)
            params[f'emb_{kind}_b1'] = np.zeros(d)
            params[f'emb_{kind}_w2'] = weight(d, d)
            params[f'emb_{kind}_b2'] = np.zeros(d)
        for name, _, _ in CONVOLUTIONS:
            params[f'conv_{name}_self'] = weight(d, d) / np.sqrt(2)
            params[f'conv_{name}_msg'] = weight(d, d) / np.sqrt(2)
            params[f'conv_{name}_b'] = np.zeros(d)
        for name in ('q', 'k', 'v', 'o'):
            params[f'att_{name}'] = rng.normal(0.0, np.sqrt(1.0 / d), size=(d, d))
        params['head_w1'] = weight(3 * d, d)
        params['head_b1'] = np.zeros(d)
        params['head_w2'] = rng.normal(0.0, np.sqrt(1.0 / d), size=d)
        params['head_b2'] = np.zeros(())
        return params

    # ── parameter vector ────────────────────────────────────────────────────

    @property
    def param_count(self):
        return sum(p.size for p in self.params.values())

    def flat(self):
        return np.concatenate([p.ravel() for p in self.params.values()])

    def set_flat(self, vector):
        offset = 0
        for name, p in self.params.items():
            self.params[name] = np.asarray(vector[offset:offset + p.size], dtype=float).reshape(p.shape)
            offset += p.size

    def flatten(self, grads):
        return np.concatenate([grads[name].ravel() for name in self.params])

    def slice_of(self, *names):
        """Positions of the named parameters in the flat vector."""
        positions = []
        offset = 0
        for name, p in self.params.items():
            if name in names:
                positions.extend(range(offset, offset + p.size))
            offset += p.size
        return np.array(positions, dtype=int)

    def copy(self):
        clone = RewardNet.__new__(RewardNet)
        clone.architecture = self.architecture
        clone.params = {name: p.copy() for name, p in self.params.items()}
        clone.stats = {kind: (mu.copy(), sigma.copy()) for kind, (mu, sigma) in self.stats.items()}
        clone.stats_frozen = self.stats_frozen
        return clone

    def zero(self):
        for name, p in self.params.items():
            self.params[name] = np.zeros_like(p)

    def check_graph(self, graph):
        expected = tuple(self.architecture.input_dim(kind) for kind in NODE_KINDS)
        if graph.dims != expected:
            raise ValueError(f'Graph feature dims {graph.dims} do not match the network {expected}.')

    # ── input statistics ────────────────────────────────────────────────────

    def fit_stats(self, graphs):
        """Freeze per-feature input statistics from a list of graphs."""
        blocks = {'v': [], 'c': [], 's': []}
        for graph in graphs:
            blocks['v'].append(graph.variables)
            blocks['c'].append(graph.constraints)
            blocks['s'].append(graph.separators)
        for kind, arrays in blocks.items():
            stacked = np.vstack(arrays)
            sigma = stacked.std(axis=0)
            self.stats[kind] = (stacked.mean(axis=0), np.where(sigma > 1e-8, sigma, 1.0))
        self.stats_frozen = True

    # ── forward / backward ──────────────────────────────────────────────────

    def _embed(self, kind, features, cache):
        p = self.params
        mu, sigma = self.stats[kind]
        xn = (features - mu) / sigma
        a1 = xn @ p[f'emb_{kind}_w1'] + p[f'emb_{kind}_b1']
        h1 = _relu(a1)
        a2 = h1 @ p[f'emb_{kind}_w2'] + p[f'emb_{kind}_b2']
        cache[f'emb_{kind}'] = (xn, a1, h1, a2)
        return _relu(a2)

    def _embed_back(self, kind, dh, cache, grads):
        p = self.params
        xn, a1, h1, a2 = cache[f'emb_{kind}']
        da2 = dh * (a2 > 0)
        grads[f'emb_{kind}_w2'] += h1.T @ da2
        grads[f'emb_{kind}_b2'] += da2.sum(axis=0)
        da1 = (da2 @ p[f'emb_{kind}_w2'].T) * (a1 > 0)
        grads[f'emb_{kind}_w1'] += xn.T @ da1
        grads[f'emb_{kind}_b1'] += da1.sum(axis=0)

    def _convolve(self, name, target, source, adjacency, cache):
        p = self.params
        m = adjacency @ source if adjacency is not None else np.tile(source.mean(axis=0), (len(target), 1))
        a = target @ p[f'conv_{name}_self'] + m @ p[f'conv_{name}_msg'] + p[f'conv_{name}_b']
        cache[f'conv_{name}'] = (target, m, a, adjacency, len(source))
        return _relu(a)

    def _convolve_back(self, name, dout, cache, grads):
        p = self.params
        target, m, a, adjacency, source_rows = cache[f'conv_{name}']
        da = dout * (a > 0)
        grads[f'conv_{name}_self'] += target.T @ da
        grads[f'conv_{name}_msg'] += m.T @ da
        grads[f'conv_{name}_b'] += da.sum(axis=0)
        dtarget = da @ p[f'conv_{name}_self'].T
        dm = da @ p[f'conv_{name}_msg'].T
        if adjacency is None:
            dsource = np.tile(dm.sum(axis=0) / source_rows, (source_rows, 1))
        else:
            dsource = np.asarray(adjacency.T @ dm)
        return dtarget, dsource

    def _attend(self, s, train, rng, cache):
        p = self.params
        arch = self.architecture
        width = arch.hidden // arch.heads
        q, k, v = s @ p['att_q'], s @ p['att_k'], s @ p['att_v']
        outputs, head_cache = [], []
        for h in range(arch.heads):
            cols = slice(h * width, (h + 1) * width)
            weights = _softmax(q[:, cols] @ k[:, cols].T / np.sqrt(width))
            if train and arch.dropout > 0:
                mask = (rng.random(weights.shape) >= arch.dropout) / (1.0 - arch.dropout)
            else:
                mask = np.ones_like(weights)
            dropped = weights * mask
            outputs.append(dropped @ v[:, cols])
            head_cache.append((weights, mask, dropped))
        o = np.hstack(outputs)
        cache['att'] = (s, q, k, v, o, head_cache)
        return s + o @ p['att_o']

    def _attend_back(self, dout, cache, grads):
        p = self.params
        arch = self.architecture
        width = arch.hidden // arch.heads
        s, q, k, v, o, head_cache = cache['att']
        grads['att_o'] += o.T @ dout
        do = dout @ p['att_o'].T
        dq, dk, dv = np.zeros_like(q), np.zeros_like(k), np.zeros_like(v)
        for h, (weights, mask, dropped) in enumerate(head_cache):
            cols = slice(h * width, (h + 1) * width)
            doh = do[:, cols]
            dv[:, cols] = dropped.T @ doh
            dweights = (doh @ v[:, cols].T) * mask
            dscores = weights * (dweights - (dweights * weights).sum(axis=1, keepdims=True))
            dscores /= np.sqrt(width)
            dq[:, cols] = dscores @ k[:, cols]
            dk[:, cols] = dscores.T @ q[:, cols]
        grads['att_q'] += s.T @ dq
        grads['att_k'] += s.T @ dk
        grads['att_v'] += s.T @ dv
        return dout + dq @ p['att_q'].T + dk @ p['att_k'].T + dv @ p['att_v'].T

    def _forward(self, graph, train=False, rng=None):
        self.check_graph(graph)
        p = self.params
        cache = {}
        h = {
            'v': self._embed('v', graph.variables, cache),
            'c': self._embed('c', graph.constraints, cache),
            's': self._embed('s', graph.separators, cache),
        }
        adjacency = {('c', 'v'): graph.cv_adjacency(), ('v', 'c'): graph.vc_adjacency()}
        for name, target, source in CONVOLUTIONS:
            h[target] = self._convolve(name, h[target], h[source],
                                       adjacency.get((target, source)), cache)
        h['s'] = self._attend(h['s'], train, rng, cache)
        z = np.concatenate([h['v'].mean(axis=0), h['c'].mean(axis=0), h['s'].mean(axis=0)])
        a = z @ p['head_w1'] + p['head_b1']
        u = _relu(a)
        cache['head'] = (z, a, u, {kind: len(h[kind]) for kind in NODE_KINDS})
        return float(u @ p['head_w2'] + p['head_b2']), cache

    def _backward(self, cache, dy=1.0):
        p = self.params
        grads = {name: np.zeros_like(value) for name, value in self.params.items()}
        d = self.architecture.hidden
        z, a, u, rows = cache['head']
        grads['head_w2'] += u * dy
        grads['head_b2'] += dy
        da = p['head_w2'] * dy * (a > 0)
        grads['head_w1'] += np.outer(z, da)
        grads['head_b1'] += da
        dz = p['head_w1'] @ da
        dh = {
            kind: np.tile(dz[i * d:(i + 1) * d] / rows[kind], (rows[kind], 1))
            for i, kind in enumerate(NODE_KINDS)
        }
        dh['s'] = self._attend_back(dh['s'], cache, grads)
        for name, target, source in reversed(CONVOLUTIONS):
            dtarget, dsource = self._convolve_back(name, dh[target], cache, grads)
            dh[target] = dtarget
            dh[source] = dh[source] + dsource
        for kind in NODE_KINDS:
            self._embed_back(kind, dh[kind], cache, grads)
        return grads

    def forward(self, graph, train=False, seed=None, rng=None):
        """Scalar reward estimate; dropout is only active when `train` is set."""
        if train and rng is None:
            rng = np.random.default_rng(seed)
        value, _ = self._forward(graph, train, rng)
        return value

    def gradient(self, graph):
        """Exact gradient of the evaluation-mode forward pass, as a flat vector."""
        _, cache = self._forward(graph)
        return self.flatten(self._backward(cache))

    def trace(self, graph, train=False, rng=None):
        """Forward pass that keeps its cache for `backward`."""
        return self._forward(graph, train, rng)

    def backward(self, cache, dy=1.0):
        """Named parameter gradients of dy * output for a cached forward pass."""
        return self._backward(cache, dy)

    def __call__(self, graph):
        return self.forward(graph)
