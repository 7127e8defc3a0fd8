"""Gradient-based confidence bonus of neural UCB."""

import logging
import math

import numpy as np
from django.conf import settings
from scipy import linalg

from core.exceptions import ConfigurationError, UcbNumericalError

logger = logging.getLogger(__name__)

Z_MODES = ('full', 'diag', 'lastlayer')
FULL_LIMIT = 5000
HEAD_PARAMS = ('head_w1', 'head_b1', 'head_w2', 'head_b2')


def default_mode(param_count):
    return 'diag' if param_count > FULL_LIMIT else 'full'


class UcbState:
    """
    Normalizing matrix Z = lambda I + sum g g^T over the gradients of the
    arms played so far. `full` keeps Z and its inverse, `diag` the diagonal
    only, `lastlayer` the full matrix over the scalar-head parameters.
    """

    def __init__(self, net, mode=None, gamma=None, lam=None):
        self.mode = mode or default_mode(net.param_count)
        if self.mode not in Z_MODES:
            raise ConfigurationError(f'Unknown UCB mode {self.mode!r}; choose one of {Z_MODES}.')
        self.gamma = settings.L2SEP['UCB_GAMMA'] if gamma is None else gamma
        self.lam = settings.L2SEP['UCB_LAMBDA'] if lam is None else lam
        if self.lam <= 0:
            raise ConfigurationError('The UCB regularizer lambda must be > 0.')
        self.positions = net.slice_of(*HEAD_PARAMS) if self.mode == 'lastlayer' else None
        size = len(self.positions) if self.positions is not None else net.param_count
        if self.mode == 'diag':
            self.z = np.full(size, self.lam)
        else:
            self.z = self.lam * np.eye(size)
            self.z_inv = np.eye(size) / self.lam
        self.updates = 0

    def project(self, gradient):
        return gradient if self.positions is None else gradient[self.positions]

    def bonus(self, gradient):
        """sqrt(g^T Z^-1 g) for a full-length gradient."""
        g = self.project(gradient)
        if self.mode == 'diag':
            quad = float(np.sum(g * g / self.z))
        else:
            quad = float(g @ self.z_inv @ g)
        if quad < 0:
            if quad < -1e-10 * max(1.0, float(g @ g)):
                raise UcbNumericalError('Negative UCB quadratic form.', self.dump())
            quad = 0.0
        return math.sqrt(quad)

    def update(self, gradients):
        """Add the outer products of the played arms' gradients."""
        for gradient in gradients:
            g = self.project(gradient)
            if self.mode == 'diag':
                self.z += g * g
                continue
            self.z += np.outer(g, g)
            zg = self.z_inv @ g
            self.z_inv -= np.outer(zg, zg) / (1.0 + g @ zg)
            self.updates += 1
        if self.mode != 'diag':
            self.check()

    def check(self):
        if not np.allclose(self.z, self.z.T, rtol=0, atol=1e-10):
            raise UcbNumericalError('Z lost symmetry.', self.dump())
        try:
            linalg.cholesky(self.z, lower=True)
        except linalg.LinAlgError as exc:
            raise UcbNumericalError('Z is no longer positive definite.', self.dump()) from exc
        # inverse rebuilt from Z every 200 rank-one updates
        if self.updates and self.updates % 200 == 0:
            self.z_inv = linalg.cho_solve(linalg.cho_factor(self.z), np.eye(len(self.z)))

    def dump(self):
        diagonal = self.z if self.mode == 'diag' else np.diag(self.z)
        return {
            'mode': self.mode,
            'gamma': self.gamma,
            'lambda': self.lam,
            'size': len(diagonal),
            'min_diagonal': float(diagonal.min()),
            'max_diagonal': float(diagonal.max()),
        }

    def save(self, path):
        np.savez(path, mode=np.array(self.mode), z=self.z, meta=np.array([self.gamma, self.lam]))

    @classmethod
    def load(cls, path, net):
        with np.load(path) as data:
            state = cls(net, str(data['mode']), float(data['meta'][0]), float(data['meta'][1]))
            if data['z'].shape != state.z.shape:
                raise ConfigurationError(f'UCB state {path} does not fit the network.')
            state.z = data['z']
        if state.mode != 'diag':
            state.z_inv = linalg.cho_solve(linalg.cho_factor(state.z), np.eye(len(state.z)))
        return state


def ucb_score(net, state, graph):
    """f(g) + gamma * sqrt(grad^T Z^-1 grad)."""
    value, cache = net.trace(graph)
    if state.gamma == 0:
        return value
    gradient = net.flatten(net.backward(cache))
    return value + state.gamma * state.bonus(gradient)
