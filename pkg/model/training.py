import logging

import numpy as np

from core.exceptions import EmptyBufferError

logger = logging.getLogger(__name__)

LEARNING_RATE = 1e-3
BATCH_SIZE = 64


class Adam:
    """Adaptive-moment updates over a RewardNet's named parameters."""

    def __init__(self, net, lr=LEARNING_RATE, beta1=0.9, beta2=0.999, eps=1e-8):
        self.net = net
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.steps = 0
        self.first = {name: np.zeros_like(p) for name, p in net.params.items()}
        self.second = {name: np.zeros_like(p) for name, p in net.params.items()}

    def step(self, grads):
        self.steps += 1
        correction1 = 1 - self.beta1 ** self.steps
        correction2 = 1 - self.beta2 ** self.steps
        for name, grad in grads.items():
            self.first[name] = self.beta1 * self.first[name] + (1 - self.beta1) * grad
            self.second[name] = self.beta2 * self.second[name] + (1 - self.beta2) * grad ** 2
            update = (self.first[name] / correction1) / (np.sqrt(self.second[name] / correction2) + self.eps)
            self.net.params[name] = self.net.params[name] - self.lr * update


def squared_loss(prediction, reward):
    return (prediction - reward) ** 2


def buffer_loss(net, samples):
    """Mean squared error of the evaluation-mode network over (graph, reward) pairs."""
    if not samples:
        raise EmptyBufferError('Cannot evaluate the loss of an empty buffer.')
    return float(np.mean([squared_loss(net.forward(graph), reward) for graph, reward in samples]))


def fit(net, samples, epochs, lr=LEARNING_RATE, batch=BATCH_SIZE, seed=0, optimizer=None):
    """
    Minibatch regression of the network onto clipped rewards. Input statistics
    are taken from the buffer on the first fit and stay frozen afterwards.
    Returns the mean training loss of each epoch.
    """
    samples = list(samples)
    if not samples:
        raise EmptyBufferError('Training buffer is empty.')
    if not net.stats_frozen:
        net.fit_stats([graph for graph, _ in samples])
    optimizer = optimizer or Adam(net, lr)
    rng = np.random.default_rng(seed)
    history = []
    for epoch in range(epochs):
        order = rng.permutation(len(samples))
        losses = []
        for start in range(0, len(order), batch):
            chunk = order[start:start + batch]
            total = {name: np.zeros_like(p) for name, p in net.params.items()}
            for index in chunk:
                graph, reward = samples[index]
                prediction, cache = net.trace(graph, train=True, rng=rng)
                residual = prediction - reward
                losses.append(residual ** 2)
                grads = net.backward(cache, 2 * residual / len(chunk))
                for name, grad in grads.items():
                    total[name] += grad
            optimizer.step(total)
        history.append(float(np.mean(losses)))
        logger.debug('epoch %d loss %.6g', epoch, history[-1])
    return history
