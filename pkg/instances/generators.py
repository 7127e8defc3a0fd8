"""
Synthetic instance generators for the five benchmark classes.

Tang-style classes (packing, binary packing, maximum cut) and Ecole-style
classes (combinatorial auction, independent set). Every generator is a pure
function of its size parameters and seed; all randomness flows through one
`numpy.random.default_rng(seed)` stream. The distributions a generator draws
from are recorded in the instance metadata.
"""

import logging

import numpy as np

from core.exceptions import ConfigurationError, InstanceValidationError
from .graphs import Graph
from .problem import LE, ClassTag, build_instance

logger = logging.getLogger(__name__)


def _check_sizes(**sizes):
    for label, value in sizes.items():
        if int(value) < 1:
            raise ConfigurationError(f'{label} must be >= 1, got {value}.')


def _post_check(instance):
    """Generated instances must have a finite box and the all-zero point feasible."""
    if not instance.is_bounded_box:
        raise InstanceValidationError(
            f'{instance.name}: generator produced an unbounded variable.',
            errors={'upper': ['infinite bound']},
        )
    if not instance.integer.any():
        raise InstanceValidationError(
            f'{instance.name}: generated instance has no integer variable.',
            errors={'integer': ['empty']},
        )
    if not instance.is_feasible(np.zeros(instance.num_vars)):
        raise InstanceValidationError(
            f'{instance.name}: constructive feasible point rejected.',
            errors={'rhs': ['zero point infeasible']},
        )
    return instance


def _packing_rows(weights):
    return [{j: int(a) for j, a in enumerate(row) if a} for row in weights]


# ─── Tang-style classes ──────────────────────────────────────────────────────

def generate_packing(n, m, seed):
    """
    General-integer packing: max c x  s.t.  A x <= b, x >= 0 integer.

    A ~ U{0..5}, b ~ U{9n..10n}, c ~ U{1..10}. Each variable is boxed by the
    tightest row it appears in, ub_j = min_i floor(b_i / A_ij).
    """
    _check_sizes(n=n, m=m)
    rng = np.random.default_rng(seed)
    weights = rng.integers(0, 6, size=(m, n))
    rhs = rng.integers(9 * n, 10 * n + 1, size=m)
    values = rng.integers(1, 11, size=n)

    upper = []
    for j in range(n):
        column = weights[:, j]
        caps = [rhs[i] // column[i] for i in range(m) if column[i] > 0]
        upper.append(float(min(caps)) if caps else float(rhs.max()))

    return _post_check(build_instance(
        name=f'packing-{seed}',
        objective=-values.astype(float),
        rows=_packing_rows(weights),
        senses=[LE] * m,
        rhs=rhs.astype(float),
        lower=[0.0] * n,
        upper=upper,
        integer=[True] * n,
        class_tag=ClassTag.PACKING,
        metadata={
            'generator': 'packing', 'seed': int(seed), 'params': {'n': n, 'm': m},
            'distributions': {'A': 'U{0..5}', 'b': 'U{9n..10n}', 'c': 'U{1..10}'},
        },
    ))


def generate_bin_packing(n, m, seed):
    """Binary packing: A ~ U{5..30}, b ~ U{10n..20n}, c ~ U{1..10}, x binary."""
    _check_sizes(n=n, m=m)
    rng = np.random.default_rng(seed)
    weights = rng.integers(5, 31, size=(m, n))
    rhs = rng.integers(10 * n, 20 * n + 1, size=m)
    values = rng.integers(1, 11, size=n)

    return _post_check(build_instance(
        name=f'bin_packing-{seed}',
        objective=-values.astype(float),
        rows=_packing_rows(weights),
        senses=[LE] * m,
        rhs=rhs.astype(float),
        lower=[0.0] * n,
        upper=[1.0] * n,
        integer=[True] * n,
        class_tag=ClassTag.BIN_PACKING,
        metadata={
            'generator': 'bin_packing', 'seed': int(seed), 'params': {'n': n, 'm': m},
            'distributions': {'A': 'U{5..30}', 'b': 'U{10n..20n}', 'c': 'U{1..10}'},
        },
    ))


def build_max_cut(graph, weights=None, name='max_cut', metadata=None):
    """
    Edge-variable max-cut formulation on `graph`.

    Variables are y_v (side of vertex v) followed by z_e (edge e is cut), all
    binary, giving V + E columns. Each edge (u, v) contributes two rows,
    z_e <= y_u + y_v and z_e <= 2 - y_u - y_v, giving 2E rows.
    """
    n_v, n_e = graph.n_nodes, len(graph.edges)
    weights = np.ones(n_e) if weights is None else np.asarray(weights, dtype=float)
    rows, rhs = [], []
    for e, (u, v) in enumerate(graph.edges):
        z = n_v + e
        rows.append({z: 1, u: -1, v: -1})
        rhs.append(0.0)
        rows.append({z: 1, u: 1, v: 1})
        rhs.append(2.0)
    objective = np.concatenate([np.zeros(n_v), -weights])
    return _post_check(build_instance(
        name=name,
        objective=objective,
        rows=rows,
        senses=[LE] * len(rows),
        rhs=rhs,
        lower=[0.0] * (n_v + n_e),
        upper=[1.0] * (n_v + n_e),
        integer=[True] * (n_v + n_e),
        class_tag=ClassTag.MAX_CUT,
        metadata=metadata or {'generator': 'max_cut', 'params': {
            'n_vertices': n_v, 'n_edges': n_e}},
    ))


def generate_max_cut(n_vertices, n_edges, seed):
    """Max cut on a uniform G(n, M) graph with edge weights U{1..10}."""
    _check_sizes(n_vertices=n_vertices, n_edges=n_edges)
    rng = np.random.default_rng(seed)
    graph = Graph.fixed_edge_count(n_vertices, n_edges, rng)
    weights = rng.integers(1, 11, size=len(graph.edges)).astype(float)
    return build_max_cut(
        graph, weights, name=f'max_cut-{seed}',
        metadata={
            'generator': 'max_cut', 'seed': int(seed),
            'params': {'n_vertices': n_vertices, 'n_edges': n_edges},
            'distributions': {'graph': 'G(n, M)', 'w': 'U{1..10}'},
        },
    )


# ─── Ecole-style classes ─────────────────────────────────────────────────────

COMB_AUCTION_RANGES = {
    'value_deviation': (0.25, 0.75),
    'add_item_prob': (0.5, 0.75),
    'max_n_sub_bids': (3, 7),
    'additivity': (-0.1, 0.4),
    'budget_factor': (1.25, 1.75),
    'resale_factor': (0.35, 0.65),
}


def _draw_auction_params(rng):
    params = {}
    for key, (low, high) in COMB_AUCTION_RANGES.items():
        if isinstance(low, int):
            params[key] = int(rng.integers(low, high + 1))
        else:
            params[key] = float(rng.uniform(low, high))
    return params


def _choose_next(chosen, compats, interests, rng):
    prob = (~chosen) * compats[chosen, :].mean(axis=0) * interests
    return int(rng.choice(len(interests), p=prob / prob.sum()))


def generate_comb_auction(n_items, n_bids, seed, min_value=1, max_value=100):
    """
    CATS "arbitrary" winner determination: one binary per bid, one set-packing
    row per item (plus a dummy item per bidder with several substitutable bids).

    The bidding process draws bundles from item compatibilities and private
    valuations; substitutable bids share at least one item with the bidder's
    initial bundle and respect the budget and resale filters.
    """
    _check_sizes(n_items=n_items, n_bids=n_bids)
    if n_items < 2:
        raise ConfigurationError('A combinatorial auction needs at least 2 items.')
    rng = np.random.default_rng(seed)
    params = _draw_auction_params(rng)

    values = min_value + (max_value - min_value) * rng.random(n_items)
    compats = np.triu(rng.random((n_items, n_items)), k=1)
    compats = compats + compats.T
    compats = compats / compats.sum(axis=1, keepdims=True)

    bids = []
    n_dummy = 0
    while len(bids) < n_bids:
        interests = rng.random(n_items)
        private_values = values + max_value * params['value_deviation'] * (2 * interests - 1)

        chosen = np.zeros(n_items, dtype=bool)
        chosen[rng.choice(n_items, p=interests / interests.sum())] = True
        while rng.random() < params['add_item_prob']:
            if chosen.all():
                break
            chosen[_choose_next(chosen, compats, interests, rng)] = True
        bundle = np.flatnonzero(chosen)

        price = private_values[bundle].sum() + len(bundle) ** (1 + params['additivity'])
        if price < 0:
            continue
        bidder_bids = {frozenset(bundle.tolist()): float(price)}

        candidates = []
        for item in bundle:
            sub = np.zeros(n_items, dtype=bool)
            sub[item] = True
            while sub.sum() < len(bundle):
                sub[_choose_next(sub, compats, interests, rng)] = True
            sub_bundle = np.flatnonzero(sub)
            sub_price = private_values[sub_bundle].sum() + len(sub_bundle) ** (1 + params['additivity'])
            candidates.append((sub_bundle, float(sub_price)))

        budget = params['budget_factor'] * price
        min_resale = params['resale_factor'] * values[bundle].sum()
        for sub_bundle, sub_price in sorted(candidates, key=lambda c: -c[1]):
            if (len(bidder_bids) >= params['max_n_sub_bids'] + 1
                    or len(bids) + len(bidder_bids) >= n_bids):
                break
            if sub_price < 0 or sub_price > budget:
                continue
            if values[sub_bundle].sum() < min_resale:
                continue
            key = frozenset(sub_bundle.tolist())
            if key in bidder_bids:
                continue
            bidder_bids[key] = sub_price

        dummy = []
        if len(bidder_bids) > 2:
            dummy = [n_items + n_dummy]
            n_dummy += 1
        for bundle_items, bid_price in bidder_bids.items():
            bids.append((sorted(bundle_items) + dummy, bid_price))

    bids_per_item = [[] for _ in range(n_items + n_dummy)]
    for b, (bundle_items, _) in enumerate(bids):
        for item in bundle_items:
            bids_per_item[item].append(b)
    rows = [{b: 1 for b in item_bids} for item_bids in bids_per_item if item_bids]

    n = len(bids)
    return _post_check(build_instance(
        name=f'comb_auction-{seed}',
        objective=[-price for _, price in bids],
        rows=rows,
        senses=[LE] * len(rows),
        rhs=[1.0] * len(rows),
        lower=[0.0] * n,
        upper=[1.0] * n,
        integer=[True] * n,
        class_tag=ClassTag.COMB_AUCTION,
        metadata={
            'generator': 'comb_auction', 'seed': int(seed),
            'params': {'n_items': n_items, 'n_bids': n_bids, 'n_dummy_items': n_dummy},
            'sampled': params,
        },
    ))


def build_indep_set(graph, name='indep_set', metadata=None):
    """Maximum independent set with one x_u + x_v <= 1 row per edge."""
    n = graph.n_nodes
    rows = [{u: 1, v: 1} for u, v in graph.edges]
    return _post_check(build_instance(
        name=name,
        objective=[-1.0] * n,
        rows=rows,
        senses=[LE] * len(rows),
        rhs=[1.0] * len(rows),
        lower=[0.0] * n,
        upper=[1.0] * n,
        integer=[True] * n,
        class_tag=ClassTag.INDEP_SET,
        metadata=metadata or {'generator': 'indep_set', 'params': {'n_nodes': n}},
    ))


def generate_indep_set(n_nodes, seed, reference_nodes=500):
    """
    Independent set on a Barabasi-Albert or Erdos-Renyi graph.

    graph_type ~ U{barabasi_albert, erdos_renyi}, edge_probability ~ U[0.005, 0.01],
    affinity ~ U{2..6}. Below `reference_nodes` the edge probability is scaled
    by reference_nodes / n_nodes so the expected degree is preserved.
    """
    _check_sizes(n_nodes=n_nodes)
    rng = np.random.default_rng(seed)
    graph_type = ('barabasi_albert', 'erdos_renyi')[int(rng.integers(0, 2))]
    edge_probability = float(rng.uniform(0.005, 0.01))
    affinity = int(rng.integers(2, 7))
    scale = max(1.0, reference_nodes / n_nodes)
    effective_probability = min(1.0, edge_probability * scale)

    if graph_type == 'erdos_renyi':
        graph = Graph.erdos_renyi(n_nodes, effective_probability, rng)
    else:
        graph = Graph.barabasi_albert(n_nodes, affinity, rng)

    return build_indep_set(graph, name=f'indep_set-{seed}', metadata={
        'generator': 'indep_set', 'seed': int(seed),
        'params': {'n_nodes': n_nodes, 'n_edges': len(graph.edges)},
        'sampled': {
            'graph_type': graph_type,
            'edge_probability': edge_probability,
            'effective_edge_probability': effective_probability,
            'affinity': affinity,
        },
    })


# ─── registry ────────────────────────────────────────────────────────────────

GENERATORS = {
    ClassTag.PACKING: generate_packing,
    ClassTag.BIN_PACKING: generate_bin_packing,
    ClassTag.MAX_CUT: generate_max_cut,
    ClassTag.COMB_AUCTION: generate_comb_auction,
    ClassTag.INDEP_SET: generate_indep_set,
}

DESK_SIZES = {
    ClassTag.PACKING: {'n': 16, 'm': 12},
    ClassTag.BIN_PACKING: {'n': 14, 'm': 20},
    ClassTag.MAX_CUT: {'n_vertices': 10, 'n_edges': 18},
    ClassTag.COMB_AUCTION: {'n_items': 14, 'n_bids': 30},
    ClassTag.INDEP_SET: {'n_nodes': 30},
}

FULL_SIZES = {
    ClassTag.PACKING: {'n': 60, 'm': 60},
    ClassTag.BIN_PACKING: {'n': 66, 'm': 132},
    ClassTag.MAX_CUT: {'n_vertices': 54, 'n_edges': 134},
    ClassTag.COMB_AUCTION: {'n_items': 100, 'n_bids': 500},
    ClassTag.INDEP_SET: {'n_nodes': 500},
}

# Classes whose second update round is n_2 = 5 (the rest use 8).
TANG_CLASSES = (ClassTag.PACKING, ClassTag.BIN_PACKING, ClassTag.MAX_CUT)


def generate(class_tag, seed, full_size=False, **overrides):
    """Generate one instance of `class_tag` at desk (default) or full size."""
    if class_tag not in GENERATORS:
        raise ConfigurationError(
            f'Unknown instance class {class_tag!r}; choose one of {sorted(GENERATORS)}.'
        )
    sizes = dict((FULL_SIZES if full_size else DESK_SIZES)[class_tag])
    sizes.update(overrides)
    instance = GENERATORS[class_tag](seed=seed, **sizes)
    logger.debug('Generated %s', instance)
    return instance


def instance_seeds(base_seed, split_id, count):
    """Per-instance seeds; distinct splits draw from disjoint SeedSequence branches."""
    return [
        int(np.random.SeedSequence([int(base_seed), int(split_id), i]).generate_state(1)[0])
        for i in range(count)
    ]


def generate_dataset(class_tag, count, base_seed, split_id=0, full_size=False):
    return [
        generate(class_tag, seed, full_size=full_size)
        for seed in instance_seeds(base_seed, split_id, count)
    ]
