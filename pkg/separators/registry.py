import logging
from dataclasses import dataclass

from instances.oracle import max_activity
from .clique import separate_clique
from .cmir import separate_cmir
from .config import SEPARATOR_NAMES
from .gomory import separate_gomory_fractional, separate_gomory_mir
from .impliedbounds import separate_implied_bounds
from .knapsack import separate_knapsack_cover
from .oddcycle import separate_oddcycle
from .zerohalf import separate_zerohalf

logger = logging.getLogger(__name__)

VALIDITY_TOL = 1e-6


@dataclass(frozen=True)
class Separator:
    name: str
    function: object
    # relative work units charged per call by the effort model
    cost: float


SEPARATORS = (
    Separator('gomory_fractional', separate_gomory_fractional, 1.0),
    Separator('gomory_mir', separate_gomory_mir, 1.0),
    Separator('cmir_aggregation', separate_cmir, 2.0),
    Separator('knapsack_cover', separate_knapsack_cover, 1.0),
    Separator('clique', separate_clique, 2.0),
    Separator('oddcycle', separate_oddcycle, 3.0),
    Separator('zerohalf', separate_zerohalf, 2.0),
    Separator('impliedbounds', separate_implied_bounds, 1.0),
)


def get_separator(sep_id):
    """Look a separator up by bit position or name."""
    if isinstance(sep_id, str):
        try:
            return SEPARATORS[SEPARATOR_NAMES.index(sep_id)]
        except ValueError:
            raise KeyError(f'Unknown separator {sep_id!r}.') from None
    if not 0 <= sep_id < len(SEPARATORS):
        raise KeyError(f'Separator index {sep_id} out of range.')
    return SEPARATORS[sep_id]


def separate(sep_id, context):
    """Violated, globally valid cuts of one separator at the context's LP point."""
    separator = get_separator(sep_id)
    cuts = separator.function(context)
    for cut in cuts:
        cut.origin = separator.name
    return cuts


def validate_cut(cut, instance, var_limit=16, point_limit=2_000_000):
    """True when no feasible point of `instance` violates `cut` (brute force)."""
    best = max_activity(instance, cut.dense(instance.num_vars),
                        var_limit=var_limit, point_limit=point_limit)
    valid = best <= cut.rhs + VALIDITY_TOL
    if not valid:
        logger.warning('%s cut violated by a feasible point: %.6g > %.6g',
                       cut.origin, best, cut.rhs)
    return valid
