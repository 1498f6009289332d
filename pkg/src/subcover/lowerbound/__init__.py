"""Hard-instance generators and checkers.

Median instances are random set systems whose structural properties pin
their minimum cover size from below while admitting a small number of
swap edits that collapse it; modified instances are the edited versions.
Compounds concatenate many such parts block-diagonally.  Slab instances
are the structured universe-coverage inputs whose verification cost the
naive scan meets exactly.  The distinguisher experiments measure, by
Monte Carlo, how hard these distributions are to tell apart under a
query budget.
"""

from .median import (
    ExhaustedAttempts,
    MedianDraw,
    MedianParams,
    MedianReport,
    PropertyCheck,
    check_median,
    gen_median_instance,
    gen_random_instance,
)
from .modified import (
    ConstructionStuck,
    ModifiedInstance,
    candidate_sets,
    estimate_p_elt_set,
    gen_modified_instance,
    gen_modified_instance_general,
)
from .compound import CompoundInstance, CompoundPart, gen_compound
from .slab import SlabInstance, gen_slab_instance, slab_swap_ids
from .distinguish import (
    DistinguishResult,
    MedianVsModified,
    SlabYesNo,
    distinguisher_experiment,
)

__all__ = [
    "CompoundInstance",
    "CompoundPart",
    "ConstructionStuck",
    "DistinguishResult",
    "ExhaustedAttempts",
    "MedianDraw",
    "MedianParams",
    "MedianReport",
    "MedianVsModified",
    "ModifiedInstance",
    "PropertyCheck",
    "SlabInstance",
    "SlabYesNo",
    "candidate_sets",
    "check_median",
    "distinguisher_experiment",
    "estimate_p_elt_set",
    "gen_compound",
    "gen_median_instance",
    "gen_modified_instance",
    "gen_modified_instance_general",
    "gen_random_instance",
    "gen_slab_instance",
    "slab_swap_ids",
]
