"""Table-mixed hash families, the labeled random hypergraphs they induce
on key sets, and the hashing applications built on top: cuckoo hashing
with a stash, generalized cuckoo hashing with labeled insertion, uniform
hash simulation, perfect hashing, and multi-choice load balancing, plus a
seeded Monte-Carlo experiment harness."""

from .family import (
    BAD,
    CRITICAL,
    GOOD,
    DeficiencyReport,
    FamilyParams,
    TableMixFamily,
    classify_deficiency,
    draw_family,
    ell_from_delta,
    estimate_bad_rate,
)
from .graphs import (
    ComponentSummary,
    LabeledHypergraph,
    ObstructionReport,
    build,
    components,
    core_is_empty,
    detect_obstructions,
    excess,
    one_orientation,
    peel_2core,
)
from .hashfam import PRIME, PolyHash, draw_poly, eval_poly, eval_poly_many
from .prng import Prng, RandomOracle, mix64

__all__ = [
    "BAD",
    "CRITICAL",
    "GOOD",
    "ComponentSummary",
    "DeficiencyReport",
    "FamilyParams",
    "LabeledHypergraph",
    "ObstructionReport",
    "PRIME",
    "PolyHash",
    "Prng",
    "RandomOracle",
    "TableMixFamily",
    "build",
    "classify_deficiency",
    "components",
    "core_is_empty",
    "detect_obstructions",
    "draw_family",
    "draw_poly",
    "ell_from_delta",
    "estimate_bad_rate",
    "eval_poly",
    "eval_poly_many",
    "excess",
    "mix64",
    "one_orientation",
    "peel_2core",
]
