from ._instances import (
    CIMMInstance,
    Decision,
    FEAInstance,
    HELESInstance,
    LEAPSInstance,
    LELESInstance,
    MaxOutQEAInstance,
    OptimizerReport,
    PPIOInstance,
    SeparableInstance,
    Verdict,
)
from ._optimize import (
    DEFAULT_RESTARTS,
    LowEnergyOptimum,
    Objective,
    SchmidtWeights,
    minimize_product_energy,
    multistart_minimize,
    objective_value,
    optimize_isometry_output,
    optimize_low_energy,
    optimize_span,
    product_distance,
    product_vector,
)
from ._deciders import (
    check_cimm,
    decide_cimm,
    decide_fea_exact,
    decide_heles,
    decide_leaps,
    decide_leles,
    decide_maxoutqea,
    decide_ppio,
    decide_separable,
    ppio_isometry,
    ppio_output,
    verify_witness,
)
from ._reductions import (
    KAPPA_3,
    MIN_PROMISE_GAP,
    Reduction,
    entropy_floor,
    leaps_constants,
    leaps_containment_map,
    reduce_maxoutqea_to_heles,
    reduce_ppio_to_leaps,
    reduce_ppio_to_leles,
    reduce_sepham_to_leaps,
    smallest_idle_steps,
)
from ._verifier import leaps_qma_verifier
from ._suites import SUITE_A, SUITE_B, SuiteCase, maxoutqea_suite, ppio_suite
from ._io import (
    InstanceDocument,
    instance_from_document,
    instance_to_document,
    load_instance,
    verdict_to_document,
)
