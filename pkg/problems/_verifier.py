import numpy as np
import structlog

from hamiltonian import sampled_energy_estimate
from qstate import PureState, swap_test_prob
from qstate.errors import LayoutError

from ._instances import LEAPSInstance
from ._optimize import product_vector

log = structlog.get_logger(__name__)


def leaps_qma_verifier(
    inst: LEAPSInstance,
    psi: PureState,
    phi_left: PureState,
    phi_right: PureState,
    samples: int = 0,
    rng_seed: int | np.random.Generator | None = None,
) -> float:
    """
    Acceptance probability of the two-proof LEAPS verifier.

    With probability ½ the verifier checks the energy of ψ against (α+β)/2,
    otherwise it runs the SWAP test between ψ and φ_L⊗φ_R. The unentangled
    proofs are given as explicit vectors.

    Parameters:
    - inst (LEAPSInstance): the instance.
    - psi (PureState): the claimed low-energy state on the instance layout.
    - phi_left, phi_right (PureState): the claimed product factors on the cut and the rest.
    - samples (int): energy measurements, 0 for the exact energy.
    - rng_seed: seed for the energy sampling.

    Returns:
    - float: ½·[Ẽ < (α+β)/2] + ½·(½ + ½|⟨ψ|φ_L⊗φ_R⟩|²)
    """
    layout = inst.hamiltonian.layout
    if psi.layout != layout:
        raise LayoutError(f"ψ on {psi.layout}, instance on {layout}")
    left = layout.subset(inst.cut)
    if phi_left.dim != left.dim or phi_right.dim != layout.dim // left.dim:
        raise LayoutError(f"Product factors of dimensions {phi_left.dim}, {phi_right.dim} do not fit the cut {inst.cut}")

    product = PureState(
        layout,
        product_vector(phi_left.amplitudes, phi_right.amplitudes, layout, inst.cut),
        validate=False,
    )
    estimate = sampled_energy_estimate(inst.hamiltonian, psi, samples, rng_seed)
    energy_check = 1.0 if estimate < (inst.alpha + inst.beta) / 2 else 0.0
    swap = swap_test_prob(psi, product)
    accept = 0.5 * energy_check + 0.5 * swap
    log.debug("leaps verifier", energy=estimate, swap=swap, accept=accept)
    return float(accept)
