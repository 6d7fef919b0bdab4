"""Fast mode Fourier transform on fermionic Fock states and the bands of the Bethe chain."""

from .bethe import (
    BandDiagram,
    ChainParams,
    MomentumSector,
    assemble_band_diagram,
    build_sector_matrix,
    diagonalize_sector,
    full_ed_oracle,
    hopping_energy,
    interaction_energy,
    momentum_state,
    sector_partition,
    slater_oracle,
)
from .fock import (
    OccupationState,
    SectorBasis,
    StateVector,
    apply_givens_gate,
    apply_mode_permutation,
    apply_phase_gate,
    enumerate_basis,
    inner_product,
    jw_string_sign,
    translation_apply,
)
from .transforms import (
    GateSequence,
    Givens,
    Permute,
    Phase,
    apply_sequence,
    dft_matrix,
    fmft_sequence,
    gate_count,
    invert_sequence,
    mft_fold_compile,
    single_body_action,
)

__version__ = "0.1.0"
