"""rphase: multiple-control Toffoli synthesis over Clifford+T using
relative-phase Toffoli building blocks, with conjugation rewrites and
exact verification by cyclotomic-ring simulation."""

from .circuit import (
    Circuit,
    Gate,
    ResourceReport,
    TargetSpec,
    ROLE_CLEAN,
    ROLE_DIRTY,
    ROLE_PRIMARY,
    count_resources,
)
from .ring import RingElement
from .catalog import (
    CatalogEntry,
    catalog_entries,
    cnu_clean_chain,
    cnu_parallel,
    cnu_spec,
    get_entry,
    ladder_tofn,
    ladder_tofn_spec,
    margolus_ry,
    margolus_t_variant,
    margolus_variants,
    rtof3_long,
    rtof3_ry_negctrl,
    rtof4_long,
    rts3,
    rt4s,
    srtof3_ccix,
    srts3,
    toffoli3,
    tof4_clean,
    tof4_dirty,
    tof4_dirty_spec,
    tof5_clean,
    tof5_dirty,
    tof5_dirty_spec,
    tofn_clean,
    tofn_clean_spec,
    tofn_dirty,
    tofn_dirty_spec,
    two_block_tofn,
    two_block_tofn_spec,
)
from .lowering import AncillaBudgetExceeded, LoweringPolicy, lower
from .qasm import QasmError, emit_qasm, parse_qasm
from .rewrite import (
    ArityMismatch,
    ConjugationMatch,
    REPLACEMENT_IMPLS,
    SpecialFormViolated,
    admissible,
    apply_replacement,
    cancel_adjacent_inverses,
    canonic_decompose,
    find_conjugations,
)
from .simulate import (
    DenseMatrix,
    MarkerInSimulation,
    NotAPhasePermutation,
    PhasePermutation,
    StateVector,
    unitary_columns,
)
from .verify import (
    VerificationReport,
    backends_agree,
    check_implements,
    global_phase_equal,
    is_relative_phase_of,
    is_special_form,
    permutation_parity,
    target_permutation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "1.0.0"
