"""nlocc-lab: local-purity distillation as compression with restricted means.

Dense operator algebra, NLOCC channels and their Hilbert-Schmidt duals,
typical-subspace compression rates, and the separable relative-entropy
upper bound on local-purity distillation.
"""

from .errors import NumericalError, ValidationError
from .operators import (
    DenseOperator,
    DensityMatrix,
    Subsystem,
    SubsystemLayout,
    computational_basis,
    dephase,
    eig_hermitian,
    hs_inner,
    partial_trace,
    partial_transpose,
    qubit_pair_layout,
    relative_entropy,
    tensor,
    tensor_power,
    von_neumann_entropy,
)
from .channels import (
    KrausChannel,
    Protocol,
    ProtocolStep,
    make_add_max_mixed,
    make_dephase_local,
    make_discard,
    make_local_unitary,
    make_send_dephased,
    preserves_max_mixed,
)
from .duality import (
    DualMap,
    adjoint,
    dual_image_operator,
    normalized_dual,
    pure_target_projector,
    verify_adjoint,
)
from .compression import (
    CompressionResult,
    SpectrumPower,
    min_trace_operator,
    mismatched_detail,
    mismatched_rate,
    purity_rate,
    typical_projector_dim,
)
from .separable import (
    RateReport,
    ReeResult,
    SeparableEnsemble,
    best_product_state,
    bipartite_split,
    ppt_check,
    ree,
    ubound_rate,
)
from .io import (
    load_operator,
    load_protocol,
    load_state,
    save_operator,
    save_protocol,
)
from .protocol_eval import (
    FidelityReport,
    audit_protocol,
    fidelity_dual,
    fidelity_primal,
    rate_from_pi,
)

__version__ = "0.1.0"
