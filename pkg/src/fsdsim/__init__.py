"""Soft-output fixed-complexity sphere decoder (FSD) simulator."""

from .errors import (
    ConfigurationError,
    DegenerateNoiseError,
    FsdError,
    InputShapeError,
    LatticeTooLargeError,
    ParameterError,
    SingularChannelError,
)
from .fsd import (
    DEFAULT_DISTRIBUTION,
    Candidate,
    CandidateList,
    NodeDistribution,
    accumulate_ped,
    compute_b,
    direct_enumerate,
    fsd_search,
    hard_decision,
    path_ped,
)
from .llr import DEFAULT_LLR_MAX, LlrVector, list_llr
from .mimo import (
    QAM16,
    QPSK,
    ComplexChannel,
    Constellation,
    RealSystem,
    TransmitFrame,
    apply_channel,
    demap_real,
    generate_channel,
    map_bits,
    noise_var_from_snr,
    real_to_bits,
    realify,
)
from .oracle import MlSolution, exhaustive_maxlog_llr, exhaustive_ml, exhaustive_peds, lattice_points, see_lsd, see_sd
from .qrd import QrdResult, decompose, qr_decompose, sorted_qr_decompose, zf_transform

__version__ = "0.1.0"
