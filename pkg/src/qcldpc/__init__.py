"""QC-LDPC code construction, graph auditing, DE thresholds and BP simulation."""

__version__ = "0.1.0"

from .construct import (
    BaseMatrix,
    MaskMatrix,
    ParityCheckMatrix,
    builtin_mask,
    label_search,
    lift,
)
from .decoder import BpDecoder, DecodeResult, DecoderConfig, channel_llr, msa_decode, spa_decode
from .density import (
    DeConfig,
    DegreeDistribution,
    LlrGrid,
    QuantizedDensity,
    awgn_initial_density,
    cn_update,
    rho_concentrated,
    run_de,
    threshold,
    vn_update,
)
from .formats import (
    read_alist,
    read_base,
    read_distribution,
    write_alist,
    write_base,
    write_distribution,
)
from .optimize import DiffEvolutionResult, diff_evolution
from .simulate import SimResult, run_monte_carlo
from .tanner import (
    AceSpectrum,
    AuditReport,
    Cycle,
    DiameterReport,
    SpectralBoundResult,
    TannerGraph,
    TrappingSetRecord,
    ace,
    ace_spectrum,
    audit,
    diameter,
    emd,
    enumerate_cycles,
    girth,
    min_distance_bruteforce,
    qc_girth,
    spectral_bound,
    ts_candidates,
)

__all__ = [name for name in dir() if not name.startswith("_")]
