"""Sparse code multiple access: codebook design and link simulation."""

from .channel_model import (
    CHANNEL_MODES,
    SNR_CONVENTIONS,
    ChannelRealization,
    NoiseModel,
    sample_gains,
    sample_noise,
    snr_to_noise_variance,
    superpose,
)
from .codebook import (
    SCHEMES,
    Codebook,
    LayerOperator,
    ScmaSystem,
    apply_operator,
    build_codebook,
    build_lds_system,
    build_named_system,
    build_system,
    lds_phase_signatures,
)
from .constellation import (
    FOUR_POINT_ANGLE,
    GOLDEN_ANGLE,
    ConstellationMetrics,
    MotherConstellation,
    base_lattice,
    four_point_mother,
    low_projection_16point,
    measure,
    min_euclidean_distance,
    min_product_distance,
    optimize_rotation_product_distance,
    optimize_rotation_projections,
    repetition_qam_mother,
    rotate,
    rotation_2d,
    t16qam,
)
from .mpa_detector import (
    ComplexityReport,
    DetectionResult,
    collapse_projections,
    complexity_report,
    map_joint_oracle,
    mpa_detect,
    split_detect,
)
from .factor_graph import (
    FactorGraph,
    LayerSignature,
    MappingMatrix,
    build_full_graph,
    build_subgraph,
    mapping_matrix,
    overlap,
)
from .simulator import (
    ENGINES,
    SimConfig,
    SimPoint,
    SimResult,
    compare_power_variation,
    compare_shaping,
    run_point,
    run_sweep,
    wilson_halfwidth,
    write_csv,
)
from .system_io import load_system, save_system, system_from_dict, system_to_dict

__version__ = "0.1.0"

__all__ = [
    "CHANNEL_MODES",
    "SNR_CONVENTIONS",
    "SCHEMES",
    "ENGINES",
    "FOUR_POINT_ANGLE",
    "GOLDEN_ANGLE",
    "ChannelRealization",
    "NoiseModel",
    "Codebook",
    "LayerOperator",
    "ScmaSystem",
    "ConstellationMetrics",
    "MotherConstellation",
    "ComplexityReport",
    "DetectionResult",
    "FactorGraph",
    "LayerSignature",
    "MappingMatrix",
    "SimConfig",
    "SimPoint",
    "SimResult",
    "apply_operator",
    "base_lattice",
    "build_codebook",
    "build_full_graph",
    "build_lds_system",
    "build_named_system",
    "build_subgraph",
    "build_system",
    "collapse_projections",
    "compare_power_variation",
    "compare_shaping",
    "complexity_report",
    "four_point_mother",
    "lds_phase_signatures",
    "load_system",
    "low_projection_16point",
    "map_joint_oracle",
    "mapping_matrix",
    "measure",
    "min_euclidean_distance",
    "min_product_distance",
    "mpa_detect",
    "optimize_rotation_product_distance",
    "optimize_rotation_projections",
    "overlap",
    "repetition_qam_mother",
    "rotate",
    "rotation_2d",
    "run_point",
    "run_sweep",
    "sample_gains",
    "sample_noise",
    "save_system",
    "snr_to_noise_variance",
    "split_detect",
    "superpose",
    "system_from_dict",
    "system_to_dict",
    "t16qam",
    "wilson_halfwidth",
    "write_csv",
    "__version__",
]
