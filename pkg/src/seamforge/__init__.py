"""seamforge: seam-carving forgery synthesis with pixel-exact ground-truth
seam masks, and metrics for scoring seam-localization predictions."""

from ._kernels import backend_name
from .carver import (
    CarvingSession,
    CumulativeMatrix,
    ProvenanceGrid,
    Seam,
    cumulative_matrix,
    insert_k_seams,
    insert_seam,
    merge_seam,
    optimal_seam,
    remove_k_seams,
    remove_seam,
    transpose_for_horizontal,
)
from .energy import (
    HIGH_BIAS,
    LOW_BIAS,
    ForwardCosts,
    apply_mask_bias,
    backward_energy,
    forward_costs,
    saliency_energy,
)
from .forgery import (
    ForgeryRecipe,
    ForgeryResult,
    InfeasibleForgeryError,
    build_gt_masks,
    object_displacement_forgery,
    object_removal_forgery,
    retarget_forgery,
)
from .metrics import (
    ConfusionCounts,
    MetricReport,
    SeamTrajectory,
    confusion_buffered,
    confusion_plain,
    dataset_aggregate,
    derive_metrics,
    sls_image,
    sls_seam,
)
from .raster import (
    PixelMask,
    RasterImage,
    SeamMask,
    TileRegion,
    UnsupportedImageError,
    crop,
    decode_image,
    decode_seam_mask,
    encode_image,
    encode_seam_mask,
)

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "CarvingSession",
    "CumulativeMatrix",
    "ProvenanceGrid",
    "Seam",
    "cumulative_matrix",
    "insert_k_seams",
    "insert_seam",
    "merge_seam",
    "optimal_seam",
    "remove_k_seams",
    "remove_seam",
    "transpose_for_horizontal",
    "HIGH_BIAS",
    "LOW_BIAS",
    "ForwardCosts",
    "apply_mask_bias",
    "backward_energy",
    "forward_costs",
    "saliency_energy",
    "ForgeryRecipe",
    "ForgeryResult",
    "InfeasibleForgeryError",
    "build_gt_masks",
    "object_displacement_forgery",
    "object_removal_forgery",
    "retarget_forgery",
    "ConfusionCounts",
    "MetricReport",
    "SeamTrajectory",
    "confusion_buffered",
    "confusion_plain",
    "dataset_aggregate",
    "derive_metrics",
    "sls_image",
    "sls_seam",
    "PixelMask",
    "RasterImage",
    "SeamMask",
    "TileRegion",
    "UnsupportedImageError",
    "crop",
    "decode_image",
    "decode_seam_mask",
    "encode_image",
    "encode_seam_mask",
]
