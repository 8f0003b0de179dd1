"""Range-image data model and the per-raypath statistics built on it."""
from .frames import (
    NO_RETURN,
    Return,
    RaypathId,
    NeighborhoodSpec,
    Calibration,
    RangeImage,
    FrameSequence,
    parse_frames,
    write_frames,
    read_frames,
    save_frames,
    to_point_cloud,
    neighborhood,
)
from .ecdf import EmpiricalCdf, CdfStats, step, temporal_cdf, spatial_cdf, eval_cdf, ks_distance, cdf_stats
from .mocomp import PatchMatch, patch_cost, best_match, compensated_temporal_cdf
from .mixture import (
    GaussianComponent,
    GaussianMixture,
    segment_by_thresholds,
    auto_segment,
    fit_gmm,
    gmm_pdf,
    gmm_cdf,
    model_fit_error,
)
from .monitor import MonitorConfig, MonitorVerdict, Reason, classify_raypath, scan_frame, evaluate_monitor
