"""Planar registration experiments measuring the bias caused by two-return raypaths."""
from .transform import Transform2D, best_fit_transform
from .registration import IcpParams, NdtParams, RegistrationResult, run_icp, run_ndt_lite, translation_error
from .experiment import (
    RegistrationConfig,
    Experiment,
    BiasRow,
    scene_points,
    designated_rays,
    make_experiment,
    run_trial,
    bias_report,
    report_to_csv,
)
