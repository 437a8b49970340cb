"""Streaming Hankel-DMD: denoise a sliding window of sensor samples and forecast ahead.

Each new sample refreshes a fixed-length buffer. The buffer is checked for its
effective rank with an optimal hard threshold on a Page matrix, cleaned with
Cadzow iterations on a Hankel matrix, and a linear operator fitted to the
cleaned matrix rolls the latest state forward.
"""
from .cadzow import CadzowConfig, cadzow_denoise, truncate_rank
from .embedding import MeasurementBuffer, TrajectoryMatrix, build_hankel, build_page, extract_signal, project_hankel
from .metrics import DenoiseReport, ViolationReport, aggregate_violation, denoise_report, violation_duration
from .pipeline import Pipeline, PipelineConfig, StepOutput, run_stream
from .predictor import Forecast, PredictorModel, fit, rollout
from .simgen import NoiseModel, UnicycleProfile, add_noise, lti_stream, unicycle_velocity
from .spectrum import RankEstimate, lambda_star, mp_median, rank_equivalence_check, svht_rank

__version__ = "0.1.0"

__all__ = [
    "CadzowConfig",
    "DenoiseReport",
    "Forecast",
    "MeasurementBuffer",
    "NoiseModel",
    "Pipeline",
    "PipelineConfig",
    "PredictorModel",
    "RankEstimate",
    "StepOutput",
    "TrajectoryMatrix",
    "UnicycleProfile",
    "ViolationReport",
    "add_noise",
    "aggregate_violation",
    "build_hankel",
    "build_page",
    "cadzow_denoise",
    "denoise_report",
    "extract_signal",
    "fit",
    "lambda_star",
    "lti_stream",
    "mp_median",
    "project_hankel",
    "rank_equivalence_check",
    "rollout",
    "run_stream",
    "svht_rank",
    "truncate_rank",
    "unicycle_velocity",
    "violation_duration",
]
