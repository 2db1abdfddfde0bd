"""CU-level adaptive quantization analysis for raw YCbCr video.

Computes per-CU QP maps under the variance-based AdaptiveQP rule and the ACUQ rule
(luma+chroma activity, temporal masking, lambda-refined QP), plus PSNR and
BD-Rate helpers for evaluating encodes.
"""

from .activity import QpAdaptConfig, TpRule
from .cu_grid import CuNode, enumerate_cus, sub_blocks
from .metrics import RdCurve, RdPoint, bd_rate, psnr
from .qp_synth import AnalysisConfig, QpMap, Rule, analyze_sequence, build_qp_map, compare_maps
from .rate_model import ClampMode, GopFrameClass, GopStructure, LambdaParams, load_gop
from .video_io import (ChromaFormat, Frame, VideoSpec, count_frames, iter_frames, read_frame, write_frame,
                       write_video)

__version__ = "0.1.0"
