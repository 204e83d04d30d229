"""Activity filtering, possession labelling and threshold tuning for
50 Hz basketball player-tracking streams."""

from .errors import (
    ContractViolation,
    CourtActiveError,
    InvalidMeasurementError,
    ParseError,
    ReportError,
    TuningError,
    UndefinedRateError,
)
from .filters import DropMask, FilterParams, Reason, filter_measurements
from .ground_truth import (
    ActivityTimeline,
    ConfusionCounts,
    PossessionTimeline,
    PredictionTimeline,
    aggregate_predictions,
    expand_activity,
    expand_possession,
    offdef_accordance,
)
from .ingest import (
    Config,
    GridSpec,
    load_config,
    parse_activity_report,
    parse_possession_report,
    parse_tracking,
    read_tracking,
)
from .kernels import BACKEND
from .model import FIBA_COURT, CourtGeometry, Frame, PlayerSample, Tracking, in_court, in_ftsa, planar_speed
from .possession import LabeledStream, Orientation, Poss, PossessionLabel, assign_ord, classify_poss, label_possessions
from .synth import GameScript, Segment, generate
from .tuning import RocPoint, TuningResult, auc, confusion, sensitivity, specificity, tune, youden

__version__ = "0.1.0"
