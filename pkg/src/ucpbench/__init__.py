"""Use Case Points sizing, environmental-factor productivity models, and a
leave-one-out benchmarking and comparison toolkit."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateClustering,
    InvalidArgument,
    MetricError,
    ParseError,
    UCPBenchError,
    UndefinedBaseline,
    UnsupportedSampleSize,
    ValidationError,
)
from .size import (  # noqa: E402
    ActorCounts,
    EnvironmentalFactors,
    SizeBreakdown,
    SizeMode,
    TechnicalFactors,
    UseCaseCounts,
    classify_use_case,
    compute_ef,
    compute_tcf,
    compute_ucp,
    pdr,
)
from .dataset import Dataset, ProjectRecord, PROFILES, generate_synthetic, get_profile, load_dataset, save_dataset  # noqa: E402
from .baselines import NassifParams, calibrate_nassif, karner_estimate, nassif_estimate, sw_classify, sw_estimate  # noqa: E402
from .models import MODEL_NAMES, make_estimator  # noqa: E402
from .evaluation import EvaluationReport, evaluate, loocv, random_guess_baseline  # noqa: E402
from .comparison import compare_reports, scott_knott, wilcoxon_ranksum, win_tie_loss  # noqa: E402
from .config import RunConfig  # noqa: E402
