"""PCA + kernel-density outlier detection with baselines, synthetic data
generators and an F1 evaluation harness."""

from .datasets import Dataset, SynthSpec, gen_synthetic, load_csv, write_csv
from .detector import (
    DETECTOR_IDS,
    DetectionResult,
    DetectorConfig,
    detect,
    pkde_fit_score,
    top_k_select,
)
from .errors import (
    DataError,
    DegenerateDataError,
    DegenerateDuplicatesError,
    InvalidInputError,
    NumericalError,
    ParseError,
    PkdeError,
    SingularBandwidthError,
)
from .kde import (
    Bandwidth,
    KdeModel,
    density,
    fit_kde,
    gaussian_kernel,
    log_density_all,
    log_density_loo,
    scott_bandwidth,
)
from .metrics import EvalReport, f1_score, sweep
from .pca import PcaModel, choose_dim, fit_pca, project

__version__ = "0.1.0"
