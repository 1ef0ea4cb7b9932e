"""minkpack: packing numbers, Moran-equation dimension solvers, and
Minkowski-measure comparability reports for self-affine sets and symbolic
spaces."""

from ._backend import BACKEND
from ._util import DEFAULT_BUDGET
from .dimension import (
    BetaSequence,
    DimensionFit,
    box_dimension_sponge,
    fit_box_dimension,
    moran_residuals,
    solve_beta_sequence,
    solve_similarity_dimension,
    symbolic_beta,
)
from .errors import BudgetExceededError, ValidationError
from .ifs import (
    CylinderWord,
    DiagonalMap,
    IntervalMap,
    Pillar,
    SimilarIFS,
    SpongeSystem,
    check_osc_boxes,
    check_osc_intervals,
    children,
    pillar,
    project_ifs,
    validate_coordinate_ordering,
    validate_neat_projection,
)
from .measures import (
    BernoulliMeasure,
    MeasurableSet,
    WordBijection,
    bernoulli_weights,
    equivalence_test,
    measure_of_set,
    measure_of_word,
    natural_measure,
    projected_measure,
    pushforward_measure,
    uniform_measure,
)
from .metric import (
    ComponentPartition,
    CoordinateScaling,
    PackingResult,
    PointCloud,
    depth_for_delta,
    epsilon_components,
    greedy_packing,
    hausdorff_distance,
    max_packing_exhaustive,
    minkowski_content_estimate,
    pillar_boxes,
    sample_attractor,
)
from .models import load_model
from .symbolic import (
    SymbolicCloud,
    SymbolicPoint,
    SymbolicSystem,
    check_nonoverlapping,
    enumerate_cylinders,
    metric_full,
    metric_half,
    symbolic_point_cloud,
)
from .verify import (
    CriterionReport,
    DoublingReport,
    RatioReport,
    SpectrumEstimate,
    TransportReport,
    bilipschitz_transport_check,
    coarse_multifractal_spectrum,
    doubling_measure_check,
    minkowski_ratio_report,
    natural_beta,
    partition_criterion_check,
    whole_space_packing_counts,
)

__version__ = "0.1.0"
