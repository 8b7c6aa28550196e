"""Accuracy of majority-voting ensembles and time-budgeted ensemble selection."""

__version__ = "0.1.0"

from .cdf import Arcsine, Beta, EmpiricalStep, StepMajority, cdf_eval, parse_cdf
from .errors import (
    DegenerateSampleError,
    InfeasibleMomentsError,
    InvalidInputError,
    MajvoteError,
    ParseError,
    SizeLimitError,
)
from .knapsack import (
    Ensemble,
    FixedRestarts,
    ImprovementProbability,
    SolveReport,
    SolveRequest,
    evaluate_subset,
    feasible,
    item_efficiency,
    solve_exhaustive,
    solve_stochastic,
)
from .pnk import (
    GenerativeModel,
    enumerate_compositions,
    pnk_closed_form,
    pnk_monte_carlo,
    profile_from_cdf,
    profile_from_pnk,
)
from .schemes import CdfScheme, Classical, PnkScheme, parse_scheme
from .theory import (
    asymptotic_accuracy,
    beta_fit_moments,
    expected_accuracy,
    sample_ensemble_accuracy,
    variance_bound,
)
from .voting import (
    Classifier,
    ClassifierPool,
    VotingProfile,
    classical_profile,
    q_binary,
    q_bruteforce_oracle,
    q_multi,
    success_count_distribution,
)
