"""Sum-of-standard-deviations uncertainty relations for a single qubit."""
from .bounds import (
    BoundComparison,
    closed_form_curves,
    compare,
    equality_rhs,
    inequality_rhs,
    maccone_pati_bound,
    n_observable_bound,
    pair_bracket_positivity,
    pair_lower_bound,
    sur_bound,
    triple_bound_commutators,
    triple_bound_sum,
)
from .estimator import (
    EstimateReport,
    MeasurementPlan,
    ShotRecord,
    born_sample,
    estimate_mixedness,
    exact_mixedness,
    variance_from_counts,
)
from .moments import (
    MomentSet,
    cms_variance,
    commutator_measure,
    covariance,
    dense_moments,
    expectation,
    mixedness,
    moment_set,
    variance,
    zeta,
)
from .pauli import (
    ID,
    SX,
    SY,
    SZ,
    BlochState,
    EigenSystem,
    PauliObservable,
    eigensystem,
    make_observable,
    make_state,
    observable_to_dense,
    orthogonal_pure,
    random_sample,
    to_density,
)
from .sweeps import SweepGrid, SweepPoint, TightnessRatios, sweep_fig1, sweep_fig2, sweep_fig3, tightness

__version__ = "0.1.0"
