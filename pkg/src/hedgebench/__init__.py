"""hedgebench: a regret laboratory for prediction with expert advice.

Learners (decreasing / constant / epoch-doubling exponential weights, an
adaptively tuned variant, follow-the-leader), a catalogue of stochastic and
adversarial loss instances, a deterministic simulation harness, and evaluators
for the regret guarantees the benchmark checks against.
"""

from .bounds import (
    BOUND_IDS,
    BoundParams,
    BoundValue,
    bernstein_estimate,
    constant_hedge_exact_regret,
    theory_value,
)
from .core import (
    RegretSummary,
    RoundRecord,
    Trace,
    as_losses,
    mix_loss,
    regret_of_trace,
    validate_simplex,
)
from .environments import (
    INSTANCE_IDS,
    InstanceSpec,
    RngStream,
    builtin_instance,
    gap_of,
    instance_from_dict,
    loss_matrix,
    sample_losses,
    scan_adversarial_gap,
)
from .harness import (
    AggregatedResult,
    ExperimentConfig,
    average_series,
    checkpoints,
    run_experiment,
    run_trial,
)
from .learners import (
    DEFAULT_C0,
    LEARNER_IDS,
    AdaHedgeLearner,
    ConstantHedge,
    DecreasingHedge,
    DoublingHedge,
    EtaSchedule,
    FtlLearner,
    eta_at,
    ftl_weights,
    hedge_weights,
    learner_step,
    make_learner,
)

__version__ = "0.1.0"
