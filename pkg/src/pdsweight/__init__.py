"""Security classification and attack synthesis for blockchain weight functions."""

from .attacks import (
    AttackOutcome,
    AttackScenario,
    HomogeneityWitness,
    InconclusiveAttack,
    SecureWeightError,
    find_homogeneity_witness,
    find_nonmonotone_witness,
    normalize_witness,
    plan_attack,
    run_attack,
    synthesize_attack,
)
from .continuous import (
    ChainProfile,
    PreconditionReport,
    RecordingViolation,
    TimeWarp,
    adversarial_chain,
    altered_time,
    chain_weight,
    check_preconditions,
    inverse_altered_time,
)
from .discrete import (
    Block,
    Blockchain,
    InequalityReport,
    adversarial_discretize,
    blockchain_weight,
    honest_discretize,
    make_block,
    smoothness,
    verify_theorem_chain,
)
from .replotting import (
    DifficultyBand,
    InfeasibleReplot,
    PinnedDifficulty,
    RaceOutcome,
    ReplotScenario,
    apply_difficulty_band,
    replot_block,
    simulate_defended_race,
    simulate_replot_race,
)
from .resources import (
    DomainError,
    ResourcePoint,
    ResourceProfile,
    extrema,
    integrate_timed,
)
from .scenario import ScenarioError, ScenarioFile
from .weights import (
    Classification,
    FunctionWeight,
    ParseError,
    PropertyReport,
    SamplerConfig,
    VacuousWeightError,
    WeightExpr,
    S,
    V,
    W,
    check_homogeneous_timed,
    check_monotone,
    check_subhomogeneous_space,
    classify,
    parse,
)

__version__ = "0.1.0"
