"""daclab: a workbench for dynamic algorithm configuration.

Step-wise reconfigurable benchmark algorithms, dynamic-policy families,
solvers from both the reinforcement-learning and optimization playbooks,
exact oracles for desk-scale scenarios, and executable reductions between
the configuration problems they instantiate.
"""

from .core import (
    BatchFunctional,
    ConfigurationError,
    DacScenario,
    DecomposedSum,
    EvaluationRecord,
    ExecutionFault,
    Instance,
    InstanceSet,
    Observation,
    TargetAlgorithm,
    Trajectory,
    TrajectoryFunctional,
    evaluate_policy,
    execute,
    static_execute,
)
from .policies import (
    LookupPolicy,
    ParametricPolicy,
    Policy,
    PolicySpaceSpec,
    act_dual,
    constant_policy,
    policy_from_json,
    policy_to_json,
)
from .seeding import derive_seed
from .spaces import (
    Categorical,
    Configuration,
    ConfigurationSpace,
    Integer,
    ParameterSpec,
    Real,
)

__version__ = "0.1.0"
