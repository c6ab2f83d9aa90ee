"""Max-Cut heuristics from Kuramoto-type oscillator energies and random-line rounding."""

from .energy import (
    AdmissibleFunction,
    ApproximationConstant,
    InadmissibleFunctionError,
    LocalField,
    approximation_constant,
    cosine,
    energy,
    energy_gradient,
    eval_g,
    fourier_tent,
    local_field,
    make_function,
    parse_function,
)
from .graph import (
    Graph,
    GraphFormatError,
    generate_erdos_renyi,
    load_dimacs,
    load_edge_list,
    read_graph,
    to_edge_list,
    total_weight,
)
from .optimize import (
    SolverError,
    SolverParams,
    SolveTrace,
    Stage,
    coordinate_descent,
    default_schedule,
    gradient_descent,
    minimize_trig_poly,
    random_configuration,
    solve_pipeline,
)
from .rounding import (
    Cut,
    SweepResult,
    circle_distance,
    cut_at_angle,
    expected_cut,
    separation_probability,
    sweep_all_cuts,
)
from .verify import (
    VerificationError,
    VerificationReport,
    brute_force_maxcut,
    check_energy_upper_bound,
    check_ratio_vs_oracle,
    check_theorem_bound,
)

__version__ = "0.1.0"
