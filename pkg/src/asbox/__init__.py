"""Adaptive-sample-size projected-gradient optimization for weighted
finite sums over box constraints, with baselines and an experiment harness."""

from .geometry import (Box, TernaryIndicator, direction, project, residual,
                       stationarity, ternary_indicator)
from .sampling import (CategoricalSampler, RngStreams, SamplePlan, WeightVector,
                       draw_additional, draw_sample, minibatch_grad,
                       minibatch_value, minibatch_value_grad)
from .line_search import (LineSearchParams, LineSearchResult, backtrack,
                          power_eps_schedule)
from .problems import (LogisticRegressionProblem, NeuralNetProblem,
                       NnArchitecture, QuadraticSumProblem, QuadraticSuiteSpec,
                       WeightedSumProblem, default_initial_point,
                       logistic_component, nn_component, quadratic_suite)
from .data_io import (SparseDataset, encode_labels, load_dataset, parse_libsvm,
                      synthetic_logistic_dataset, to_libsvm)
from .solver import (IterationTrace, SolverConfig, SolverState,
                     complexity_bound, decrease_constant, init_state, run,
                     step, violator_probability_check)
from .baselines import (PsgmConfig, SipmConfig, psgm_step, run_psgm, run_sipm,
                        sipm_step)
from .harness import (ExperimentConfig, FevLedger, bound_report, build_problem,
                      load_config, reference_solution, run_experiment,
                      tune_psgm_step, unit_cost)

__version__ = "0.1.0"
