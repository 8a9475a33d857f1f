"""Feedback vertex set toolkit: message-passing solvers and exact oracles."""

from .bp import (BPState, Marginal, Message, Observables, bp_sweep,
                 fvs_lower_bound_fraction, init_state, leaf_message, marginal,
                 marginals_empty, observables, run_bp, update_message)
from .solvers import (BpdParams, FvsResult, bpd, greedy_degree_fvs, random_fvs,
                  redundancy_prune, select_decimation_targets)
from .directed import (DiGraph, brute_min_directed_fvs, directed_edge_factor,
                       exact_directed_partition, exists_height_config,
                       gen_directed_er, is_dag, is_directed_solution,
                       topological_heights, verify_directed_fvs)
from .errors import CapacityError, GenerationError, NumericalError
from .graph import (Graph, PruneResult, classify_components, gen_er,
                    gen_lattice, gen_rr, induced_subgraph, is_acyclic,
                    prune_low_degree)
from .model import (EMPTY, LegitimateSubgraph, brute_min_fvs, check_legitimate,
                    config_is_valid, decode_fvs, degeneracy, edge_factor,
                    exact_marginals, exact_partition_states,
                    exact_partition_subgraphs, is_solution, occupied_counts,
                    solution_to_subgraph, state_space_size, verify_fvs)
from .popdyn import (EnsembleCurve, PdEstimate, Population, Rho0Result,
                     extract_rho0, make_population, pd_run, pd_step)

__version__ = "0.1.0"
