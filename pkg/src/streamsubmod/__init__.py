"""Streaming maximization of non-negative (possibly non-monotone) submodular
functions under a cardinality constraint, with offline post-processing.

Single-pass algorithms:

* threshold streaming with p disjoint solutions, known optimum estimate
  (`run_simplified`) or a self-maintained guess ladder (`run_full`);
* fractional streaming over the multilinear extension (`run_extension`,
  `run_extension_with_guesses`) with pipage/swap rounding;
* a randomized r x m grid of threshold-greedy solutions
  (`run_randomized`, `run_randomized_with_guesses`).

Heavy kernels (batch evaluation, brute force, exact multilinear enumeration)
run on a compiled backend when available; `kernels.backend_name()` tells which.
"""

from . import kernels
from .errors import InputError, InvariantViolation
from .extensions import (Estimate, FractionalPoint, lovasz, multilinear_exact,
                         multilinear_sample, partial_derivative)
from .extension_stream import (FractionalStreamState, extension_finalize,
                               extension_process, run_extension,
                               run_extension_with_guesses)
from .offline import (OfflineResult, brute_force, make_offline, plain_greedy,
                      random_greedy)
from .oracles import (CoverageOracle, CutOracle, FunctionOracle,
                      HardInstanceOracle, ModularOracle, Oracle, eval_masks,
                      load_coverage, load_edge_list, make_coverage, make_cut,
                      make_hard_instance, make_modular, verify_submodular)
from .randomized_stream import (RandomizedState, estimate_pe, post_process,
                                randomized_process, run_randomized,
                                run_randomized_with_guesses, st_greedy)
from .rounding import pipage_round_deterministic, swap_round
from .threshold_stream import (Config, GuessLadder, PartialSolution,
                               SolutionBank, full_finalize, full_process,
                               run_full, run_simplified, simplified_finalize,
                               simplified_process, storage_budget)

__version__ = "0.1.0"
