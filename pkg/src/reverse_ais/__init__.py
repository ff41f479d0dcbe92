"""Partition-function and log-likelihood estimation for binary MRFs with AIS and RAISE."""

from .annealing_model import annealing_marginal, exact_p_ann_oracle
from .estimators import (RaiseResult, run_ais, run_raise, run_raise_dbn, run_raise_intractable,
                         run_raise_tractable)
from .exact import (dbm_exact_log_partition, dbm_log_unnormalized_v_exact, dbn_log_unnormalized_v_exact,
                    exact_log_partition, exact_log_prob_v)
from .inference import dbm_is_log_unnormalized_v, dbm_mean_field, dbn_is_log_unnormalized_v
from .models import (BinaryRbm, TwoLayerDbm, TwoLayerDbn, dbn_recognition, rbm_conditional_hidden,
                     rbm_conditional_visible, rbm_log_unnormalized_v)
from .path import (GeometricPath, InitialDistribution, Schedule, dbr_from_dataset, initial_log_partition,
                   intermediate_log_f, linear_schedule, sample_initial)
from .transitions import (clamped_forward, clamped_reverse, gibbs_forward, gibbs_reverse,
                          transition_matrix)
from .variance import ControlVariateConfig, cv_estimate, cv_variance_report
from .weights import EstimateSummary, effective_sample_size, log_mean_exp, tail_bound_check

__version__ = "0.1.0"
