"""satnoma: deterministic NOMA simulator for multibeam satellite forward links.

Modules: chanmodel (beam pattern, geometry, channel synthesis), regions
(two-user achievable rate regions), precode (linear precoding and layered
transmission), sched (user pairing/grouping), syssim (Monte Carlo scheme
comparison), cli (command-line front end).
"""

from .chanmodel import (BeamLayout, BeamPattern, ChannelMatrix, LinkParams,
                        UserTerminal, beam_gain, beam_gain_linear,
                        build_channel, crossover_level_db, db_to_linear,
                        drop_users, linear_to_db, link_metrics, place_beams,
                        reuse_colors)
from .regions import (BcNomaParams, LinkPair, RateRegion, capacity, rate_ian,
                      region_contains, region_hk, region_noma_bc,
                      region_orthogonal, region_two_user)
from .precode import (FeederPlan, Precoder, SingularChannelError, SinrTable,
                      best_layer_split, broadcast_multicast_precoder,
                      broadcast_multicast_rates, enforce_per_feed_power,
                      feeder_bandwidth, layered_rates, rzf_matrix,
                      rzf_precoder, sinr_table, zf_matrix, zf_precoder)
from .sched import (InsufficientUsersError, PairingScore, Schedule,
                    SizeLimitError, brute_force_pairing, group_min_euclidean,
                    pair_users, pairing_score)
from .syssim import (DESK_TERMINAL_CLASSES, DropResult, SchemeComparison,
                     SimConfig, SummaryRow, compare_schemes, drop_seed,
                     jain_fairness, layered_schedule_rates,
                     make_layered_evaluator, run_drop)

__version__ = "0.1.0"
