"""Challenge-response physical-layer authentication for a moving receiver.

Synthesizes a path-loss plus correlated-shadowing attenuation map, runs the
challenge/response/verification protocol, and chooses energy-efficient
positions with value iteration, greedy, or STD-heuristic policies.
"""
from .auth import (AuthTrial, VerifierConfig, analytic_pmd, draw_challenge, sample_attack_response,
                   sample_legit_response, simulate_det, verify)
from .channel import (ChannelMap, GridSpec, ShadowingParams, attenuation_range, build_channel_map,
                      friis_path_loss, gudmundson_corr, load_map, quantize_map, save_map,
                      synthesize_shadowing)
from .harness import (EpisodeTrace, ExperimentConfig, compare_policies, emit_figure_data, load_config,
                      run_episode)
from .policy import (EnergyModel, PolicyTable, StrategicField, energy, greedy_next, make_policy,
                     solve_value_iteration, std_next, strategic_field)

__version__ = "0.1.0"
