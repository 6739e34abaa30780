"""Weighted simplicial complexes, group-valued cochains, and the expansion
machinery built on them: spectral walks, coboundary-expansion oracles, cones,
agreement decompositions, and unique games on expanding complexes."""

__version__ = "0.1.0"

from .complexes import (PureComplex, WeightedGraph, canonical_face,
                        dumps_complex, loads_complex)
from .groups import FiniteGroup, cyclic, from_table, sym
from .cochain import (Cochain, decode_coboundary, delta, distance,
                      gauge_shift, is_cocycle, push_homomorphism,
                      random_cochain, weight)
from .builders import (LabeledComplex, blowup, colored_faces_complex,
                       complete_complex, complete_partite, cone_complex,
                       faces_complex, generalized_faces_enumerate,
                       generalized_link_tester, label_graph, partite_tensor,
                       partitification, spherical_building)
from .spectral import (LocalSpectralProfile, MajorityStabilityReport,
                       SpectralReport, TwoStepReport, colored_swap_walk,
                       containment_graph, edge_expansion, lambda2,
                       local_spectral_profile, majority_stability,
                       one_sided_lambda2, swap_walk, two_step_partite_walk)
from .oracle import (BlowupLemmaReport, FlattenReport, H1Report,
                     H1SampleReport, blowup_coboundary_distance,
                     blowup_delta_weight, blowup_distance, blowup_flatten,
                     blowup_label_eta, h1_bruteforce, h1_sampled,
                     triangle_test, verify_blowup_lemma)
from .cones import (AutoConeResult, Cone, ConeFamilyBound, ConeValidation,
                    Contraction, Move, SearchBudget, apply_move, auto_cone,
                    bt_reduce, build_cone_complete_faces, compose_path,
                    cone_decode, cone_family_bound, path_value,
                    reverse_contraction, reverse_path, search_contraction,
                    validate_cone)
from .gk import (GKDecomposition, GKHypotheses, GKMarginals, GKRunReport,
                 GammaRoute, agreement_expansion, brute_closest_coboundary,
                 check_hypotheses, gk_bound, gk_correct, local_graph,
                 marginals, smoothness, vertex_star_decomposition)
from .ug import (Assignment, SolveReport, StrongSatResult, UGInstance,
                 affine_linear_generator, from_cochain, is_strongly_satisfiable,
                 solve_on_expander, to_cochain, value)

__all__ = [name for name in dir() if not name.startswith("_")]
