"""Tropical period asymptotics and Gamma-class pairings for Batyrev mirrors.

The package computes both sides of the period asymptotics for a mirror
datum (lattice points V with positive weights lambda): the period integral
over the tropical cycle, piece by piece, and the pairing of the Gamma class
against exact toric intersection numbers; it also evaluates the local
integrals whose zeta-value identities tie the two together.
"""

from .data import bundled_examples, load_datum
from .engine import (FiberSolve, PeriodResult, PieceChart, build_charts,
                     fit_asymptotics, integrate_piece, period, period_arc,
                     solve_fiber)
from .gamma import (G_X_numeric, Gamma_X_numeric, chern_euler,
                    evaluate_on_X, extract_relations, g_hat, gamma_class,
                    isymbols_of_weight)
from .lattice import (HPolytope, IntersectionTable, MirrorDatum,
                      SimplicialReport, VPolytope, build_delta_lambda,
                      enumerate_vertices, face_volume, intersection_table,
                      polar_dual)
from .localints import (I_known, I_numeric, PolygonRegion, collision_model,
                        conifold_closed_form, eval_g, make_iprovider,
                        trop_defect_2d, zeta_via_boundary)
from .quadrature import QuadratureSpec
from .series import ISymbol, MixedPoly, SymSeries, ZetaPoly

__version__ = "0.1.0"
