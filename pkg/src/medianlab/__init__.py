"""Finite median algebras, their walls and cubes, and measure dynamics on them."""
from .core import (ConvexSet, MedianAlgebra, Morphism, classify_subset, convex_hull, gate, hypercube,
                   interval, median, path, product, relabel, validate_algebra)
from .cubes import Cube, antipode_in, ends, enumerate_cubes, is_cube
from .dynamics import (GroupAction, WalkConfig, WalkReport, induced_cube_action, is_minimal,
                       simulate_walk, tree_model, validate_action)
from .errors import (AxiomViolation, InternalError, InternalInconsistency, MedianLabError, Mismatch,
                     NoWitness, NotAutomorphism, NotConvex, NotCube, NotEquivariant, NotFactorizable,
                     NotGenerating, NotSubalgebra, SpectrumViolation, TooLarge, ValidationError)
from .factorization import (Decomposition, classify_walls, cubical_factor, factor_through_cube,
                            is_equivariant_decomposition)
from .measures import (GroupMeasure, Measure, convolve, cubical_measure, find_phi_fixed_points,
                       halfspace_mass, phi, stationary_polytope)
from .oracle import Corpus, brute_recheck, enumerate_hypercube_subalgebras
from .walls import (HalfSpace, Wall, delta, enumerate_walls, gate_separator_point, halfspaces_cutting,
                    is_transverse, wall_embedding)

__version__ = "0.1.0"
