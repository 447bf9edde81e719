"""Weak model sets from coprime sublattice families.

Construct point sets such as the visible lattice points and the k-free
integers from families of pairwise coprime sublattices, compute their
densities, autocorrelations and pure-point diffraction spectra both
empirically (finite patches) and in closed form (truncated products with
certified tails), and cross-check the two routes.
"""

from .intervals import BoundedValue
from .lattices import (CanonicalLattice, CosetLabel, LatticeBasis, canonicalize,
                       contains, dual_basis, from_columns, identity_lattice,
                       index, intersect, is_coprime_pair, lattice_sum,
                       scalar_lattice)
from .family import (CoprimeFamily, StarImage, bfree_family, covariogram,
                     custom_family, family_from_description, kfree_family,
                     model_density, star_map, tail_density_bound,
                     validate_family, visible_points_family, window_measure)
from .pointsets import (DensityEstimate, Patch, Region, density_estimate,
                        density_sequence, find_hole, generate, generate_kfree,
                        generate_visible, maximality_report)
from .correlation import (AutocorrTable, autocorr_table, empirical_autocorr,
                          sandwich_check, theoretical_autocorr)
from .diffraction import (RationalPoint, SpectralLine, SpectrumTable, amplitude,
                          empirical_amplitude, inclusion_exclusion_amplitude,
                          intensity_visible, minimal_support, spectral_support,
                          spectrum_table)
from .hullcheck import (PatchPattern, admissible, patch_frequency_empirical,
                        patch_frequency_exact)

__version__ = "0.1.0"
