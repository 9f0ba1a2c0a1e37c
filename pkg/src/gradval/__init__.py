"""Exact value groups, value semigroups and graded-extension checks."""

from .lattice import IntMatrix, QuotientStructure, quotient_structure, smith_normal_form
from .values import GroupElement, OrderedGroup, in_subgroup, subgroup_index
from .monoid import AffineMonoid, member, par_points, saturation_member
from .graded import GradedExtension, integrality_test, finiteness_test, p_power_inclusion
from .verifier import MonomialExtension, analyze, kummer_symmetric_certificate

__version__ = "0.1.0"
