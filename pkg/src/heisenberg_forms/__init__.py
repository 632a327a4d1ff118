"""Exact exterior calculus on the Heisenberg frame.

Symbolic forms with derivative-word coefficients, the vertical-correction
operators built on the invertible d(theta) wedge, a verification suite for
the product-correction identities with per-line sign audits, and a polynomial
coordinate model for independent numeric cross-checks.
"""

from .calculus import (DEFAULT_PROFILE, PROFILES, ConventionProfile,
                       HeisenbergContext, HorizontalityError, L, L_inv, d,
                       d_scalar, dtheta_form, forced_bracket_relations, in_I,
                       in_J, reduce_mod_I, script_L, theta_form)
from .coords import (CoordinateModel, Poly, PolyForm, UnboundSymbolError,
                     bind_and_eval, bracket_defect, duality_defect,
                     finite_diff_check, random_identity_check)
from .dsl import ParseError, latex_form, parse_form, render_form, render_scalar
from .forms import (DegreeError, Form, basis_form, decompose_theta,
                    horizontal_part, scalar_form, vertical_part, wedge,
                    zero_form)
from .identities import (IdentityId, LineAudit, VerificationReport,
                         run_identity, run_suite)
from .scalars import (FrameIndexError, ScalarExpr, derive, normalize, rat,
                      scalar_eq, sym)
from .slicing import (SlicingProfile, gamma_h, lipschitz_estimate,
                      smooth_ramp, smooth_ramp_derivative)

__version__ = "0.1.0"
