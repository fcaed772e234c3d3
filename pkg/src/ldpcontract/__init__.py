"""Contraction of locally private mechanisms and private minimax bounds.

Numerical library and CLI for working with epsilon-LDP channels on
finite alphabets: f-divergences and their contraction coefficients, the
closed-form privacy constants ``upsilon`` and ``psi``, canonical
mechanisms (randomized response, the binary mechanism, Hadamard
response), Fisher-information and minimax lower bounds, and seeded
Monte Carlo experiments that verify the bounds empirically.
"""

from .contraction import (
    ContractionEstimate,
    binary_input_kl_bound,
    chi2_tv_bound,
    eta_bruteforce,
    eta_chi2_at,
    eta_tv_exact,
    extremal_tv_under_ldp,
    prior_art_bounds,
    psi,
    upsilon,
)
from .mechanisms import (
    HadamardConfig,
    PrivacyLevel,
    audit_ldp,
    binary_mechanism,
    hadamard_estimate,
    hadamard_response,
    randomized_response,
    sample,
)
from .probability import (
    CHI2,
    H2,
    KL,
    TV,
    Channel,
    DivergenceKind,
    ProbVector,
    chi2_via_eg_quadrature,
    divergence,
    hellinger_via_eg_quadrature,
    hockey_stick,
    push_forward,
)

__version__ = "0.1.0"
