"""Gilmer's entropy inequality on the subset lattice, its two-element
counterexample, a numerical search for more, and small Frankl checks."""

from .setdist import (
    SetDistribution,
    cross_entropy,
    entropy,
    kl_divergence,
    make_distribution,
    marginal,
    marginals,
    mobius_transform,
    union_convolve,
    zeta_transform,
)
from .gilmer import (
    GapReport,
    PaperFamilyParam,
    analyze,
    gap_closed_form,
    gilmer_gap,
    gilmer_lhs,
    paper_distribution,
    perturbed_distribution,
    scan_gap,
    verify_paper,
)
from .search import SearchConfig, SearchResult, local_search, multistart_search
from .frankl import SetFamily, is_union_closed, max_frequency, union_closure

__version__ = "0.1.0"
