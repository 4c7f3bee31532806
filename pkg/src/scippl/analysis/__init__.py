"""Analysis pipelines over scored corpora."""

from .binning import QuantileBinning, quantile_bins
from .interdisc import (
    InterdisciplinarityProfile,
    JifCitationProfile,
    ReferenceAgeProfile,
    interdisciplinarity_profile,
    interdisciplinary_classify,
    jif_citation_by_bin,
    reference_age_profile,
)
from .lexical import LexiconRatio, word_ratio_analysis
from .profiles import (
    DispersionProfile,
    ExtremeShareProfile,
    GroupProfile,
    dispersion_profile,
    extreme_share_profile,
    group_profiles,
)
from .reviews import ReviewStats, UncertaintyRates, review_variability, uncertainty_word_rate

__all__ = [
    "QuantileBinning", "quantile_bins",
    "ExtremeShareProfile", "extreme_share_profile",
    "DispersionProfile", "dispersion_profile",
    "GroupProfile", "group_profiles",
    "ReviewStats", "review_variability",
    "UncertaintyRates", "uncertainty_word_rate",
    "LexiconRatio", "word_ratio_analysis",
    "interdisciplinary_classify", "InterdisciplinarityProfile",
    "interdisciplinarity_profile",
    "ReferenceAgeProfile", "reference_age_profile",
    "JifCitationProfile", "jif_citation_by_bin",
]
