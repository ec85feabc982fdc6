"""Asymmetric local information privacy: watchdog sanitization and leakage measures."""

__version__ = "0.1.0"

from .distributions import (  # noqa: E402
    JointDistribution,
    RandomDrawConfig,
    entropy_symbols,
    marginal_secrets,
    marginal_symbols,
    posterior_secrets_given_symbol,
    product,
    sample_joint,
    validate,
)
from .lift import HistogramSummary, LiftProfile, lift_histograms, lift_profile  # noqa: E402
from .watchdog import (  # noqa: E402
    Channel,
    PrivacyBudget,
    RiskPartition,
    SanitizedRelease,
    achieved_bounds,
    apply_channel,
    complete_merge_channel,
    partition,
    sanitize,
    uniform_channel,
)
from .measures import (  # noqa: E402
    LeakageReport,
    alpha_lift,
    arimoto_mi,
    ldp_factor,
    leakage_report,
    maximal_leakage,
    mutual_information,
    sibson_mi,
    verify_bounds,
    watchdog_utility,
)
