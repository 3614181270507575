"""Shadowing cross-correlation to failure-event correlation for dual links."""

from ._core import (
    ConfigError,
    CorrelationResult,
    DegenerateInputError,
    DomainError,
    InsufficientEventsError,
    LinkBudget,
    LinkReliability,
    McEstimate,
    OrthantMethod,
    OrthantProbability,
    UnattainableCorrelationError,
    __version__,
    dual_failure_probability,
    estimate_event_correlation,
    estimate_joint_failure,
    event_correlation,
    event_correlation_beta,
    indicator_sigma,
    invert_correlation,
    link_from_epsilon,
    link_reliability,
    max_event_correlation,
    normal_pdf,
    normalized_margin,
    q_function,
    q_inverse,
    table_one,
    upper_tail,
    upper_tail_second_method,
    upper_tail_single_integral,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
