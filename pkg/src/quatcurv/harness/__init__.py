"""Random field corpora, closed-form tables, identity suites and reports."""

from .corpus import FieldCorpus, generate_corpus
from .golden import GOLDEN_FORMS, GoldenForm, load_golden_forms
from .report import IdentityRecord, IoError, VerificationReport, emit_report, load_report
from .suite import (
    IDENTITY_REGISTRY,
    cross_mode_suite,
    derivative_suite,
    full_verification,
    golden_spherical_suite,
    golden_suite,
    identity_suite,
)

__all__ = [
    "FieldCorpus",
    "GOLDEN_FORMS",
    "GoldenForm",
    "IDENTITY_REGISTRY",
    "IdentityRecord",
    "IoError",
    "VerificationReport",
    "cross_mode_suite",
    "derivative_suite",
    "emit_report",
    "full_verification",
    "generate_corpus",
    "golden_spherical_suite",
    "golden_suite",
    "identity_suite",
    "load_golden_forms",
    "load_report",
]
