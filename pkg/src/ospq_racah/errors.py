"""Exception hierarchy. Every error carries a short machine-readable ``code``."""


class OspqError(ValueError):
    code = "error"


class SeriesUndefined(OspqError):
    code = "series_undefined"


class DegenerateParameters(OspqError):
    code = "degenerate_parameters"


class RecurrenceBreakdown(OspqError):
    code = "recurrence_breakdown"


class NonUnitarizable(OspqError):
    code = "non_unitarizable"


class ReducibleRepresentation(OspqError):
    code = "reducible_representation"


class SpectralMismatch(OspqError):
    code = "spectral_mismatch"


class NonGenericSpectrum(OspqError):
    code = "non_generic_spectrum"


class ExcludedPoint(OspqError):
    code = "excluded_point"


class LemmaVerificationFailure(OspqError):
    code = "lemma_verification_failure"


class RealizationDomainError(OspqError):
    code = "realization_requires_positive_abcd"
