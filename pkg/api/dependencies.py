from config import settings
from application.use_cases import (
    AdamsBashforthUseCase,
    FromPqUseCase,
    InspectSchemeUseCase,
    PairedTTestUseCase,
    PhaseInspectionUseCase,
    ValidateRunUseCase,
)


def get_inspect_scheme_use_case() -> InspectSchemeUseCase:
    return InspectSchemeUseCase(consistency_tol=settings.consistency_tol)


def get_adams_bashforth_use_case() -> AdamsBashforthUseCase:
    return AdamsBashforthUseCase()


def get_from_pq_use_case() -> FromPqUseCase:
    return FromPqUseCase(consistency_tol=settings.consistency_tol)


def get_phase_use_case() -> PhaseInspectionUseCase:
    return PhaseInspectionUseCase()


def get_paired_ttest_use_case() -> PairedTTestUseCase:
    return PairedTTestUseCase()


def get_validate_run_use_case() -> ValidateRunUseCase:
    return ValidateRunUseCase()
