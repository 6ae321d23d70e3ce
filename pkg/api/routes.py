from fastapi import APIRouter, Depends, HTTPException
import logging

from domain.exceptions import ArtifactNotFoundError, DomainException
from api.schemas import (
    ErrorResponse,
    FromPqRequest,
    FromPqResponse,
    InspectionResponse,
    PairedTTestRequest,
    PairedTTestResponse,
    PhaseRequest,
    PhaseResponse,
    PhaseResult,
    RunConfigRequest,
    SchemeRequest,
    SchemeResponse,
    ValidationResponse,
)
from api.dependencies import (
    get_adams_bashforth_use_case,
    get_from_pq_use_case,
    get_inspect_scheme_use_case,
    get_paired_ttest_use_case,
    get_phase_use_case,
    get_validate_run_use_case,
)
from application.use_cases import (
    AdamsBashforthUseCase,
    FromPqUseCase,
    InspectSchemeUseCase,
    PairedTTestUseCase,
    PhaseInspectionUseCase,
    ValidateRunUseCase,
)

logger = logging.getLogger(__name__)

router = APIRouter()


def _client_error(e: Exception) -> HTTPException:
    if isinstance(e, ArtifactNotFoundError):
        logger.warning(f"Not found: {str(e)}")
        return HTTPException(status_code=404, detail=str(e))
    logger.warning(f"Invalid request: {str(e)}")
    return HTTPException(status_code=400, detail=str(e))


@router.post(
    "/schemes/inspect",
    response_model=InspectionResponse,
    responses={400: {"model": ErrorResponse}}
)
async def inspect_scheme(
    request: SchemeRequest,
    use_case: InspectSchemeUseCase = Depends(get_inspect_scheme_use_case)
):
    try:
        result = use_case.execute(request.to_domain())
        logger.info(f"Inspected {result['k']}-step scheme, consistent={result['consistent']}")
        return InspectionResponse(**result)
    except (DomainException, ValueError) as e:
        raise _client_error(e)
    except Exception as e:
        logger.error(f"Error inspecting scheme: {str(e)}", exc_info=True)
        raise HTTPException(status_code=500, detail="Internal server error")


@router.get(
    "/schemes/adams-bashforth/{k}",
    response_model=SchemeResponse,
    responses={400: {"model": ErrorResponse}}
)
async def get_adams_bashforth(
    k: int,
    use_case: AdamsBashforthUseCase = Depends(get_adams_bashforth_use_case)
):
    try:
        return SchemeResponse.from_domain(use_case.execute(k))
    except (DomainException, ValueError) as e:
        raise _client_error(e)
    except Exception as e:
        logger.error(f"Error building Adams-Bashforth scheme: {str(e)}", exc_info=True)
        raise HTTPException(status_code=500, detail="Internal server error")


@router.post(
    "/schemes/from-pq",
    response_model=FromPqResponse,
    responses={400: {"model": ErrorResponse}}
)
async def scheme_from_pq(
    request: FromPqRequest,
    use_case: FromPqUseCase = Depends(get_from_pq_use_case)
):
    try:
        result = use_case.execute(request.p, request.q, request.beta0, request.beta1)
        return FromPqResponse(
            scheme=SchemeResponse.from_domain(result["coefficients"]),
            consistent=result["consistent"],
            root_condition=result["root_condition"],
        )
    except (DomainException, ValueError) as e:
        raise _client_error(e)
    except Exception as e:
        logger.error(f"Error building scheme from (p, q): {str(e)}", exc_info=True)
        raise HTTPException(status_code=500, detail="Internal server error")


@router.post(
    "/phase",
    response_model=PhaseResponse,
    responses={400: {"model": ErrorResponse}}
)
async def phase(
    request: PhaseRequest,
    use_case: PhaseInspectionUseCase = Depends(get_phase_use_case)
):
    try:
        result = use_case.execute(
            request.to_domain(),
            dx=request.dx,
            dt=request.dt,
            c=request.c,
            wavenumber=request.wavenumber,
            with_oracle=request.with_oracle,
        )
        report, oracle = result["report"], result["oracle"]
        return PhaseResponse(
            amplitude=report.amplitude,
            displacement=report.displacement,
            gamma=report.gamma,
            b2=report.b2,
            exact_displacement=request.c * request.dt,
            oracle=PhaseResult(
                amplitude=oracle.amplitude,
                displacement=oracle.displacement,
                gamma=oracle.gamma,
            ) if oracle is not None else None,
        )
    except (DomainException, ValueError) as e:
        raise _client_error(e)
    except Exception as e:
        logger.error(f"Error in phase analysis: {str(e)}", exc_info=True)
        raise HTTPException(status_code=500, detail="Internal server error")


@router.post(
    "/statistics/paired-ttest",
    response_model=PairedTTestResponse,
    responses={400: {"model": ErrorResponse}}
)
async def paired_ttest(
    request: PairedTTestRequest,
    use_case: PairedTTestUseCase = Depends(get_paired_ttest_use_case)
):
    try:
        return PairedTTestResponse(**use_case.execute(request.xs, request.ys))
    except (DomainException, ValueError) as e:
        raise _client_error(e)
    except Exception as e:
        logger.error(f"Error in paired t-test: {str(e)}", exc_info=True)
        raise HTTPException(status_code=500, detail="Internal server error")


@router.post(
    "/runs/validate",
    response_model=ValidationResponse,
    responses={400: {"model": ErrorResponse}}
)
async def validate_run(
    request: RunConfigRequest,
    use_case: ValidateRunUseCase = Depends(get_validate_run_use_case)
):
    try:
        violations = use_case.execute(request.to_domain())
        return ValidationResponse(valid=not violations, violations=violations)
    except (DomainException, ValueError) as e:
        raise _client_error(e)
    except Exception as e:
        logger.error(f"Error validating run: {str(e)}", exc_info=True)
        raise HTTPException(status_code=500, detail="Internal server error")
