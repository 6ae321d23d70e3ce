import logging
import sys

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    app_name: str = "Learned Multistep Schemes"
    app_version: str = "1.0.0"
    debug: bool = False
    output_dir: str = "runs"
    rk_rtol: float = 1e-6
    rk_atol: float = 1e-9
    startup_tolerance_factor: float = 10.0
    consistency_tol: float = 1e-12
    jobs: int = 1
    truth_chunk_steps: int = 2000

    class Config:
        env_file = ".env"
        case_sensitive = False


settings = Settings()


def configure_logging(debug: bool = settings.debug) -> None:
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(sys.stdout)
        ]
    )
