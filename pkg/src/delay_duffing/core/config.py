"""
애플리케이션 설정 관리
"""
from pydantic_settings import BaseSettings, SettingsConfigDict
from pathlib import Path

# 프로젝트 루트 경로 설정
PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent.parent


class Settings(BaseSettings):
    """애플리케이션 설정 클래스"""

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8")

    # 출력 설정
    output_dir: str = str(PROJECT_ROOT / "output")
    csv_schema_version: int = 1

    # DDE 적분기 기본값
    max_step: float = 1e-4
    rtol: float = 1e-6
    atol: float = 1e-9
    history_stride: int = 1
    sample_dt: float = 0.01

    # 주기해 / Floquet 설정
    amplitude_rtol: float = 1e-12
    amplitude_max_iter: int = 200
    wronskian_steps_per_period: int = 20000
    characteristic_tol: float = 1e-10
    characteristic_max_iter: int = 100

    # 스윕 설정
    workers: int = 1

    # 기타 설정
    debug: bool = False
    log_level: str = "INFO"


# 전역 설정 인스턴스
settings = Settings()
