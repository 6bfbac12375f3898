"""
시나리오 설정 모듈

YAML 시나리오 파일(defaults 섹션 + 시나리오별 섹션)과 CLI 플래그를 합쳐
ScenarioConfig 를 만든다. 우선순위: CLI 플래그 > 파일 값 > settings 기본값
"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator

from delay_duffing.core.config import settings
from delay_duffing.dde.integrator import IntegratorOptions
from delay_duffing.orbit.orbit import DuffingParams

logger = logging.getLogger(__name__)

# 파일/플래그 표기 → 필드 이름
_KEY_ALIASES = {
    "A0": "initial_amplitude",
    "a0": "initial_amplitude",
    "tol": "rtol",
    "out": "output",
}


def _split(value: Any) -> List[Any]:
    if value is None:
        return []
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


class ScenarioConfig(BaseModel):
    """한 번의 CLI 실행에 필요한 설정 (T, n 은 목록으로 받아 스윕 가능)"""

    model_config = ConfigDict(frozen=True)

    name: str = "cli"
    a: float = 0.0
    b: float = 1.0
    T: List[float] = Field(default_factory=list)
    n: List[int] = Field(default_factory=lambda: [1])
    k: List[int] = Field(default_factory=lambda: [1])
    initial_amplitude: Optional[float] = None
    t_end: Optional[float] = None
    sample_dt: float = Field(default_factory=lambda: settings.sample_dt)
    max_step: float = Field(default_factory=lambda: settings.max_step)
    rtol: float = Field(default_factory=lambda: settings.rtol)
    atol: float = Field(default_factory=lambda: settings.atol)
    history_stride: int = Field(default_factory=lambda: settings.history_stride)
    output: Optional[str] = None
    workers: int = Field(default_factory=lambda: settings.workers)

    @field_validator("T", mode="before")
    @classmethod
    def _float_list(cls, value: Any) -> List[float]:
        values = [float(v) for v in _split(value)]
        if any(not v > 0.0 for v in values):
            raise ValueError(f"T 는 양수여야 합니다: {values}")
        return values

    @field_validator("n", "k", mode="before")
    @classmethod
    def _int_list(cls, value: Any) -> List[int]:
        values = [int(v) for v in _split(value)]
        if not values or any(v < 1 for v in values):
            raise ValueError(f"양의 정수 목록이어야 합니다: {values}")
        return values

    @field_validator("initial_amplitude", "t_end", "sample_dt", "max_step", "rtol", "atol")
    @classmethod
    def _positive(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not value > 0.0:
            raise ValueError(f"양수여야 합니다: {value}")
        return value

    @field_validator("workers", "history_stride")
    @classmethod
    def _at_least_one(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"1 이상이어야 합니다: {value}")
        return value

    def params(self, T: Optional[float] = None) -> DuffingParams:
        """T 를 지정하지 않으면 첫 번째 T 사용"""
        if T is None:
            if not self.T:
                raise ValueError("지연 T 가 지정되지 않았습니다 (--T).")
            T = self.T[0]
        return DuffingParams(a=self.a, b=self.b, T=T)

    def integrator_options(self) -> IntegratorOptions:
        return IntegratorOptions(
            max_step=self.max_step,
            rtol=self.rtol,
            atol=self.atol,
            history_stride=self.history_stride,
        )

    def output_path(self, suffix: str) -> Path:
        """출력 경로 (지정하지 않으면 settings.output_dir 아래 시나리오 이름으로)"""
        if self.output:
            path = Path(self.output)
            return path if not suffix else path.with_name(f"{path.stem}{suffix}{path.suffix or '.csv'}")
        return Path(settings.output_dir) / f"{self.name}{suffix}.csv"

    def provenance(self) -> Dict[str, Any]:
        info = self.model_dump()
        info["T"] = ",".join(format(t, ".17g") for t in self.T)
        info["n"] = ",".join(str(n) for n in self.n)
        info["k"] = ",".join(str(k) for k in self.k)
        return info


def _normalise(values: Dict[str, Any]) -> Dict[str, Any]:
    normalised = {}
    for key, value in values.items():
        key = str(key).replace("-", "_")
        normalised[_KEY_ALIASES.get(key, key)] = value
    return normalised


def load_scenario_file(path: Union[str, Path], name: Optional[str] = None) -> Dict[str, Any]:
    """
    YAML 시나리오 파일에서 defaults 와 지정 섹션을 합친 값 반환

    Args:
        path: 시나리오 파일 경로
        name: 섹션 이름 (None 이면 defaults 만)
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"시나리오 파일을 찾을 수 없습니다: {path}")
    with path.open(encoding="utf-8") as handle:
        document = yaml.safe_load(handle) or {}
    if not isinstance(document, dict):
        raise ValueError(f"시나리오 파일 형식 오류 (최상위는 매핑이어야 합니다): {path}")

    values = _normalise(document.get("defaults") or {})
    if name is not None:
        if name not in document:
            available = ", ".join(k for k in document if k != "defaults")
            raise ValueError(f"시나리오 '{name}' 이(가) 없습니다. 사용 가능: {available}")
        values.update(_normalise(document[name] or {}))
        values["name"] = name
    logger.debug(f"시나리오 로드: {path} [{name}] → {values}")
    return values


def list_scenarios(path: Union[str, Path]) -> List[str]:
    with Path(path).open(encoding="utf-8") as handle:
        document = yaml.safe_load(handle) or {}
    return [key for key in document if key != "defaults"]


def build_config(file_values: Optional[Dict[str, Any]] = None,
                 overrides: Optional[Dict[str, Any]] = None) -> ScenarioConfig:
    """파일 값 위에 None 이 아닌 CLI 값을 덮어써 ScenarioConfig 생성"""
    values = dict(file_values or {})
    values.update({k: v for k, v in _normalise(overrides or {}).items() if v is not None})
    return ScenarioConfig(**values)
