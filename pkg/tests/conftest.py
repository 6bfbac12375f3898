"""
공용 테스트 설정
"""
import pytest

from delay_duffing.core.config import settings
from delay_duffing.orbit.orbit import DuffingParams

# 대표 지연 (a=0, b=1)
PARAMS_T06 = DuffingParams(a=0.0, b=1.0, T=0.6)


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """결과 CSV 를 임시 폴더로 보낸다"""
    monkeypatch.setattr(settings, "output_dir", str(tmp_path))
    return tmp_path
