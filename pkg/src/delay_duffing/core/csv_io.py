"""
CSV 결과 파일 입출력 모듈

모든 결과 표는 스키마 주석, 실행 정보 주석, 헤더 한 줄, 데이터 행 순서로 기록한다.
실수는 왕복 정밀도를 보장하는 %.17g 로 쓴다.
"""
import csv
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from delay_duffing.core.config import settings

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, complex):
        return f"{value.real:.17g}{value.imag:+.17g}j"
    if value is None:
        return ""
    return str(value)


def write_table(path: Union[Path, str],
                schema: str,
                columns: Sequence[str],
                rows: Iterable[Sequence[Any]],
                provenance: Optional[Dict[str, Any]] = None) -> Path:
    """
    결과 표를 CSV 로 저장

    Args:
        path: 저장 경로 (상위 폴더는 자동 생성)
        schema: 스키마 이름 (예: "trajectory")
        columns: 헤더 컬럼
        rows: 데이터 행
        provenance: 실행 정보 (파라미터, 허용오차 등)

    Returns:
        저장된 파일 경로
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", newline="", encoding="utf-8") as handle:
        handle.write(f"# schema: delay-duffing/{schema} v{settings.csv_schema_version}\n")
        for key, value in (provenance or {}).items():
            handle.write(f"# {key}={format_value(value)}\n")
        writer = csv.writer(handle)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
            count += 1
    logger.info(f"CSV 저장 완료: {path} ({count}행)")
    return path


def read_table(path: Union[Path, str]) -> Dict[str, Any]:
    """
    write_table 로 저장한 파일 읽기

    Returns:
        {"schema": str, "provenance": dict, "columns": list, "rows": list[list[str]]}
    """
    schema = ""
    provenance: Dict[str, str] = {}
    data_lines: List[str] = []
    with Path(path).open(encoding="utf-8") as handle:
        for line in handle:
            if line.startswith("# schema:"):
                schema = line[len("# schema:"):].strip()
            elif line.startswith("# "):
                key, _, value = line[2:].rstrip("\n").partition("=")
                provenance[key] = value
            else:
                data_lines.append(line)
    reader = csv.reader(data_lines)
    columns = next(reader, [])
    return {"schema": schema, "provenance": provenance, "columns": columns, "rows": list(reader)}
