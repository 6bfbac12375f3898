"""
지연 Duffing 진동자 CLI 진입점

사용 예:
    python -m delay_duffing.main amplitude --T 0.6 --n 1,2
    python -m delay_duffing.main floquet --config scenarios/reference.yaml --scenario slope_T03_n11
"""
import argparse
import logging
import sys
from typing import List, Optional

from delay_duffing.cli.commands import (
    cmd_amplitude,
    cmd_characteristic,
    cmd_classify,
    cmd_floquet,
    cmd_simulate,
    cmd_tcrit,
    cmd_torus,
)
from delay_duffing.cli.verify import FAULTS, print_checklist, run_checks
from delay_duffing.core.config import settings
from delay_duffing.core.exceptions import DelayDuffingError
from delay_duffing.core.scenario import build_config, load_scenario_file

logger = logging.getLogger(__name__)

COMMANDS = {
    "amplitude": cmd_amplitude,
    "simulate": cmd_simulate,
    "floquet": cmd_floquet,
    "classify": cmd_classify,
    "characteristic": cmd_characteristic,
    "tcrit": cmd_tcrit,
    "torus": cmd_torus,
}


def _positive_int_list(text: str) -> List[int]:
    try:
        values = [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"정수 목록이 아닙니다: {text}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"양의 정수만 허용됩니다: {text}")
    return values


def _positive_float_list(text: str) -> List[float]:
    try:
        values = [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"실수 목록이 아닙니다: {text}")
    if not values or any(not v > 0.0 for v in values):
        raise argparse.ArgumentTypeError(f"양수만 허용됩니다: {text}")
    return values


def _positive_float(text: str) -> float:
    return _positive_float_list(text)[0]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=float, help="비지연 선형 계수 a")
    common.add_argument("--b", type=float, help="지연 계수 b")
    common.add_argument("--T", type=_positive_float_list, help="지연 T (쉼표 목록 가능)")
    common.add_argument("--n", type=_positive_int_list, help="반주기 개수 n (쉼표 목록 가능)")
    common.add_argument("--k", type=_positive_int_list, help="토러스 경계 홀수 k (쉼표 목록)")
    common.add_argument("--A0", type=_positive_float, help="이력 함수 진폭")
    common.add_argument("--t-end", dest="t_end", type=_positive_float, help="적분 종료 시각")
    common.add_argument("--max-step", dest="max_step", type=_positive_float, help="최대 보폭")
    common.add_argument("--tol", type=_positive_float, help="상대 허용오차")
    common.add_argument("--sample-dt", dest="sample_dt", type=_positive_float, help="해밀토니안 표본 간격")
    common.add_argument("--out", help="출력 CSV 경로")
    common.add_argument("--config", help="YAML 시나리오 파일")
    common.add_argument("--scenario", help="시나리오 섹션 이름")
    common.add_argument("--workers", type=int, help="스윕 병렬 프로세스 수")

    parser = argparse.ArgumentParser(
        prog="delay-duffing",
        description="지연 Duffing 진동자의 빠른 진동 주기해 계산/시뮬레이션/판정",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, handler in COMMANDS.items():
        subparsers.add_parser(name, parents=[common], help=handler.__doc__)
    verify = subparsers.add_parser("verify", help="불변식 검증 체크리스트")
    verify.add_argument("--inject-fault", choices=sorted(FAULTS), help="결함 주입 모드")
    return parser


def _load_config(args: argparse.Namespace):
    file_values = {}
    if args.config:
        file_values = load_scenario_file(args.config, args.scenario)
    elif args.scenario:
        raise ValueError("--scenario 는 --config 와 함께 사용해야 합니다.")
    overrides = {
        "a": args.a,
        "b": args.b,
        "T": args.T,
        "n": args.n,
        "k": args.k,
        "A0": args.A0,
        "t_end": args.t_end,
        "max_step": args.max_step,
        "tol": args.tol,
        "sample_dt": args.sample_dt,
        "out": args.out,
        "workers": args.workers,
    }
    if args.scenario and not args.out:
        overrides["name"] = args.scenario
    return build_config(file_values, overrides)


def main(argv: Optional[List[str]] = None) -> int:
    """
    CLI 실행

    Returns:
        종료 코드 (0: 성공, 1: 계산 실패, 2: 사용법 오류는 argparse 가 SystemExit 로 처리)
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if settings.debug else getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )

    try:
        if args.command == "verify":
            return 0 if print_checklist(run_checks(args.inject_fault)) else 1
        config = _load_config(args)
        COMMANDS[args.command](config)
    except (DelayDuffingError, ValueError, FileNotFoundError) as e:
        logger.error(f"{args.command} 실행 실패: {e}")
        print(f"오류: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
