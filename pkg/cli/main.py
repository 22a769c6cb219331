"""
mvcache 命令行入口

退出码:
    0 成功, 1 未预期错误, 2 输入格式错误, 3 输入为空,
    4 非行随机矩阵, 5 不收敛/链可约, 6 目录或分区不一致

Example:
    $ mvcache estimate --trace trace.csv
    $ mvcache steady --matrix matrix.csv --exact
    $ mvcache recommend --secondary-trace sec.csv --capacity 1
    $ mvcache simulate --workload workload.json --policy markov,random
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from cli import commands
from core.config import get_settings, setup_logging
from core.exceptions import MvCacheError

logger = logging.getLogger(__name__)

POLICY_NAMES = ("markov", "lru", "lfu", "random")


# ==================== 参数类型 ====================


def positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"必须为正数: {text}")
    return value


def damping_factor(text: str) -> float:
    value = float(text)
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"阻尼系数必须在(0,1]内: {text}")
    return value


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"必须为正整数: {text}")
    return value


def non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"必须为非负整数: {text}")
    return value


def start_spec(text: str) -> str:
    if text == "uniform" or (text.startswith("unit:") and len(text) > len("unit:")):
        return text
    raise argparse.ArgumentTypeError(f"--start 取值为 uniform 或 unit:<view>: {text}")


def policy_list(text: str) -> List[str]:
    names = [name.strip() for name in text.split(",") if name.strip()]
    unknown = [name for name in names if name not in POLICY_NAMES]
    if not names or unknown:
        raise argparse.ArgumentTypeError(
            f"未知策略: {','.join(unknown) or text}. 可用策略: {','.join(POLICY_NAMES)}"
        )
    return names


# ==================== 解析器 ====================


def _add_estimation_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--default-row", choices=["uniform", "self_loop"], help="没有episode的视图所用的默认行")
    parser.add_argument(
        "--weighting", choices=["episode_mean", "transition_counts"], help="episode行的合并方式"
    )
    parser.add_argument(
        "--supply-row",
        action="append",
        metavar="NAME=p1,p2,...",
        help="直接给定某个视图的转移行,可以使用 17/24 形式的有理数,可重复",
    )


def _add_iteration_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol", type=positive_float, help="收敛阈值(默认1e-8)")
    parser.add_argument("--max-iter", type=positive_int, help="最大迭代次数(默认10000)")
    parser.add_argument("--damping", type=damping_factor, help="阻尼系数,默认不加阻尼")
    parser.add_argument(
        "--auto-guard", action="store_true", help="转移图不是强连通时自动加阻尼"
    )


def build_parser() -> argparse.ArgumentParser:
    """构建命令行解析器"""
    parser = argparse.ArgumentParser(
        prog="mvcache",
        description="基于马氏分析的物化视图替换: 估计、稳态、替换建议与仿真",
    )
    parser.add_argument(
        "--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], help="日志级别"
    )
    parser.add_argument("--log-format", choices=["text", "json"], help="日志格式")
    subparsers = parser.add_subparsers(dest="command", required=True)

    estimate = subparsers.add_parser("estimate", help="由轨迹估计初始概率矩阵")
    estimate.add_argument("--trace", required=True, help="轨迹CSV")
    estimate.add_argument("--catalog", help="目录文件,每行一个视图名")
    estimate.add_argument("--out", help="输出文件,默认标准输出")
    _add_estimation_flags(estimate)
    estimate.set_defaults(handler=commands.cmd_estimate)

    steady = subparsers.add_parser("steady", help="求转移矩阵的稳态向量")
    steady.add_argument("--matrix", required=True, help="矩阵CSV")
    steady.add_argument("--start", type=start_spec, help="uniform 或 unit:<view>,默认按 MARKOV_START 配置")
    steady.add_argument("--exact", action="store_true", help="直接求解线性方程组")
    steady.add_argument(
        "--trajectory", type=non_negative_int, metavar="STEPS", help="输出前STEPS步迭代向量"
    )
    steady.add_argument("--out", help="输出文件,默认标准输出")
    _add_iteration_flags(steady)
    steady.set_defaults(handler=commands.cmd_steady)

    rec = subparsers.add_parser("recommend", help="给出提升/淘汰建议")
    rec.add_argument("--secondary-trace", required=True, help="辅存轨迹CSV")
    rec.add_argument("--primary-trace", help="主存轨迹CSV")
    rec.add_argument("--catalog", help="两条轨迹共用的目录文件")
    rec.add_argument("--primary", help="当前主存中的视图,逗号分隔")
    rec.add_argument("--capacity", type=non_negative_int, help="主存容量")
    rec.add_argument("--require-gain", action="store_true", help="仅当提升得分高于淘汰得分时交换")
    rec.add_argument("--out", help="输出文件,默认标准输出")
    _add_estimation_flags(rec)
    _add_iteration_flags(rec)
    rec.set_defaults(handler=commands.cmd_recommend)

    simulate = subparsers.add_parser("simulate", help="两级缓存仿真")
    source = simulate.add_mutually_exclusive_group(required=True)
    source.add_argument("--workload", help="负载规格JSON")
    source.add_argument("--trace", help="轨迹CSV")
    simulate.add_argument("--catalog", help="目录文件")
    simulate.add_argument("--policy", type=policy_list, help="策略,多个用逗号分隔时逐一比较")
    simulate.add_argument("--primary", help="初始主存视图,逗号分隔")
    simulate.add_argument("--capacity", type=non_negative_int, help="主存容量")
    simulate.add_argument("--retrain-interval", type=positive_int, help="重新估计间隔")
    simulate.add_argument("--seed", type=non_negative_int, help="随机种子,默认取负载规格中的种子")
    simulate.add_argument("--window", choices=["recent", "cumulative"], help="估计窗口")
    simulate.add_argument("--tier-mode", choices=["per_tier", "global"], help="稳态向量来源")
    simulate.add_argument("--require-gain", action="store_true", help="仅当提升得分高于淘汰得分时交换")
    simulate.add_argument("--out", help="结果CSV,默认标准输出")
    simulate.add_argument("--intervals-out", help="每个间隔命中率CSV")
    simulate.add_argument("--default-row", choices=["uniform", "self_loop"])
    simulate.add_argument("--weighting", choices=["episode_mean", "transition_counts"])
    simulate.add_argument("--tol", type=positive_float)
    simulate.add_argument("--max-iter", type=positive_int)
    simulate.add_argument("--damping", type=damping_factor)
    simulate.set_defaults(handler=commands.cmd_simulate)

    validate = subparsers.add_parser("validate", help="检查轨迹与矩阵文件")
    validate.add_argument("--trace", help="轨迹CSV")
    validate.add_argument("--matrix", help="矩阵CSV")
    validate.add_argument("--catalog", help="目录文件")
    validate.set_defaults(handler=commands.cmd_validate)

    vhm = subparsers.add_parser("vhm", help="输出视图命中矩阵")
    vhm.add_argument("--trace", required=True, help="轨迹CSV")
    vhm.add_argument("--catalog", help="目录文件")
    vhm.add_argument("--out", help="输出文件,默认标准输出")
    vhm.set_defaults(handler=commands.cmd_vhm)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    命令行主函数

    Args:
        argv: 参数列表,None时使用sys.argv

    Returns:
        退出码
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    if args.command == "validate" and not (args.trace or args.matrix):
        print("mvcache: 错误: validate 至少需要 --trace 或 --matrix", file=sys.stderr)
        return 2

    settings = get_settings()
    updates = {}
    if args.log_level:
        updates["log_level"] = args.log_level
    if args.log_format:
        updates["log_format"] = args.log_format
    setup_logging(settings.observability.model_copy(update=updates))

    try:
        output = args.handler(args, settings)
    except MvCacheError as e:
        print(f"mvcache: 错误: {e}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        print(f"mvcache: 输入无效: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.exception(f"未预期的错误: {e}")
        print(f"mvcache: 未预期的错误: {e}", file=sys.stderr)
        return 1

    out = getattr(args, "out", None)
    if out:
        commands.write_text(out, output)
    else:
        sys.stdout.write(output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
