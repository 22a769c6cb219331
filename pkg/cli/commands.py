"""
子命令实现

每个子命令接收解析后的参数与应用配置,返回要写到标准输出(或 --out)
的文本;错误以 MvCacheError 子类抛出,由 main 转换为退出码。
"""

from __future__ import annotations

import argparse
import logging
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Type

from core.config import AppSettings
from core.container import Container
from core.exceptions import (
    CatalogMismatch,
    EmptyInputError,
    InputNotFound,
    MatrixFormatError,
    MvCacheError,
    TraceFormatError,
)
from core.formatting import format_decimal, format_row
from estimator.episodes import extract_episodes
from estimator.matrix_io import read_matrix_csv, write_matrix_csv, write_vector_csv
from markov.engine import StateVector, TransitionMatrix, check_irreducible, trajectory
from policy import TierState, format_recommendation, recommend, Recommendation
from sim import (
    WorkloadSpec,
    compare_policies,
    generate_workload,
    write_intervals_csv,
    write_report_csv,
)
from views.catalog import QueryTrace, ViewCatalog
from views.trace_io import format_vhm, parse_trace

logger = logging.getLogger(__name__)


# ==================== 输入输出辅助 ====================


def read_bytes(path: str) -> bytes:
    """
    读取输入文件

    Raises:
        InputNotFound: 文件不存在或不可读
    """
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise InputNotFound(path) from e


def read_text(path: str, error: Type[MvCacheError]) -> str:
    """
    读取UTF-8文本文件

    Raises:
        InputNotFound: 文件不存在或不可读
        error: 内容不是合法的UTF-8
    """
    try:
        return read_bytes(path).decode("utf-8")
    except UnicodeDecodeError as e:
        raise error(f"{path} 不是合法的UTF-8文本: 第 {e.start} 字节") from e


def write_text(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8", newline="\n")


def load_catalog(path: Optional[str]) -> Optional[ViewCatalog]:
    """读取目录文件,path为None时返回None"""
    if path is None:
        return None
    text = read_text(path, TraceFormatError)
    try:
        return ViewCatalog.from_sidecar(text.splitlines())
    except ValueError as e:
        raise CatalogMismatch(f"目录文件 {path} 无效: {e}") from e


def load_trace(path: str, catalog: Optional[ViewCatalog] = None) -> QueryTrace:
    trace = parse_trace(read_bytes(path), catalog=catalog)
    logger.info(f"轨迹读取完成: {path}, events={len(trace)}, views={len(trace.catalog)}")
    return trace


def load_matrix(path: str) -> Tuple[ViewCatalog, TransitionMatrix]:
    return read_matrix_csv(read_text(path, MatrixFormatError))


def parse_supply_rows(
    specs: Optional[Sequence[str]], catalog: ViewCatalog
) -> Dict[int, Tuple[Fraction, ...]]:
    """
    解析 --supply-row NAME=p1,p2,... 参数

    Raises:
        MatrixFormatError: 格式错误、个数不对、有负值或和不为1
        CatalogMismatch: 视图名不在目录中
    """
    overrides: Dict[int, Tuple[Fraction, ...]] = {}
    n = len(catalog)
    for spec in specs or ():
        name, sep, values = spec.partition("=")
        if not sep or not name:
            raise MatrixFormatError(f"--supply-row 格式应为 NAME=p1,p2,...: {spec}")
        index = catalog.index(name.strip())
        try:
            row = tuple(Fraction(v.strip()) for v in values.split(","))
        except (ValueError, ZeroDivisionError) as e:
            raise MatrixFormatError(f"--supply-row {name}: 数值无法解析") from e
        if len(row) != n:
            raise MatrixFormatError(f"--supply-row {name}: 需要 {n} 个值,实际 {len(row)} 个")
        if any(p < 0 for p in row) or sum(row) != 1:
            raise MatrixFormatError(f"--supply-row {name}: 概率必须非负且和为1")
        overrides[index] = row
    return overrides


# ==================== 配置覆盖 ====================


def _updates(args: argparse.Namespace, names: Sequence[str]) -> Dict[str, object]:
    values = {name: getattr(args, name, None) for name in names}
    return {k: v for k, v in values.items() if v is not None}


def invocation_settings(args: argparse.Namespace, settings: AppSettings) -> AppSettings:
    """命令行参数只覆盖本次调用,不修改全局配置"""
    markov_updates = _updates(args, ("tol", "max_iter", "damping"))
    if getattr(args, "auto_guard", False):
        markov_updates["auto_guard"] = True
    simulation_updates = _updates(
        args, ("capacity", "retrain_interval", "seed", "window", "tier_mode")
    )
    if getattr(args, "require_gain", False):
        simulation_updates["require_gain"] = True
    return settings.model_copy(
        update={
            "markov": settings.markov.model_copy(update=markov_updates),
            "estimator": settings.estimator.model_copy(
                update=_updates(args, ("default_row", "weighting"))
            ),
            "simulation": settings.simulation.model_copy(update=simulation_updates),
        }
    )


def make_container(args: argparse.Namespace, settings: AppSettings) -> Container:
    return Container(invocation_settings(args, settings))


def start_vector(
    spec: Optional[str], catalog: ViewCatalog, container: Container
) -> StateVector:
    """--start 取值 uniform 或 unit:<view>,未给出时按 MARKOV_START 配置"""
    n = len(catalog)
    if spec is None:
        return container.get_analyzer().start_vector(n)
    if spec == "uniform":
        return StateVector.uniform(n)
    return StateVector.unit(n, catalog.index(spec.split(":", 1)[1]))


# ==================== 子命令 ====================


def cmd_estimate(args: argparse.Namespace, settings: AppSettings) -> str:
    """由轨迹估计初始概率矩阵"""
    trace = load_trace(args.trace, load_catalog(args.catalog))
    if not len(trace):
        raise EmptyInputError(f"轨迹为空: {args.trace}")

    analyzer = make_container(args, settings).get_analyzer()
    matrix = analyzer.estimate(trace, parse_supply_rows(args.supply_row, trace.catalog))
    for name, provenance in zip(trace.catalog.names, matrix.row_provenance):
        logger.info(f"  {name}: {provenance}")
    return write_matrix_csv(matrix, trace.catalog, settings.float_digits)


def cmd_steady(args: argparse.Namespace, settings: AppSettings) -> str:
    """求转移矩阵的稳态向量"""
    catalog, matrix = load_matrix(args.matrix)
    container = make_container(args, settings)
    analyzer = container.get_analyzer()
    digits = settings.float_digits
    v0 = start_vector(args.start, catalog, container)

    if args.trajectory is not None:
        prepared = analyzer.prepare(matrix, strict=False)
        lines = [f"step,{','.join(catalog.names)}"]
        for k, v in enumerate(trajectory(v0, prepared, args.trajectory)):
            lines.append(f"{k},{format_row(v.tolist(), digits)}")
        return "\n".join(lines) + "\n"

    if args.exact:
        vector = analyzer.exact(matrix)
        text = write_vector_csv(vector, catalog, digits, exact=True) + "# method: exact\n"
        if vector.exact is not None:
            text += f"# rational: {','.join(str(p) for p in vector.exact)}\n"
        return text

    result = analyzer.steady(matrix, start=v0, strict=True)
    return write_vector_csv(result.vector, catalog, digits) + (
        f"# iterations: {result.iterations}, "
        f"residual: {format_decimal(result.residual, 3)}, "
        f"converged: {str(result.converged).lower()}\n"
    )


def _union_catalog(traces: Sequence[QueryTrace], extra: Sequence[str]) -> ViewCatalog:
    names: List[str] = []
    for trace in traces:
        names.extend(trace.catalog.names)
    names.extend(extra)
    return ViewCatalog(tuple(dict.fromkeys(names)))


def _rebase(trace: QueryTrace, catalog: ViewCatalog) -> QueryTrace:
    return QueryTrace.from_view_names(trace.view_names(), catalog, trace.query_ids)


def cmd_recommend(args: argparse.Namespace, settings: AppSettings) -> str:
    """
    由辅存/主存轨迹给出替换建议

    没有 --catalog 时,目录为两条轨迹与 --primary 中视图按首次出现顺序的并集。
    没有 --primary-trace 时,淘汰也使用辅存轨迹的稳态向量。
    """
    primary_names = [name.strip() for name in (args.primary or "").split(",") if name.strip()]
    catalog = load_catalog(args.catalog)
    secondary = load_trace(args.secondary_trace, catalog)
    primary_trace = load_trace(args.primary_trace, catalog) if args.primary_trace else None

    if catalog is None:
        traces = [t for t in (secondary, primary_trace) if t is not None]
        catalog = _union_catalog(traces, primary_names)
        secondary = _rebase(secondary, catalog)
        if primary_trace is not None:
            primary_trace = _rebase(primary_trace, catalog)

    container = make_container(args, settings)
    capacity = container.settings.simulation.capacity
    tier = TierState.initial(catalog, capacity, [catalog.index(name) for name in primary_names])

    if not len(secondary):
        logger.info("辅存轨迹为空,不做替换")
        return format_recommendation(Recommendation.no_action(), catalog) + "\n"

    analyzer = container.get_analyzer()
    overrides = parse_supply_rows(args.supply_row, catalog)
    pi_secondary = analyzer.analyze_trace(secondary, row_overrides=overrides, strict=True)

    pi_primary = None
    if primary_trace is not None and tier.is_full and tier.primary:
        if not len(primary_trace):
            raise EmptyInputError("主存已满但主存轨迹为空,无法选择淘汰视图")
        pi_primary = analyzer.analyze_trace(
            primary_trace, row_overrides=overrides, strict=True
        ).result.vector

    rec = recommend(pi_secondary.result.vector, pi_primary, tier, args.require_gain)
    return format_recommendation(rec, catalog) + "\n"


def cmd_simulate(args: argparse.Namespace, settings: AppSettings) -> str:
    """运行仿真并输出结果CSV"""
    seed = args.seed
    if args.workload:
        spec = WorkloadSpec.from_file(args.workload)
        trace = generate_workload(spec)
        if seed is None:
            seed = spec.seed
    else:
        trace = load_trace(args.trace, load_catalog(args.catalog))

    container = make_container(args, settings)
    simulation = container.settings.simulation
    catalog = trace.catalog
    primary_names = [name.strip() for name in (args.primary or "").split(",") if name.strip()]
    tier = TierState.initial(
        catalog, simulation.capacity, [catalog.index(name) for name in primary_names]
    )
    config = container.get_sim_config(tier, seed=seed)

    policies = args.policy or [simulation.policy]
    reports = compare_policies(trace, config, policies)
    digits = settings.float_digits
    if args.intervals_out:
        write_text(args.intervals_out, write_intervals_csv(reports, digits))
    return write_report_csv(reports, digits)


def cmd_validate(args: argparse.Namespace, settings: AppSettings) -> str:
    """检查轨迹与矩阵文件"""
    lines: List[str] = []
    if args.trace:
        trace = load_trace(args.trace, load_catalog(args.catalog))
        if not len(trace):
            raise EmptyInputError(f"轨迹为空: {args.trace}")
        extraction = extract_episodes(trace)
        lines.append(
            f"trace: ok events={len(trace)} views={len(trace.catalog)} "
            f"episodes={len(extraction.episodes)} discarded={extraction.discarded}"
        )
    if args.matrix:
        catalog, matrix = load_matrix(args.matrix)
        matrix.check_stochastic(settings.markov.stochastic_tolerance)
        irreducible = str(check_irreducible(matrix)).lower()
        lines.append(f"matrix: ok n={len(catalog)} irreducible={irreducible}")
    return "\n".join(lines) + "\n"


def cmd_vhm(args: argparse.Namespace, settings: AppSettings) -> str:
    """输出视图命中矩阵"""
    return format_vhm(load_trace(args.trace, load_catalog(args.catalog)))
