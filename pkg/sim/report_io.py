"""仿真结果CSV导出"""

from __future__ import annotations

from typing import Sequence, Tuple

from core.formatting import FLOAT_DIGITS, format_decimal
from sim.simulator import SimReport

REPORT_HEADER = "policy,total,hits,hit_rate,promotions,evictions"
INTERVAL_HEADER = "interval,hit_rate"

PolicyReport = Tuple[str, SimReport]


def write_report_csv(reports: Sequence[PolicyReport], digits: int = FLOAT_DIGITS) -> str:
    """每个策略一行"""
    lines = [REPORT_HEADER]
    for name, report in reports:
        lines.append(
            f"{name},{report.total_queries},{report.primary_hits},"
            f"{format_decimal(report.hit_rate, digits)},"
            f"{report.promotions},{report.evictions}"
        )
    return "\n".join(lines) + "\n"


def write_intervals_csv(reports: Sequence[PolicyReport], digits: int = FLOAT_DIGITS) -> str:
    """
    每个间隔的命中率

    只有一个策略时格式为 interval,hit_rate;多个策略时在前面加policy列。
    """
    with_policy = len(reports) > 1
    lines = [f"policy,{INTERVAL_HEADER}" if with_policy else INTERVAL_HEADER]
    for name, report in reports:
        for index, rate in enumerate(report.per_interval_hit_rates):
            row = f"{index},{format_decimal(rate, digits)}"
            lines.append(f"{name},{row}" if with_policy else row)
    return "\n".join(lines) + "\n"
