"""
仿真模块
合成负载生成、两级缓存仿真与结果导出
"""

from sim.report_io import write_intervals_csv, write_report_csv
from sim.simulator import (
    MarkovParams,
    SimConfig,
    SimReport,
    compare_policies,
    run_simulation,
)
from sim.workload import WorkloadSpec, generate_workload

__all__ = [
    "write_intervals_csv",
    "write_report_csv",
    "MarkovParams",
    "SimConfig",
    "SimReport",
    "compare_policies",
    "run_simulation",
    "WorkloadSpec",
    "generate_workload",
]
