"""
测试命令行: 输出格式与退出码
"""

import json

import pytest
from cli.main import build_parser, main
from core.config import AppSettings, MarkovSettings

pytestmark = pytest.mark.cli

SUPPLY = ["--supply-row", "V2=1/5,7/10,1/10", "--supply-row", "V3=1/10,1/10,4/5"]


@pytest.fixture
def run(capsys):
    """运行命令行并返回 (退出码, stdout, stderr)"""

    def _run(*argv):
        code = main([str(a) for a in argv])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return _run


@pytest.fixture
def trace_file(fixtures_dir):
    return fixtures_dir / "example_trace.csv"


@pytest.fixture
def matrix_file(fixtures_dir):
    return fixtures_dir / "example_matrix.csv"


def parse_vector(out):
    """取输出的第二行(向量值)"""
    return [float(v) for v in out.splitlines()[1].split(",")]


class TestParser:
    """测试参数解析"""

    def test_subcommand_required(self, run):
        """测试缺少子命令"""
        code, _, _ = run()
        assert code == 2

    def test_unknown_policy(self, run, trace_file):
        """测试未知策略名"""
        code, _, err = run("simulate", "--trace", trace_file, "--policy", "fifo")
        assert code == 2
        assert "fifo" in err

    def test_damping_range(self, run, matrix_file):
        """测试阻尼系数范围"""
        code, _, _ = run("steady", "--matrix", matrix_file, "--damping", "1.5")
        assert code == 2

    def test_validate_needs_input(self, run):
        """测试validate至少需要一个文件"""
        code, _, err = run("validate")
        assert code == 2
        assert "--trace" in err

    def test_parser_defaults(self):
        """测试解析结果"""
        args = build_parser().parse_args(["steady", "--matrix", "m.csv", "--start", "unit:V2"])
        assert args.start == "unit:V2"
        assert args.tol is None


class TestEstimate:
    """测试 estimate 子命令"""

    def test_supplied_rows_golden(self, run, trace_file, matrix_file):
        """测试给定V2、V3行后输出与示例矩阵逐字节一致"""
        code, out, _ = run("estimate", "--trace", trace_file, *SUPPLY)

        assert code == 0
        assert out == matrix_file.read_text(encoding="utf-8")

    def test_default_rows(self, run, trace_file):
        """测试默认行"""
        code, out, _ = run("estimate", "--trace", trace_file)

        assert code == 0
        assert out.splitlines() == [
            "# views: V1,V2,V3",
            "0.708333333333,0.125,0.166666666667",
            "0.333333333333,0.333333333333,0.333333333333",
            "0.333333333333,0.333333333333,0.333333333333",
        ]

    def test_out_file(self, run, trace_file, tmp_path):
        """测试写入 --out 文件"""
        target = tmp_path / "out" / "matrix.csv"
        code, out, _ = run("estimate", "--trace", trace_file, "--out", target, *SUPPLY)

        assert code == 0
        assert out == ""
        assert target.read_text(encoding="utf-8").startswith("# views: V1,V2,V3\n")

    def test_deterministic(self, run, trace_file):
        """测试重复运行输出逐字节一致"""
        first = run("estimate", "--trace", trace_file)[:2]
        assert run("estimate", "--trace", trace_file)[:2] == first

    def test_bad_supply_row(self, run, trace_file):
        """测试给定行和不为1"""
        code, _, _ = run("estimate", "--trace", trace_file, "--supply-row", "V2=1/2,1/3,0")
        assert code == 2

    def test_unknown_supply_view(self, run, trace_file):
        """测试给定行的视图不在目录中"""
        code, _, _ = run("estimate", "--trace", trace_file, "--supply-row", "V9=1,0,0")
        assert code == 6


class TestSteady:
    """测试 steady 子命令"""

    def test_iterative(self, run, matrix_file):
        """测试默认容差下接近 12/37, 10/37, 15/37"""
        code, out, _ = run("steady", "--matrix", matrix_file)

        assert code == 0
        assert parse_vector(out) == pytest.approx([12 / 37, 10 / 37, 15 / 37], abs=1e-6)
        assert "converged: true" in out.splitlines()[2]

    def test_coarse_tolerance(self, run, matrix_file):
        """测试tol=5e-3时接近 [0.33, 0.27, 0.40]"""
        code, out, _ = run("steady", "--matrix", matrix_file, "--tol", "5e-3")

        assert code == 0
        assert parse_vector(out) == pytest.approx([0.33, 0.27, 0.40], abs=5e-3)

    def test_exact(self, run, matrix_file):
        """测试精确求解输出"""
        code, out, _ = run("steady", "--matrix", matrix_file, "--exact")

        assert code == 0
        assert out == (
            "# views: V1,V2,V3\n"
            "0.324324324324,0.27027027027,0.405405405405\n"
            "# method: exact\n"
            "# rational: 12/37,10/37,15/37\n"
        )

    def test_trajectory(self, run, matrix_file):
        """测试前8步迭代向量"""
        code, out, _ = run("steady", "--matrix", matrix_file, "--trajectory", "8")
        lines = out.splitlines()

        assert code == 0
        assert lines[0] == "step,V1,V2,V3"
        assert lines[1] == "0,1,0,0"
        assert len(lines) == 10
        last = [float(v) for v in lines[-1].split(",")[1:]]
        assert last == pytest.approx([0.331, 0.269, 0.400], abs=2.5e-3)

    def test_start_uniform(self, run, matrix_file):
        """测试均匀初始向量收敛到同一稳态"""
        code, out, _ = run("steady", "--matrix", matrix_file, "--start", "uniform")

        assert code == 0
        assert parse_vector(out) == pytest.approx([12 / 37, 10 / 37, 15 / 37], abs=1e-6)

    def test_start_from_settings(self, run, matrix_file, mocker):
        """测试未给出 --start 时使用 MARKOV_START 配置"""
        settings = AppSettings(markov=MarkovSettings(start="uniform"))
        mocker.patch("cli.main.get_settings", return_value=settings)
        code, out, _ = run("steady", "--matrix", matrix_file, "--trajectory", "0")

        assert code == 0
        assert out.splitlines()[1] == "0,0.333333333333,0.333333333333,0.333333333333"

    def test_non_stochastic(self, run, fixtures_dir):
        """测试非行随机矩阵退出码4"""
        code, _, _ = run("steady", "--matrix", fixtures_dir / "non_stochastic_matrix.csv")
        assert code == 4

    def test_reducible(self, run, fixtures_dir):
        """测试可约链退出码5"""
        code, _, err = run("steady", "--matrix", fixtures_dir / "identity_matrix.csv")

        assert code == 5
        assert err

    def test_auto_guard(self, run, fixtures_dir):
        """测试自动保护后可约链收敛到均匀分布"""
        code, out, _ = run(
            "steady", "--matrix", fixtures_dir / "identity_matrix.csv", "--auto-guard", "--tol", "1e-12"
        )

        assert code == 0
        assert parse_vector(out) == pytest.approx([1 / 3] * 3, abs=1e-9)

    def test_missing_file(self, run, tmp_path):
        """测试文件不存在时退出码2且错误信息包含路径"""
        missing = tmp_path / "nope.csv"
        code, _, err = run("steady", "--matrix", missing)

        assert code == 2
        assert str(missing) in err


class TestRecommend:
    """测试 recommend 子命令"""

    def test_promote_v3(self, run, trace_file):
        """测试给定V2、V3行时提升V3"""
        code, out, _ = run("recommend", "--secondary-trace", trace_file, "--capacity", "1", *SUPPLY)

        assert code == 0
        assert out.startswith("promote=V3, evict=-, reason=capacity_free, promote_score=0.4054")
        assert out.endswith("evict_score=-\n")

    def test_default_rows_promote_v1(self, run, trace_file):
        """测试只用默认行时提升V1"""
        code, out, _ = run("recommend", "--secondary-trace", trace_file, "--capacity", "1")

        assert code == 0
        assert out.startswith("promote=V1, evict=-, reason=capacity_free")

    def test_swap_with_primary(self, run, trace_file, tmp_path):
        """测试主存已满时按辅存稳态向量淘汰"""
        code, out, _ = run(
            "recommend", "--secondary-trace", trace_file, "--primary", "V2",
            "--capacity", "1", *SUPPLY,
        )

        assert code == 0
        assert out.startswith("promote=V3, evict=V2, reason=swap")

    def test_empty_secondary(self, run, tmp_path):
        """测试辅存轨迹为空时不做替换"""
        empty = tmp_path / "empty.csv"
        empty.write_text("query_id,view_id\n", encoding="utf-8")
        code, out, _ = run("recommend", "--secondary-trace", empty, "--capacity", "1")

        assert code == 0
        assert out.startswith("promote=-, evict=-, reason=no_action")

    def test_catalog_mismatch(self, run, trace_file, tmp_path):
        """测试轨迹中的视图不在目录中"""
        catalog = tmp_path / "catalog.txt"
        catalog.write_text("V1\nV2\n", encoding="utf-8")
        code, _, _ = run("recommend", "--secondary-trace", trace_file, "--catalog", catalog)

        assert code == 6

    def test_capacity_violation(self, run, trace_file):
        """测试主存视图数超过容量"""
        code, _, _ = run(
            "recommend", "--secondary-trace", trace_file, "--primary", "V1,V2", "--capacity", "1"
        )
        assert code == 6


class TestInputErrors:
    """测试输入错误的退出码"""

    def test_malformed_trace(self, run, tmp_path):
        """测试字段数错误"""
        bad = tmp_path / "bad.csv"
        bad.write_text("Q1,V1\nQ2,V1,extra\n", encoding="utf-8")
        code, _, err = run("estimate", "--trace", bad)

        assert code == 2
        assert err

    def test_bad_header(self, run, tmp_path):
        """测试表头不匹配"""
        bad = tmp_path / "bad.csv"
        bad.write_text("query_id,view\nQ1,V1\n", encoding="utf-8")
        code, _, _ = run("estimate", "--trace", bad)
        assert code == 2

    def test_empty_trace(self, run, tmp_path):
        """测试空轨迹退出码3"""
        empty = tmp_path / "empty.csv"
        empty.write_text("", encoding="utf-8")
        code, _, _ = run("estimate", "--trace", empty)
        assert code == 3

    def test_catalog_file(self, run, trace_file, fixtures_dir):
        """测试使用目录文件"""
        code, out, _ = run(
            "estimate", "--trace", trace_file, "--catalog", fixtures_dir / "example_catalog.txt"
        )

        assert code == 0
        assert out.startswith("# views: V1,V2,V3\n")

    def test_invalid_utf8_matrix(self, run, tmp_path):
        """测试矩阵文件不是UTF-8时退出码2"""
        bad = tmp_path / "matrix.csv"
        bad.write_bytes(b"# views: V1\n\xff\n")
        code, _, err = run("steady", "--matrix", bad)

        assert code == 2
        assert "UTF-8" in err

    def test_invalid_utf8_catalog(self, run, trace_file, tmp_path):
        """测试目录文件不是UTF-8时退出码2"""
        bad = tmp_path / "catalog.txt"
        bad.write_bytes(b"\xffV1\nV2\nV3\n")
        code, _, err = run("estimate", "--trace", trace_file, "--catalog", bad)

        assert code == 2
        assert "UTF-8" in err


class TestValidateAndVhm:
    """测试 validate 与 vhm 子命令"""

    def test_validate_trace_and_matrix(self, run, trace_file, matrix_file):
        """测试检查通过"""
        code, out, _ = run("validate", "--trace", trace_file, "--matrix", matrix_file)

        assert code == 0
        assert out == (
            "trace: ok events=7 views=3 episodes=2 discarded=0\n"
            "matrix: ok n=3 irreducible=true\n"
        )

    def test_validate_reducible(self, run, fixtures_dir):
        """测试可约矩阵只报告不报错"""
        code, out, _ = run("validate", "--matrix", fixtures_dir / "identity_matrix.csv")

        assert code == 0
        assert out == "matrix: ok n=3 irreducible=false\n"

    def test_validate_non_stochastic(self, run, fixtures_dir):
        """测试非行随机矩阵"""
        code, _, _ = run("validate", "--matrix", fixtures_dir / "non_stochastic_matrix.csv")
        assert code == 4

    def test_vhm(self, run, trace_file):
        """测试视图命中矩阵输出"""
        code, out, _ = run("vhm", "--trace", trace_file)
        lines = out.splitlines()

        assert code == 0
        assert lines[0] == "query_id,V1,V2,V3"
        assert lines[1] == "Q1,HIT,MISS,MISS"
        assert lines[4] == "Q4,MISS,HIT,MISS"
        assert len(lines) == 8


class TestSimulate:
    """测试 simulate 子命令"""

    @pytest.fixture
    def small_workload(self, fixtures_dir, tmp_path):
        data = json.loads((fixtures_dir / "example_workload.json").read_text(encoding="utf-8"))
        data["n_queries"] = 2000
        path = tmp_path / "workload.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    def test_report(self, run, small_workload, tmp_path):
        """测试多策略对比报告与间隔文件"""
        intervals = tmp_path / "intervals.csv"
        code, out, _ = run(
            "simulate", "--workload", small_workload, "--policy", "markov,lru,lfu,random",
            "--capacity", "1", "--retrain-interval", "500", "--intervals-out", intervals,
        )
        lines = out.splitlines()

        assert code == 0
        assert lines[0] == "policy,total,hits,hit_rate,promotions,evictions"
        assert [line.split(",")[0] for line in lines[1:]] == ["markov", "lru", "lfu", "random"]
        assert all(line.split(",")[1] == "2000" for line in lines[1:])

        interval_lines = intervals.read_text(encoding="utf-8").splitlines()
        assert interval_lines[0] == "policy,interval,hit_rate"
        assert len(interval_lines) == 1 + 4 * 4

    def test_reproducible(self, run, small_workload):
        """测试相同种子的两次运行逐字节一致"""
        argv = ("simulate", "--workload", small_workload, "--policy", "random", "--capacity", "1")
        assert run(*argv)[:2] == run(*argv)[:2]

    @pytest.mark.slow
    def test_example_markov_hit_rate(self, run, fixtures_dir):
        """测试示例负载上马氏策略的命中率在[0.30, 0.45]内"""
        code, out, _ = run(
            "simulate", "--workload", fixtures_dir / "example_workload.json",
            "--policy", "markov", "--capacity", "1",
        )
        fields = out.splitlines()[1].split(",")

        assert code == 0
        assert fields[:2] == ["markov", "50000"]
        assert 0.30 <= float(fields[3]) <= 0.45

    def test_from_trace(self, run, trace_file):
        """测试直接回放轨迹文件"""
        code, out, _ = run(
            "simulate", "--trace", trace_file, "--policy", "lfu", "--primary", "V1",
            "--capacity", "1", "--retrain-interval", "3",
        )

        assert code == 0
        assert out.splitlines()[1].startswith("lfu,7,")

    def test_empty_workload(self, run, fixtures_dir):
        """测试0个查询得到空报告"""
        code, out, _ = run(
            "simulate", "--workload", fixtures_dir / "empty_workload.json", "--policy", "lru",
            "--capacity", "1",
        )

        assert code == 0
        assert out.splitlines()[1] == "lru,0,0,0,0,0"

    def test_invalid_workload(self, run, tmp_path):
        """测试负载规格不合法"""
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"n_views": 2, "ground_truth": [[1]], "n_queries": 5}), encoding="utf-8")
        code, _, _ = run("simulate", "--workload", bad)
        assert code == 2


class TestErrorHandling:
    """测试未预期错误与日志输出"""

    def test_unexpected_error(self, run, trace_file, mocker):
        """测试未预期异常退出码1"""
        mocker.patch("cli.commands.cmd_vhm", side_effect=RuntimeError("boom"))
        code, out, err = run("vhm", "--trace", trace_file)

        assert code == 1
        assert out == ""
        assert "boom" in err

    def test_json_logs_go_to_stderr(self, run, trace_file):
        """测试JSON日志只写到stderr"""
        code, out, err = run("--log-level", "INFO", "--log-format", "json", "vhm", "--trace", trace_file)

        assert code == 0
        assert out.startswith("query_id,V1,V2,V3\n")
        assert '"message"' in err
