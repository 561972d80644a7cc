"""
命令行主程序
子命令: combine, measures, audit, sweep, paper-repro, normalize
表格 / CSV / JSON 输出写到 stdout，日志与错误信息写到 stderr
"""
import json
import logging
import sys
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import List, Optional

import pandas as pd
import typer

import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from config.settings import CLI_CONFIG, LOG_FORMAT, LOG_LEVEL, SWEEP_CONFIG
from evidence_audit.models.errors import EvidenceError, InternalConsistencyError, TotalConflictError
from evidence_audit.models.evidence import vacuous
from evidence_audit.models.frame import enumerate_subsets, render
from evidence_audit.models.report import Verdict
from evidence_audit.services.combination_service import combine_many
from evidence_audit.services.consistency_service import ConsistencyService
from evidence_audit.services.measure_service import MeasureKind, mass_from_belief, measure_table
from evidence_audit.services.repro_service import run_reproduction_fixtures
from evidence_audit.services.sweep_service import Family, SweepService
from evidence_audit.utils.evidence_io import (
    dump_document,
    load_evidence,
    parse_subset,
    write_sweep_csv,
)
from evidence_audit.utils.rational import format_rational, parse_rational_list

logger = logging.getLogger(__name__)

EXIT = CLI_CONFIG['exit_codes']

app = typer.Typer(
    name='evidence-audit',
    help="精确有理数 Dempster-Shafer 证据组合与概率一致性审计",
    add_completion=False,
    no_args_is_help=True,
)


class OutputFormat(str, Enum):
    TABLE = 'table'
    CSV = 'csv'
    JSON = 'json'


InputOption = typer.Option(..., "--input", "-i", help="证据文件（JSON 语法）")
FormatOption = typer.Option(OutputFormat(CLI_CONFIG['default_format']), '--format', '-f', help="输出格式")


@app.callback()
def main(verbose: int = typer.Option(0, '--verbose', '-v', count=True, help="-v 输出 INFO，-vv 输出 DEBUG")):
    """配置日志（stderr），stdout 只用于结果输出"""
    level = {0: LOG_LEVEL, 1: 'INFO'}.get(verbose, 'DEBUG')
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _fail(code: int, message: str):
    typer.echo(message, err=True)
    raise typer.Exit(code)


@contextmanager
def exit_codes():
    """异常 -> 稳定的退出码"""
    try:
        yield
    except TotalConflictError as e:
        logger.error(f"完全冲突: {e}")
        _fail(EXIT['total_conflict'], f"错误: {e}")
    except InternalConsistencyError as e:
        logger.error(f"内部一致性检查失败: {e}")
        _fail(EXIT['check_failed'], f"错误: {e}")
    except EvidenceError as e:
        logger.error(f"输入错误: {e}")
        _fail(EXIT['input_error'], f"错误: {e}")


def _emit(rows: List[dict], columns: List[str], fmt: OutputFormat, payload=None) -> None:
    if fmt == OutputFormat.JSON:
        typer.echo(json.dumps(payload if payload is not None else rows, ensure_ascii=False, indent=2))
        return
    frame = pd.DataFrame(rows, columns=columns, dtype=str)
    if fmt == OutputFormat.CSV:
        typer.echo(frame.to_csv(index=False, lineterminator='\n'), nl=False)
    else:
        typer.echo(frame.to_string(index=False))


def _fmt(value) -> str:
    return '' if value is None else format_rational(value)


@app.command('combine')
def combine_command(
    names: Optional[List[str]] = typer.Argument(None, help="要组合的证据体名称，缺省为文件中的全部"),
    input_path: Path = InputOption,
    fmt: OutputFormat = FormatOption,
):
    """Dempster 组合：输出组合焦元、质量、κ 与冲突对"""
    with exit_codes():
        loaded = load_evidence(input_path)
        bodies = loaded.select(names or [])
        result = combine_many(bodies)

        rows = [{'focal': render(s), 'mass': format_rational(m)} for s, m in result.combined.focal]
        if fmt == OutputFormat.JSON:
            _emit(rows, [], fmt, payload=result.model_dump(mode='json'))
            return
        _emit(rows, ['focal', 'mass'], fmt)
        if fmt == OutputFormat.TABLE:
            typer.echo(f"\nκ = {format_rational(result.kappa)}")
            if len(result.steps) > 1:
                for step in result.steps:
                    typer.echo(f"  第 {step.step} 步: κ = {format_rational(step.kappa)}")
            if result.conflict_pairs:
                typer.echo("冲突对:")
                for pair in result.conflict_pairs:
                    typer.echo(f"  {render(pair.left)} ∩ {render(pair.right)} = ∅  "
                               f"[{pair.left_index}×{pair.right_index}] {format_rational(pair.product)}")


@app.command('measures')
def measures_command(
    body: str = typer.Argument(..., help="证据体名称；A+B 表示先组合再计算"),
    subsets: Optional[List[str]] = typer.Argument(None, help="子集，如 a,b  {a,b}  Ω  ∅"),
    input_path: Path = InputOption,
    show_all: bool = typer.Option(False, '--all', help="输出全部 2^n 个子集"),
    invert: bool = typer.Option(False, '--invert', help="由信任度反演质量并核对"),
    fmt: OutputFormat = FormatOption,
):
    """信任度 / 似然度表"""
    with exit_codes():
        loaded = load_evidence(input_path)
        target = combine_many(loaded.select(body.split('+'))).combined
        frame = target.frame

        if show_all:
            chosen = list(enumerate_subsets(frame))
        elif subsets:
            chosen = [parse_subset(frame, text) for text in subsets]
        else:
            chosen = target.focal_sets()

        beliefs = measure_table(target, MeasureKind.BELIEF)
        plausibilities = measure_table(target, MeasureKind.PLAUSIBILITY)
        rows = [
            {'subset': render(s), 'bel': format_rational(beliefs.value(s)), 'pl': format_rational(plausibilities.value(s))}
            for s in chosen
        ]

        inversion = None
        if invert:
            inversion = mass_from_belief(beliefs, method='fast') == target
            if not inversion:
                raise InternalConsistencyError(f"Möbius 反演结果与 {body} 的质量分配不一致")

        payload = {'body': body, 'measures': rows}
        if inversion is not None:
            payload['inversion_matches'] = inversion
        _emit(rows, ['subset', 'bel', 'pl'], fmt, payload=payload)
        if inversion and fmt == OutputFormat.TABLE:
            typer.echo("Möbius 反演: 质量分配一致")


@app.command('audit')
def audit_command(
    names: Optional[List[str]] = typer.Argument(None, help="参与审计的证据体；vacuous 表示空信任证据体"),
    input_path: Path = InputOption,
    fmt: OutputFormat = FormatOption,
):
    """
    逐元素比较组合证据体的 [bel, pl] 与原始证据体推出的概率区间
    退出码: 0 一致，4 存在 Violation，5 约束不可行
    """
    with exit_codes():
        loaded = load_evidence(input_path)
        bodies = []
        for name in names or list(loaded.bodies):
            if name == 'vacuous' and name not in loaded.bodies:
                bodies.append(vacuous(loaded.frame, name='vacuous'))
            else:
                bodies.extend(loaded.select([name]))
        report = ConsistencyService().audit(bodies)

    rows = [
        {
            'element': render(e.subset),
            'mass': format_rational(e.mass),
            'ds_lo': format_rational(e.ds_lower),
            'ds_hi': format_rational(e.ds_upper),
            'p_lo': _fmt(e.probability.lower),
            'p_hi': _fmt(e.probability.upper),
            'verdict': e.verdict.value,
        }
        for e in report.elements
    ]
    _emit(rows, ['element', 'mass', 'ds_lo', 'ds_hi', 'p_lo', 'p_hi', 'verdict'], fmt,
          payload=report.model_dump(mode='json'))
    if fmt == OutputFormat.TABLE:
        typer.echo(f"\nκ = {format_rational(report.kappa)}")
        typer.echo(f"组合证据体结构: {report.combined_structure.tag.value}")

    if not report.feasible or any(e.verdict == Verdict.INFEASIBLE for e in report.elements):
        raise typer.Exit(EXIT['infeasible'])
    if report.has_violation:
        raise typer.Exit(EXIT['inconsistent'])


@app.command('sweep')
def sweep_command(
    family: Family = typer.Argument(..., help="PartitionXY 或 QuasiXXbarY"),
    grid: int = typer.Option(SWEEP_CONFIG['default_grid'], '--grid', '-n', help="网格密度 N，参数取 i/N"),
    output: Optional[Path] = typer.Option(None, '--output', '-o', help="CSV 输出路径，缺省写到 stdout"),
    xbar_slices: Optional[str] = typer.Option(None, '--xbar-slices', help="x̄ 切片，如 0,1/4,1/2"),
    full_xbar: bool = typer.Option(False, '--full-xbar', help="x̄ 也取 i/N 全网格"),
    workers: Optional[int] = typer.Option(None, '--workers', '-w', help="并行进程数"),
    fmt: OutputFormat = typer.Option(OutputFormat.CSV, '--format', '-f', help="输出格式"),
):
    """参数族网格扫描"""
    with exit_codes():
        try:
            slices = parse_rational_list(xbar_slices) if xbar_slices else None
        except ValueError as e:
            raise EvidenceError(f"--xbar-slices 无法解析: {e}") from e
        sweep_service = SweepService(workers=workers)
        result = sweep_service.sweep(family, grid, xbar_slices=slices, full_xbar=full_xbar)

    if fmt == OutputFormat.JSON:
        text = result.model_dump_json(indent=2) + '\n'
        if output is not None:
            output.write_text(text, encoding='utf-8')
        else:
            typer.echo(text, nl=False)
    else:
        text = write_sweep_csv(result, output)
        if output is None:
            typer.echo(text, nl=False)

    points = ' '.join(
        f"(x={format_rational(p.x)}" + (f", x̄={format_rational(p.xbar)}" if p.xbar is not None else '')
        + f", y={format_rational(p.y)})"
        for p in result.summary
    )
    footer = (
        f"全 ExactMatch 网格点 {len(result.summary)}/{len(result.points)}: {points or '无'}\n"
        f"等价刻画成立: {result.characterization_holds()}"
    )
    # CSV 写到 stdout 时摘要改写到 stderr
    typer.echo(footer, err=output is None)


@app.command('paper-repro')
def paper_repro_command(fmt: OutputFormat = FormatOption):
    """运行内置复现用例，全部通过时退出码为 0"""
    outcomes = run_reproduction_fixtures()
    rows = [
        {'fixture': o.name, 'expected': o.expected, 'actual': o.actual, 'status': '✅' if o.passed else '❌'}
        for o in outcomes
    ]
    _emit(rows, ['fixture', 'expected', 'actual', 'status'], fmt,
          payload=[o.model_dump() for o in outcomes])
    passed = sum(1 for o in outcomes if o.passed)
    if fmt == OutputFormat.TABLE:
        typer.echo(f"\n{passed}/{len(outcomes)} 通过")
    if passed != len(outcomes):
        raise typer.Exit(EXIT['check_failed'])


@app.command('normalize')
def normalize_command(input_path: Path = InputOption):
    """以规范形式重新输出证据文件（集合排序、分数约分）"""
    with exit_codes():
        text = dump_document(load_evidence(input_path))
    typer.echo(text, nl=False)


if __name__ == "__main__":
    app()
