"""
参数族与网格扫描
PartitionXY:  A = {a ↦ x, {b,c} ↦ 1-x},  B = {{a,b} ↦ y, c ↦ 1-y}
QuasiXXbarY:  A = {a ↦ x, {b,c} ↦ x̄, Ω ↦ 1-x-x̄},  B 同上
网格点取精确有理数 i/N，逐点运行组合与审计
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from config.settings import SWEEP_CONFIG
from evidence_audit.models.errors import (
    InternalConsistencyError,
    ParameterRangeError,
    TotalConflictError,
)
from evidence_audit.models.evidence import BodyOfEvidence, make_body
from evidence_audit.models.frame import Frame, make_frame, render, singletons, subset
from evidence_audit.models.report import Rational, Verdict
from evidence_audit.services.combination_service import combine
from evidence_audit.services.consistency_service import audit, build_constraints, probability_bounds
from evidence_audit.utils.rational import parse_rational_list

logger = logging.getLogger(__name__)

FAMILY_LABELS = ['a', 'b', 'c']


class Family(str, Enum):
    PARTITION_XY = 'PartitionXY'
    QUASI_XXBAR_Y = 'QuasiXXbarY'
    CUSTOM = 'Custom'


class FamilySpec(BaseModel):
    """参数族与参数点；Custom 族直接携带两个证据体"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    family: Family
    parameters: Dict[str, Rational] = {}
    bodies: Optional[Tuple[BodyOfEvidence, BodyOfEvidence]] = None

    def param(self, name: str) -> Fraction:
        try:
            return Fraction(self.parameters[name])
        except KeyError:
            raise ParameterRangeError(f"{self.family.value} 缺少参数 {name}") from None


class SymbolicCheck(BaseModel):
    """闭式解与通用组合结果的对照"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    closed_form: Dict[str, Rational]
    combined: Dict[str, Rational]
    kappa: Rational


class SweepRow(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    element: str
    ds_lo: Optional[Rational] = None
    ds_hi: Optional[Rational] = None
    p_lo: Optional[Rational] = None
    p_hi: Optional[Rational] = None
    verdict: Verdict


class SweepPoint(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x: Rational
    xbar: Optional[Rational] = None
    y: Rational
    kappa: Rational
    rows: List[SweepRow]
    pc_equation_holds: Optional[bool] = None  # m({c}) = 1 - y；κ = 1 时为 None

    @property
    def all_exact(self) -> bool:
        return all(row.verdict == Verdict.EXACT_MATCH for row in self.rows)


class SweepResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    family: Family
    grid_density: int
    points: List[SweepPoint]

    @property
    def summary(self) -> List[SweepPoint]:
        """全部元素都是 ExactMatch 的网格点"""
        return [p for p in self.points if p.all_exact]

    def characterization_holds(self) -> bool:
        """
        PartitionXY: 全 ExactMatch ⇔ x = 0 或 y = 1 ⇔ κ = 0
        QuasiXXbarY: m({c}) = 1 - y ⇔ x = 0 或 y = 0 或 y = 1（κ = 1 的点除外）
        """
        for p in self.points:
            if self.family == Family.PARTITION_XY:
                expected = p.x == 0 or p.y == 1
                if p.all_exact != expected or (p.kappa == 0) != expected:
                    return False
            elif p.pc_equation_holds is not None:
                if p.pc_equation_holds != (p.x == 0 or p.y == 0 or p.y == 1):
                    return False
        return True


def _family_frame() -> Frame:
    return make_frame(FAMILY_LABELS)


def _check_unit(name: str, value: Fraction) -> None:
    if not 0 <= value <= 1:
        raise ParameterRangeError(f"参数 {name} = {value} 超出 [0, 1]")


def instantiate(spec: FamilySpec) -> Tuple[BodyOfEvidence, BodyOfEvidence]:
    """按参数构造两个证据体，零质量焦元被丢弃"""
    if spec.family == Family.CUSTOM:
        if spec.bodies is None:
            raise ParameterRangeError("Custom 族需要直接提供两个证据体")
        return spec.bodies

    frame = _family_frame()
    a, b, c = (subset(frame, [label]) for label in FAMILY_LABELS)
    x, y = spec.param('x'), spec.param('y')
    _check_unit('x', x)
    _check_unit('y', y)

    if spec.family == Family.PARTITION_XY:
        body_a = make_body(frame, [(a, x), (b | c, 1 - x)], name='A')
    else:
        xbar = spec.param('xbar')
        _check_unit('xbar', xbar)
        if x + xbar > 1:
            raise ParameterRangeError(f"x + x̄ = {x + xbar} 超过 1")
        body_a = make_body(frame, [(a, x), (b | c, xbar), (frame.omega, 1 - x - xbar)], name='A')

    body_b = make_body(frame, [(a | b, y), (c, 1 - y)], name='B')
    return body_a, body_b


def closed_forms(spec: FamilySpec) -> Tuple[Dict[str, Fraction], Fraction]:
    """组合质量的闭式解（按子集记号索引）与 κ = x(1-y)"""
    x, y = spec.param('x'), spec.param('y')
    kappa = x * (1 - y)
    denominator = 1 - kappa
    if denominator == 0:
        raise TotalConflictError("x(1-y) = 1，闭式解无定义")

    if spec.family == Family.PARTITION_XY:
        forms = {
            '{a}': x * y / denominator,
            '{b}': (1 - x) * y / denominator,
            '{c}': (1 - x) * (1 - y) / denominator,
        }
    else:
        xbar = spec.param('xbar')
        forms = {
            '{a}': x * y / denominator,
            '{b}': xbar * y / denominator,
            '{c}': (1 - x) * (1 - y) / denominator,
            '{a,b}': (1 - x - xbar) * y / denominator,
        }
    return forms, kappa


def symbolic_check(spec: FamilySpec) -> SymbolicCheck:
    """闭式解与 combine() 的输出必须严格相等"""
    body_a, body_b = instantiate(spec)
    result = combine(body_a, body_b)
    combined = {render(s): m for s, m in result.combined.focal}

    if spec.family == Family.CUSTOM:
        return SymbolicCheck(closed_form={}, combined=combined, kappa=result.kappa)

    forms, kappa = closed_forms(spec)
    expected = {name: value for name, value in forms.items() if value != 0}
    if expected != combined or kappa != result.kappa:
        raise InternalConsistencyError(
            f"闭式解与组合结果不一致: 闭式 {expected}, κ = {kappa}; 组合 {combined}, κ = {result.kappa}"
        )
    return SymbolicCheck(closed_form=forms, combined=combined, kappa=result.kappa)


def evaluate_point(family: Family, x: Fraction, xbar: Optional[Fraction], y: Fraction) -> SweepPoint:
    """单个网格点：闭式校验 + 审计；κ = 1 的点记为 TotalConflict"""
    parameters = {'x': x, 'y': y}
    if xbar is not None:
        parameters['xbar'] = xbar
    spec = FamilySpec(family=family, parameters=parameters)
    body_a, body_b = instantiate(spec)

    try:
        symbolic_check(spec)
        report = audit([body_a, body_b])
    except TotalConflictError:
        logger.debug(f"网格点 x={x}, x̄={xbar}, y={y}: κ = 1")
        system = build_constraints([body_a, body_b])
        rows = []
        for s in singletons(body_a.frame):
            bounds = probability_bounds(system, s)
            rows.append(SweepRow(element=render(s), p_lo=bounds.lower, p_hi=bounds.upper,
                                 verdict=Verdict.TOTAL_CONFLICT))
        return SweepPoint(x=x, xbar=xbar, y=y, kappa=Fraction(1), rows=rows)

    rows = [
        SweepRow(
            element=render(entry.subset),
            ds_lo=entry.ds_lower,
            ds_hi=entry.ds_upper,
            p_lo=entry.probability.lower,
            p_hi=entry.probability.upper,
            verdict=entry.verdict,
        )
        for entry in report.elements
    ]
    c_mass = report.combined.as_dict().get(subset(report.combined.frame, ['c']), Fraction(0))
    return SweepPoint(
        x=x, xbar=xbar, y=y,
        kappa=report.kappa,
        rows=rows,
        pc_equation_holds=c_mass == 1 - y,
    )


def _evaluate(args: Tuple[Family, Fraction, Optional[Fraction], Fraction]) -> SweepPoint:
    return evaluate_point(*args)


class SweepService:
    """参数族网格扫描服务；进程数与缺省 x̄ 切片取自 SWEEP_CONFIG"""

    def __init__(self, workers: Optional[int] = None, xbar_slices: Optional[Sequence[Fraction]] = None):
        self.workers = SWEEP_CONFIG['workers'] if workers is None else workers
        if xbar_slices is None:
            xbar_slices = parse_rational_list(SWEEP_CONFIG['xbar_slices'])
        self.xbar_slices = sorted(set(Fraction(v) for v in xbar_slices))

    def grid_points(self, family: Family, density: int, xbar_slices: Optional[Sequence[Fraction]] = None,
                    full_xbar: bool = False) -> List[Tuple[Family, Fraction, Optional[Fraction], Fraction]]:
        """规范网格顺序: x̄（若有）→ x → y，均升序"""
        values = [Fraction(i, density) for i in range(density + 1)]
        if family == Family.PARTITION_XY:
            return [(family, x, None, y) for x in values for y in values]

        if full_xbar:
            slices = values
        elif xbar_slices is not None:
            slices = sorted(set(Fraction(v) for v in xbar_slices))
        else:
            slices = self.xbar_slices
        for xbar in slices:
            _check_unit('xbar', xbar)
        return [(family, x, xbar, y) for xbar in slices for x in values if x + xbar <= 1 for y in values]

    def sweep(self, family: Family, density: int, xbar_slices: Optional[Sequence[Fraction]] = None,
              full_xbar: bool = False, workers: Optional[int] = None) -> SweepResult:
        """
        在 {i/N} 网格上逐点审计
        workers > 1 时并行计算，结果按规范网格顺序合并
        """
        family = Family(family)
        if family == Family.CUSTOM:
            raise ParameterRangeError("Custom 族没有可扫描的参数")
        if density < 2:
            raise ParameterRangeError(f"网格密度 N 必须 ≥ 2，收到 {density}")

        points = self.grid_points(family, density, xbar_slices, full_xbar)
        workers = self.workers if workers is None else workers
        logger.info(f"开始扫描 {family.value}: N = {density}, 网格点 {len(points)} 个, 进程数 {workers}")

        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                evaluated = list(executor.map(_evaluate, points, chunksize=8))
        else:
            evaluated = [_evaluate(point) for point in points]

        result = SweepResult(family=family, grid_density=density, points=evaluated)
        logger.info(f"扫描完成: 全 ExactMatch 的网格点 {len(result.summary)} 个")
        return result


def grid_points(family: Family, density: int, xbar_slices: Optional[Sequence[Fraction]] = None,
                full_xbar: bool = False) -> List[Tuple[Family, Fraction, Optional[Fraction], Fraction]]:
    return SweepService().grid_points(family, density, xbar_slices, full_xbar)


def sweep(family: Family, density: int, xbar_slices: Optional[Sequence[Fraction]] = None,
          full_xbar: bool = False, workers: Optional[int] = None) -> SweepResult:
    return SweepService().sweep(family, density, xbar_slices, full_xbar, workers)


ZADEH_MASSES = (
    {'a': Fraction(99, 100), 'b': Fraction(0), 'c': Fraction(1, 100)},
    {'a': Fraction(0), 'b': Fraction(99, 100), 'c': Fraction(1, 100)},
)


def zadeh_bodies() -> Tuple[BodyOfEvidence, BodyOfEvidence]:
    frame = _family_frame()
    return tuple(
        make_body(frame, [(subset(frame, [label]), m) for label, m in masses.items()], name=name)
        for name, masses in zip(('A', 'B'), ZADEH_MASSES)
    )


def zadeh_fixture():
    """
    两个高度矛盾的证据体组合后质量全部落在 c 上
    原始证据体要求 P(a) = 99/100 且 P(b) = 99/100，约束系统不可行
    """
    body_a, body_b = zadeh_bodies()
    result = combine(body_a, body_b)
    c = subset(body_a.frame, ['c'])
    if result.combined.as_dict() != {c: Fraction(1)} or result.kappa != Fraction(9999, 10000):
        raise InternalConsistencyError(f"Zadeh 组合结果异常: {result.combined}, κ = {result.kappa}")
    return audit([body_a, body_b])
