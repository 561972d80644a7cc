"""
内置复现用例
三个示例证据文件随包发布，paper-repro 命令不依赖任何外部文件
"""
import logging
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

from pydantic import BaseModel

from evidence_audit.models.frame import render, singletons, subset
from evidence_audit.models.report import Verdict
from evidence_audit.services.combination_service import combine
from evidence_audit.services.consistency_service import audit, build_constraints, probability_bounds
from evidence_audit.services.measure_service import interval
from evidence_audit.services.sweep_service import Family, FamilySpec, sweep, symbolic_check, zadeh_fixture
from evidence_audit.utils.evidence_io import EvidenceDocument, LoadedEvidence, build_evidence
from evidence_audit.utils.rational import format_rational

logger = logging.getLogger(__name__)

SAMPLE_DOCUMENTS: Dict[str, dict] = {
    # 划分结构: x = 1/4, y = 1/2
    'paper31': {
        'frame': ['a', 'b', 'c'],
        'bodies': [
            {'name': 'A', 'masses': [{'set': ['a'], 'mass': '1/4'}, {'set': ['b', 'c'], 'mass': '3/4'}]},
            {'name': 'B', 'masses': [{'set': ['a', 'b'], 'mass': '1/2'}, {'set': ['c'], 'mass': '1/2'}]},
        ],
    },
    # 准划分结构: x = 1/4, x̄ = 1/2, y = 1/2
    'paper32': {
        'frame': ['a', 'b', 'c'],
        'bodies': [
            {'name': 'A', 'masses': [
                {'set': ['a'], 'mass': '1/4'},
                {'set': ['b', 'c'], 'mass': '1/2'},
                {'set': ['a', 'b', 'c'], 'mass': '1/4'},
            ]},
            {'name': 'B', 'masses': [{'set': ['a', 'b'], 'mass': '1/2'}, {'set': ['c'], 'mass': '1/2'}]},
        ],
    },
    'zadeh': {
        'frame': ['a', 'b', 'c'],
        'bodies': [
            {'name': 'A', 'masses': [{'set': ['a'], 'mass': '99/100'}, {'set': ['c'], 'mass': '1/100'}]},
            {'name': 'B', 'masses': [{'set': ['b'], 'mass': '99/100'}, {'set': ['c'], 'mass': '1/100'}]},
        ],
    },
}


class FixtureOutcome(BaseModel):
    name: str
    expected: str
    actual: str
    passed: bool


def sample_evidence(name: str) -> LoadedEvidence:
    document = EvidenceDocument.model_validate(SAMPLE_DOCUMENTS[name])
    return build_evidence(document, source=f"<{name}>")


def _masses(body) -> str:
    return ', '.join(f"{render(s)}={format_rational(m)}" for s, m in body.focal)


def _pair(lower, upper) -> str:
    if lower is None:
        return 'infeasible'
    return f"[{format_rational(lower)}, {format_rational(upper)}]"


def _outcome(name: str, expected: str, actual: str) -> FixtureOutcome:
    return FixtureOutcome(name=name, expected=expected, actual=actual, passed=expected == actual)


def _zadeh() -> List[FixtureOutcome]:
    loaded = sample_evidence('zadeh')
    result = combine(*loaded.select(['A', 'B']))
    report = zadeh_fixture()
    return [
        _outcome('zadeh: 组合质量', '{c}=1', _masses(result.combined)),
        _outcome('zadeh: κ', '9999/10000', format_rational(result.kappa)),
        _outcome('zadeh: 原始约束可行性', 'False', str(report.feasible)),
    ]


def _partition_point() -> List[FixtureOutcome]:
    loaded = sample_evidence('paper31')
    bodies = loaded.select(['A', 'B'])
    result = combine(*bodies)
    system = build_constraints(bodies)
    points = [probability_bounds(system, s) for s in singletons(loaded.frame)]
    report = audit(bodies)
    return [
        _outcome('paper31: 组合质量', '{a}=1/7, {b}=3/7, {c}=3/7', _masses(result.combined)),
        _outcome('paper31: κ', '1/8', format_rational(result.kappa)),
        _outcome('paper31: 单点概率区间', '[1/4, 1/4] [1/4, 1/4] [1/2, 1/2]',
                 ' '.join(_pair(p.lower, p.upper) for p in points)),
        _outcome('paper31: 单点判定', 'Violation Violation Violation',
                 ' '.join(e.verdict.value for e in report.elements)),
    ]


def _quasi_point() -> List[FixtureOutcome]:
    loaded = sample_evidence('paper32')
    bodies = loaded.select(['A', 'B'])
    result = combine(*bodies)
    report = audit(bodies)
    b = subset(loaded.frame, ['b'])
    entry = report.element(b)
    ds = interval(result.combined, b)
    disjoint = ds[0] > entry.probability.upper or ds[1] < entry.probability.lower
    check = symbolic_check(FamilySpec(
        family=Family.QUASI_XXBAR_Y,
        parameters={'x': Fraction(1, 4), 'xbar': Fraction(1, 2), 'y': Fraction(1, 2)},
    ))
    return [
        _outcome('paper32: 组合质量', '{a}=1/7, {b}=2/7, {a,b}=1/7, {c}=3/7', _masses(result.combined)),
        _outcome('paper32: {b} 的 [bel, pl]', '[2/7, 3/7]', _pair(*ds)),
        _outcome('paper32: {b} 的概率区间', '[0, 1/4]',
                 _pair(entry.probability.lower, entry.probability.upper)),
        _outcome('paper32: 两区间不相交', 'True', str(disjoint)),
        _outcome('paper32: {b} 判定', Verdict.DISJOINT_VIOLATION.value, entry.verdict.value),
        _outcome('paper32: m({a,b}) 闭式解', '1/7', format_rational(check.closed_form['{a,b}'])),
    ]


def _characterizations() -> List[FixtureOutcome]:
    partition = sweep(Family.PARTITION_XY, 4)
    quasi = sweep(Family.QUASI_XXBAR_Y, 4)
    exact_points = ' '.join(f"({format_rational(p.x)},{format_rational(p.y)})" for p in partition.summary)
    expected_points = ' '.join(
        f"({format_rational(Fraction(i, 4))},{format_rational(Fraction(j, 4))})"
        for i in range(5) for j in range(5) if i == 0 or j == 4
    )
    return [
        _outcome('划分族 N=4: 全 ExactMatch 的网格点', expected_points, exact_points),
        _outcome('划分族 N=4: ExactMatch ⇔ κ = 0', 'True', str(partition.characterization_holds())),
        _outcome('准划分族 N=4: m({c}) = 1-y ⇔ x=0 或 y∈{0,1}', 'True', str(quasi.characterization_holds())),
    ]


FIXTURE_GROUPS: List[Tuple[str, Callable[[], List[FixtureOutcome]]]] = [
    ('zadeh', _zadeh),
    ('paper31', _partition_point),
    ('paper32', _quasi_point),
    ('sweep', _characterizations),
]


def run_reproduction_fixtures() -> List[FixtureOutcome]:
    """运行全部内置用例；单个用例的异常记为失败，不中断其余用例"""
    outcomes: List[FixtureOutcome] = []
    for group, runner in FIXTURE_GROUPS:
        try:
            outcomes.extend(runner())
        except Exception as e:
            logger.error(f"用例组 {group} 执行失败: {e}")
            outcomes.append(FixtureOutcome(name=group, expected='完成', actual=f"异常: {e}", passed=False))
    passed = sum(1 for o in outcomes if o.passed)
    logger.info(f"复现用例: {passed}/{len(outcomes)} 通过")
    return outcomes
