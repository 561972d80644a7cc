"""
概率一致性审计
把原始证据体视为关于同一概率分布的部分信息：
    bel(S) ≤ P(S) ≤ pl(S)  对每个原始证据体、每个子集 S
在该多面体上用精确线性规划求 P(S) 的上下界，再与组合后证据体的 [bel, pl] 区间比较
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from config.settings import FRAME_SIZE_CAP, LP_CONFIG
from evidence_audit.models.errors import EvidenceError, FrameError, FrameMismatchError
from evidence_audit.models.evidence import BodyOfEvidence, classify
from evidence_audit.models.frame import FocalSet, Frame, render, singletons
from evidence_audit.models.report import (
    ConsistencyReport,
    ElementAudit,
    ProbabilityInterval,
    Verdict,
)
from evidence_audit.services.combination_service import combine_many
from evidence_audit.services.lp_solver import EQ, GE, LE, ExactSimplex, LinearRow
from evidence_audit.services.measure_service import MeasureKind, belief, measure_table, plausibility

logger = logging.getLogger(__name__)

SIMPLEX_SOURCE = 'simplex'


@dataclass(frozen=True)
class LinearConstraint:
    """
    Σ_{ω∈subset} P(ω) (sense) bound
    source 为来源证据体名称（基础单纯形约束为 'simplex'），kind 为 lower / upper / equal
    """
    subset: FocalSet
    sense: str
    bound: Fraction
    source: str
    kind: str

    def satisfied_by(self, distribution: Sequence[Fraction]) -> bool:
        total = sum((p for i, p in enumerate(distribution) if self.subset.bits >> i & 1), Fraction(0))
        if self.sense == EQ:
            return total == self.bound
        if self.sense == GE:
            return total >= self.bound
        return total <= self.bound


@dataclass(frozen=True)
class ProbabilityConstraintSystem:
    """每个框架元素一个未知量 P(ω) 的线性约束系统"""
    frame: Frame
    constraints: Tuple[LinearConstraint, ...]
    max_pivots: Optional[int] = None

    @property
    def variables(self) -> List[str]:
        return [f"P({label})" for label in self.frame.labels]

    def tightened(self) -> Dict[int, Tuple[Fraction, Fraction]]:
        """按子集汇总后的区间 [max 下界, min 上界]"""
        bounds: Dict[int, Tuple[Fraction, Fraction]] = {}
        for c in self.constraints:
            lower, upper = bounds.get(c.subset.bits, (Fraction(0), Fraction(1)))
            if c.sense in (GE, EQ):
                lower = max(lower, c.bound)
            if c.sense in (LE, EQ):
                upper = min(upper, c.bound)
            bounds[c.subset.bits] = (lower, upper)
        return bounds

    @cached_property
    def solver(self) -> Optional[ExactSimplex]:
        """None 表示区间已经自相矛盾，无需求解"""
        n = self.frame.size
        full = self.frame.full_mask
        rows = [LinearRow(tuple(Fraction(1) for _ in range(n)), EQ, Fraction(1))]
        for bits, (lower, upper) in sorted(self.tightened().items()):
            if lower > upper:
                logger.info(f"子集 {render(FocalSet(bits, self.frame))} 的区间 [{lower}, {upper}] 为空")
                return None
            coefficients = tuple(Fraction(bits >> i & 1) for i in range(n))
            if bits == full:
                if not lower <= 1 <= upper:
                    return None
                continue
            if bits == 0:
                if lower > 0:
                    return None
                continue
            if lower == upper:
                rows.append(LinearRow(coefficients, EQ, lower))
                continue
            if lower > 0:
                rows.append(LinearRow(coefficients, GE, lower))
            if upper < 1:
                rows.append(LinearRow(coefficients, LE, upper))
        return ExactSimplex(n, rows, max_pivots=self.max_pivots)

    @property
    def feasible(self) -> bool:
        return self.solver is not None and self.solver.feasible


def decide_verdict(ds_lower: Fraction, ds_upper: Fraction, probability: ProbabilityInterval) -> Verdict:
    """
    判定顺序:
    不可行 → 两区间均为单点（相等 ExactMatch，否则 Violation）→ 不相交 DisjointViolation
    → 信任度不在概率区间内（bel = P 无法成立）Violation → 其余 Compatible
    """
    if not probability.feasible:
        return Verdict.INFEASIBLE
    if ds_lower == ds_upper and probability.lower == probability.upper:
        return Verdict.EXACT_MATCH if ds_lower == probability.lower else Verdict.VIOLATION
    if ds_upper < probability.lower or probability.upper < ds_lower:
        return Verdict.DISJOINT_VIOLATION
    if not probability.lower <= ds_lower <= probability.upper:
        return Verdict.VIOLATION
    return Verdict.COMPATIBLE


def audit_elements(combined: BodyOfEvidence) -> List[FocalSet]:
    """审计对象: 组合证据体的全部焦元与全部单点集，按掩码排序"""
    masks = {s.bits for s, _ in combined.focal}
    masks.update(s.bits for s in singletons(combined.frame))
    return [FocalSet(bits, combined.frame) for bits in sorted(masks)]


class ConsistencyService:
    """概率一致性审计服务"""

    def __init__(self, frame_size_cap: Optional[int] = None, max_pivots: Optional[int] = None):
        self.frame_size_cap = FRAME_SIZE_CAP if frame_size_cap is None else frame_size_cap
        self.max_pivots = LP_CONFIG['max_pivots'] if max_pivots is None else max_pivots

    def shared_frame(self, bodies: Sequence[BodyOfEvidence]) -> Frame:
        if not bodies:
            raise EvidenceError("至少需要一个证据体")
        frame = bodies[0].frame
        for body in bodies[1:]:
            if not body.frame.same_as(frame):
                raise FrameMismatchError("证据体不属于同一个识别框架")
        if frame.size > self.frame_size_cap:
            raise FrameError(f"识别框架大小 {frame.size} 超出上限 {self.frame_size_cap}")
        return frame

    def build_constraints(self, bodies: Sequence[BodyOfEvidence]) -> ProbabilityConstraintSystem:
        """
        基础约束: P(ω) ≥ 0，Σ P(ω) = 1
        每个证据体、每个非平凡子集: bel(S) ≤ P(S) ≤ pl(S)；两者相等时写成等式
        下界为 0 或上界为 1 的约束是平凡的，不写入
        返回前已完成单纯形第一阶段，此后系统只读
        """
        frame = self.shared_frame(bodies)
        constraints: List[LinearConstraint] = [
            LinearConstraint(s, GE, Fraction(0), SIMPLEX_SOURCE, 'lower') for s in singletons(frame)
        ]
        constraints.append(LinearConstraint(frame.omega, EQ, Fraction(1), SIMPLEX_SOURCE, 'equal'))

        for index, body in enumerate(bodies):
            source = body.name or f"#{index}"
            beliefs = measure_table(body, MeasureKind.BELIEF).values
            plausibilities = measure_table(body, MeasureKind.PLAUSIBILITY).values
            for bits in range(1, frame.full_mask):
                s = FocalSet(bits, frame)
                lower, upper = beliefs[bits], plausibilities[bits]
                if lower == upper:
                    constraints.append(LinearConstraint(s, EQ, lower, source, 'equal'))
                    continue
                if lower > 0:
                    constraints.append(LinearConstraint(s, GE, lower, source, 'lower'))
                if upper < 1:
                    constraints.append(LinearConstraint(s, LE, upper, source, 'upper'))

        logger.info(f"约束系统: {len(bodies)} 个证据体，{len(constraints)} 条约束")
        system = ProbabilityConstraintSystem(frame=frame, constraints=tuple(constraints),
                                             max_pivots=self.max_pivots)
        system.solver  # 触发第一阶段求解
        return system

    def probability_bounds(self, system: ProbabilityConstraintSystem, target: FocalSet) -> ProbabilityInterval:
        """P(target) 在可行多面体上的精确最小值与最大值"""
        if not target.frame.same_as(system.frame):
            raise FrameMismatchError(f"目标子集 {render(target)} 不属于约束系统的识别框架")

        if not system.feasible:
            return ProbabilityInterval(subset=target, feasible=False)

        objective = [Fraction(target.bits >> i & 1) for i in range(system.frame.size)]
        low = system.solver.minimize(objective)
        high = system.solver.maximize(objective)
        return ProbabilityInterval(
            subset=target,
            lower=low.value,
            upper=high.value,
            feasible=True,
            argmin=low.solution,
            argmax=high.solution,
        )

    def audit(self, bodies: Sequence[BodyOfEvidence]) -> ConsistencyReport:
        """
        组合全部证据体，并与由原始证据体推出的概率区间逐元素比较
        κ = 1 时 TotalConflictError 向上传播
        """
        if len(bodies) < 2:
            raise EvidenceError("审计至少需要两个证据体")
        self.shared_frame(bodies)

        result = combine_many(bodies)
        combined = result.combined
        system = self.build_constraints(bodies)

        elements = []
        for s in audit_elements(combined):
            ds_lower, ds_upper = belief(combined, s), plausibility(combined, s)
            probability = self.probability_bounds(system, s)
            verdict = decide_verdict(ds_lower, ds_upper, probability)
            elements.append(ElementAudit(
                subset=s,
                mass=combined.as_dict().get(s, Fraction(0)),
                ds_lower=ds_lower,
                ds_upper=ds_upper,
                probability=probability,
                verdict=verdict,
            ))
            logger.debug(f"{render(s)}: DS [{ds_lower}, {ds_upper}] 判定 {verdict.value}")

        report = ConsistencyReport(
            elements=elements,
            kappa=result.kappa,
            combined=combined,
            combined_structure=classify(combined),
            input_structures=[classify(body) for body in bodies],
            feasible=system.feasible,
        )
        logger.info(f"审计完成: κ = {result.kappa}, 元素 {len(elements)} 个")
        return report


def build_constraints(bodies: Sequence[BodyOfEvidence]) -> ProbabilityConstraintSystem:
    return ConsistencyService().build_constraints(bodies)


def probability_bounds(system: ProbabilityConstraintSystem, target: FocalSet) -> ProbabilityInterval:
    return ConsistencyService().probability_bounds(system, target)


def audit(bodies: Sequence[BodyOfEvidence]) -> ConsistencyReport:
    return ConsistencyService().audit(bodies)
