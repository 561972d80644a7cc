"""
信任度（balance）与似然度计算
包括二者的对偶关系，以及由信任度经 Möbius 反演恢复质量
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from config.settings import FRAME_SIZE_CAP
from evidence_audit.models.errors import (
    FrameError,
    FrameMismatchError,
    MassAssignmentError,
    NotABeliefFunctionError,
)
from evidence_audit.models.evidence import BodyOfEvidence, make_body
from evidence_audit.models.frame import FocalSet, Frame, cardinality, difference, render, submasks

logger = logging.getLogger(__name__)


class MeasureKind(str, Enum):
    BELIEF = 'Belief'
    PLAUSIBILITY = 'Plausibility'


@dataclass(frozen=True)
class MeasureTable:
    """
    全部 2^size 个子集上的测度值
    values[mask] 是掩码为 mask 的子集的值
    """
    frame: Frame
    kind: MeasureKind
    values: Tuple[Fraction, ...]

    def value(self, s: FocalSet) -> Fraction:
        if not s.frame.same_as(self.frame):
            raise FrameMismatchError(f"子集 {render(s)} 不属于测度表的识别框架")
        return self.values[s.bits]

    def as_dict(self) -> Dict[FocalSet, Fraction]:
        return {FocalSet(bits, self.frame): v for bits, v in enumerate(self.values)}


def _check_frame(body: BodyOfEvidence, s: FocalSet) -> None:
    if not s.frame.same_as(body.frame):
        raise FrameMismatchError(f"子集 {render(s)} 不属于证据体的识别框架")


def belief(body: BodyOfEvidence, s: FocalSet) -> Fraction:
    """包含于 s 的焦元质量之和"""
    _check_frame(body, s)
    return sum((m for a, m in body.focal if a.bits & ~s.bits == 0), Fraction(0))


def plausibility(body: BodyOfEvidence, s: FocalSet) -> Fraction:
    """与 s 相交的焦元质量之和"""
    _check_frame(body, s)
    return sum((m for a, m in body.focal if a.bits & s.bits), Fraction(0))


def interval(body: BodyOfEvidence, s: FocalSet) -> Tuple[Fraction, Fraction]:
    return belief(body, s), plausibility(body, s)


def zeta_transform(vector: Sequence[Fraction], size: int) -> List[Fraction]:
    """子集和变换: out[t] = Σ_{s ⊆ t} vector[s]，O(size·2^size)"""
    out = list(vector)
    for i in range(size):
        bit = 1 << i
        for t in range(1 << size):
            if t & bit:
                out[t] += out[t ^ bit]
    return out


def mobius_transform(vector: Sequence[Fraction], size: int) -> List[Fraction]:
    """zeta_transform 的逆变换"""
    out = list(vector)
    for i in range(size):
        bit = 1 << i
        for t in range(1 << size):
            if t & bit:
                out[t] -= out[t ^ bit]
    return out


def _check_cap(frame: Frame) -> None:
    if frame.size > FRAME_SIZE_CAP:
        raise FrameError(f"识别框架大小 {frame.size} 超出上限 {FRAME_SIZE_CAP}，无法枚举幂集")


def measure_table(body: BodyOfEvidence, kind: MeasureKind) -> MeasureTable:
    frame = body.frame
    _check_cap(frame)

    masses = [Fraction(0)] * (1 << frame.size)
    for a, m in body.focal:
        masses[a.bits] = m
    beliefs = zeta_transform(masses, frame.size)

    if kind == MeasureKind.BELIEF:
        values = beliefs
    else:
        # pl(S) = 1 - bel(¬S)
        full = frame.full_mask
        values = [Fraction(1) - beliefs[full ^ t] for t in range(1 << frame.size)]

    return MeasureTable(frame=frame, kind=MeasureKind(kind), values=tuple(values))


def _naive_inversion(table: MeasureTable) -> List[Fraction]:
    """逐项计算 m(A) = Σ_{B ⊆ A} (-1)^{|A - B|} bel(B)"""
    frame = table.frame
    masses = []
    for bits in range(1 << frame.size):
        target = FocalSet(bits, frame)
        total = Fraction(0)
        for sub in submasks(target):
            sign = -1 if cardinality(difference(target, sub)) % 2 else 1
            total += sign * table.values[sub.bits]
        masses.append(total)
    return masses


def mass_from_belief(table: MeasureTable, method: str = 'naive') -> BodyOfEvidence:
    """
    Möbius 反演：由信任度表恢复质量分配
    method='fast' 使用快速 Möbius 变换，结果与逐项求和一致
    """
    if table.kind != MeasureKind.BELIEF:
        raise NotABeliefFunctionError(f"需要信任度表，收到 {table.kind.value}")
    frame = table.frame
    _check_cap(frame)

    if method == 'fast':
        masses = mobius_transform(table.values, frame.size)
    elif method == 'naive':
        masses = _naive_inversion(table)
    else:
        raise ValueError(f"未知的反演方法: {method}")

    for bits, m in enumerate(masses):
        if m < 0:
            offending = FocalSet(bits, frame)
            raise NotABeliefFunctionError(
                f"反演得到负质量 m({render(offending)}) = {m}，输入不是信任函数", subset=offending
            )
    if masses[0] != 0:
        raise NotABeliefFunctionError(
            f"反演得到 m(∅) = {masses[0]}，输入不是规范化的信任函数", subset=frame.empty
        )

    try:
        return make_body(frame, [(FocalSet(bits, frame), m) for bits, m in enumerate(masses) if bits])
    except MassAssignmentError as e:
        raise NotABeliefFunctionError(f"反演结果不是合法证据体: {e}", subset=frame.omega) from e


def mass_from_plausibility(table: MeasureTable, method: str = 'naive') -> BodyOfEvidence:
    """经对偶 bel(S) = 1 - pl(¬S) 转为信任度表后反演"""
    if table.kind != MeasureKind.PLAUSIBILITY:
        raise NotABeliefFunctionError(f"需要似然度表，收到 {table.kind.value}")
    full = table.frame.full_mask
    beliefs = tuple(Fraction(1) - table.values[full ^ t] for t in range(len(table.values)))
    belief_table = MeasureTable(frame=table.frame, kind=MeasureKind.BELIEF, values=beliefs)
    return mass_from_belief(belief_table, method=method)
