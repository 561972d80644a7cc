"""
证据体模型
质量分配、证据体公理校验，以及划分 / 准划分分类
所有数值均为精确有理数 (fractions.Fraction)，不使用浮点数
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, List, Optional, Tuple

from evidence_audit.models.errors import FrameMismatchError, MassAssignmentError
from evidence_audit.models.frame import FocalSet, Frame, render


class StructureTag(str, Enum):
    PARTITION = 'Partition'
    QUASI_PARTITION = 'QuasiPartition'
    GENERAL = 'General'


@dataclass(frozen=True)
class StructureClass:
    """证据集合的结构分类"""
    tag: StructureTag
    uncertainty_mass: Fraction


@dataclass(frozen=True, eq=False)
class BodyOfEvidence:
    """
    证据体：焦元与质量的有序列表
    只能通过 make_body 构造；空集和零质量条目不会出现在 focal 中
    """
    frame: Frame
    focal: Tuple[Tuple[FocalSet, Fraction], ...]
    name: Optional[str] = field(default=None)

    def as_dict(self) -> Dict[FocalSet, Fraction]:
        return dict(self.focal)

    def focal_sets(self) -> List[FocalSet]:
        return [s for s, _ in self.focal]

    def __eq__(self, other) -> bool:
        # 焦元顺序与名称不参与比较
        if not isinstance(other, BodyOfEvidence):
            return NotImplemented
        return self.frame.same_as(other.frame) and self.as_dict() == other.as_dict()

    def __hash__(self) -> int:
        return hash((self.frame.frame_id, frozenset(self.focal)))

    def __str__(self) -> str:
        entries = ', '.join(f"{render(s)}↦{m}" for s, m in self.focal)
        return '{' + entries + '}'


def to_fraction(value) -> Fraction:
    """接受 int / Fraction 等精确有理数，拒绝浮点数"""
    if isinstance(value, bool):
        raise MassAssignmentError(f"质量值类型非法: {value!r}")
    if isinstance(value, Rational):
        return Fraction(value)
    raise MassAssignmentError(f"质量值必须是精确有理数，收到 {type(value).__name__}: {value!r}")


def make_body(frame: Frame, assignments: Iterable[Tuple[FocalSet, object]],
              name: Optional[str] = None) -> BodyOfEvidence:
    """
    构造并校验证据体
    - 空集不能有正质量，零质量条目（包括 ∅↦0）被丢弃
    - 质量非负，焦元互不相同，总和严格等于 1
    """
    seen = set()
    focal: List[Tuple[FocalSet, Fraction]] = []
    total = Fraction(0)

    for focal_set, raw_mass in assignments:
        if not focal_set.frame.same_as(frame):
            raise FrameMismatchError(f"焦元 {render(focal_set)} 不属于证据体的识别框架")
        mass = to_fraction(raw_mass)
        if mass < 0:
            raise MassAssignmentError(f"焦元 {render(focal_set)} 的质量为负: {mass}")
        if focal_set.bits in seen:
            raise MassAssignmentError(f"焦元重复: {render(focal_set)}")
        seen.add(focal_set.bits)
        if focal_set.bits == 0 and mass != 0:
            raise MassAssignmentError(f"空集不能分配质量: m(∅) = {mass}")
        total += mass
        if mass == 0:
            continue
        focal.append((focal_set, mass))

    if total != 1:
        raise MassAssignmentError(f"质量总和必须为 1，实际为 {total}")

    return BodyOfEvidence(frame=frame, focal=tuple(focal), name=name)


def vacuous(frame: Frame, name: Optional[str] = None) -> BodyOfEvidence:
    """完全无知的证据体：Ω ↦ 1"""
    return BodyOfEvidence(frame=frame, focal=((frame.omega, Fraction(1)),), name=name)


def mass(body: BodyOfEvidence, s: FocalSet) -> Fraction:
    """焦元的质量；非焦元为 0"""
    if not s.frame.same_as(body.frame):
        raise FrameMismatchError(f"子集 {render(s)} 不属于证据体的识别框架")
    for focal_set, m in body.focal:
        if focal_set.bits == s.bits:
            return m
    return Fraction(0)


def uncertainty_mass(body: BodyOfEvidence) -> Fraction:
    return mass(body, body.frame.omega)


def core(body: BodyOfEvidence) -> FocalSet:
    """全部焦元的并集"""
    bits = 0
    for focal_set, _ in body.focal:
        bits |= focal_set.bits
    return FocalSet(bits, body.frame)


def is_bayesian(body: BodyOfEvidence) -> bool:
    return all(len(focal_set) == 1 for focal_set, _ in body.focal)


def _tiles_frame(blocks: List[FocalSet], frame: Frame) -> bool:
    """两两不交且并集为 Ω"""
    covered = 0
    for block in blocks:
        if covered & block.bits:
            return False
        covered |= block.bits
    return covered == frame.full_mask


def classify(body: BodyOfEvidence) -> StructureClass:
    omega_bits = body.frame.full_mask
    others = [s for s, _ in body.focal if s.bits != omega_bits]
    omega_mass = uncertainty_mass(body)

    if not _tiles_frame(others, body.frame):
        tag = StructureTag.GENERAL
    elif omega_mass > 0:
        tag = StructureTag.QUASI_PARTITION
    else:
        tag = StructureTag.PARTITION

    return StructureClass(tag=tag, uncertainty_mass=omega_mass)
