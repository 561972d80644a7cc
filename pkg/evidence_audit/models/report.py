"""
组合结果与一致性审计报告模型
数值字段序列化为精确分数字符串，子集序列化为 "{a,b}" 形式
"""
from enum import Enum
from fractions import Fraction
from typing import Annotated, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, PlainSerializer

from evidence_audit.models.evidence import BodyOfEvidence, StructureClass
from evidence_audit.models.frame import FocalSet, labels, render
from evidence_audit.utils.rational import format_rational


def _body_payload(body: BodyOfEvidence) -> List[Dict]:
    return [{"set": labels(s), "mass": format_rational(m)} for s, m in body.focal]


def _structure_payload(structure: StructureClass) -> Dict:
    return {"tag": structure.tag.value, "uncertainty_mass": format_rational(structure.uncertainty_mass)}


Rational = Annotated[Fraction, PlainSerializer(format_rational, return_type=str)]
Subset = Annotated[FocalSet, PlainSerializer(render, return_type=str)]
Body = Annotated[BodyOfEvidence, PlainSerializer(_body_payload, return_type=list)]
Structure = Annotated[StructureClass, PlainSerializer(_structure_payload, return_type=dict)]


class _Model(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class ProvenanceEntry(_Model):
    """一个组合焦元及产生它的 (A_i, B_j) 下标对"""
    focal: Subset
    pairs: List[Tuple[int, int]]
    unnormalized: Rational  # 归一化前的乘积和


class ConflictPair(_Model):
    left_index: int
    right_index: int
    left: Subset
    right: Subset
    product: Rational


class CombinationStep(_Model):
    """combine_many 中的一步"""
    step: int
    kappa: Rational
    cumulative_kappa: Rational
    provenance: List[ProvenanceEntry]
    conflict_pairs: List[ConflictPair]


class CombinationResult(_Model):
    """Dempster 组合结果"""
    combined: Body
    kappa: Rational
    provenance: List[ProvenanceEntry]
    conflict_pairs: List[ConflictPair]
    steps: List[CombinationStep] = []

    def provenance_map(self) -> Dict[FocalSet, List[Tuple[int, int]]]:
        return {entry.focal: entry.pairs for entry in self.provenance}


class Verdict(str, Enum):
    EXACT_MATCH = 'ExactMatch'
    COMPATIBLE = 'Compatible'
    VIOLATION = 'Violation'
    DISJOINT_VIOLATION = 'DisjointViolation'
    INFEASIBLE = 'Infeasible'
    TOTAL_CONFLICT = 'TotalConflict'  # 仅出现在参数扫描中 κ = 1 的格点


class ProbabilityInterval(_Model):
    """目标子集概率的精确上下界；不可行时上下界为空"""
    subset: Subset
    lower: Optional[Rational] = None
    upper: Optional[Rational] = None
    feasible: bool
    argmin: Optional[List[Rational]] = None
    argmax: Optional[List[Rational]] = None

    @property
    def is_point(self) -> bool:
        return self.feasible and self.lower == self.upper


class ElementAudit(_Model):
    """单个决策集元素的 DS 区间、概率区间与判定"""
    subset: Subset
    mass: Rational
    ds_lower: Rational
    ds_upper: Rational
    probability: ProbabilityInterval
    verdict: Verdict


class ConsistencyReport(_Model):
    elements: List[ElementAudit]
    kappa: Rational
    combined: Body
    combined_structure: Structure
    input_structures: List[Structure]
    feasible: bool

    def element(self, s: FocalSet) -> ElementAudit:
        for entry in self.elements:
            if entry.subset.bits == s.bits:
                return entry
        raise KeyError(render(s))

    def verdicts(self) -> Dict[str, Verdict]:
        return {render(entry.subset): entry.verdict for entry in self.elements}

    @property
    def all_exact(self) -> bool:
        return all(entry.verdict == Verdict.EXACT_MATCH for entry in self.elements)

    @property
    def has_violation(self) -> bool:
        return any(entry.verdict in (Verdict.VIOLATION, Verdict.DISJOINT_VIOLATION)
                   for entry in self.elements)
