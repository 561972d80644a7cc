"""
Dempster 组合规则
每个不同的非空交集对应一个组合焦元，相同交集的乘积合并（按集合相等汇总）
"""
import logging
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from evidence_audit.models.errors import EvidenceError, FrameMismatchError, TotalConflictError
from evidence_audit.models.evidence import BodyOfEvidence, core, make_body
from evidence_audit.models.frame import FocalSet, render
from evidence_audit.models.report import (
    CombinationResult,
    CombinationStep,
    ConflictPair,
    ProvenanceEntry,
)

logger = logging.getLogger(__name__)


def _check_same_frame(a: BodyOfEvidence, b: BodyOfEvidence) -> None:
    if not a.frame.same_as(b.frame):
        raise FrameMismatchError("两个证据体不属于同一个识别框架")


def conflict(a: BodyOfEvidence, b: BodyOfEvidence) -> Fraction:
    """κ = Σ_{A_i ∩ B_j = ∅} m(A_i)·m(B_j)"""
    _check_same_frame(a, b)
    return sum(
        (ma * mb for sa, ma in a.focal for sb, mb in b.focal if not sa.bits & sb.bits),
        Fraction(0),
    )


def unnormalized_products(a: BodyOfEvidence, b: BodyOfEvidence
                          ) -> Tuple[Dict[int, Fraction], Dict[int, List[Tuple[int, int]]], List[ConflictPair]]:
    """
    按交集掩码汇总的未归一化乘积
    返回 (掩码 -> 乘积和, 掩码 -> 下标对, 冲突对)
    """
    _check_same_frame(a, b)
    buckets: Dict[int, Fraction] = {}
    pairs: Dict[int, List[Tuple[int, int]]] = {}
    conflict_pairs: List[ConflictPair] = []

    for i, (sa, ma) in enumerate(a.focal):
        for j, (sb, mb) in enumerate(b.focal):
            product = ma * mb
            bits = sa.bits & sb.bits
            if bits == 0:
                conflict_pairs.append(ConflictPair(
                    left_index=i, right_index=j, left=sa, right=sb, product=product,
                ))
                continue
            buckets[bits] = buckets.get(bits, Fraction(0)) + product
            pairs.setdefault(bits, []).append((i, j))

    return buckets, pairs, conflict_pairs


def combine(a: BodyOfEvidence, b: BodyOfEvidence) -> CombinationResult:
    """
    m(C_k) = Σ_{A_i ∩ B_j = C_k} m(A_i)·m(B_j) / (1 - κ)
    κ = 1 时抛出 TotalConflictError
    """
    buckets, pairs, conflict_pairs = unnormalized_products(a, b)
    kappa = sum((pair.product for pair in conflict_pairs), Fraction(0))

    if kappa == 1:
        raise TotalConflictError(
            f"冲突系数 κ = 1：两个证据体的焦元并集 {render(core(a))} 与 {render(core(b))} 不相交，"
            f"无法组合成决策集"
        )

    norm = 1 - kappa
    frame = a.frame
    ordered = sorted(buckets)  # 按掩码排序，输出确定
    combined = make_body(frame, [(FocalSet(bits, frame), buckets[bits] / norm) for bits in ordered])
    provenance = [
        ProvenanceEntry(focal=FocalSet(bits, frame), pairs=pairs[bits], unnormalized=buckets[bits])
        for bits in ordered
    ]

    logger.info(f"组合完成: κ = {kappa}, 焦元数 = {len(combined.focal)}")
    return CombinationResult(
        combined=combined,
        kappa=kappa,
        provenance=provenance,
        conflict_pairs=conflict_pairs,
    )


def combine_many(bodies: Sequence[BodyOfEvidence]) -> CombinationResult:
    """
    从左到右依次组合
    结果的 kappa 为累计冲突 1 - Π(1 - κ_step)，两体时即为 κ
    """
    if not bodies:
        raise EvidenceError("至少需要一个证据体")

    first = bodies[0]
    for body in bodies[1:]:
        _check_same_frame(first, body)

    if len(bodies) == 1:
        provenance = [
            ProvenanceEntry(focal=s, pairs=[], unnormalized=m) for s, m in first.focal
        ]
        return CombinationResult(combined=first, kappa=Fraction(0), provenance=provenance, conflict_pairs=[])

    current = first
    survival = Fraction(1)
    steps: List[CombinationStep] = []
    result = None

    for step, body in enumerate(bodies[1:], start=1):
        try:
            result = combine(current, body)
        except TotalConflictError as e:
            raise TotalConflictError(f"第 {step} 步组合失败: {e}", step=step) from e
        survival *= 1 - result.kappa
        steps.append(CombinationStep(
            step=step,
            kappa=result.kappa,
            cumulative_kappa=1 - survival,
            provenance=result.provenance,
            conflict_pairs=result.conflict_pairs,
        ))
        current = result.combined

    return CombinationResult(
        combined=current,
        kappa=1 - survival,
        provenance=result.provenance,
        conflict_pairs=result.conflict_pairs,
        steps=steps,
    )
