#!/usr/bin/env python3
"""
概率一致性审计测试
包括与独立的顶点枚举求解器的对照
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import itertools
import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest
import sympy as sp

from evidence_audit.models.errors import EvidenceError, TotalConflictError
from evidence_audit.models.evidence import make_body, vacuous
from evidence_audit.models.frame import FocalSet, complement, enumerate_subsets, make_frame, singletons, subset
from evidence_audit.models.report import ProbabilityInterval, Verdict
from evidence_audit.services.consistency_service import (
    SIMPLEX_SOURCE,
    ConsistencyService,
    audit,
    build_constraints,
    decide_verdict,
    probability_bounds,
)
from evidence_audit.services.lp_solver import EQ, GE, LE, ExactSimplex, LinearRow

F = Fraction


def _partition_bodies():
    frame = make_frame(['a', 'b', 'c'])
    a, b, c = (subset(frame, [x]) for x in 'abc')
    body_a = make_body(frame, [(a, F(1, 4)), (b | c, F(3, 4))], name='A')
    body_b = make_body(frame, [(a | b, F(1, 2)), (c, F(1, 2))], name='B')
    return frame, body_a, body_b


def _quasi_bodies():
    frame = make_frame(['a', 'b', 'c'])
    a, b, c = (subset(frame, [x]) for x in 'abc')
    body_a = make_body(frame, [(a, F(1, 4)), (b | c, F(1, 2)), (frame.omega, F(1, 4))], name='A')
    body_b = make_body(frame, [(a | b, F(1, 2)), (c, F(1, 2))], name='B')
    return frame, body_a, body_b


# ---------------------------------------------------------------------------
# 独立的顶点枚举求解器
# ---------------------------------------------------------------------------

def _rational(value):
    value = F(value)
    return sp.Rational(value.numerator, value.denominator)


def _holds(coefficients, sense, bound, point):
    total = sum((c * p for c, p in zip(coefficients, point)), F(0))
    if sense == EQ:
        return total == bound
    if sense == GE:
        return total >= bound
    return total <= bound


def oracle_vertices(system):
    """
    顶点 = 任取 n 个线性无关的约束超平面求交，再筛掉不满足全部约束的交点
    同一子集只保留最紧的上下界超平面
    """
    n = system.frame.size
    rows = [
        (tuple(F(c.subset.bits >> i & 1) for i in range(n)), c.sense, c.bound)
        for c in system.constraints
    ]
    tightest = {}
    for coefficients, sense, bound in rows:
        lower, upper = tightest.get(coefficients, (None, None))
        if sense in (GE, EQ):
            lower = bound if lower is None else max(lower, bound)
        if sense in (LE, EQ):
            upper = bound if upper is None else min(upper, bound)
        tightest[coefficients] = (lower, upper)
    hyperplanes = sorted({
        (coefficients, bound)
        for coefficients, pair in tightest.items() for bound in pair if bound is not None
    })

    A = sp.Matrix([[_rational(c) for c in coefficients] for coefficients, _ in hyperplanes])
    b = sp.Matrix([_rational(bound) for _, bound in hyperplanes])
    vertices = set()
    for indices in itertools.combinations(range(A.rows), n):
        A_sub = A[list(indices), :]
        b_sub = b[list(indices), :]
        if A_sub.rank() < n:
            continue
        x = A_sub.LUsolve(b_sub)
        point = tuple(F(int(v.p), int(v.q)) for v in x)
        if all(_holds(coefficients, sense, bound, point) for coefficients, sense, bound in rows):
            vertices.add(point)
    return vertices


def oracle_bounds(vertices, target):
    values = [sum((p for i, p in enumerate(v) if target.bits >> i & 1), F(0)) for v in vertices]
    return min(values), max(values)


def _random_body(rng, frame, hidden=None):
    masks = list(range(1, frame.full_mask + 1))
    if hidden is not None:
        # 把每个元素的概率交给一个包含它的随机焦元，hidden 必然与该证据体相容
        masses = {}
        for i, p in enumerate(hidden):
            mask = rng.choice([m for m in masks if m >> i & 1])
            masses[mask] = masses.get(mask, F(0)) + p
    else:
        chosen = rng.sample(masks, rng.randint(1, 4))
        weights = [rng.randint(1, 8) for _ in chosen]
        masses = {mask: F(w, sum(weights)) for mask, w in zip(chosen, weights)}
    return make_body(frame, [(FocalSet(mask, frame), m) for mask, m in masses.items()])


def _random_distribution(rng, size):
    weights = [rng.randint(0, 6) for _ in range(size)]
    if not any(weights):
        weights[0] = 1
    return [F(w, sum(weights)) for w in weights]


def test_lp_matches_vertex_enumeration():
    """随机约束系统上，精确单纯形与顶点枚举给出相同的上下界"""
    rng = random.Random(20240618)
    frame = make_frame(['a', 'b', 'c'])
    feasible_cases = 0

    for case in range(120):
        hidden = _random_distribution(rng, frame.size) if case % 2 == 0 else None
        bodies = [_random_body(rng, frame, hidden) for _ in range(rng.randint(2, 3))]
        system = build_constraints(bodies)
        vertices = oracle_vertices(system)

        assert system.feasible == bool(vertices), f"第 {case} 个系统可行性不一致"
        if not vertices:
            continue
        feasible_cases += 1

        for target in list(singletons(frame)) + [subset(frame, ['a', 'b'])]:
            bounds = probability_bounds(system, target)
            assert (bounds.lower, bounds.upper) == oracle_bounds(vertices, target)
            for distribution, value in ((bounds.argmin, bounds.lower), (bounds.argmax, bounds.upper)):
                assert all(c.satisfied_by(distribution) for c in system.constraints)
                assert sum((p for i, p in enumerate(distribution) if target.bits >> i & 1), F(0)) == value

    assert feasible_cases >= 60


def test_bounds_duality_over_complements():
    rng = random.Random(7)
    frame = make_frame(['a', 'b', 'c', 'd'])
    hidden = _random_distribution(rng, frame.size)
    system = build_constraints([_random_body(rng, frame, hidden) for _ in range(3)])
    assert system.feasible
    for s in enumerate_subsets(frame):
        low = probability_bounds(system, s)
        high = probability_bounds(system, complement(s))
        assert low.lower + high.upper == 1


# ---------------------------------------------------------------------------
# 约束系统
# ---------------------------------------------------------------------------

def test_partition_system_forces_points():
    frame, body_a, body_b = _partition_bodies()
    system = build_constraints([body_a, body_b])
    equalities = {
        (c.subset.bits, c.bound) for c in system.constraints
        if c.sense == EQ and c.source != SIMPLEX_SOURCE
    }
    a, b, c = (subset(frame, [x]) for x in 'abc')
    assert ((b | c).bits, F(3, 4)) in equalities
    assert (a.bits, F(1, 4)) in equalities
    assert ((a | b).bits, F(1, 2)) in equalities
    assert (c.bits, F(1, 2)) in equalities

    points = [probability_bounds(system, s) for s in singletons(frame)]
    assert [(p.lower, p.upper) for p in points] == [
        (F(1, 4), F(1, 4)), (F(1, 4), F(1, 4)), (F(1, 2), F(1, 2))
    ]
    assert probability_bounds(system, frame.omega).lower == 1


def test_vacuous_body_gives_simplex_only():
    frame = make_frame(['a', 'b', 'c'])
    system = build_constraints([vacuous(frame)])
    assert all(c.source == SIMPLEX_SOURCE for c in system.constraints)
    assert len(system.constraints) == frame.size + 1


def test_contradictory_bodies_infeasible():
    frame = make_frame(['a', 'b'])
    body_a = make_body(frame, [(subset(frame, ['a']), F(1))])
    body_b = make_body(frame, [(subset(frame, ['b']), F(1))])
    system = build_constraints([body_a, body_b])
    assert not system.feasible
    bounds = probability_bounds(system, subset(frame, ['a']))
    assert not bounds.feasible
    assert bounds.lower is None


def test_quasi_system_interval():
    frame, body_a, body_b = _quasi_bodies()
    system = build_constraints([body_a, body_b])
    bounds = probability_bounds(system, subset(frame, ['b']))
    assert (bounds.lower, bounds.upper) == (F(0), F(1, 4))


def test_exact_simplex_direct():
    # min x + y  s.t.  x + 2y >= 2, 3x + y >= 3
    simplex = ExactSimplex(2, [
        LinearRow((F(1), F(2)), GE, F(2)),
        LinearRow((F(3), F(1)), GE, F(3)),
        LinearRow((F(1), F(1)), LE, F(10)),
    ])
    result = simplex.minimize([F(1), F(1)])
    assert result.value == F(7, 5)
    assert result.solution == [F(4, 5), F(3, 5)]
    assert simplex.maximize([F(1), F(0)]).value == F(10)


def test_exact_simplex_infeasible():
    simplex = ExactSimplex(1, [LinearRow((F(1),), GE, F(2)), LinearRow((F(1),), LE, F(1))])
    assert not simplex.feasible
    assert simplex.minimize([F(1)]).status == 'infeasible'


def test_shared_system_bounds_concurrently():
    """系统构造完成后只读，多个目标可以并发求界"""
    frame, body_a, body_b = _quasi_bodies()
    system = build_constraints([body_a, body_b])
    tableau = system.solver._phase_one
    snapshot = ([list(r) for r in tableau.rows], list(tableau.rhs), list(tableau.basis))

    targets = list(enumerate_subsets(frame)) * 4
    serial = [probability_bounds(system, s) for s in targets]
    with ThreadPoolExecutor(max_workers=4) as executor:
        parallel = list(executor.map(lambda s: probability_bounds(system, s), targets))
    assert parallel == serial
    assert ([list(r) for r in tableau.rows], list(tableau.rhs), list(tableau.basis)) == snapshot


def test_consistency_service_owns_its_limits():
    frame, body_a, body_b = _partition_bodies()
    service = ConsistencyService(frame_size_cap=2)
    with pytest.raises(EvidenceError):
        service.build_constraints([body_a, body_b])

    service = ConsistencyService()
    system = service.build_constraints([body_a, body_b])
    assert system.max_pivots == service.max_pivots
    assert service.audit([body_a, body_b]) == audit([body_a, body_b])


# ---------------------------------------------------------------------------
# 判定与审计
# ---------------------------------------------------------------------------

def _interval(lower, upper, frame=None):
    frame = frame or make_frame(['a'])
    return ProbabilityInterval(subset=frame.omega, lower=lower, upper=upper, feasible=True)


def test_decide_verdict():
    assert decide_verdict(F(1, 4), F(1, 4), _interval(F(1, 4), F(1, 4))) == Verdict.EXACT_MATCH
    assert decide_verdict(F(1, 7), F(1, 7), _interval(F(1, 4), F(1, 4))) == Verdict.VIOLATION
    assert decide_verdict(F(2, 7), F(3, 7), _interval(F(0), F(1, 4))) == Verdict.DISJOINT_VIOLATION
    assert decide_verdict(F(1, 7), F(2, 7), _interval(F(1, 4), F(1, 2))) == Verdict.VIOLATION
    assert decide_verdict(F(1, 4), F(1, 2), _interval(F(0), F(3, 4))) == Verdict.COMPATIBLE
    infeasible = ProbabilityInterval(subset=make_frame(['a']).omega, feasible=False)
    assert decide_verdict(F(0), F(1), infeasible) == Verdict.INFEASIBLE


def test_audit_partition_example():
    frame, body_a, body_b = _partition_bodies()
    report = audit([body_a, body_b])
    assert report.kappa == F(1, 8)
    assert [e.subset for e in report.elements] == singletons(frame)
    assert [(e.ds_lower, e.ds_upper) for e in report.elements] == [
        (F(1, 7), F(1, 7)), (F(3, 7), F(3, 7)), (F(3, 7), F(3, 7))
    ]
    assert all(e.verdict == Verdict.VIOLATION for e in report.elements)
    assert report.has_violation


def test_audit_quasi_example():
    frame, body_a, body_b = _quasi_bodies()
    report = audit([body_a, body_b])
    verdicts = report.verdicts()
    assert verdicts['{b}'] == Verdict.DISJOINT_VIOLATION
    assert verdicts['{a}'] == Verdict.VIOLATION
    assert verdicts['{c}'] == Verdict.VIOLATION
    assert verdicts['{a,b}'] == Verdict.VIOLATION
    entry = report.element(subset(frame, ['b']))
    assert (entry.ds_lower, entry.ds_upper) == (F(2, 7), F(3, 7))
    assert (entry.probability.lower, entry.probability.upper) == (F(0), F(1, 4))


def test_audit_with_vacuous_partner():
    frame = make_frame(['a', 'b', 'c'])
    a, b, c = (subset(frame, [x]) for x in 'abc')
    body = make_body(frame, [(a, F(1, 4)), (b, F(1, 4)), (c, F(1, 2))])
    report = audit([body, vacuous(frame)])
    assert report.kappa == 0
    assert report.all_exact


def test_audit_x_zero_is_exact():
    frame = make_frame(['a', 'b', 'c'])
    a, b, c = (subset(frame, [x]) for x in 'abc')
    body_a = make_body(frame, [(b | c, F(1))])
    body_b = make_body(frame, [(a | b, F(1, 3)), (c, F(2, 3))])
    report = audit([body_a, body_b])
    assert report.all_exact


def test_zero_conflict_partitions_can_stay_compatible():
    """κ = 0 的两个划分，单点概率不唯一时判定为 Compatible"""
    frame = make_frame(['a', 'b', 'c', 'd'])
    s = lambda *xs: subset(frame, xs)
    body_a = make_body(frame, [(s('a', 'b'), F(1, 2)), (s('c', 'd'), F(1, 2))])
    body_b = make_body(frame, [(s('a', 'c'), F(1, 2)), (s('b', 'd'), F(1, 2))])
    report = audit([body_a, body_b])
    assert report.kappa == 0
    assert all(e.verdict == Verdict.COMPATIBLE for e in report.elements)


def test_audit_errors():
    frame, body_a, _ = _partition_bodies()
    with pytest.raises(EvidenceError):
        audit([body_a])
    body_c = make_body(frame, [(subset(frame, ['a']), F(1))])
    body_d = make_body(frame, [(subset(frame, ['b']), F(1))])
    with pytest.raises(TotalConflictError):
        audit([body_c, body_d])


def main():
    print("🚀 开始一致性审计测试")
    print("=" * 50)
    tests = [(name, fn) for name, fn in globals().items() if name.startswith('test_') and callable(fn)]
    passed = 0
    for name, fn in tests:
        try:
            fn()
            print(f"  {name}: ✅ 通过")
            passed += 1
        except Exception as e:
            print(f"  {name}: ❌ 失败 ({e})")
    print(f"\n🎯 总体结果: {passed}/{len(tests)} 项测试通过")
    return passed == len(tests)


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
