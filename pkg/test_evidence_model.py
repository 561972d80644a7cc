#!/usr/bin/env python3
"""
证据体模型测试
质量公理校验与划分 / 准划分分类
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from decimal import Decimal
from fractions import Fraction

import pytest

from config.settings import DECIMAL_EXPONENT_LIMIT
from evidence_audit.models.errors import FrameMismatchError, MassAssignmentError
from evidence_audit.models.evidence import (
    StructureTag,
    classify,
    core,
    is_bayesian,
    make_body,
    mass,
    uncertainty_mass,
    vacuous,
)
from evidence_audit.models.frame import make_frame, subset
from evidence_audit.utils.rational import format_rational, parse_rational

F = Fraction


def _frame():
    return make_frame(['a', 'b', 'c'])


def test_make_body_valid():
    frame = _frame()
    a, bc = subset(frame, ['a']), subset(frame, ['b', 'c'])
    body = make_body(frame, [(a, F(1, 4)), (bc, F(3, 4))], name='A')

    assert mass(body, a) == F(1, 4)
    assert mass(body, bc) == F(3, 4)
    assert mass(body, subset(frame, ['b'])) == 0
    assert body.name == 'A'


def test_zero_mass_entries_dropped():
    frame = _frame()
    body = make_body(frame, [
        (subset(frame, ['a']), F(0)),
        (subset(frame, ['b', 'c']), F(1)),
        (frame.empty, F(0)),
    ])
    assert body.focal_sets() == [subset(frame, ['b', 'c'])]


def test_mass_sum_must_be_one():
    frame = _frame()
    with pytest.raises(MassAssignmentError) as info:
        make_body(frame, [(subset(frame, ['a']), F(1, 2)), (subset(frame, ['b']), F(2, 5))])
    assert '9/10' in str(info.value)


def test_axiom_violations():
    frame = _frame()
    a = subset(frame, ['a'])
    with pytest.raises(MassAssignmentError):
        make_body(frame, [(frame.empty, F(1, 2)), (a, F(1, 2))])
    with pytest.raises(MassAssignmentError):
        make_body(frame, [(a, F(-1, 2)), (frame.omega, F(3, 2))])
    with pytest.raises(MassAssignmentError):
        make_body(frame, [(a, F(1, 2)), (a, F(1, 2))])
    with pytest.raises(MassAssignmentError):
        make_body(frame, [(a, 0.5), (frame.omega, 0.5)])


def test_frame_mismatch():
    frame, other = _frame(), _frame()
    with pytest.raises(FrameMismatchError):
        make_body(frame, [(subset(other, ['a']), F(1))])


def test_equality_ignores_order_and_name():
    frame = _frame()
    a, bc = subset(frame, ['a']), subset(frame, ['b', 'c'])
    first = make_body(frame, [(a, F(1, 4)), (bc, F(3, 4))], name='A')
    second = make_body(frame, [(bc, F(3, 4)), (a, F(1, 4))], name='B')
    assert first == second
    assert hash(first) == hash(second)


def test_classify_structures():
    frame = _frame()
    a, b, c = (subset(frame, [x]) for x in 'abc')

    partition = make_body(frame, [(a, F(1, 4)), (b | c, F(3, 4))])
    assert classify(partition).tag == StructureTag.PARTITION
    assert classify(partition).uncertainty_mass == 0

    quasi = make_body(frame, [(a, F(1, 4)), (b | c, F(1, 2)), (frame.omega, F(1, 4))])
    assert classify(quasi).tag == StructureTag.QUASI_PARTITION
    assert classify(quasi).uncertainty_mass == F(1, 4)

    overlapping = make_body(frame, [(a | b, F(1, 2)), (b | c, F(1, 2))])
    assert classify(overlapping).tag == StructureTag.GENERAL

    assert classify(vacuous(frame)).tag == StructureTag.GENERAL


def test_helpers():
    frame = _frame()
    a, b, c = (subset(frame, [x]) for x in 'abc')
    body = make_body(frame, [(a, F(1, 2)), (c, F(1, 2))])
    assert core(body) == a | c
    assert is_bayesian(body)
    assert uncertainty_mass(body) == 0
    assert uncertainty_mass(vacuous(frame)) == 1
    assert not is_bayesian(vacuous(frame))


def test_parse_rational():
    assert parse_rational('1/4') == F(1, 4)
    assert parse_rational('2/8') == F(1, 4)
    assert parse_rational('3') == F(3)
    assert parse_rational('0.25') == F(1, 4)
    assert parse_rational('1e-2') == F(1, 100)
    assert parse_rational(Decimal('0.1')) == F(1, 10)
    for bad in ('1/0', 'abc', '', 0.5, True):
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_decimal_exponent_is_bounded():
    """巨大的小数指数会被直接拒绝，而不是展开成巨大的整数"""
    assert parse_rational(f'1e-{DECIMAL_EXPONENT_LIMIT}') == F(1, 10 ** DECIMAL_EXPONENT_LIMIT)
    for bad in ('1e-30000000', '5E+99999999', Decimal('1e-30000000')):
        with pytest.raises(ValueError, match='指数'):
            parse_rational(bad)


def test_format_rational():
    assert format_rational(F(6, 8)) == '3/4'
    assert format_rational(F(2)) == '2'
    assert format_rational(F(-1, 3)) == '-1/3'


def main():
    print("🚀 开始证据体模型测试")
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
