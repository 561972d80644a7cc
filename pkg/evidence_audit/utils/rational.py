"""
精确有理数的解析与格式化
输入接受 "p/q"、整数和有限小数（按十进制精确转换，绝不舍入）
"""
import re
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Union

from config.settings import DECIMAL_EXPONENT_LIMIT

_FRACTION_PATTERN = re.compile(r'^\s*([+-]?\d+)\s*/\s*(\d+)\s*$')
_INTEGER_PATTERN = re.compile(r'^\s*[+-]?\d+\s*$')
_DECIMAL_PATTERN = re.compile(r'^\s*[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?\s*$')


def _exact_decimal(value: Decimal) -> Fraction:
    if not value.is_finite():
        raise ValueError(f"无法解析为有理数: {value}")
    exponent = value.as_tuple().exponent
    if abs(exponent) > DECIMAL_EXPONENT_LIMIT:
        raise ValueError(f"小数 {value} 的指数 {exponent} 超出上限 ±{DECIMAL_EXPONENT_LIMIT}")
    return Fraction(value)


def parse_rational(value: Union[str, int, Decimal, Fraction]) -> Fraction:
    """
    解析精确有理数
    浮点数被拒绝：0.1 这样的二进制浮点值无法精确表示十进制输入
    """
    if isinstance(value, bool):
        raise ValueError(f"无法解析为有理数: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Decimal):
        return _exact_decimal(value)
    if isinstance(value, float):
        raise ValueError(f"拒绝浮点数 {value!r}：请使用分数字符串，例如 \"1/4\"")
    if not isinstance(value, str):
        raise ValueError(f"无法解析为有理数: {value!r}")

    match = _FRACTION_PATTERN.match(value)
    if match:
        numerator, denominator = int(match.group(1)), int(match.group(2))
        if denominator == 0:
            raise ValueError(f"分母为零: {value!r}")
        return Fraction(numerator, denominator)
    if _INTEGER_PATTERN.match(value):
        return Fraction(int(value))
    if _DECIMAL_PATTERN.match(value):
        try:
            decimal = Decimal(value.strip())
        except InvalidOperation:
            pass
        else:
            return _exact_decimal(decimal)
    raise ValueError(f"无法解析为有理数: {value!r}")


def format_rational(value: Fraction) -> str:
    """规范形式: 整数写作 "3"，其余写作最简 "p/q" """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational_list(text: str) -> list:
    """逗号分隔的有理数列表，如 "0,1/4,1/2" """
    return [parse_rational(item) for item in text.split(',') if item.strip()]
