"""
识别框架与子集代数
子集用框架元素顺序上的位掩码表示：第 i 位为 1 表示第 i 个元素属于该子集
"""
import uuid
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from config.settings import FRAME_SIZE_CAP
from evidence_audit.models.errors import FrameError, FrameMismatchError


@dataclass(frozen=True)
class Frame:
    """识别框架 Ω，元素顺序在构造时固定"""
    labels: Tuple[str, ...]
    frame_id: str = field(default_factory=lambda: uuid.uuid4().hex)
    _index: Dict[str, int] = field(default=None, init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, '_index', {label: i for i, label in enumerate(self.labels)})

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    @property
    def omega(self) -> 'FocalSet':
        return FocalSet(self.full_mask, self)

    @property
    def empty(self) -> 'FocalSet':
        return FocalSet(0, self)

    def index_of(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise FrameError(f"未知元素标签: {label!r}（框架: {', '.join(self.labels)}）") from None

    def same_as(self, other: 'Frame') -> bool:
        return self.frame_id == other.frame_id


@dataclass(frozen=True)
class FocalSet:
    """Ω 的子集，绑定到唯一的识别框架"""
    bits: int
    frame: Frame

    def __and__(self, other: 'FocalSet') -> 'FocalSet':
        return intersect(self, other)

    def __or__(self, other: 'FocalSet') -> 'FocalSet':
        return union(self, other)

    def __sub__(self, other: 'FocalSet') -> 'FocalSet':
        return difference(self, other)

    def __invert__(self) -> 'FocalSet':
        return complement(self)

    def __le__(self, other: 'FocalSet') -> bool:
        return is_subset(self, other)

    def __len__(self) -> int:
        return cardinality(self)

    def __bool__(self) -> bool:
        return not is_empty(self)

    def __str__(self) -> str:
        return render(self)


def make_frame(labels: Iterable[str], cap: Optional[int] = None) -> Frame:
    """
    构造识别框架
    标签必须非空、互不相同，且数量不超过上限
    """
    labels = list(labels)
    cap = FRAME_SIZE_CAP if cap is None else cap

    if not labels:
        raise FrameError("识别框架不能为空")
    for label in labels:
        if not isinstance(label, str) or not label:
            raise FrameError(f"元素标签必须是非空字符串: {label!r}")
    seen = set()
    for label in labels:
        if label in seen:
            raise FrameError(f"元素标签重复: {label!r}")
        seen.add(label)
    if len(labels) > cap:
        raise FrameError(f"识别框架大小 {len(labels)} 超出上限 {cap}")

    return Frame(tuple(labels))


def subset(frame: Frame, members: Iterable[str]) -> FocalSet:
    """由元素标签构造子集；[] 得到 ∅，全部标签得到 Ω"""
    bits = 0
    for label in members:
        bits |= 1 << frame.index_of(label)
    return FocalSet(bits, frame)


def _check_same_frame(s: FocalSet, t: FocalSet) -> None:
    if not s.frame.same_as(t.frame):
        raise FrameMismatchError(
            f"子集属于不同的识别框架: {render(s)} 与 {render(t)}"
        )


def intersect(s: FocalSet, t: FocalSet) -> FocalSet:
    _check_same_frame(s, t)
    return FocalSet(s.bits & t.bits, s.frame)


def union(s: FocalSet, t: FocalSet) -> FocalSet:
    _check_same_frame(s, t)
    return FocalSet(s.bits | t.bits, s.frame)


def difference(s: FocalSet, t: FocalSet) -> FocalSet:
    _check_same_frame(s, t)
    return FocalSet(s.bits & ~t.bits, s.frame)


def complement(s: FocalSet) -> FocalSet:
    return FocalSet(s.frame.full_mask & ~s.bits, s.frame)


def is_subset(s: FocalSet, t: FocalSet) -> bool:
    _check_same_frame(s, t)
    return s.bits & ~t.bits == 0


def is_empty(s: FocalSet) -> bool:
    return s.bits == 0


def cardinality(s: FocalSet) -> int:
    return bin(s.bits).count('1')


def enumerate_subsets(frame: Frame) -> Iterator[FocalSet]:
    """按掩码升序产出全部 2^size 个子集"""
    for bits in range(1 << frame.size):
        yield FocalSet(bits, frame)


def submasks(s: FocalSet) -> Iterator[FocalSet]:
    """s 的全部子集（含 ∅ 与 s 本身），按掩码降序"""
    sub = s.bits
    while True:
        yield FocalSet(sub, s.frame)
        if sub == 0:
            break
        sub = (sub - 1) & s.bits


def singletons(frame: Frame) -> List[FocalSet]:
    return [FocalSet(1 << i, frame) for i in range(frame.size)]


def labels(s: FocalSet) -> List[str]:
    """子集中的元素标签，按框架顺序"""
    return [label for i, label in enumerate(s.frame.labels) if s.bits >> i & 1]


def render(s: FocalSet) -> str:
    if s.bits == 0:
        return '∅'
    return '{' + ','.join(labels(s)) + '}'
