"""
证据文件读写
文件为 JSON 语法：
{
  "frame": ["a", "b", "c"],
  "bodies": [
    {"name": "A", "masses": [{"set": ["a"], "mass": "1/4"}, {"set": ["b", "c"], "mass": "3/4"}]}
  ]
}
质量写成 "p/q" 或整数字符串；可以精确表示的小数（"0.25"）会被精确转换
"""
import json
import logging
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from evidence_audit.models.errors import EvidenceError, EvidenceFileError
from evidence_audit.models.evidence import BodyOfEvidence, make_body
from evidence_audit.models.frame import Frame, labels, make_frame, subset
from evidence_audit.models.report import Rational
from evidence_audit.utils.rational import format_rational, parse_rational

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ['family', 'x', 'xbar', 'y', 'kappa', 'element', 'ds_lo', 'ds_hi', 'p_lo', 'p_hi', 'verdict']


class MassEntry(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, populate_by_name=True)

    members: List[str] = Field(alias='set')
    mass: Rational

    @field_validator('mass', mode='before')
    @classmethod
    def exact_mass(cls, value):
        return parse_rational(value)


class BodyEntry(BaseModel):
    name: str
    masses: List[MassEntry]


class EvidenceDocument(BaseModel):
    """证据文件的结构化表示"""
    frame: List[str]
    bodies: List[BodyEntry]


@dataclass
class LoadedEvidence:
    """解析并校验后的框架与具名证据体"""
    frame: Frame
    bodies: Dict[str, BodyOfEvidence]
    source: Optional[str] = None

    def select(self, names: Sequence[str]) -> List[BodyOfEvidence]:
        """按名称取证据体；未给出名称时返回文件中的全部证据体"""
        if not names:
            return list(self.bodies.values())
        selected = []
        for name in names:
            if name not in self.bodies:
                raise EvidenceFileError(f"证据体 {name!r} 不存在，可选: {', '.join(self.bodies)}", self.source)
            selected.append(self.bodies[name])
        return selected


def _line_of(text: Optional[str], needle: str) -> Optional[int]:
    if not text:
        return None
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    return None


def _body_line(text: Optional[str], raw: dict, index: int) -> Optional[int]:
    try:
        name = raw['bodies'][index]['name']
    except (KeyError, IndexError, TypeError):
        return _line_of(text, '"bodies"')
    bodies_line = _line_of(text, '"bodies"')
    if bodies_line is None:
        return None
    needle = json.dumps(name, ensure_ascii=False)
    for number, line in enumerate(text.splitlines()[bodies_line - 1:], start=bodies_line):
        if '"name"' in line and needle in line.split('"name"', 1)[1]:
            return number
    return bodies_line


def build_evidence(document: EvidenceDocument, source: Optional[str] = None,
                   text: Optional[str] = None) -> LoadedEvidence:
    """文档 -> 框架 + 证据体；证据模型的错误带上文件与行号"""
    raw = document.model_dump(by_alias=True)
    try:
        frame = make_frame(document.frame)
    except EvidenceError as e:
        raise EvidenceFileError(str(e), source, _line_of(text, '"frame"')) from e

    bodies: Dict[str, BodyOfEvidence] = {}
    for index, entry in enumerate(document.bodies):
        line = _body_line(text, raw, index)
        if entry.name in bodies:
            raise EvidenceFileError(f"证据体名称重复: {entry.name!r}", source, line)
        try:
            assignments = [(subset(frame, m.members), m.mass) for m in entry.masses]
            bodies[entry.name] = make_body(frame, assignments, name=entry.name)
        except EvidenceError as e:
            raise EvidenceFileError(f"证据体 {entry.name!r}: {e}", source, line) from e

    logger.info(f"读取证据: 框架 {list(frame.labels)}，证据体 {list(bodies)}")
    return LoadedEvidence(frame=frame, bodies=bodies, source=source)


def parse_document(text: str, source: Optional[str] = None) -> LoadedEvidence:
    # 数字按 Decimal 读入，避免经过浮点
    try:
        raw = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as e:
        raise EvidenceFileError(f"JSON 语法错误: {e.msg}", source, e.lineno) from e

    try:
        document = EvidenceDocument.model_validate(raw)
    except ValidationError as e:
        error = e.errors()[0]
        loc = error['loc']
        line = None
        if len(loc) >= 2 and loc[0] == 'bodies' and isinstance(loc[1], int):
            line = _body_line(text, raw, loc[1])
        elif loc:
            line = _line_of(text, f'"{loc[0]}"')
        where = '.'.join(str(part) for part in loc)
        raise EvidenceFileError(f"{where}: {error['msg']}", source, line) from e

    return build_evidence(document, source, text)


def load_evidence(path) -> LoadedEvidence:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise EvidenceFileError(f"无法读取文件: {e.strerror}", str(path)) from e
    return parse_document(text, str(path))


def to_document(frame: Frame, bodies: Sequence[BodyOfEvidence]) -> EvidenceDocument:
    """规范形式: 焦元按掩码排序，集合内元素按框架顺序，分数为最简形式"""
    entries = []
    for index, body in enumerate(bodies):
        masses = [
            MassEntry(members=labels(s), mass=m)
            for s, m in sorted(body.focal, key=lambda item: item[0].bits)
        ]
        entries.append(BodyEntry(name=body.name or f"#{index}", masses=masses))
    return EvidenceDocument(frame=list(frame.labels), bodies=entries)


def dump_document(loaded: LoadedEvidence) -> str:
    document = to_document(loaded.frame, list(loaded.bodies.values()))
    return json.dumps(document.model_dump(by_alias=True), ensure_ascii=False, indent=2) + '\n'


def _cell(value) -> str:
    return '' if value is None else format_rational(value)


def sweep_rows(result) -> List[Dict[str, str]]:
    """扫描结果展开为 CSV 行，数值全部预先渲染为分数字符串"""
    rows = []
    for point in result.points:
        for row in point.rows:
            rows.append({
                'family': result.family.value,
                'x': _cell(point.x),
                'xbar': _cell(point.xbar),
                'y': _cell(point.y),
                'kappa': _cell(point.kappa),
                'element': row.element,
                'ds_lo': _cell(row.ds_lo),
                'ds_hi': _cell(row.ds_hi),
                'p_lo': _cell(row.p_lo),
                'p_hi': _cell(row.p_hi),
                'verdict': row.verdict.value,
            })
    return rows


def sweep_frame(result) -> pd.DataFrame:
    return pd.DataFrame(sweep_rows(result), columns=SWEEP_COLUMNS, dtype=str)


def write_sweep_csv(result, path=None) -> str:
    """写出扫描 CSV；path 为 None 时只返回文本"""
    text = sweep_frame(result).to_csv(index=False, lineterminator='\n')
    if path is not None:
        Path(path).write_text(text, encoding='utf-8')
        logger.info(f"扫描结果已写入 {path}: {len(result.points)} 个网格点")
    return text


OMEGA_TOKENS = {'Ω', 'omega', 'Omega', 'OMEGA'}
EMPTY_TOKENS = {'∅', '{}', 'empty'}


def parse_subset(frame: Frame, text: str):
    """
    命令行子集记号: "a,b"、"{a,b}"、"Ω"（或 omega）、"∅"（或 {}）
    与框架标签完全相同的记号总是按标签解析
    """
    token = text.strip()
    for candidate in (token, token[1:-1] if token.startswith('{') and token.endswith('}') else None):
        if candidate in frame.labels:
            return subset(frame, [candidate])
    if token in OMEGA_TOKENS:
        return frame.omega
    if token in EMPTY_TOKENS:
        return frame.empty
    if token.startswith('{') and token.endswith('}'):
        token = token[1:-1]
    members = [item.strip() for item in token.split(',') if item.strip()]
    return subset(frame, members)
