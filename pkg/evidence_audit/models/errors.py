"""
异常定义
所有证据相关错误都继承自 EvidenceError，命令行层据此映射退出码
"""
from typing import Optional


class EvidenceError(ValueError):
    """证据计算错误基类"""


class FrameError(EvidenceError):
    """识别框架构造错误：空框架、重复标签、未知标签、超出大小上限"""


class FrameMismatchError(EvidenceError):
    """两个子集（或证据体）不属于同一个识别框架"""


class MassAssignmentError(EvidenceError):
    """质量分配违反公理：空集有质量、负质量、总和不为1、焦元重复"""


class NotABeliefFunctionError(EvidenceError):
    """Möbius 反演得到负质量或总和不为1，输入表不是信任函数"""

    def __init__(self, message: str, subset=None):
        super().__init__(message)
        self.subset = subset


class TotalConflictError(EvidenceError):
    """冲突系数 κ = 1，两个证据体无法组合"""

    def __init__(self, message: str, step: Optional[int] = None):
        super().__init__(message)
        self.step = step


class ParameterRangeError(EvidenceError):
    """参数族的参数超出取值范围"""


class EvidenceFileError(EvidenceError):
    """证据文件解析或校验失败，附带文件与行号"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = path or '<input>'
        if line is not None:
            location = f"{location}:{line}"
        super().__init__(f"{location}: {message}")


class InternalConsistencyError(EvidenceError):
    """闭式解与通用组合实现的结果不一致"""
