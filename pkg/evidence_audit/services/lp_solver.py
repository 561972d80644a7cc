"""
精确有理数单纯形法
两阶段法 + Bland 规则，全程使用 Fraction，不存在舍入误差
第一阶段在构造时完成并缓存可行基，同一约束系统上的多个目标函数共享（可并发求解）
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from config.settings import LP_CONFIG

logger = logging.getLogger(__name__)

ZERO = Fraction(0)

LE, GE, EQ = '<=', '>=', '='


@dataclass(frozen=True)
class LinearRow:
    """Σ coefficients[j]·x_j (sense) rhs"""
    coefficients: Tuple[Fraction, ...]
    sense: str
    rhs: Fraction


@dataclass
class LinearProgramResult:
    status: str  # 'optimal' / 'infeasible'
    value: Optional[Fraction] = None
    solution: Optional[List[Fraction]] = None


class _Tableau:
    """稠密单纯形表；reduced 为检验数行，value 为当前目标值"""

    def __init__(self, rows: List[List[Fraction]], rhs: List[Fraction], basis: List[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.reduced: List[Fraction] = []
        self.value = ZERO
        self.pivots = 0

    def copy(self) -> '_Tableau':
        return _Tableau([list(r) for r in self.rows], list(self.rhs), list(self.basis))

    def set_cost(self, cost: Sequence[Fraction]) -> None:
        reduced = list(cost)
        value = ZERO
        for row, b, var in zip(self.rows, self.rhs, self.basis):
            c_b = cost[var]
            if c_b:
                reduced = [r - c_b * a if a else r for r, a in zip(reduced, row)]
                value += c_b * b
        self.reduced = reduced
        self.value = value

    def pivot(self, p: int, q: int) -> None:
        prow = self.rows[p]
        piv = prow[q]
        if piv != 1:
            prow = [a / piv if a else a for a in prow]
            self.rows[p] = prow
            self.rhs[p] = self.rhs[p] / piv
        b_p = self.rhs[p]
        for i, row in enumerate(self.rows):
            if i == p:
                continue
            f = row[q]
            if f:
                self.rows[i] = [a - f * b if b else a for a, b in zip(row, prow)]
                self.rhs[i] -= f * b_p
        f = self.reduced[q]
        if f:
            self.reduced = [a - f * b if b else a for a, b in zip(self.reduced, prow)]
            self.value += f * b_p
        self.basis[p] = q
        self.pivots += 1

    def run(self, max_pivots: int, columns: Optional[int] = None) -> str:
        """最小化当前目标；Bland 规则保证终止"""
        limit = len(self.reduced) if columns is None else columns
        while True:
            entering = next((j for j in range(limit) if self.reduced[j] < 0), None)
            if entering is None:
                return 'optimal'
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    key = (self.rhs[i] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return 'unbounded'
            if self.pivots >= max_pivots:
                raise RuntimeError(f"单纯形换基次数超过上限 {max_pivots}")
            self.pivot(best[1], entering)


class ExactSimplex:
    """
    变量非负的线性规划 min / max c·x
    约束行由 LinearRow 给出
    """

    def __init__(self, num_vars: int, rows: Sequence[LinearRow], max_pivots: Optional[int] = None):
        self.num_vars = num_vars
        self.max_pivots = max_pivots or LP_CONFIG['max_pivots']
        self._phase_one: Optional[_Tableau] = None
        self._build(rows)
        # 第一阶段在构造时完成，之后只读取 _phase_one 的副本
        self._feasible = self._solve_phase_one()

    def _build(self, rows: Sequence[LinearRow]) -> None:
        normalized = []
        for row in rows:
            coefficients, sense, rhs = list(row.coefficients), row.sense, Fraction(row.rhs)
            if rhs < 0:
                coefficients = [-a for a in coefficients]
                rhs = -rhs
                sense = {LE: GE, GE: LE, EQ: EQ}[sense]
            normalized.append((coefficients, sense, rhs))

        n = self.num_vars
        slack_count = sum(1 for _, sense, _ in normalized if sense != EQ)
        artificial_count = sum(1 for _, sense, _ in normalized if sense != LE)
        self._artificial_start = n + slack_count
        width = self._artificial_start + artificial_count

        table, rhs_values, basis = [], [], []
        slack_col, artificial_col = n, self._artificial_start
        for coefficients, sense, rhs in normalized:
            line = coefficients + [ZERO] * (width - n)
            if sense == LE:
                line[slack_col] = Fraction(1)
                basis.append(slack_col)
                slack_col += 1
            else:
                if sense == GE:
                    line[slack_col] = Fraction(-1)
                    slack_col += 1
                line[artificial_col] = Fraction(1)
                basis.append(artificial_col)
                artificial_col += 1
            table.append(line)
            rhs_values.append(rhs)

        self._tableau = _Tableau(table, rhs_values, basis)
        self._width = width

    def _solve_phase_one(self) -> bool:
        tableau = self._tableau
        cost = [ZERO] * self._artificial_start + [Fraction(1)] * (self._width - self._artificial_start)
        tableau.set_cost(cost)
        tableau.run(self.max_pivots)

        if tableau.value > 0:
            logger.info(f"约束系统不可行（第一阶段目标值 {tableau.value}）")
            return False

        # 把退化的人工变量换出基；换不出的行是冗余约束
        redundant = []
        for i, var in enumerate(tableau.basis):
            if var < self._artificial_start:
                continue
            column = next((j for j in range(self._artificial_start) if tableau.rows[i][j] != 0), None)
            if column is None:
                redundant.append(i)
            else:
                tableau.pivot(i, column)
        for i in reversed(redundant):
            del tableau.rows[i]
            del tableau.rhs[i]
            del tableau.basis[i]
        tableau.rows = [row[:self._artificial_start] for row in tableau.rows]

        logger.debug(f"第一阶段完成: 换基 {tableau.pivots} 次，冗余约束 {len(redundant)} 条")
        self._phase_one = tableau
        return True

    @property
    def feasible(self) -> bool:
        return self._feasible

    def minimize(self, objective: Sequence[Fraction]) -> LinearProgramResult:
        if not self._feasible:
            return LinearProgramResult(status='infeasible')

        tableau = self._phase_one.copy()
        cost = [Fraction(c) for c in objective] + [ZERO] * (self._artificial_start - self.num_vars)
        tableau.set_cost(cost)
        status = tableau.run(self.max_pivots)
        if status == 'unbounded':
            raise RuntimeError("线性规划无界")

        solution = [ZERO] * self.num_vars
        for b, var in zip(tableau.rhs, tableau.basis):
            if var < self.num_vars:
                solution[var] = b
        return LinearProgramResult(status='optimal', value=tableau.value, solution=solution)

    def maximize(self, objective: Sequence[Fraction]) -> LinearProgramResult:
        result = self.minimize([-Fraction(c) for c in objective])
        if result.status == 'optimal':
            result.value = -result.value
        return result
