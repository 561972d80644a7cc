"""
应用配置文件
"""
import os
from dotenv import load_dotenv

load_dotenv()

# 识别框架配置
FRAME_SIZE_CAP = int(os.getenv('FRAME_SIZE_CAP', 24))  # 幂集枚举的硬上限

# 有理数输入配置
DECIMAL_EXPONENT_LIMIT = int(os.getenv('DECIMAL_EXPONENT_LIMIT', 64))  # 小数指数绝对值上限，如 1e-64

# 日志配置
LOG_LEVEL = os.getenv('LOG_LEVEL', 'WARNING').upper()
LOG_FORMAT = os.getenv('LOG_FORMAT', '%(asctime)s - %(levelname)s - %(message)s')

# 精确线性规划配置
LP_CONFIG = {
    'max_pivots': int(os.getenv('LP_MAX_PIVOTS', 100000)),  # 单次求解的最大换基次数
}

# 参数扫描配置
SWEEP_CONFIG = {
    'default_grid': int(os.getenv('SWEEP_GRID', 4)),
    'xbar_slices': os.getenv('SWEEP_XBAR_SLICES', '0,1/4,1/2,3/4,1'),
    'workers': int(os.getenv('SWEEP_WORKERS', 1)),  # 1 表示串行
}

# 命令行退出码（稳定契约）
CLI_CONFIG = {
    'exit_codes': {
        'ok': 0,
        'check_failed': 1,  # paper-repro 失败或内部一致性检查失败
        'input_error': 2,
        'total_conflict': 3,
        'inconsistent': 4,
        'infeasible': 5,
    },
    'default_format': os.getenv('OUTPUT_FORMAT', 'table'),
}
