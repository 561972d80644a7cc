#!/usr/bin/env python3
"""
创建示例证据文件脚本
把内置的三组示例证据以规范形式写到 data/ 目录
"""
import logging
import sys
import os

# 添加项目根目录到路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from evidence_audit.services.repro_service import SAMPLE_DOCUMENTS, sample_evidence
from evidence_audit.utils.evidence_io import dump_document

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'data')


def create_sample_evidence(target_dir: str = DATA_DIR) -> list:
    """写出全部示例文件，返回写出的路径"""
    os.makedirs(target_dir, exist_ok=True)
    written = []
    for name in SAMPLE_DOCUMENTS:
        path = os.path.join(target_dir, f"{name}.json")
        with open(path, 'w', encoding='utf-8') as f:
            f.write(dump_document(sample_evidence(name)))
        logger.info(f"已写出 {path}")
        written.append(path)
    return written


if __name__ == "__main__":
    paths = create_sample_evidence()
    print(f"✅ 共创建 {len(paths)} 个示例证据文件")
