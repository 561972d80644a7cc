#!/usr/bin/env python3
"""
命令行启动脚本
用法: python run_cli.py audit -i data/paper31.json A B
"""
import sys
import os

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from evidence_audit.app.main import app

if __name__ == "__main__":
    app(prog_name="evidence-audit")
