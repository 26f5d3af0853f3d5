"""Allow running as python -m lava_sysid"""
from .cli import run

run()
