"""Run the qglab CLI. Use from project root: python run_qglab.py verify-modes"""
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "engine"))

from qglab.main import main  # noqa: E402

sys.exit(main())
