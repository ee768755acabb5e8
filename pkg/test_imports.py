"""Test script to verify all imports work correctly."""
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))


def test_third_party_imports():
    import numpy  # noqa: F401
    import pandas  # noqa: F401
    import scipy.ndimage  # noqa: F401
    from dotenv import load_dotenv  # noqa: F401
    from langgraph.graph import StateGraph  # noqa: F401
    from PIL import Image  # noqa: F401


def test_package_imports():
    from evaluation import run_trials  # noqa: F401
    from pipeline import MultiScaleDeblurrer  # noqa: F401
    from records import RunContext  # noqa: F401
    from restoration import deconvolve  # noqa: F401
    from solvers import ImageSolver, KernelSolver  # noqa: F401
    import l0deblur  # noqa: F401


if __name__ == "__main__":
    print("Testing imports...")
    print(f"Project root: {project_root}")
    print()
    for step, check in enumerate((test_third_party_imports, test_package_imports), start=1):
        try:
            print(f"{step}. {check.__name__.replace('test_', '').replace('_', ' ')}...")
            check()
            print("   [OK] imported successfully")
        except Exception as e:
            print(f"   [ERROR] Error: {e}")
            import traceback
            traceback.print_exc()
            sys.exit(1)
    print()
    print("[SUCCESS] All imports successful! The CLI should work.")
