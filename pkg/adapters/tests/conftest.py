import shutil
import subprocess
import sys
from pathlib import Path

FIXTURES = Path(__file__).parent / "fixtures"


def run_check(path):
    """Validate a converted file through the evaluation stack's own CLI.

    The converter is coupled to the stack only via the canonical file
    format, so validation goes through the installed command, never an
    import."""
    exe = shutil.which("rexeval")
    cmd = [exe, "check", str(path)] if exe else [sys.executable, "-m", "rexeval.cli", "check", str(path)]
    return subprocess.run(cmd, capture_output=True, text=True)
