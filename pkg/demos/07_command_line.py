"""The same calculations from the shell.

Every subcommand writes CSV (with a one-line JSON header) or JSON, so runs
can be scripted and their inputs recovered from the output files.
"""
import subprocess
import sys
import tempfile

runs = [
    ["efficiency", "--g", "1", "--kappa", "1", "--gamma", "1"],
    ["efficiency", "--scheme", "two-level-biref", "--units", "mhz", "--g", "12.3", "--kappa", "4.1",
     "--gamma", "11.5", "--delta-p", "19.3"],
    ["optimize", "--scheme", "two-level-biref", "--vary", "delta-p", "--c", "10"],
    ["evolve", "--tmax", "pi", "--samples", "5"],
    ["design", "--preset", "takahashi", "--lengths", "370:550:3", "--delta-p-mhz", "0:20:3"],
]
for argv in runs:
    print("$ purcellsim", " ".join(argv))
    out = subprocess.run([sys.executable, "-m", "purcellsim.cli", *argv], capture_output=True, text=True)
    print(out.stdout.strip()[:1200])
    print()

with tempfile.TemporaryDirectory() as tmp:
    out = subprocess.run([sys.executable, "-m", "purcellsim.cli", "reproduce", "fig4a", "--points", "5",
                          "--outdir", tmp], capture_output=True, text=True)
    print("$ purcellsim reproduce fig4a --points 5  ->", out.stdout.strip())

bad = subprocess.run([sys.executable, "-m", "purcellsim.cli", "efficiency", "--kappa", "0", "--gamma", "0"],
                     capture_output=True, text=True)
print("no decay channel -> exit code", bad.returncode, "|", bad.stderr.strip())
