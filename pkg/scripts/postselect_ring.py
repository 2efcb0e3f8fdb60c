"""Second stage on the ring: rotate the s* = 1 ground state and post-select S_z = 0, 1, -1."""
import sys

from spinforge.cli import run
from spinforge.config import RunConfig

if __name__ == "__main__":
    for sz in ("1", "0", "-1"):
        print(f"# s_z* = {sz}")
        run(RunConfig(experiment="postselect", model="ring", n=6, J=2.0, C_S=10.0, s_star="1", s_z_star=sz))
    sys.exit(0)
