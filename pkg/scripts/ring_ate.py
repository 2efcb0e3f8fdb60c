"""ATE on the 6-site Heisenberg ring for s* = 0, 1, 2 (T = 1, C_S = 10)."""
import sys

from _common import parser, run_all
from spinforge.config import RunConfig

BASE = RunConfig(experiment="ate", model="ring", n=6, J=2.0, C_S=10.0, T=1.0, steps=20000,
                 schedule="sine_squared", amplitude=1e-4, evolver="exact", sample_every=100,
                 extra_fidelity=True)

if __name__ == "__main__":
    args = parser(__doc__, "results/ring_ate").parse_args()
    sys.exit(run_all([(f"ate_s{s}.csv", BASE.replace(s_star=str(s))) for s in (0, 1, 2)], args))
