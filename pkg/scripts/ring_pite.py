"""PITE on the 6-site ring: linear (C_S = 7.5) vs quartic (C_S = 3) penalty, dt = 0.015 and 0.05."""
import sys

from _common import parser, run_all
from spinforge.config import RunConfig

BASE = RunConfig(experiment="pite", model="ring", n=6, J=2.0, m0=0.8, pite_steps=2000,
                 evolver="exact", sample_every=1)
PENALTIES = {"linear": dict(penalty="linear", C_S=7.5), "quartic": dict(penalty="quartic", C_S=3.0)}

if __name__ == "__main__":
    args = parser(__doc__, "results/ring_pite").parse_args()
    configs = [(f"pite_{kind}_dt{dt}_s{s}.csv", BASE.replace(dt=dt, s_star=str(s), **kw))
               for kind, kw in PENALTIES.items() for dt in (0.015, 0.05) for s in (0, 1, 2)]
    sys.exit(run_all(configs, args))
