"""Mn trimer: spectrum in cm^-1, then ATE and PITE (eV units, C_S = 3) for s* = 2, 3, 4."""
import sys

from _common import parser, run_all
from spinforge.config import RunConfig

MN = RunConfig(model="mn", energy_unit="eV", C_S=3.0)

if __name__ == "__main__":
    args = parser(__doc__, "results/mn").parse_args()
    configs = [("spectrum_cm-1.csv", MN.replace(experiment="spectrum", energy_unit="cm-1"))]
    for s in (2, 3, 4):
        configs.append((f"ate_s{s}.csv", MN.replace(experiment="ate", s_star=str(s), T=1.0, steps=20000,
                                                    sample_every=100)))
        configs.append((f"pite_s{s}.csv", MN.replace(experiment="pite", s_star=str(s), dt=0.008, m0=0.8,
                                                     pite_steps=2000, sample_every=10)))
    sys.exit(run_all(configs, args))
