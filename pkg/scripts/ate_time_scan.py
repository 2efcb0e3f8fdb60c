"""Ring ATE final observables against total time T (uniform steps, linear mixing ramp, 2e4 steps)."""
import csv
import sys

from spinforge.config import RunConfig
from spinforge.experiments import run_ate

BASE = RunConfig(experiment="ate", model="ring", n=6, J=2.0, C_S=10.0, steps=20000,
                 schedule="constant", evolver="exact", sample_every=20000)

if __name__ == "__main__":
    times = [float(t) for t in sys.argv[1:]] or [1.0, 3.0, 10.0, 30.0]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["T", "s_star", "energy_problem", "target_energy", "s2", "sz", "fidelity"])
    for T in times:
        for s in (0, 1, 2):
            rec = run_ate(BASE.replace(T=T, s_star=str(s)))
            f = rec.final
            w.writerow([T, s, f["energy_problem"], rec.metadata["target_energy"], f["s2"], f["sz"], f["fidelity"]])
            sys.stdout.flush()
