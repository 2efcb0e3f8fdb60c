"""Term, CNOT and depth counts of the linear and quartic penalties for n = 4..14."""
import sys

from _common import parser, run_all
from spinforge.config import RunConfig

if __name__ == "__main__":
    p = parser(__doc__, "results/scaling")
    p.add_argument("--n-list", default="4..14")
    args = p.parse_args()
    cfg = RunConfig(experiment="scaling", n_list=args.n_list, s_star="0", workers=args.workers)
    sys.exit(run_all([("scaling.csv", cfg)], args))
