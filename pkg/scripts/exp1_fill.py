"""Concave filling: U, U turned 15 degrees, L and Arc, plus the L sweeps.

    python3 scripts/exp1_fill.py --seeds 0..9
"""

from _common import SCENARIOS, line, parser, save

from occlusion_swarm.config import load_config
from occlusion_swarm.harness import run_batch, run_sweep, soft_check_nonincreasing


def main():
    p = parser(__doc__, default_seeds="0..9")
    p.add_argument("--counts", default="4,8,12")
    p.add_argument("--orientations", default="0,30,60,90")
    args = p.parse_args()

    doc = {}
    for name in ("u_fill", "u_fill_rot15", "l_fill", "arc_fill"):
        rep = run_batch(load_config(SCENARIOS / f"{name}.yaml"), args.seeds, jobs=args.jobs)
        print(line(name, rep))
        doc[name] = rep.to_dict()

    l_cfg = load_config(SCENARIOS / "l_fill.yaml")
    counts = [int(c) for c in args.counts.split(",")]
    by_count = run_sweep(l_cfg, "robot_count", counts, args.seeds, jobs=args.jobs)
    for v, rep in by_count:
        print(line(f"l_fill robot_count={v}", rep))
    soft_check_nonincreasing([rep.final_deficiency_mean for _, rep in by_count], "L fill vs robot_count")
    doc["l_fill_robot_count"] = {str(v): rep.to_dict() for v, rep in by_count}

    angles = [float(a) for a in args.orientations.split(",")]
    for v, rep in run_sweep(l_cfg, "object_orientation_deg", angles, args.seeds, jobs=args.jobs):
        print(line(f"l_fill orientation={v:g}", rep))
        doc.setdefault("l_fill_orientation", {})[str(v)] = rep.to_dict()

    print("wrote", save(args.out, "exp1_fill", doc))


if __name__ == "__main__":
    main()
