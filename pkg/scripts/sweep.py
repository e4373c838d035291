"""Generic one-parameter sweep over a scenario file.

    python3 scripts/sweep.py scenarios/rect_transport.yaml dynamics.k_r 0.0,0.002,0.01,0.05 --seeds 0..9
"""

from pathlib import Path

from _common import line, parser, save

from occlusion_swarm.cli import parse_sweep
from occlusion_swarm.config import load_config
from occlusion_swarm.harness import run_sweep


def main():
    p = parser(__doc__, default_seeds="0..9")
    p.add_argument("config", type=Path)
    p.add_argument("key")
    p.add_argument("values", help="comma separated")
    args = p.parse_args()
    key, values = parse_sweep(f"{args.key}={args.values}")
    cfg = load_config(args.config)
    doc = {}
    for v, rep in run_sweep(cfg, key, values, args.seeds, jobs=args.jobs):
        print(line(f"{key}={v}", rep), rep.to_dict()["outcomes"])
        doc[str(v)] = rep.to_dict()
    print("wrote", save(args.out, f"sweep_{cfg.name}_{key}", doc))


if __name__ == "__main__":
    main()
