"""Occlusion-based transport: random vs grid placement, centred vs near-wall object.

    python3 scripts/exp2_transport.py --seeds 0..19
"""

from _common import SCENARIOS, line, parser, save

from occlusion_swarm.config import load_config
from occlusion_swarm.harness import run_batch


def main():
    args = parser(__doc__).parse_args()
    doc = {}
    for name in ("rect_transport", "rect_transport_grid", "rect_transport_near_wall"):
        rep = run_batch(load_config(SCENARIOS / f"{name}.yaml"), args.seeds, jobs=args.jobs)
        print(line(name, rep), rep.to_dict()["outcomes"])
        doc[name] = rep.to_dict()
    c, w = doc["rect_transport"]["success_rate"], doc["rect_transport_near_wall"]["success_rate"]
    if not w < c:
        print(f"note: near-wall success {w:.2f} is not below centred {c:.2f}")
    print("wrote", save(args.out, "exp2_transport", doc))


if __name__ == "__main__":
    main()
