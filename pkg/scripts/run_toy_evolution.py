"""Run the search loop on the marker-count toy problem and print the trajectory.

The mutator inserts one marker per step, so the best fitness should climb
steadily; migrations every ``--interval`` steps show up in the log.

    python scripts/run_toy_evolution.py --steps 200 --seed 0 --out runs/toy_evolution
"""

import argparse
from pathlib import Path

from lexevolve.evolve import EvolveConfig, evolve_loop
from lexevolve.evolve.evaluators import MarkerCountEvaluator
from lexevolve.evolve.loop import LineageLog, write_trajectory
from lexevolve.evolve.mutators import MarkerMutator
from lexevolve.evolve.runner import TOY_SEED_PROGRAM


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--interval", type=int, default=20)
    ap.add_argument("--out", default="runs/toy_evolution")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    cfg = EvolveConfig(seed=args.seed, migration_interval=args.interval)
    with open(out / "lineage.jsonl", "w", encoding="utf-8") as fh:
        result = evolve_loop(TOY_SEED_PROGRAM, args.steps, MarkerMutator(), MarkerCountEvaluator(), cfg,
                             LineageLog(fh))
    write_trajectory(result, out / "trajectory.csv")

    for step, best in result.trajectory()[:: max(1, args.steps // 10)]:
        print(f"step {step:>5}  best {best:g}")
    sizes = [len(result.population.members(i)) for i in range(cfg.islands)]
    print(f"final best {result.best.fitness:g}; island sizes {sizes}; "
          f"{len(result.migrations)} migration copies; {len(result.population.evictions)} evictions")


if __name__ == "__main__":
    main()
