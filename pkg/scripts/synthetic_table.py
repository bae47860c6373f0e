"""Accuracy table over several synthetic "participants".

Each participant is a 40-set dataset with its own seed and noise level; the
three methods are scored by leave-one-out cross-validation and printed in
the same layout as the published per-participant table.

    python scripts/synthetic_table.py --noise 3 6 10 15
"""
import argparse
import time

from uwbmotion.evaluation import benchmark, render_table
from uwbmotion.synth import SimConfig, generate_dataset


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--noise", type=float, nargs="+", default=[3.0, 6.0, 10.0, 15.0],
                        help="noise sigma per participant")
    parser.add_argument("--per-state", type=int, default=20)
    parser.add_argument("--seed", type=int, default=100)
    parser.add_argument("--frames", type=int, default=400)
    parser.add_argument("--jitter", type=int, default=100, help="+/- spread of frame-set length")
    args = parser.parse_args()

    columns = {}
    for k, sigma in enumerate(args.noise):
        name = f"S{k + 1}"
        T = args.frames
        cfg = SimConfig(T=T, noise_sigma=sigma, seed=args.seed + k, move_window=(int(0.3 * T), int(0.7 * T)))
        ds = generate_dataset(cfg, args.per_state, (-args.jitter, args.jitter), participant=name)
        start = time.perf_counter()
        columns[name] = benchmark(ds).accuracies()
        print(f"{name}: noise sigma {sigma:g}, seed {cfg.seed}, {time.perf_counter() - start:.1f}s")
    print()
    print(render_table(columns))


if __name__ == "__main__":
    main()
