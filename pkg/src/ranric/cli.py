"""Command line interface.

    ranric run <config.yaml> [--out DIR]
    ranric compare <run-dir> <run-dir> [...] [--out CSV]
    ranric serve-env <config.yaml> [--port N]

Exit codes: 0 ok, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from . import envserver, runner
from .scenario import ConfigError, load_scenario, output_dir


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ranric")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario and persist metrics")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="output directory (default runs/<name>)")

    p_cmp = sub.add_parser("compare", help="tabulate summaries of completed runs")
    p_cmp.add_argument("runs", nargs="+")
    p_cmp.add_argument("--out", default=None, help="write comparison CSV here")

    p_env = sub.add_parser("serve-env", help="serve the reset/step training endpoint")
    p_env.add_argument("config")
    p_env.add_argument("--port", type=int, default=None)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            config = load_scenario(args.config)
            out = args.out or (output_dir() / config.name)
            metrics = runner.run_scenario(config, out_dir=out)
            for k, v in metrics.summary().items():
                print(f"{k}: {v:.4f}" if isinstance(v, float) else f"{k}: {v}")
            print(f"metrics written to {out}")
        elif args.command == "compare":
            if len(args.runs) < 2:
                print("compare needs at least two runs", file=sys.stderr)
                return 1
            text = runner.compare(args.runs, out_path=args.out)
            print(runner.format_comparison(text))
        elif args.command == "serve-env":
            config = load_scenario(args.config)
            if config.mode != "logical":
                raise ConfigError("serve-env requires a logical-mode scenario")
            print(f"serving env for {config.name} on port "
                  f"{args.port or envserver.env_port()}", flush=True)
            envserver.serve(config, port=args.port)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
