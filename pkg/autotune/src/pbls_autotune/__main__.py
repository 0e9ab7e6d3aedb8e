"""Run (or resume) a campaign from a JSON config file.

    python -m pbls_autotune --config campaign.json
"""

from __future__ import annotations

import argparse
import json
import sys

from .campaign import run_campaign
from .config import ConfigError, load_config


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="pbls-autotune")
    parser.add_argument("--config", required=True, help="path to a campaign JSON config")
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run_campaign(config)
    print(json.dumps(report, indent=2))
    return 0 if report["complete"] else 1


if __name__ == "__main__":
    sys.exit(main())
