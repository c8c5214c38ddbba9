"""``python -m qrelgauge`` and the ``qrelgauge`` console script."""

import sys

from .cli import main


def cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli()
