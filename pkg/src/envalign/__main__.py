"""Allow running the CLI as ``python -m envalign``."""

import sys

from .cli import main

sys.exit(main())
