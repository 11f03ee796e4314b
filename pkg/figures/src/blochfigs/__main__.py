"""Allow ``python -m blochfigs`` to reach the CLI."""

import sys

from .cli import main

sys.exit(main())
