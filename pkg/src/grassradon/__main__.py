"""Allow ``python -m grassradon``."""

import sys

from .cli import main

sys.exit(main())
