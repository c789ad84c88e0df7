"""Run the parastep command line with ``python -m parastep``."""

import sys

from .cli import main

sys.exit(main())
