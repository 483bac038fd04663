"""Allows `python -m refexp_grounder`."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import sys

from .cli import main

sys.exit(main())
