#!/usr/bin/env python3
"""Launch the HTTP service from a checkout.

Same flags as the installed ``srkit-server`` command; see --help.
"""

from srkit.api.server import main

if __name__ == "__main__":
    raise SystemExit(main())
