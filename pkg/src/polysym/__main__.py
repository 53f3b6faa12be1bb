import sys

from polysym.cli import main

sys.exit(main())
