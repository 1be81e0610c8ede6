import sys

from boomerang.cli import main

sys.exit(main())
