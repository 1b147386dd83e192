import sys

from abforce.cli import main

sys.exit(main())
