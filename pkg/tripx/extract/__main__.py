import sys

from tripx.extract.cli import main

sys.exit(main())
