import sys

from astrid.cli import main

sys.exit(main())
