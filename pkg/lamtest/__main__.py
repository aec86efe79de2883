import sys

from lamtest.cli import main

sys.exit(main())
