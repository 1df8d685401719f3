import sys

from tropcount.cli import main

sys.exit(main())
