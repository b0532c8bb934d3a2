import sys

from qlandauer.cli import main

sys.exit(main())
