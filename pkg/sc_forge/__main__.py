import sys

from sc_forge.cli import main

sys.exit(main())
