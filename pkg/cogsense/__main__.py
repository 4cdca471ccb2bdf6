import sys

from cogsense.cli import main

sys.exit(main())
