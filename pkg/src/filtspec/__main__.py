import sys

from filtspec.cli import main

sys.exit(main())
