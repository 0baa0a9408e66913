import sys

from antforage.cli import main

sys.exit(main())
