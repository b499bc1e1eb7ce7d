import sys

from cidkit.cli import main

sys.exit(main())
