import sys

from gtvkit.harness.cli import main

sys.exit(main())
