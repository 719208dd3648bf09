import sys

from ctm.cli import main

sys.exit(main())
