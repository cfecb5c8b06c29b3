import sys

from apsieve.cli import main

sys.exit(main())
