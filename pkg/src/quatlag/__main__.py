import sys

from quatlag.cli.main import main

sys.exit(main())
