import sys

from nrsched.sim.cli import main

sys.exit(main())
