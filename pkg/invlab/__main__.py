import sys

from invlab.main import main

sys.exit(main())
