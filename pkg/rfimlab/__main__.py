import sys

from rfimlab.main import main

if __name__ == "__main__":
    sys.exit(main())
