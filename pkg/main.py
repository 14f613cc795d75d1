import sys

from bessel_subord.cli.router import main

if __name__ == "__main__":
    sys.exit(main())
