import sys

from toboggan.cli import main

if __name__ == '__main__':
    sys.exit(main())
