"""Entry point of `python -m factree` and the `factree` script."""
import sys

from factree import cli

# shell convention for a run stopped by SIGINT
EXIT_INTERRUPTED = 130

def main(argv=None):
    try:
        return cli.run(argv)
    except KeyboardInterrupt:
        return EXIT_INTERRUPTED

if __name__ == '__main__':
    sys.exit(main())
