"""Allow running as `python -m freefam`."""

from .cli import main

if __name__ == "__main__":
    main()
