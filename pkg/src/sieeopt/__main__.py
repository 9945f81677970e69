"""Command-line interface."""
from sieeopt.main import main


if __name__ == "__main__":
    main(prog_name="sieeopt")  # pragma: no cover
