"""Allow ``python -m frp_beam_designer check ...``."""

from .cli import main

if __name__ == "__main__":
    main(prog_name="frp-beam-designer")
