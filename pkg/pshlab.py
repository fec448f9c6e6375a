"""
pshlab - Main Entry Point
Numerical laboratory for residual Monge-Ampere masses, Lelong numbers and energy
functionals of plurisubharmonic functions on the unit ball of C^2.

Run `python pshlab.py --help` for the subcommands.
"""

from src.cli import main

# ============================================================================
# Main Application
# ============================================================================

if __name__ == "__main__":
    raise SystemExit(main())
