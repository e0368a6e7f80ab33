"""
Main entry point for the calculator.

This script allows the CLI to be run directly from the project root,
ensuring that all package imports are resolved correctly.

Examples:
    python run.py fidelity --state squeezed --zeta0 0.5 --zeta 20 --t1 1 --t2 0.9
    python run.py figure 5 --format json --output fig5.json
    python run.py oracle-check
"""
import sys
import os

# Add the project root to the Python path to allow running from any directory
project_root = os.path.dirname(os.path.abspath(__file__))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from src.main import main

if __name__ == "__main__":
    main()
