import os
import sys

# Make ``src`` importable when pytest is run from the repository root
sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))
