"""anonforge: an interactive k-anonymization workbench.

Greedy information-loss clustering with per-attribute importance weights, a
human-in-the-loop session protocol with deterministic replay, native
classifier evaluation, and a batch k-sweep pipeline.
"""

__version__ = "0.1.0"
