"""Guideline-based heart-failure treatment advisor.

A stable-model rule engine (parser, grounder, goal-directed solver with a
brute-force oracle, abduction, knowledge-pattern compiler) plus the chronic
heart failure knowledge base, a CLI, and an HTTP service.
"""

__version__ = "0.1.0"
