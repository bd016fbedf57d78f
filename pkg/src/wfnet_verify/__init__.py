"""Workflow-net soundness verification toolkit.

Core library (petri, wfnet, statespace, promela, netio), a FastAPI
service wrapping it, and a thin CLI client.
"""

__version__ = "0.1.0"
