"""Text syntax, rendering, structured documents and the command line."""

from .evaluate import EvalReport, evaluate, evaluate_at
from .parser import parse
from .render import render
from .serialize import deserialize, serialize

__all__ = ["EvalReport", "evaluate", "evaluate_at", "parse", "render", "serialize", "deserialize"]
