import json
from enum import Enum
from fractions import Fraction

from src.exact_arith import ExtReal, format_ext, format_rational


# --- FORMATTING ---

def format_point(point) -> str:
    """Finite points print as their id, interval points as 'num/den'."""
    if isinstance(point, Fraction):
        return format_rational(point)
    return str(point)


def format_elapsed(seconds: float) -> str:
    """Formats 0.0123 as 12.3ms and 2.5 as 2.50s"""
    if seconds < 1:
        return f"{seconds * 1000:.1f}ms"
    return f"{seconds:.2f}s"


# --- JSON ---

def to_jsonable(obj):
    """
    Converts report content into plain JSON values.

    Exact values become strings ("num/den" or "inf"), sets and rectangles use
    their own to_json(), and containers are converted recursively. Nothing is
    ever turned into a float.
    """
    if obj is None or isinstance(obj, bool | int | str):
        return obj
    # Exact numbers first: they never reach json as numbers
    if isinstance(obj, ExtReal):
        return format_ext(obj)
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, Enum):
        return obj.name.lower()
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, Fraction) else format_rational(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list | tuple):
        return [to_jsonable(item) for item in obj]
    if isinstance(obj, float):
        raise TypeError("❌ Floats never appear in exact reports.")
    raise TypeError(f"❌ Cannot serialize {type(obj).__name__}")


def dumps(obj, pretty: bool = False) -> str:
    """Deterministic JSON: sorted keys, fixed separators."""
    if pretty:
        return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False)
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
